use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::features::TokenFeatures;
use crate::tokenizer::PartitionLevel;

pub const DEFAULT_TAU: f64 = 1.0 / 3.0;
pub const DEFAULT_EPSILON: f64 = 1e-5;

const EIGENGAP_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyResult {
    /// Standardized second eigenvector, one entry per token.
    pub fiedler: Vec<f64>,
    /// Per-token foreground flag.
    pub foreground: Vec<bool>,
    /// Per-pixel foreground flag.
    pub mask: Vec<bool>,
}

/// Cosine-similarity graph binarized at `tau`: 1 where `cos >= tau`, else
/// `epsilon`. Zero rows have similarity 0 to everything but themselves.
pub fn tokencut_adjacency(rows: &DMatrix<f64>, tau: f64, epsilon: f64) -> DMatrix<f64> {
    let mut unit = rows.clone();
    for mut r in unit.row_iter_mut() {
        let n = r.norm();
        if n > 0.0 {
            r /= n;
        }
    }
    let n = unit.nrows();
    let cos = &unit * unit.transpose();
    DMatrix::from_fn(n, n, |i, j| if i == j || cos[(i, j)] >= tau { 1.0 } else { epsilon })
}

/// Spectral bipartition of a symmetric non-negative affinity matrix: the
/// sign of the standardized second generalized eigenvector of
/// `(D - A) y = lambda D y`. Returns the standardized vector.
pub fn fiedler_vector(adjacency: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = adjacency.nrows();
    if n < 2 || adjacency.ncols() != n {
        return Err(Error::Shape(format!(
            "need a square affinity of at least 2 tokens, got {:?}",
            adjacency.shape()
        )));
    }
    let degree: Vec<f64> = adjacency.row_iter().map(|r| r.sum()).collect();
    if degree.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Degenerate("a token has zero degree".into()));
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
    let lap = DMatrix::from_fn(n, n, |i, j| {
        let l = if i == j { degree[i] } else { 0.0 } - adjacency[(i, j)];
        l * inv_sqrt[i] * inv_sqrt[j]
    });
    let eig = SymmetricEigen::new(lap);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let (l2, idx) = (eig.eigenvalues[order[1]], order[1]);
    if (l2 - eig.eigenvalues[order[0]]).abs() < EIGENGAP_TOLERANCE
        || (n > 2 && (eig.eigenvalues[order[2]] - l2).abs() < EIGENGAP_TOLERANCE)
    {
        return Err(Error::Degenerate(
            "second eigenvalue is not simple; the bipartition is undefined".into(),
        ));
    }
    let z = eig.eigenvectors.column(idx);
    let y: DVector<f64> = DVector::from_fn(n, |i, _| z[i] * inv_sqrt[i]);
    let mean = y.mean();
    let std = (y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
    if !(std > 0.0) {
        return Err(Error::Degenerate("second eigenvector is constant".into()));
    }
    let mut f: Vec<f64> = y.iter().map(|v| (v - mean) / std).collect();
    if f.iter().find(|v| v.abs() > 1e-12).is_some_and(|&v| v < 0.0) {
        for v in &mut f {
            *v = -*v;
        }
    }
    Ok(f)
}

/// Normalized cut `cut(A, B) / assoc(A) + cut(A, B) / assoc(B)` of the
/// split `side`.
pub fn normalized_cut(adjacency: &DMatrix<f64>, side: &[bool]) -> f64 {
    let n = adjacency.nrows();
    let (mut cut, mut assoc_a, mut assoc_b) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let w = adjacency[(i, j)];
            if side[i] {
                assoc_a += w;
            } else {
                assoc_b += w;
            }
            if side[i] && !side[j] {
                cut += w;
            }
        }
    }
    if assoc_a == 0.0 || assoc_b == 0.0 {
        return f64::INFINITY;
    }
    cut / assoc_a + cut / assoc_b
}

/// Exhaustive minimum normalized cut over all nontrivial splits (token 0
/// always on the `true` side). Only for small `n`.
pub fn min_normalized_cut_bruteforce(adjacency: &DMatrix<f64>) -> Result<Vec<bool>> {
    let n = adjacency.nrows();
    if !(2..=20).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "brute force needs 2..=20 tokens, got {n}"
        )));
    }
    let mut best = (f64::INFINITY, vec![]);
    for bits in 0u32..(1 << (n - 1)) - 1 {
        let side: Vec<bool> = (0..n).map(|i| i == 0 || bits >> (i - 1) & 1 == 1).collect();
        let c = normalized_cut(adjacency, &side);
        if c < best.0 {
            best = (c, side);
        }
    }
    Ok(best.1)
}

/// Foreground/background split of the tokens by the normalized-cut
/// relaxation on binarized cosine similarities of their features. The
/// foreground is the side touching fewer image-border pixels; ties go to
/// the smaller side, then to the positive side.
pub fn tokencut(
    features: &TokenFeatures,
    partition: &PartitionLevel,
    tau: f64,
    epsilon: f64,
) -> Result<SaliencyResult> {
    if features.n_tokens() != partition.n_regions() {
        return Err(Error::Shape(format!(
            "{} feature rows for {} regions",
            features.n_tokens(),
            partition.n_regions()
        )));
    }
    if !tau.is_finite() || !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "invalid tau {tau} or epsilon {epsilon}"
        )));
    }
    let adjacency = tokencut_adjacency(&features.to_matrix(), tau, epsilon);
    let fiedler = fiedler_vector(&adjacency)?;
    let positive: Vec<bool> = fiedler.iter().map(|&v| v > 0.0).collect();

    let (h, w) = (partition.height(), partition.width());
    let (mut border, mut size) = ([0usize; 2], [0usize; 2]);
    for (i, &l) in partition.labels().iter().enumerate() {
        let side = positive[l as usize] as usize;
        size[side] += 1;
        let (y, x) = (i / w, i % w);
        if y == 0 || x == 0 || y + 1 == h || x + 1 == w {
            border[side] += 1;
        }
    }
    let fg_positive = (border[1], size[1]) <= (border[0], size[0]);
    let foreground: Vec<bool> = positive.iter().map(|&p| p == fg_positive).collect();
    let mask = partition.labels().iter().map(|&l| foreground[l as usize]).collect();
    Ok(SaliencyResult {
        fiedler,
        foreground,
        mask,
    })
}
