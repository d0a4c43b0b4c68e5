use nalgebra::DMatrix;

use crate::error::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-4;

/// Per-layer, per-head square attention matrices over `N + 1` tokens.
#[derive(Clone, Debug)]
pub struct AttentionStack {
    layers: Vec<Vec<DMatrix<f64>>>,
    class_index: usize,
}

impl AttentionStack {
    /// Every matrix must be square of one common size, non-negative and
    /// row-stochastic within `1e-4`.
    pub fn new(layers: Vec<Vec<DMatrix<f64>>>, class_index: usize) -> Result<Self> {
        let n = layers
            .first()
            .and_then(|l| l.first())
            .map(|m| m.nrows())
            .ok_or_else(|| Error::Shape("attention stack is empty".into()))?;
        for (i, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::Shape(format!("layer {i} has no heads")));
            }
            for (h, m) in layer.iter().enumerate() {
                if m.shape() != (n, n) {
                    return Err(Error::Shape(format!(
                        "layer {i} head {h} is {:?}, expected {n}x{n}",
                        m.shape()
                    )));
                }
                if m.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "layer {i} head {h} has a negative or non-finite entry"
                    )));
                }
                for (r, row) in m.row_iter().enumerate() {
                    let s = row.sum();
                    if (s - 1.0).abs() > ROW_TOLERANCE {
                        return Err(Error::InvalidParameter(format!(
                            "layer {i} head {h} row {r} sums to {s}"
                        )));
                    }
                }
            }
        }
        if class_index >= n {
            return Err(Error::InvalidParameter(format!(
                "class index {class_index} out of range for {n} tokens"
            )));
        }
        Ok(Self { layers, class_index })
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn n_tokens(&self) -> usize {
        self.layers[0][0].nrows()
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn layers(&self) -> &[Vec<DMatrix<f64>>] {
        &self.layers
    }
}

/// Elementwise max over heads, rows renormalized to sum 1.
pub fn aggregate_heads(heads: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut agg = heads[0].clone();
    for h in &heads[1..] {
        agg.zip_apply(h, |a, b| *a = a.max(b));
    }
    for mut row in agg.row_iter_mut() {
        let s = row.sum();
        if s > 0.0 {
            row /= s;
        }
    }
    agg
}

/// `M_l ... M_2 M_1` with `M_i = (1 - lambda) I + lambda A_i`, where `A_i`
/// is the head-aggregated attention of layer `i` (first layer rightmost).
pub fn attention_flow(stack: &AttentionStack, lambda: f64) -> Result<DMatrix<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must lie in [0, 1]")));
    }
    let n = stack.n_tokens();
    let eye = DMatrix::<f64>::identity(n, n);
    let mut flow = eye.clone();
    for layer in &stack.layers {
        let m = &eye * (1.0 - lambda) + aggregate_heads(layer) * lambda;
        flow = m * flow;
    }
    Ok(flow)
}

/// Row `class_index` of `flow` without its own column.
pub fn class_attribution(flow: &DMatrix<f64>, class_index: usize) -> Result<Vec<f64>> {
    if class_index >= flow.nrows() || flow.nrows() != flow.ncols() {
        return Err(Error::InvalidParameter(format!(
            "class index {class_index} out of range for a {:?} flow matrix",
            flow.shape()
        )));
    }
    Ok(flow
        .row(class_index)
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != class_index)
        .map(|(_, &v)| v)
        .collect())
}
