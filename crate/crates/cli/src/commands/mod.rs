pub mod eval;
pub mod features;
pub mod tokenize;
