//! Oblivious subspace embeddings: Rademacher, SRHT and the identity.

pub mod embedding;
pub mod fwht;
pub mod operator;

pub use embedding::{
    check_embedding, distortion, min_sketch_dim, operator_norm_bound_check, EmbeddingParams,
};
pub use fwht::fwht;
pub use operator::{SketchKind, SketchOperator};
