pub mod bench;
pub mod classic;
pub mod error;
pub mod factor;
pub mod kernels;
pub mod krylov;
pub mod matrix;
pub mod precision;
pub mod rbgs;
pub mod sketch;

pub use classic::{classic_bgs, ClassicBgs, ClassicBgsConfig, ClassicInterblock, ClassicVariant};
pub use error::{Error, Result};
pub use factor::{BlockQR, CertReport};
pub use krylov::{ArnoldiDecomposition, KrylovSolveReport, LinearOperator};
pub use matrix::{BlockPartition, Matrix};
pub use precision::{Precision, PrecisionMode, U_COARSE, U_FINE};
pub use rbgs::{rbgs, Interblock, LsSolver, Rbgs, RbgsConfig};
pub use sketch::{SketchKind, SketchOperator};
