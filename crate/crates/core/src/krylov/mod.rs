//! Block Krylov methods built on block Gram-Schmidt.

pub mod arnoldi;
pub mod gmres;
pub mod operator;
pub mod ritz;
pub mod sstep;

pub use arnoldi::{classic_arnoldi, classic_arnoldi_with, rbgs_arnoldi, rbgs_arnoldi_with, ArnoldiDecomposition, ArnoldiOptions};
pub use gmres::{block_fom, block_gmres, classic_block_gmres, GmresOptions, KrylovSolveReport};
pub use operator::{Composed, CsrMatrix, DenseOperator, IdentityOperator, LinearOperator, ShiftSign, Shifted};
pub use ritz::{classic_rayleigh_ritz, rayleigh_ritz, rayleigh_ritz_l2, ritz_residual_norms, subspace_iteration, RitzResult, RitzStep, SubspaceResult};
pub use sstep::{power_basis, sstep_arnoldi, PolyBasis};
