//! Dense kernels: products under a chosen roundoff, Householder QR,
//! Cholesky, triangular solves, a Hessenberg eigensolver and Jacobi SVD.

pub mod eig;
pub mod gemm;
pub mod qr;
pub mod svd;
pub mod triangular;

pub use eig::{eig, eigpair_residual, hessenberg_eig, hessenberg_reduce};
pub use gemm::{gemm, gemm_tn};
pub use qr::{householder_qr, householder_r, HouseholderQr};
pub use svd::{cond_estimate, singular_values};
pub use triangular::{cholesky, triangular_inverse, triangular_solve, Side};
