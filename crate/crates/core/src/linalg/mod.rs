//! Dense complex linear algebra: matrices, the matrix exponential, and the
//! Hermitian eigensolver that backs every spectral matrix function.

mod eigh;
mod expm;
mod matrix;

pub use eigh::{eigh, Eigh};
pub use expm::expm;
pub use matrix::Matrix;
