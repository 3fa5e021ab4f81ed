//! Lower bounds on parameter-estimation variance for finite-dimensional
//! quantum states evolving under unitary (von Neumann) dynamics.
//!
//! The state is carried as its matrix square root `xi = sqrt(rho)`, a point on
//! the unit sphere of the Hilbert-Schmidt geometry. Time derivatives of `xi`
//! form a chain of Hermitian matrices whose norms (`mu_2n`) and Gram
//! determinants (`D_2n`) produce a hierarchy of Bhattacharyya-type corrections
//! to the order-one uncertainty product
//!
//! ```text
//! (Var[T] + delta^2 T) * (Var[H] - delta^2 H) >= 1/4 * sum_k mu_2 U_k^2 / N_k
//! ```
//!
//! where `delta^2 X = tr(X xi X xi) - tr(X xi xi)^2` is the second-kind
//! covariance of the embedding and `Var[X] - delta^2 X` is the Wigner-Yanase
//! skew information. The crate provides:
//!
//! - [`matcore`]: dense complex-matrix kernel (Hermitian certification,
//!   eigendecomposition, matrix square root, commutators, evolution),
//! - [`states`]: density matrices, square-root embeddings, truncated
//!   conjugate pairs, seeded random ensembles,
//! - [`statmoments`]: means, variances, skew information, derivative chains
//!   and their even moments,
//! - [`bounds`]: Gram determinants, the recursion for the correction
//!   coefficients, cumulative bound reports, conjugation diagnostics,
//! - [`oracle`]: an independent Gram-Schmidt route used to validate the
//!   determinant formulas and the projection-sum bound,
//! - [`problem`] / [`report`]: a versioned JSON problem format and the
//!   compute pipeline over a time grid,
//! - [`verify`]: the randomized property suite behind `qcrb verify`.

pub mod bounds;
pub mod error;
pub mod matcore;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod states;
pub mod statmoments;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
