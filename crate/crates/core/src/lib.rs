//! Exact and numerical verification of the BKP integrable structure of
//! Kontsevich-type matrix models with an external field and arbitrary
//! polynomial potential.
//!
//! The crate is organised around five subsystems:
//!
//! - [`algebra`] — arbitrary-precision rationals, sparse weight-graded
//!   polynomials in odd time variables, Laurent polynomials in an auxiliary
//!   variable `z`, and combinatorial enumerators (strict partitions, set
//!   partitions, perfect matchings).
//! - [`qschur`] — Schur Q-functions in the BKP time convention, their
//!   specialisations, the Cauchy identity, the hook-ratio formula and
//!   Gaussian averages.
//! - [`gaussmoments`] — an exact Wick-calculus oracle for moments and
//!   cumulants of the Gaussian measure with external field.
//! - [`hirota`] — tau-function truncations, Hirota operator evaluation, the
//!   explicit degree-6/8 BKP equations and the bilinear residue identity.
//! - [`pvquad`] — the numerical side: Cauchy principal-value double
//!   integrals, floating-point Pfaffians, the Pfaffian partition-function
//!   formula, the direct eigenvalue integral and a Monte Carlo cross-check.
//!
//! Everything symbolic is exact (`BigRational` coefficients); everything
//! numerical is 64-bit floating point with explicit tolerances.

pub mod algebra;
pub mod gaussmoments;
pub mod hirota;
pub mod pvquad;
pub mod qschur;

pub use algebra::laurent::LaurentInZ;
pub use algebra::partitions::{SetPartition, StrictPartition};
pub use algebra::poly::{Monomial, OddPolynomial, Var, VarFamily};
pub use algebra::rational::Rational;
pub use gaussmoments::{MomentRequest, PotentialSpec, SpectralData};
pub use hirota::{HirotaPolynomial, TauSeries};
pub use pvquad::{KernelSpec, QuadConfig, SkewMatrix};
pub use qschur::QFunction;
