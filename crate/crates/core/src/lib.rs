//! Pseudo-Hermiticity and PT-symmetry analysis for finite-dimensional Hamiltonians.
//!
//! The crate decides whether a Hamiltonian `H` is PT-symmetric (`P H̄ = H P`) or
//! pseudo-Hermitian (`H† G = G H` for some nonsingular Hermitian `G`), builds such a
//! metric `G` from a numerical Jordan decomposition, classifies eigenvalues by their
//! Krein signature and tracks symmetry-breaking collisions across one-parameter
//! families.
//!
//! Module map:
//!
//! * [`linalg`]: the [`ComplexMatrix`] type, tolerances, inertia and the time propagator.
//! * [`jordan`]: eigenvalue clustering and the rank-staircase Jordan decomposition.
//! * [`metric`]: PT and pseudo-Hermiticity checks, metric construction, G-Hamiltonian split
//!   and the generalized parity solver.
//! * [`krein`]: Krein products, eigenvalue kinds, strong stability and parameter sweeps.
//! * [`kh`]: the closed-form Kelvin–Helmholtz two-layer shear-flow family.
//! * [`ensemble`]: seeded random generators used by the property suites and the CLI.

pub mod ensemble;
pub mod error;
pub mod jordan;
pub mod kh;
pub mod krein;
pub mod linalg;
pub mod metric;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Inertia, Tolerance};

pub use num_complex::Complex64;
