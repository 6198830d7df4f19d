//! Numerical analysis of phase retrieval (PR) and stable phase retrieval
//! (SPR) for subspaces of finite-dimensional real and complex Banach
//! lattices.

pub mod builders;
pub mod error;
pub mod gallery;
pub mod hilbert;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod phase;
pub mod search;

mod optim;

pub use error::{Error, Result};
pub use io::{load_problem, Problem, ProblemFile};
pub use lattice::{Ambient, CplxVec, Exponent, Field, NormSpec, RealVec};
pub use num_complex::Complex64;
