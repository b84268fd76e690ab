//! Numerical laboratory for the Dirichlet problem of the fractional
//! p-Laplacian in the degenerate regime p >= 2, together with the boundary
//! regularity diagnostics built on it: torsion estimates, comparison and Hopf
//! checks, explicit barriers, the nonlocal excess, and the weighted Hölder
//! decay of u / d^s measured over dyadic radii.
//!
//! The discrete model is a uniform Cartesian lattice over a box containing
//! the domain, nodal fields vanishing at exterior nodes, the all-pairs
//! Gagliardo energy with a cell-averaged kernel and an exact far-field
//! closure, and first-order convex minimization.

pub mod acceptance;
pub mod assemble;
pub mod barrier;
pub mod bump;
pub mod checks;
pub mod error;
pub mod flap;
pub mod geometry;
pub mod grid;
pub mod kernel;
pub mod opened;
pub mod quotient;
pub mod reference;
pub mod report;
pub mod series;
pub mod solver;
pub mod tail;
pub mod upper_barrier;

pub use assemble::Assembler;
pub use error::{FracError, Result};
pub use flap::{pointwise_flap_fn, superpose, FlapScheme};
pub use geometry::{Domain, NormalBall, Point};
pub use grid::{Field, FieldKind, Grid};
pub use quotient::{excess, holder_fit, oscillation, quotient, OscillationTrace, QuotientField};
pub use series::series_s;
pub use solver::{solve_dirichlet, solve_double_obstacle, solve_torsion, Obstacles, SolverConfig};
pub use tail::{tail, TailValue};
