//! Exact computations on caps in `Z_n x Z_n`: point sets with no three
//! collinear points.
//!
//! * [`geometry`]: residues, lines, and the collinearity test.
//! * [`symmetry`]: the affine group acting on the plane, orbits and cuts.
//! * [`solvers`]: exact search for the maximum cap, the minimum complete cap,
//!   and the maximum cap inside a permutation.
//! * [`ilp`]: the 0-1 programs for the same three problems, in LP format.
//! * [`capfile`]: the point-set text format and the JSON result record.

pub mod capfile;
pub mod error;
pub mod geometry;
pub mod ilp;
pub mod solvers;
pub mod symmetry;

pub use error::{Result, ZcapError};
pub use geometry::{Factorization, Line, Plane, Point};
pub use solvers::{Cap, CapVariant, Problem, SearchOptions, SolveResult, Status, Value};
