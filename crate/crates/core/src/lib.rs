//! Numerical toolkit for free spectrahedra `D_A = {X : L_A(X) ⪰ 0}`:
//! membership, classical / matrix / free extreme-point tests, and the
//! decomposition of points of bounded real free spectrahedra into matrix
//! convex combinations of free extreme points via maximal 1-dilations.

pub mod dilation;
pub mod error;
pub mod examples;
pub mod extreme;
pub mod json;
pub mod linalg;
pub mod oracles;
pub mod pencil;
pub mod random;
pub mod solver;
pub mod tol;
pub mod tuples;

pub use error::{Error, ErrorKind, Result};
pub use pencil::{LinearPencil, MembershipVerdict, Status};
pub use solver::{AffinePencil, SolveStatus, SolverOptions};
pub use tol::Tolerances;
pub use tuples::{Field, MatrixConvexCombination, MatrixTuple};
