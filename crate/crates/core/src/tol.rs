//! Numerical thresholds shared by every module.

use serde::{Deserialize, Serialize};

/// Tolerances for rank, feasibility and kernel decisions.
///
/// Absolute thresholds: `feas`, `comb`, `alpha`. Relative thresholds
/// (scaled by the largest eigenvalue or singular value of the object being
/// tested, floored at one where noted): `sym`, `ker`, `rank`, `block`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermitian deviation accepted (and symmetrized away) on construction.
    pub sym: f64,
    /// Deviation of `sum gamma_i^* gamma_i` from the identity.
    pub comb: f64,
    /// Singular values below `rank * sigma_max` count as zero.
    pub rank: f64,
    /// Absolute slack for positive semidefiniteness of `L_A(X)`.
    pub feas: f64,
    /// Kernel and null-space threshold, relative.
    pub ker: f64,
    /// Off-block residual accepted after block diagonalization, relative.
    pub block: f64,
    /// Resolution of the dilation scale search.
    pub alpha: f64,
    /// Margin stall for the iterative spectral solvers.
    pub solver: f64,
    /// Reconstruction residual for decompositions, relative to `1 + |X|`.
    pub reconstruct: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sym: 1e-10,
            comb: 1e-8,
            rank: 1e-10,
            feas: 1e-7,
            ker: 1e-8,
            block: 1e-8,
            alpha: 1e-6,
            solver: 1e-9,
            reconstruct: 1e-6,
        }
    }
}

impl Tolerances {
    /// Trace comparison threshold for word traces of magnitude up to `scale`.
    pub fn trace(&self, scale: f64) -> f64 {
        1e-8 * (1.0 + scale)
    }

    pub fn with_feas(mut self, feas: f64) -> Self {
        self.feas = feas;
        self
    }

    pub fn with_ker(mut self, ker: f64) -> Self {
        self.ker = ker;
        self
    }
}
