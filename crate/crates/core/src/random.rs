//! Seeded random generators for tuples, pencils and points of free
//! spectrahedra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, c, CMat, C64};
use crate::pencil::LinearPencil;
use crate::tuples::{Field, MatrixTuple};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for sub-task `index` of a seeded job.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize, field: Field) -> CMat {
    CMat::from_fn(rows, cols, |_, _| match field {
        Field::Real => c(normal(rng)),
        Field::Complex => C64::new(normal(rng), normal(rng)) * c(std::f64::consts::FRAC_1_SQRT_2),
    })
}

/// Hermitian matrix from the Gaussian ensemble (GOE/GUE scaling).
pub fn hermitian(rng: &mut impl Rng, n: usize, field: Field) -> CMat {
    linalg::symmetrize(&gaussian_matrix(rng, n, n, field))
}

pub fn hermitian_tuple(rng: &mut impl Rng, g: usize, n: usize, field: Field) -> MatrixTuple {
    let mats = (0..g).map(|_| hermitian(rng, n, field)).collect();
    MatrixTuple::new(field, n, mats).expect("hermitian by construction")
}

/// Haar-distributed orthogonal or unitary matrix.
pub fn unitary(rng: &mut impl Rng, n: usize, field: Field) -> CMat {
    let g = gaussian_matrix(rng, n, n, field);
    let qr = g.qr();
    let (q, r) = qr.unpack();
    let phases = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() == 0.0 {
                c(1.0)
            } else {
                d / c(d.norm())
            }
        }),
    ));
    q * phases
}

/// Unit vector in `F^n`.
pub fn unit_vector(rng: &mut impl Rng, n: usize, field: Field) -> CMat {
    let v = gaussian_matrix(rng, n, 1, field);
    let nrm = v.norm();
    v / c(nrm)
}

/// Random real pencil with `g` coefficients of size `m`, resampled until
/// its free spectrahedron passes the level-1 boundedness gate.
///
/// Panics when `g >= m(m+1)/2`: the coefficients then span a space that
/// always meets the PSD cone, so no such pencil is bounded.
pub fn bounded_pencil(rng: &mut impl Rng, g: usize, m: usize) -> LinearPencil {
    assert!(g < m * (m + 1) / 2, "no bounded real pencil with g = {g}, m = {m}");
    loop {
        let a = hermitian_tuple(rng, g, m, Field::Real);
        let p = LinearPencil::new(a).expect("valid coefficients");
        if p.is_bounded_level1() {
            return p;
        }
    }
}

/// Where to place a sampled point along its ray from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Boundary,
    Interior,
    /// Boundary with probability one half, otherwise interior.
    Mixed,
}

/// Largest `t` with `tD ∈ D_A`, or `None` if the ray never leaves.
pub fn boundary_scale(pencil: &LinearPencil, dir: &MatrixTuple) -> Option<f64> {
    let lam = pencil.lambda(dir).ok()?;
    let top = linalg::herm_eigen(&lam).max();
    (top > 1e-14).then(|| 1.0 / top)
}

/// Random point of `D_A(n)` obtained by scaling a random hermitian
/// direction along its ray from the origin.
pub fn point(rng: &mut impl Rng, pencil: &LinearPencil, n: usize, field: Field, place: Placement) -> MatrixTuple {
    loop {
        let dir = hermitian_tuple(rng, pencil.g(), n, field);
        let Some(t_max) = boundary_scale(pencil, &dir) else { continue };
        let boundary = match place {
            Placement::Boundary => true,
            Placement::Interior => false,
            Placement::Mixed => rng.random_bool(0.5),
        };
        let t = if boundary { t_max } else { t_max * rng.random_range(0.05..0.95) };
        return dir.scale(t);
    }
}
