//! Randomized brute-force falsifiers used to cross-check the linear-system
//! tests. Negative results are evidence, not proof.

use rand::Rng;
use serde::Serialize;

use crate::dilation::one_dilation;
use crate::error::{Error, Result};
use crate::linalg::{self, c, null_space_real, CMat};
use crate::pencil::{mconv_certificate, membership, LinearPencil, Status};
use crate::random::{self, Placement};
use crate::tol::Tolerances;
use crate::tuples::{apply_combination, unitarily_equivalent, Field, MatrixConvexCombination, MatrixTuple};

#[derive(Debug, Clone)]
pub enum Witness {
    /// A dilation `[[X, β], [β^*, ψ]] ∈ D_A` with `β ≠ 0`.
    Dilation { beta: Vec<CMat>, psi: Vec<f64>, point: MatrixTuple },
    /// A proper matrix convex combination of points not equivalent to `X`.
    Combination(MatrixConvexCombination),
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub found: bool,
    #[serde(skip)]
    pub witness: Option<Witness>,
    pub trials: usize,
    /// Largest `λ_min` reached over all candidates (dilation search), or
    /// best Choi margin (refutation search).
    pub best_violation: f64,
    /// True when `found` is false: the search is evidence only.
    pub evidence_only: bool,
}

impl SearchReport {
    fn done(found: bool, witness: Option<Witness>, trials: usize, best: f64) -> Self {
        Self { found, witness, trials, best_violation: best, evidence_only: !found }
    }
}

/// Acceptance threshold for a candidate dilation.
const DILATION_SLACK: f64 = 1e-10;

/// Kernel of `L_A(X)` for the oracle: eigenvectors with eigenvalue below
/// `1e-6 * max(1, λ_max)`, deliberately looser than the tests' threshold.
fn loose_kernel(l: &CMat) -> CMat {
    let e = linalg::herm_eigen(l);
    let thr = 1e-6 * e.max().max(1.0);
    e.select(|v| v <= thr)
}

/// Real columns `β` with `Λ_A(β^*) K ≈ 0`, from an independent SVD.
fn loose_subspace(pencil: &LinearPencil, x: &MatrixTuple, k: &CMat) -> Vec<Vec<f64>> {
    let (g, n) = (pencil.g(), x.n());
    if k.ncols() == 0 {
        return (0..g * n).map(|i| (0..g * n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    }
    let mut cols = Vec::with_capacity(g * n);
    for a in pencil.coefficients().matrices() {
        for p in 0..n {
            let mut e = CMat::zeros(1, n);
            e[(0, p)] = c(1.0);
            let v = a.kronecker(&e) * k;
            let mut col = Vec::new();
            linalg::push_real_coords(&v, true, &mut col);
            cols.push(col);
        }
    }
    let ns = null_space_real(&linalg::columns_to_real(&cols), 1e-6);
    (0..ns.dim()).map(|j| ns.basis.column(j).iter().copied().collect()).collect()
}

/// Random search for a nontrivial one-step dilation of `X` inside `D_A`.
///
/// Each trial draws `β` either uniformly on the unit sphere of `R^{ng}` or
/// from an independently computed (loose) dilation subspace, a `ψ` that is
/// zero or a random point of `D_A(1)`, and tries scales
/// `α ∈ {0.5, 0.1, 0.05}`. Real pencils and points only.
pub fn search_nontrivial_dilation(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SearchReport> {
    if pencil.field() != Field::Real || !x.has_real_entries() {
        return Err(Error::FieldUnsupported);
    }
    let x = x.with_field(Field::Real)?;
    let (g, n) = (pencil.g(), x.n());
    let l = pencil.evaluate(&x)?;
    let k = loose_kernel(&l);
    let sub = loose_subspace(pencil, &x, &k);
    let mut rng = random::rng(seed);
    let mut best = f64::NEG_INFINITY;
    for trial in 0..trials {
        let dir: Vec<f64> = if !sub.is_empty() && rng.random_bool(0.5) {
            let mut v = vec![0.0; g * n];
            for b in &sub {
                let w = random::normal(&mut rng);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += w * bi;
                }
            }
            v
        } else {
            (0..g * n).map(|_| random::normal(&mut rng)).collect()
        };
        let nrm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm == 0.0 {
            continue;
        }
        let beta: Vec<CMat> = (0..g).map(|j| CMat::from_fn(n, 1, |p, _| c(dir[j * n + p] / nrm))).collect();
        let psi: Vec<f64> = if rng.random_bool(0.5) {
            vec![0.0; g]
        } else {
            let p = random::point(&mut rng, pencil, 1, Field::Real, Placement::Interior);
            p.as_scalars().expect("level 1")
        };
        for alpha in [0.5, 0.1, 0.05] {
            let b: Vec<CMat> = beta.iter().map(|m| m * c(alpha)).collect();
            let y = one_dilation(&x, &b, &psi)?;
            let lam = linalg::min_eig(&pencil.evaluate(&y)?);
            best = best.max(lam);
            if lam >= -DILATION_SLACK.min(tol.feas) {
                return Ok(SearchReport::done(
                    true,
                    Some(Witness::Dilation { beta: b, psi: psi.clone(), point: y }),
                    trial + 1,
                    best,
                ));
            }
        }
    }
    Ok(SearchReport::done(false, None, trials, best))
}

/// Random search for a proper matrix convex combination of boundary points
/// of levels `<= n`, none unitarily equivalent to `X`, that equals `X`.
///
/// Each trial samples two or three boundary points (half of them along
/// rays near `X` at level one), and solves the Choi feasibility problem for
/// `X ∈ mconv(Z_1 ⊕ .. ⊕ Z_k)`; a Kraus witness whose blocks are all onto
/// refutes matrix extremeness.
pub fn refute_matrix_extreme(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SearchReport> {
    let n = x.n();
    if n > 3 {
        return Err(Error::LevelTooLarge(n));
    }
    if n == 0 {
        return Err(Error::DimensionMismatch("empty tuple".into()));
    }
    if membership(pencil, x, tol)?.status == Status::Outside {
        return Err(Error::OutsideDomain(linalg::min_eig(&pencil.evaluate(x)?)));
    }
    let field = pencil.field().join(x.field());
    let mut rng = random::rng(seed);
    let mut best = f64::NEG_INFINITY;
    let delta = 1e-3;
    for trial in 0..trials {
        let count = rng.random_range(2..=3usize);
        let mut pts: Vec<MatrixTuple> = Vec::new();
        let mut budget = 2 * n + 1;
        while pts.len() < count && budget > 0 {
            let level = rng.random_range(1..=n.min(budget));
            let z = if level == n && rng.random_bool(0.5) {
                near_boundary_point(&mut rng, pencil, x, field)
            } else {
                random::point(&mut rng, pencil, level, field, Placement::Boundary)
            };
            if z.n() == n && (z.distance(x) < delta || unitarily_equivalent(&z, x, tol)) {
                continue;
            }
            budget -= level;
            pts.push(z);
        }
        if pts.len() < 2 {
            continue;
        }
        let mut sum = pts[0].clone();
        for z in &pts[1..] {
            sum = sum.direct_sum(z)?;
        }
        let cert = mconv_certificate(&sum, x, tol)?;
        best = best.max(cert.margin);
        let Some(comb) = cert.combination else { continue };
        // split each Kraus operator along the direct-sum blocks
        let mut terms = Vec::new();
        let mut onto = true;
        for (v, _) in comb.terms() {
            let mut off = 0;
            for z in &pts {
                let block = v.rows(off, z.n()).into_owned();
                off += z.n();
                if block.norm() <= 1e-9 {
                    continue;
                }
                onto &= crate::tuples::numerical_rank(&block, 1e-8) == block.nrows();
                terms.push((block, z.clone()));
            }
        }
        if !onto || terms.is_empty() {
            continue;
        }
        let split = MatrixConvexCombination::new(terms, n)?;
        if verify_combination(&split, x, &Tolerances { comb: 1e-6, ..*tol }) {
            return Ok(SearchReport::done(true, Some(Witness::Combination(split)), trial + 1, best));
        }
    }
    Ok(SearchReport::done(false, None, trials, best))
}

/// Boundary point along a ray close to the ray through `X`.
fn near_boundary_point(rng: &mut random::SeededRng, pencil: &LinearPencil, x: &MatrixTuple, field: Field) -> MatrixTuple {
    loop {
        let eps = rng.random_range(0.02..1.0);
        let noise = random::hermitian_tuple(rng, pencil.g(), x.n(), field);
        let dir = x.linear_combination(1.0, &noise, eps).expect("same shape");
        if let Some(t) = random::boundary_scale(pencil, &dir) {
            return dir.scale(t);
        }
    }
}

/// `sum γ_i^* γ_i = I` within `tol.comb` and `sum γ_i^* X^i γ_i = X` within
/// `tol.reconstruct * (1 + |X|)`.
pub fn verify_combination(comb: &MatrixConvexCombination, x: &MatrixTuple, tol: &Tolerances) -> bool {
    if comb.target_dim() != x.n() || comb.normalization_error() > tol.comb {
        return false;
    }
    match apply_combination(comb, tol) {
        Ok(y) => y.g() == x.g() && y.distance(x) <= tol.reconstruct * (1.0 + x.norm()),
        Err(_) => false,
    }
}
