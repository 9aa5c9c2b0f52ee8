//! Maximal 1-dilations, the dilation-subspace descent loop, block
//! diagonalization into irreducible summands, and extraction of a matrix
//! convex combination of free extreme points.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreme::{dilation_subspace, free_extreme_test};
use crate::linalg::{self, c, CMat};
use crate::pencil::{membership, LinearPencil, Status};
use crate::random;
use crate::solver::{extreme_point_of_spectrahedron, maximize_alpha, SolverOptions};
use crate::tol::Tolerances;
use crate::tuples::{apply_combination, Field, MatrixConvexCombination, MatrixTuple};

/// `Ŷ = [[X, β̂], [β̂^*, ψ̂]]` with `β̂` scaled to the feasibility frontier
/// and `ψ̂` extreme in `Γ_{X,β̂}`.
#[derive(Debug, Clone, Serialize)]
pub struct DilationCandidate {
    #[serde(skip)]
    pub beta_hat: Vec<CMat>,
    pub psi_hat: Vec<f64>,
    #[serde(skip)]
    pub y_hat: MatrixTuple,
    /// Scale applied to the chosen unit-norm subspace direction.
    pub alpha: f64,
    pub dim_before: usize,
    pub dim_after: usize,
}

#[derive(Debug, Clone, Default)]
pub struct DilationOptions {
    pub solver: SolverOptions,
    /// Seed for the fallback direction and for block diagonalization.
    pub seed: u64,
    /// Block-diagonalize a reducible input before dilating.
    pub presplit: bool,
}

fn real_point(pencil: &LinearPencil, x: &MatrixTuple) -> Result<MatrixTuple> {
    if pencil.field() != Field::Real || !x.has_real_entries() {
        return Err(Error::FieldUnsupported);
    }
    x.with_field(Field::Real)
}

/// Stacks `[[X_j, β_j], [β_j^*, ψ_j]]`.
pub fn one_dilation(x: &MatrixTuple, beta: &[CMat], psi: &[f64]) -> Result<MatrixTuple> {
    let n = x.n();
    let mats = x
        .matrices()
        .iter()
        .zip(beta)
        .zip(psi)
        .map(|((xj, bj), &pj)| {
            let mut m = CMat::zeros(n + 1, n + 1);
            m.view_mut((0, 0), (n, n)).copy_from(xj);
            m.view_mut((0, n), (n, 1)).copy_from(bj);
            m.view_mut((n, 0), (1, n)).copy_from(&bj.adjoint());
            m[(n, n)] = c(pj);
            m
        })
        .collect();
    MatrixTuple::new(x.field(), n + 1, mats)
}

/// One maximal 1-dilation of `X`, asserting that the dilation subspace
/// strictly shrinks. A failed assertion is retried once with `tol.ker`
/// tightened tenfold before surfacing as [`Error::DescentFailure`].
pub fn maximal_one_dilation(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    tol: &Tolerances,
    opts: &DilationOptions,
) -> Result<DilationCandidate> {
    let x = real_point(pencil, x)?;
    match dilate_once(pencil, &x, tol, opts) {
        Err(Error::DescentFailure { .. }) => {
            let tight = tol.with_ker(tol.ker * 0.1);
            log::debug!("dilation subspace did not shrink; retrying with ker = {:e}", tight.ker);
            dilate_once(pencil, &x, &tight, opts)
        }
        other => other,
    }
}

fn dilate_once(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances, opts: &DilationOptions) -> Result<DilationCandidate> {
    let sub = dilation_subspace(pencil, x, tol)?;
    let before = sub.dim();
    if before == 0 {
        return Err(Error::AlreadyMaximal);
    }
    let mut rng = random::rng(random::derive_seed(opts.seed, (x.n() * 1000 + before) as u64));
    let mut beta = sub.basis[0].clone();
    let mut found = None;
    for attempt in 0..6 {
        let ar = maximize_alpha(pencil, x, &beta, tol, &opts.solver)?;
        if ar.alpha > 1e-10 {
            found = Some(ar);
            break;
        }
        log::debug!("degenerate dilation direction (alpha = {:e}), attempt {attempt}", ar.alpha);
        // seeded random direction inside the subspace
        let w: Vec<f64> = (0..before).map(|_| random::normal(&mut rng)).collect();
        let nrm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        beta = (0..pencil.g())
            .map(|j| {
                let mut col = CMat::zeros(x.n(), 1);
                for (b, wk) in sub.basis.iter().zip(&w) {
                    col += &b[j] * c(wk / nrm);
                }
                col
            })
            .collect();
    }
    let ar = found.ok_or(Error::DescentStalled)?;
    let gp = ar.program.gamma_pencil(ar.alpha);
    let psi = extreme_point_of_spectrahedron(&gp, &ar.psi, tol)?.point;
    let beta_hat: Vec<CMat> = beta.iter().map(|b| b * c(ar.alpha)).collect();
    let y_hat = one_dilation(x, &beta_hat, &psi)?;
    let verdict = membership(pencil, &y_hat, tol)?;
    if verdict.status == Status::Outside {
        return Err(Error::OutsideDomain(verdict.min_eigenvalue));
    }
    let after = dilation_subspace(pencil, &y_hat, tol)?.dim();
    if after >= before {
        return Err(Error::DescentFailure { before, after });
    }
    Ok(DilationCandidate { beta_hat, psi_hat: psi, y_hat, alpha: ar.alpha, dim_before: before, dim_after: after })
}

/// `X = sum_i γ_i^* F_i γ_i` with every `F_i` free extreme.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub summands: Vec<MatrixTuple>,
    pub gammas: Vec<CMat>,
    pub dilation_trace: Vec<DilationCandidate>,
    pub total_size: usize,
    pub steps: usize,
    /// `|sum γ_i^* F_i γ_i - X|_F`.
    pub residual: f64,
}

impl Decomposition {
    pub fn combination(&self) -> Result<MatrixConvexCombination> {
        let n = self.gammas.first().map_or(0, |g| g.ncols());
        MatrixConvexCombination::new(self.gammas.iter().cloned().zip(self.summands.iter().cloned()).collect(), n)
    }

    /// Dimensions of the dilation subspace along the descent, starting with
    /// the input.
    pub fn subspace_dims(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.dilation_trace.iter().map(|d| d.dim_before).collect();
        out.push(self.dilation_trace.last().map_or(0, |d| d.dim_after));
        out
    }
}

/// Writes a point of a bounded real free spectrahedron as a matrix convex
/// combination of free extreme points, with `sum n_i <= n(g + 1)`.
pub fn decompose_to_free_extremes(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    tol: &Tolerances,
    opts: &DilationOptions,
) -> Result<Decomposition> {
    let x = real_point(pencil, x)?;
    if !pencil.is_bounded_level1() {
        return Err(Error::UnboundedDomain);
    }
    let v = membership(pencil, &x, tol)?;
    if v.status == Status::Outside {
        return Err(Error::OutsideDomain(v.min_eigenvalue));
    }
    let (n, g) = (x.n(), pencil.g());
    if n == 0 {
        return Err(Error::DimensionMismatch("cannot decompose the empty tuple".into()));
    }
    if opts.presplit {
        return presplit_decomposition(pencil, &x, tol, opts);
    }
    let mut cur = x.clone();
    let mut trace = Vec::new();
    while dilation_subspace(pencil, &cur, tol)?.dim() > 0 {
        if trace.len() >= n * g {
            return Err(Error::DescentFailure { before: trace.len(), after: n * g });
        }
        let cand = maximal_one_dilation(pencil, &cur, tol, opts)?;
        cur = cand.y_hat.clone();
        trace.push(cand);
    }
    let big = cur.n();
    let (u, blocks) = block_diagonalize(&cur, tol, opts.seed)?;
    let mut v = CMat::zeros(big, n);
    for i in 0..n {
        v[(i, i)] = c(1.0);
    }
    let uv = u.adjoint() * v;
    let mut summands = Vec::new();
    let mut gammas = Vec::new();
    let mut offset = 0;
    for b in blocks {
        let k = b.n();
        let gamma = uv.rows(offset, k).into_owned();
        offset += k;
        if gamma.norm() <= 1e-10 {
            continue;
        }
        summands.push(b);
        gammas.push(gamma);
    }
    finish(pencil, &x, summands, gammas, trace, tol)
}

fn finish(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    summands: Vec<MatrixTuple>,
    gammas: Vec<CMat>,
    trace: Vec<DilationCandidate>,
    tol: &Tolerances,
) -> Result<Decomposition> {
    let (n, g) = (x.n(), pencil.g());
    for (i, f) in summands.iter().enumerate() {
        if !free_extreme_test(pencil, f, tol)? {
            return Err(Error::BlockingFailure(format!("summand {i} (size {}) is not free extreme", f.n())));
        }
    }
    let total_size: usize = summands.iter().map(|s| s.n()).sum();
    if total_size > n * (g + 1) {
        return Err(Error::BlockingFailure(format!("total size {total_size} exceeds n(g+1) = {}", n * (g + 1))));
    }
    let comb = MatrixConvexCombination::new(gammas.iter().cloned().zip(summands.iter().cloned()).collect(), n)?;
    let loose = Tolerances { comb: tol.comb.max(1e-6), ..*tol };
    let back = apply_combination(&comb, &loose)?;
    let residual = back.distance(x);
    if residual > tol.reconstruct * (1.0 + x.norm()) {
        return Err(Error::BlockingFailure(format!("reconstruction residual {residual:.3e}")));
    }
    let steps = trace.len();
    Ok(Decomposition { summands, gammas, dilation_trace: trace, total_size, steps, residual })
}

/// Splits a reducible input first and decomposes each block separately.
fn presplit_decomposition(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    tol: &Tolerances,
    opts: &DilationOptions,
) -> Result<Decomposition> {
    let (u, blocks) = block_diagonalize(x, tol, opts.seed)?;
    let inner = DilationOptions { presplit: false, ..opts.clone() };
    let mut summands = Vec::new();
    let mut gammas = Vec::new();
    let mut trace = Vec::new();
    let mut offset = 0;
    let uh = u.adjoint();
    for b in blocks {
        let k = b.n();
        // X = U (⊕ B) U^*, so block b contributes through rows of U^*
        let rows = uh.rows(offset, k).into_owned();
        offset += k;
        let d = decompose_to_free_extremes(pencil, &b, tol, &inner)?;
        for (gm, f) in d.gammas.into_iter().zip(d.summands) {
            summands.push(f);
            gammas.push(gm * &rows);
        }
        trace.extend(d.dilation_trace);
    }
    finish(pencil, x, summands, gammas, trace, tol)
}

/// Unitary `U` and irreducible blocks with `U^* Y U = ⊕ blocks`, found by
/// splitting along eigenspaces of random self-adjoint commutant elements.
pub fn block_diagonalize(y: &MatrixTuple, tol: &Tolerances, seed: u64) -> Result<(CMat, Vec<MatrixTuple>)> {
    let mut rng = random::rng(random::derive_seed(seed, 0xb10c));
    let (u, blocks) = split(y, tol, &mut rng, 0)?;
    let n = y.n();
    let scale = y.norm().max(1.0);
    // off-block residual of U^* Y U
    let mut mask = vec![0usize; n];
    let mut off = 0;
    for (i, b) in blocks.iter().enumerate() {
        for k in 0..b.n() {
            mask[off + k] = i;
        }
        off += b.n();
    }
    let mut resid: f64 = 0.0;
    for m in y.matrices() {
        let z = u.adjoint() * m * &u;
        for i in 0..n {
            for j in 0..n {
                if mask[i] != mask[j] {
                    resid = resid.max(z[(i, j)].norm());
                }
            }
        }
    }
    if resid > tol.block * scale {
        return Err(Error::BlockingFailure(format!("off-block residual {resid:.3e}")));
    }
    Ok((u, blocks))
}

fn split(y: &MatrixTuple, tol: &Tolerances, rng: &mut random::SeededRng, depth: usize) -> Result<(CMat, Vec<MatrixTuple>)> {
    let n = y.n();
    let comm = y.commutant(tol.ker);
    if n <= 1 || comm.dim() <= 1 {
        return Ok((CMat::identity(n, n), vec![y.clone()]));
    }
    if depth > n {
        return Err(Error::BlockingFailure("recursion did not terminate".into()));
    }
    let mut gaps = Vec::new();
    for _ in 0..8 {
        let mut s = CMat::zeros(n, n);
        for e in &comm.elements {
            s += e * c(rng.random::<f64>() * 2.0 - 1.0);
        }
        let eig = linalg::herm_eigen(&s);
        let spread = (eig.max() - eig.min()).max(1e-300);
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        let mut min_gap = f64::INFINITY;
        for i in 1..n {
            let gap = eig.values[i] - eig.values[i - 1];
            if gap > 1e-6 * spread && gap > 1e-10 {
                min_gap = min_gap.min(gap / spread);
                clusters.push(vec![i]);
            } else {
                clusters.last_mut().expect("nonempty").push(i);
            }
        }
        gaps.push(min_gap);
        if clusters.len() < 2 || min_gap < 1e-4 {
            continue;
        }
        let mut u = CMat::zeros(n, n);
        let mut blocks = Vec::new();
        let mut col = 0;
        for cl in clusters {
            let mut q = CMat::zeros(n, cl.len());
            for (k, &i) in cl.iter().enumerate() {
                q.set_column(k, &eig.vectors.column(i));
            }
            let sub = y.conjugate(&q)?;
            let (us, bs) = split(&sub, tol, rng, depth + 1)?;
            let qu = &q * us;
            u.view_mut((0, col), (n, cl.len())).copy_from(&qu);
            col += cl.len();
            blocks.extend(bs);
        }
        return Ok((u, blocks));
    }
    Err(Error::BlockingFailure(format!(
        "no separated eigenvalue clusters in the commutant (relative gaps {gaps:?})"
    )))
}
