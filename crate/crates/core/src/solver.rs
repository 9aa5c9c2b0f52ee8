//! Small dense spectrahedra in real scalar variables: the margin problem
//! `sup_y λ_min(M(y))`, boundary steps along rays, extreme-point descent,
//! and the dilation-scale program used by maximal 1-dilations.

use nalgebra::{Cholesky, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, columns_to_real, null_space_real, sym_eigen, CMat, RMat};
use crate::pencil::{kernel_and_range, LinearPencil};
use crate::tol::Tolerances;
use crate::tuples::{Field, MatrixTuple};

/// `M(y) = M0 + sum_j y_j M_j` with real symmetric coefficients.
#[derive(Debug, Clone)]
pub struct AffinePencil {
    m0: RMat,
    ms: Vec<RMat>,
}

impl AffinePencil {
    pub fn new(m0: RMat, ms: Vec<RMat>) -> Result<Self> {
        let d = m0.nrows();
        for m in std::iter::once(&m0).chain(&ms) {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "affine pencil coefficient is {}x{}, expected {d}x{d}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let sym = |m: &RMat| (m + m.transpose()) * 0.5;
        Ok(Self { m0: sym(&m0), ms: ms.iter().map(sym).collect() })
    }

    /// Hermitian coefficients, realified consistently: if any coefficient is
    /// genuinely complex, all of them use the `[[A, -B], [B, A]]` embedding.
    pub fn from_hermitian(m0: &CMat, ms: &[CMat]) -> Result<Self> {
        let complex = !linalg::is_real_matrix(m0) || ms.iter().any(|m| !linalg::is_real_matrix(m));
        let conv = |m: &CMat| -> RMat {
            if !complex {
                return linalg::real_part(m);
            }
            let mut forced = m.clone();
            if linalg::is_real_matrix(&forced) && forced.nrows() > 0 {
                // force the embedding even for real blocks
                let n = forced.nrows();
                let re = linalg::real_part(&forced);
                let mut out = RMat::zeros(2 * n, 2 * n);
                out.view_mut((0, 0), (n, n)).copy_from(&re);
                out.view_mut((n, n), (n, n)).copy_from(&re);
                return out;
            }
            forced = linalg::symmetrize(&forced);
            linalg::realify(&forced)
        };
        Self::new(conv(m0), ms.iter().map(conv).collect())
    }

    pub fn dim(&self) -> usize {
        self.m0.nrows()
    }

    pub fn nvars(&self) -> usize {
        self.ms.len()
    }

    pub fn constant(&self) -> &RMat {
        &self.m0
    }

    pub fn coefficients(&self) -> &[RMat] {
        &self.ms
    }

    pub fn eval(&self, y: &[f64]) -> RMat {
        let mut out = self.m0.clone();
        for (m, &v) in self.ms.iter().zip(y) {
            if v != 0.0 {
                out += m * v;
            }
        }
        out
    }

    /// Linear part `sum_j d_j M_j`.
    pub fn direction(&self, d: &[f64]) -> RMat {
        let mut out = RMat::zeros(self.dim(), self.dim());
        for (m, &v) in self.ms.iter().zip(d) {
            out += m * v;
        }
        out
    }

    pub fn min_eig(&self, y: &[f64]) -> f64 {
        linalg::min_eig_real(&self.eval(y))
    }

    /// Fixes variable `index` to `value`, returning the pencil in the rest.
    pub fn restrict(&self, index: usize, value: f64) -> Self {
        let mut m0 = self.m0.clone();
        m0 += &self.ms[index] * value;
        let ms = self.ms.iter().enumerate().filter(|(i, _)| *i != index).map(|(_, m)| m.clone()).collect();
        Self { m0, ms }
    }

    fn scale(&self) -> f64 {
        1.0 + self.m0.norm() + self.ms.iter().map(|m| m.norm()).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginMethod {
    /// Log-barrier path following on `max t s.t. M(y) - tI ⪰ 0`.
    Barrier,
    /// Supergradient ascent on the concave map `y -> λ_min(M(y))`.
    Supergradient,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub method: MarginMethod,
    /// Cap on Newton steps (barrier) or ascent steps (supergradient).
    pub max_iter: usize,
    /// Stall threshold on the margin.
    pub stall: f64,
    /// Emit per-iteration margins as JSON lines on the `freespec::solver`
    /// log target.
    pub trace: bool,
    /// Return as soon as the sign of the optimal margin is certified.
    pub stop_on_sign: bool,
    pub start: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: MarginMethod::Barrier,
            max_iter: 5000,
            stall: 1e-9,
            trace: false,
            stop_on_sign: false,
            start: None,
        }
    }
}

impl SolverOptions {
    pub fn from_tolerances(tol: &Tolerances) -> Self {
        Self { stall: tol.solver, ..Self::default() }
    }

    pub fn with_start(&self, start: Vec<f64>) -> Self {
        Self { start: Some(start), ..self.clone() }
    }

    pub fn sign_only(&self) -> Self {
        Self { stop_on_sign: true, ..self.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStatus {
    pub converged: bool,
    pub iterations: usize,
    /// `λ_min(M(witness))`, a certified lower bound on the optimum.
    pub margin: f64,
    /// Upper bound on the optimum (barrier duality gap), infinity if unknown.
    pub upper_bound: f64,
    pub witness: Vec<f64>,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    method: &'a str,
    iteration: usize,
    margin: f64,
    bound: f64,
}

fn trace(opts: &SolverOptions, method: &str, iteration: usize, margin: f64, bound: f64) {
    if opts.trace {
        let line = TraceLine { method, iteration, margin, bound };
        log::debug!(target: "freespec::solver", "{}", serde_json::to_string(&line).unwrap_or_default());
    }
}

/// Approximately solves `sup_y λ_min(M(y))`.
///
/// The barrier method returns once the duality gap drops below
/// `1e-11 * scale`; `converged = false` means the iteration cap was hit and
/// `witness` is the best point seen. A margin that grows without bound
/// yields [`Error::UnboundedDirection`].
pub fn feasibility_margin(p: &AffinePencil, opts: &SolverOptions) -> Result<SolveStatus> {
    if p.dim() == 0 {
        return Err(Error::UnboundedDirection);
    }
    match opts.method {
        MarginMethod::Barrier => barrier_margin(p, opts),
        MarginMethod::Supergradient => supergradient_margin(p, opts),
    }
}

struct Centered {
    f: f64,
}

fn barrier_objective(p: &AffinePencil, y: &[f64], t: f64, tau: f64) -> Option<(Centered, Cholesky<f64, nalgebra::Dyn>)> {
    let mut f = p.eval(y);
    for i in 0..f.nrows() {
        f[(i, i)] -= t;
    }
    let chol = Cholesky::new(f)?;
    let logdet: f64 = chol.l_dirty().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
    if !logdet.is_finite() {
        return None;
    }
    Some((Centered { f: -tau * t - logdet }, chol))
}

fn barrier_margin(p: &AffinePencil, opts: &SolverOptions) -> Result<SolveStatus> {
    let d = p.dim();
    let k = p.nvars();
    let scale = p.scale();
    let gap_tol = 1e-11 * scale;
    let mut y = opts.start.clone().unwrap_or_else(|| vec![0.0; k]);
    let lam0 = p.min_eig(&y);
    let mut t = lam0 - 1.0;
    let mut best_margin = lam0;
    let mut best_y = y.clone();
    let mut tau = 1.0;
    let mut iters = 0usize;
    let mut upper = f64::INFINITY;

    let n = k + 1;
    loop {
        // centering
        let mut centered = false;
        for _ in 0..100 {
            if iters >= opts.max_iter {
                break;
            }
            iters += 1;
            let Some((cur, chol)) = barrier_objective(p, &y, t, tau) else {
                break;
            };
            let finv = chol.inverse();
            // W_a = F^{-1} F_a with F_t = -I and F_{y_i} = M_i
            let mut ws: Vec<RMat> = Vec::with_capacity(n);
            for m in p.coefficients() {
                ws.push(&finv * m);
            }
            ws.push(-finv.clone());
            let mut grad = DVector::zeros(n);
            for i in 0..k {
                grad[i] = -ws[i].trace();
            }
            grad[k] = -tau - ws[k].trace();
            let wts: Vec<RMat> = ws.iter().map(|w| w.transpose()).collect();
            let mut h = RMat::zeros(n, n);
            for a in 0..n {
                for b in a..n {
                    let v = ws[a].dot(&wts[b]);
                    h[(a, b)] = v;
                    h[(b, a)] = v;
                }
            }
            let hmax = (0..n).map(|i| h[(i, i)]).fold(0.0, f64::max).max(1e-300);
            let mut delta = None;
            let mut reg = 1e-14 * hmax;
            for _ in 0..8 {
                let mut hr = h.clone();
                for i in 0..n {
                    hr[(i, i)] += reg;
                }
                if let Some(ch) = Cholesky::new(hr) {
                    delta = Some(ch.solve(&(-&grad)));
                    break;
                }
                reg *= 100.0;
            }
            let Some(delta) = delta else { break };
            let slope = grad.dot(&delta);
            if -slope / 2.0 <= 1e-10 {
                centered = true;
                break;
            }
            let mut s = 1.0;
            let mut accepted = false;
            while s > 1e-14 {
                let yn: Vec<f64> = (0..k).map(|i| y[i] + s * delta[i]).collect();
                let tn = t + s * delta[k];
                if let Some((next, _)) = barrier_objective(p, &yn, tn, tau) {
                    if next.f <= cur.f + 0.25 * s * slope {
                        y = yn;
                        t = tn;
                        accepted = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !accepted {
                centered = true;
                break;
            }
        }
        let margin = p.min_eig(&y);
        if margin > best_margin {
            best_margin = margin;
            best_y = y.clone();
        }
        if centered {
            upper = upper.min(t + d as f64 / tau);
        }
        trace(opts, "barrier", iters, best_margin, upper);

        if t > 1e9 * scale || y.iter().any(|v| v.abs() > 1e12) {
            if best_margin > 1e6 * scale {
                return Err(Error::UnboundedDirection);
            }
            return Ok(SolveStatus { converged: false, iterations: iters, margin: best_margin, upper_bound: upper, witness: best_y });
        }
        if opts.stop_on_sign && (best_margin > 0.0 || upper < 0.0) {
            return Ok(SolveStatus { converged: true, iterations: iters, margin: best_margin, upper_bound: upper, witness: best_y });
        }
        if iters >= opts.max_iter {
            return Ok(SolveStatus { converged: false, iterations: iters, margin: best_margin, upper_bound: upper, witness: best_y });
        }
        if d as f64 / tau < gap_tol {
            return Ok(SolveStatus { converged: true, iterations: iters, margin: best_margin, upper_bound: upper, witness: best_y });
        }
        tau *= 8.0;
    }
}

fn supergradient_margin(p: &AffinePencil, opts: &SolverOptions) -> Result<SolveStatus> {
    let k = p.nvars();
    let mut y = opts.start.clone().unwrap_or_else(|| vec![0.0; k]);
    let mut best_margin = f64::NEG_INFINITY;
    let mut best_y = y.clone();
    let mut checkpoint = f64::NEG_INFINITY;
    let h0 = 1.0;
    for it in 0..opts.max_iter {
        let e = sym_eigen(&p.eval(&y));
        let lam = e.min();
        if lam > best_margin {
            best_margin = lam;
            best_y = y.clone();
        }
        if it % 200 == 199 {
            trace(opts, "supergradient", it, best_margin, f64::INFINITY);
            if best_margin - checkpoint < opts.stall {
                return Ok(SolveStatus { converged: true, iterations: it + 1, margin: best_margin, upper_bound: f64::INFINITY, witness: best_y });
            }
            checkpoint = best_margin;
        }
        if opts.stop_on_sign && best_margin > 0.0 {
            return Ok(SolveStatus { converged: true, iterations: it + 1, margin: best_margin, upper_bound: f64::INFINITY, witness: best_y });
        }
        let v = e.vectors.column(0);
        let grad: Vec<f64> = p.coefficients().iter().map(|m| v.dot(&(m * v))).collect();
        let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gn < 1e-15 {
            return Ok(SolveStatus { converged: true, iterations: it + 1, margin: best_margin, upper_bound: f64::INFINITY, witness: best_y });
        }
        let step = h0 / ((it + 1) as f64).sqrt() / gn;
        for (yi, gi) in y.iter_mut().zip(&grad) {
            *yi += step * gi;
        }
        if best_margin > 1e9 * p.scale() {
            return Err(Error::UnboundedDirection);
        }
    }
    Ok(SolveStatus { converged: false, iterations: opts.max_iter, margin: best_margin, upper_bound: f64::INFINITY, witness: best_y })
}

/// Largest `t >= 0` with `M(y0 + t d) ⪰ 0`.
///
/// Directions that keep the kernel of `M(y0)` invariant are resolved by a
/// generalized eigenvalue problem on the range; directions leaving the
/// kernel return 0, and mixed cases fall back to bisection on `λ_min`.
pub fn max_step(p: &AffinePencil, y0: &[f64], d: &[f64], tol: &Tolerances) -> Result<f64> {
    let m0 = p.eval(y0);
    let dm = p.direction(d);
    let e = sym_eigen(&m0);
    if e.min() < -tol.feas {
        return Err(Error::InfeasibleStart(e.min()));
    }
    let dnorm = dm.norm();
    if dnorm == 0.0 {
        return Err(Error::UnboundedDirection);
    }
    let scale = e.max().abs().max(1.0);
    let ktol = tol.ker * scale;
    let kern = e.select(|v| v <= ktol);
    let range_vals: Vec<f64> = e.values.iter().copied().filter(|&v| v > ktol).collect();
    let range = e.select(|v| v > ktol);
    let dtol = 1e-9 * dnorm;
    if kern.ncols() > 0 {
        let dnn = kern.transpose() * &dm * &kern;
        let en = sym_eigen(&dnn);
        if en.min() < -dtol {
            return Ok(0.0);
        }
        let coupling = (range.transpose() * &dm * &kern).norm();
        if en.max() > dtol || coupling > dtol {
            return bisect_step(&m0, &dm, scale);
        }
    }
    if range.ncols() == 0 {
        return Err(Error::UnboundedDirection);
    }
    let inv_sqrt: Vec<f64> = range_vals.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut q = range.transpose() * &dm * &range;
    for i in 0..q.nrows() {
        for j in 0..q.ncols() {
            q[(i, j)] *= -inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let mu = sym_eigen(&q).max();
    if mu <= 1e-13 * dnorm / scale {
        return Err(Error::UnboundedDirection);
    }
    Ok(1.0 / mu)
}

fn bisect_step(m0: &RMat, dm: &RMat, scale: f64) -> Result<f64> {
    let thr = 1e-14 * scale;
    let ok = |t: f64| linalg::min_eig_real(&(m0 + dm * t)) >= -thr;
    let mut hi = 1.0;
    let mut lo = 0.0;
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 2f64.powi(40) {
            return Err(Error::UnboundedDirection);
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(lo)
}

/// Null space of `σ -> (sum_j σ_j M_j) K` where `K` spans the kernel of
/// `M(y)`; trivial exactly at extreme points.
pub fn sigma_system(p: &AffinePencil, y: &[f64], tol: &Tolerances) -> (RMat, f64, usize) {
    let e = sym_eigen(&p.eval(y));
    let ktol = tol.ker * e.max().abs().max(1.0);
    let kern = e.select(|v| v <= ktol);
    let cols: Vec<Vec<f64>> = p.coefficients().iter().map(|m| (m * &kern).iter().copied().collect()).collect();
    let sys = if kern.ncols() == 0 || cols.is_empty() {
        RMat::zeros(0, p.nvars())
    } else {
        columns_to_real(&cols)
    };
    let ns = null_space_real(&sys, tol.ker);
    (ns.basis, ns.smallest_retained, kern.ncols())
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremePoint {
    pub point: Vec<f64>,
    pub steps: usize,
    /// Kernel dimension of `M(point)`.
    pub kernel_dim: usize,
    /// Smallest relative singular value of the final σ-system.
    pub residual: f64,
}

/// Walks from a feasible `start` to an extreme point of the compact
/// spectrahedron `{y : M(y) ⪰ 0}`. Each accepted step strictly enlarges the
/// kernel, so at most `dim` steps are taken.
pub fn extreme_point_of_spectrahedron(p: &AffinePencil, start: &[f64], tol: &Tolerances) -> Result<ExtremePoint> {
    let lam = p.min_eig(start);
    if lam < -tol.feas {
        return Err(Error::InfeasibleStart(lam));
    }
    let mut y = start.to_vec();
    let cap = p.dim() + p.nvars() + 2;
    for step in 0..=cap {
        let (null, residual, kdim) = sigma_system(p, &y, tol);
        if null.ncols() == 0 {
            return Ok(ExtremePoint { point: y, steps: step, kernel_dim: kdim, residual });
        }
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for j in 0..null.ncols() {
            let v: Vec<f64> = null.column(j).iter().copied().collect();
            candidates.push(v.clone());
            candidates.push(v.iter().map(|x| -x).collect());
        }
        // deterministic rotations inside the null space
        if null.ncols() > 1 {
            for j in 1..null.ncols() {
                let v: Vec<f64> = (0..null.nrows())
                    .map(|i| (null[(i, 0)] + null[(i, j)]) * std::f64::consts::FRAC_1_SQRT_2)
                    .collect();
                candidates.push(v.clone());
                candidates.push(v.iter().map(|x| -x).collect());
            }
        }
        let mut moved = false;
        for dir in &candidates {
            match max_step(p, &y, dir, tol) {
                Ok(t) if t > 1e-12 => {
                    for (yi, di) in y.iter_mut().zip(dir) {
                        *yi += t * di;
                    }
                    moved = true;
                    break;
                }
                Ok(_) | Err(Error::UnboundedDirection) => continue,
                Err(e) => return Err(e),
            }
        }
        if !moved {
            return Err(Error::DescentStalled);
        }
    }
    Err(Error::IterationCapExceeded(cap))
}

/// Data of the dilation-scale program at a fixed `X` and `β`, reduced to
/// the range of `L_A(X)`:
/// `G(α, ψ) = [[D_R, -α R^T Λ_A(β)], [-α Λ_A(β^*) R, L_A(ψ)]]`,
/// where `R` spans the range of `L_A(X)` and `D_R` holds its positive
/// eigenvalues. `L_A([[X, αβ], [αβ^*, ψ]]) ⪰ 0` iff `G(α, ψ) ⪰ 0`.
#[derive(Debug, Clone)]
pub struct DilationProgram {
    range_eigs: Vec<f64>,
    coupling: RMat,
    coeffs: Vec<RMat>,
}

impl DilationProgram {
    pub fn new(pencil: &LinearPencil, x: &MatrixTuple, beta: &[CMat], tol: &Tolerances) -> Result<Self> {
        if pencil.field() != Field::Real || x.field() != Field::Real {
            return Err(Error::FieldUnsupported);
        }
        if beta.len() != pencil.g() || beta.iter().any(|b| b.nrows() != x.n() || b.ncols() != 1) {
            return Err(Error::DimensionMismatch("beta must be a g-tuple of n x 1 columns".into()));
        }
        let bnorm = beta.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt();
        if bnorm == 0.0 {
            return Err(Error::InfeasibleBeta(0.0));
        }
        let l = pencil.evaluate(x)?;
        let (eig, kern, range) = kernel_and_range(&l, tol);
        if eig.min() < -tol.feas {
            return Err(Error::OutsideDomain(eig.min()));
        }
        let b = pencil.lambda_rect(beta)?;
        let leak = (kern.adjoint() * &b).norm();
        if leak > 1e-6 * (1.0 + b.norm()) {
            return Err(Error::InfeasibleBeta(leak));
        }
        let ktol = tol.ker * eig.max().abs().max(1.0);
        let range_eigs = eig.values.iter().copied().filter(|&v| v > ktol).collect();
        Ok(Self {
            range_eigs,
            coupling: linalg::real_part(&(range.adjoint() * &b)),
            coeffs: pencil.coefficients().matrices().iter().map(linalg::real_part).collect(),
        })
    }

    /// The spectrahedron `{ψ : G(α, ψ) ⪰ 0}` as an affine pencil in `ψ`.
    pub fn gamma_pencil(&self, alpha: f64) -> AffinePencil {
        let r = self.range_eigs.len();
        let m = self.coupling.ncols();
        let d = r + m;
        let mut m0 = RMat::zeros(d, d);
        for (i, v) in self.range_eigs.iter().enumerate() {
            m0[(i, i)] = *v;
        }
        for i in 0..r {
            for j in 0..m {
                m0[(i, r + j)] = -alpha * self.coupling[(i, j)];
                m0[(r + j, i)] = -alpha * self.coupling[(i, j)];
            }
        }
        for j in 0..m {
            m0[(r + j, r + j)] = 1.0;
        }
        let ms = self
            .coeffs
            .iter()
            .map(|a| {
                let mut mj = RMat::zeros(d, d);
                mj.view_mut((r, r), (m, m)).copy_from(&(-a));
                mj
            })
            .collect();
        AffinePencil::new(m0, ms).expect("square by construction")
    }
}

#[derive(Debug, Clone)]
pub struct AlphaResult {
    pub alpha: f64,
    /// A strictly feasible ψ at `alpha`.
    pub psi: Vec<f64>,
    pub margin: f64,
    pub evaluations: usize,
    pub program: DilationProgram,
}

/// Largest `α` such that `[[X, αβ], [αβ^*, ψ]] ∈ D_A` for some `ψ ∈ R^g`,
/// by bracketing and bisection on the sign of the ψ-feasibility margin.
pub fn maximize_alpha(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    beta: &[CMat],
    tol: &Tolerances,
    opts: &SolverOptions,
) -> Result<AlphaResult> {
    let program = DilationProgram::new(pencil, x, beta, tol)?;
    let g = pencil.g();
    let mut evaluations = 0usize;
    let mut probe = |alpha: f64, start: &[f64]| -> Result<SolveStatus> {
        evaluations += 1;
        let gp = program.gamma_pencil(alpha);
        feasibility_margin(&gp, &opts.sign_only().with_start(start.to_vec()))
    };
    let mut lo = 0.0;
    let mut lo_psi = vec![0.0; g];
    let mut lo_margin = program.gamma_pencil(0.0).min_eig(&lo_psi);
    let mut hi = 1.0;
    loop {
        let s = probe(hi, &lo_psi)?;
        if s.margin > 0.0 {
            lo = hi;
            lo_psi = s.witness;
            lo_margin = s.margin;
            hi *= 2.0;
            if hi > 2f64.powi(30) {
                return Err(Error::UnboundedAlpha);
            }
        } else {
            break;
        }
    }
    for _ in 0..60 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let s = probe(mid, &lo_psi)?;
        if s.margin > 0.0 {
            lo = mid;
            lo_psi = s.witness;
            lo_margin = s.margin;
        } else {
            hi = mid;
        }
    }
    Ok(AlphaResult { alpha: lo, psi: lo_psi, margin: lo_margin, evaluations, program })
}
