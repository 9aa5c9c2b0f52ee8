//! Monic linear pencils `L_A(X) = I - sum_j A_j ⊗ X_j`, membership in the
//! free spectrahedron `D_A`, kernels, the level-1 boundedness gate, and
//! membership in the matrix convex hull `mconv(A)` through Choi matrices.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, columns_to_real, hermitian_basis, push_real_coords, CMat, HermEigen};
use crate::random;
use crate::solver::{feasibility_margin, AffinePencil, SolverOptions};
use crate::tol::Tolerances;
use crate::tuples::{Field, MatrixConvexCombination, MatrixTuple};

/// A monic linear pencil given by its coefficient tuple `A ∈ SM_m^g`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPencil {
    a: MatrixTuple,
}

impl LinearPencil {
    pub fn new(a: MatrixTuple) -> Result<Self> {
        if a.n() == 0 {
            return Err(Error::DimensionMismatch("pencil coefficients must have size m >= 1".into()));
        }
        if a.g() == 0 {
            return Err(Error::DimensionMismatch("pencil needs at least one coefficient".into()));
        }
        Ok(Self { a })
    }

    /// Size of the coefficient matrices.
    pub fn m(&self) -> usize {
        self.a.n()
    }

    pub fn g(&self) -> usize {
        self.a.g()
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn coefficients(&self) -> &MatrixTuple {
        &self.a
    }

    fn check(&self, x: &MatrixTuple) -> Result<()> {
        if x.g() != self.g() {
            return Err(Error::DimensionMismatch(format!("pencil has g = {}, point has g = {}", self.g(), x.g())));
        }
        Ok(())
    }

    /// `Λ_A(X) = sum_j A_j ⊗ X_j`, of size `mn`.
    pub fn lambda(&self, x: &MatrixTuple) -> Result<CMat> {
        self.check(x)?;
        self.lambda_rect(x.matrices())
    }

    /// `sum_j A_j ⊗ B_j` for rectangular blocks `B_j` of a common shape.
    pub fn lambda_rect(&self, blocks: &[CMat]) -> Result<CMat> {
        if blocks.len() != self.g() {
            return Err(Error::DimensionMismatch(format!("expected {} blocks, got {}", self.g(), blocks.len())));
        }
        let (r, k) = (blocks[0].nrows(), blocks[0].ncols());
        if blocks.iter().any(|b| b.nrows() != r || b.ncols() != k) {
            return Err(Error::DimensionMismatch("blocks of different shapes".into()));
        }
        let m = self.m();
        let mut out = CMat::zeros(m * r, m * k);
        for (a, b) in self.a.matrices().iter().zip(blocks) {
            out += a.kronecker(b);
        }
        Ok(out)
    }

    /// `L_A(X) = I - Λ_A(X)`.
    pub fn evaluate(&self, x: &MatrixTuple) -> Result<CMat> {
        let lam = self.lambda(x)?;
        let d = lam.nrows();
        Ok(CMat::identity(d, d) - lam)
    }

    /// True iff no nonzero `d ∈ R^g` satisfies `Λ_A(d) ⪯ 0`, decided by one
    /// feasibility probe per coordinate and sign.
    ///
    /// Boundedness at every level is assumed to follow from this level-1
    /// test; callers should treat it as a gate, not a proof.
    pub fn is_bounded_level1(&self) -> bool {
        let g = self.g();
        let neg: Vec<CMat> = self.a.matrices().iter().map(|a| -a).collect();
        for i in 0..g {
            for s in [1.0, -1.0] {
                let m0 = &neg[i] * c(s);
                let rest: Vec<CMat> = (0..g).filter(|&j| j != i).map(|j| neg[j].clone()).collect();
                let Ok(p) = AffinePencil::from_hermitian(&m0, &rest) else { return false };
                let scale = 1.0 + m0.norm() + rest.iter().map(|m| m.norm()).sum::<f64>();
                let margin = if rest.is_empty() {
                    p.min_eig(&[])
                } else {
                    match feasibility_margin(&p, &SolverOptions::default().sign_only()) {
                        Ok(s) => s.margin,
                        Err(_) => return false,
                    }
                };
                if margin >= -1e-9 * scale {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Status {
    Outside,
    Boundary,
    Interior,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Outside => "Outside",
            Status::Boundary => "Boundary",
            Status::Interior => "Interior",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipVerdict {
    pub status: Status,
    #[serde(rename = "min_eig")]
    pub min_eigenvalue: f64,
    pub kernel_dim: usize,
}

/// Classifies `X` against `D_A` by the smallest eigenvalue of `L_A(X)`.
///
/// On the boundary, `kernel_dim` counts eigenvalues of magnitude at most
/// `tol.feas`, so it is at least one whenever the status is `Boundary`.
pub fn membership(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances) -> Result<MembershipVerdict> {
    let l = pencil.evaluate(x)?;
    let e = linalg::herm_eigen(&l);
    let lam = if x.n() == 0 { 0.0 } else { e.min() };
    let status = if lam > tol.feas {
        Status::Interior
    } else if lam >= -tol.feas {
        Status::Boundary
    } else {
        Status::Outside
    };
    let kernel_dim = if status == Status::Boundary {
        e.values.iter().filter(|v| v.abs() <= tol.feas).count()
    } else {
        0
    };
    Ok(MembershipVerdict { status, min_eigenvalue: lam, kernel_dim })
}

/// Orthonormal basis of the numerical kernel of a hermitian PSD matrix:
/// eigenvectors with `|λ| <= tol.ker * max(λ_max, 1)`.
pub fn kernel_basis(m: &CMat, tol: &Tolerances) -> Result<CMat> {
    let (e, k, _) = kernel_and_range(m, tol);
    if e.min() < -tol.feas {
        return Err(Error::NotPsd(e.min()));
    }
    Ok(k)
}

/// Eigen-decomposition together with kernel and range bases under the
/// [`kernel_basis`] threshold. No PSD check.
pub fn kernel_and_range(m: &CMat, tol: &Tolerances) -> (HermEigen, CMat, CMat) {
    let e = linalg::herm_eigen(m);
    let thr = tol.ker * e.max().max(1.0);
    let k = e.select(|v| v.abs() <= thr);
    let r = e.select(|v| v.abs() > thr);
    (e, k, r)
}

/// Outcome of the Choi feasibility problem for `Y ∈ mconv(A)`.
#[derive(Debug, Clone)]
pub struct MconvCertificate {
    pub member: bool,
    /// Best `λ_min` of a Choi matrix meeting the linear constraints;
    /// negative infinity if the constraints are inconsistent.
    pub margin: f64,
    /// Kraus form `Y = sum_r V_r^* A V_r` when a member.
    pub combination: Option<MatrixConvexCombination>,
}

/// Decides whether `Y` is the image of `A` under a unital completely
/// positive map, i.e. `Y ∈ mconv(A)`.
///
/// The unknown is the Choi matrix `C = [Φ(E_kl)]` (hermitian `mn x mn`,
/// real symmetric when both tuples are real) subject to
/// `sum_k C_kk = I_n` and `sum_kl (A_j)_kl C_kl = Y_j`.
pub fn mconv_certificate(a: &MatrixTuple, y: &MatrixTuple, tol: &Tolerances) -> Result<MconvCertificate> {
    if a.g() != y.g() {
        return Err(Error::DimensionMismatch(format!("A has g = {}, Y has g = {}", a.g(), y.g())));
    }
    let (m, n) = (a.n(), y.n());
    if n == 0 || m == 0 {
        return Err(Error::DimensionMismatch("empty tuple".into()));
    }
    let field = a.field().join(y.field());
    let complex = field == Field::Complex;
    let d = m * n;
    let basis = hermitian_basis(d, field);

    let image = |cm: &CMat| -> Vec<CMat> {
        let block = |k: usize, l: usize| cm.view((k * n, l * n), (n, n)).into_owned();
        let mut out = Vec::with_capacity(a.g() + 1);
        let mut unit = CMat::zeros(n, n);
        for k in 0..m {
            unit += block(k, k);
        }
        out.push(unit);
        for aj in a.matrices() {
            let mut s = CMat::zeros(n, n);
            for k in 0..m {
                for l in 0..m {
                    let w = aj[(k, l)];
                    if w != linalg::ZERO {
                        s += block(k, l) * w;
                    }
                }
            }
            out.push(s);
        }
        out
    };
    let flatten = |ms: &[CMat]| {
        let mut v = Vec::new();
        for mm in ms {
            push_real_coords(mm, complex, &mut v);
        }
        v
    };
    let cols: Vec<Vec<f64>> = basis.iter().map(|e| flatten(&image(e))).collect();
    let sys = columns_to_real(&cols);
    let mut rhs_m = vec![CMat::identity(n, n)];
    rhs_m.extend(y.matrices().iter().cloned());
    let rhs = DVector::from_vec(flatten(&rhs_m));

    let x0 = linalg::least_squares_real(&sys, &rhs, 1e-12);
    let resid = (&sys * &x0 - &rhs).norm();
    if resid > 1e-9 * (1.0 + rhs.norm()) {
        return Ok(MconvCertificate { member: false, margin: f64::NEG_INFINITY, combination: None });
    }
    let assemble = |coef: &[f64]| -> CMat {
        let mut out = CMat::zeros(d, d);
        for (e, &w) in basis.iter().zip(coef) {
            if w != 0.0 {
                out += e * c(w);
            }
        }
        out
    };
    let c0 = assemble(x0.as_slice());
    let ns = linalg::null_space_real(&sys, 1e-10);
    let dirs: Vec<CMat> = (0..ns.dim())
        .map(|k| assemble(ns.basis.column(k).as_slice()))
        .collect();

    let (margin, choi) = if dirs.is_empty() {
        (linalg::min_eig(&c0), c0)
    } else {
        let p = AffinePencil::from_hermitian(&c0, &dirs)?;
        let s = feasibility_margin(&p, &SolverOptions::from_tolerances(tol))?;
        let mut choi = c0.clone();
        for (dk, &w) in dirs.iter().zip(&s.witness) {
            choi += dk * c(w);
        }
        (s.margin, choi)
    };
    let member = margin >= -tol.feas;
    let combination = if member { Some(kraus_combination(a, &choi, n)?) } else { None };
    Ok(MconvCertificate { member, margin, combination })
}

/// `Y ∈ mconv(A)`, see [`mconv_certificate`].
pub fn mconv_membership(a: &MatrixTuple, y: &MatrixTuple, tol: &Tolerances) -> Result<bool> {
    Ok(mconv_certificate(a, y, tol)?.member)
}

/// Kraus operators `V_r` (`m x n`) of the map with Choi matrix `choi`.
fn kraus_combination(a: &MatrixTuple, choi: &CMat, n: usize) -> Result<MatrixConvexCombination> {
    let m = a.n();
    let e = linalg::herm_eigen(choi);
    let top = e.max().max(0.0);
    let mut terms = Vec::new();
    for (r, &lam) in e.values.iter().enumerate() {
        if lam <= 1e-12 * top.max(1.0) {
            continue;
        }
        let s = lam.sqrt();
        let v = CMat::from_fn(m, n, |k, p| e.vectors[(k * n + p, r)].conj() * c(s));
        terms.push((v, a.clone()));
    }
    MatrixConvexCombination::new(terms, n)
}

/// `L_X(Y) = I - sum_j X_j ⊗ Y_j`.
pub fn pencil_of(x: &MatrixTuple, y: &MatrixTuple) -> Result<CMat> {
    if x.g() != y.g() {
        return Err(Error::DimensionMismatch("tuples of different g".into()));
    }
    let mut out = CMat::identity(x.n() * y.n(), x.n() * y.n());
    for (xm, ym) in x.matrices().iter().zip(y.matrices()) {
        out -= xm.kronecker(ym);
    }
    Ok(out)
}

/// Necessary condition for `Y ∈ D_A° = mconv(A)`: `L_X(Y) ⪰ -tol.feas` for
/// `samples` random points `X ∈ D_A` at levels 1 to 3.
pub fn polar_dual_check(
    pencil: &LinearPencil,
    y: &MatrixTuple,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<bool> {
    if y.g() != pencil.g() {
        return Err(Error::DimensionMismatch("point and pencil have different g".into()));
    }
    if !pencil.is_bounded_level1() {
        return Err(Error::UnboundedDomain);
    }
    let mut rng = random::rng(seed);
    for s in 0..samples {
        let level = 1 + s % 3;
        let field = if rng.random_bool(0.5) { pencil.field() } else { Field::Real };
        let x = random::point(&mut rng, pencil, level, field, random::Placement::Mixed);
        if linalg::min_eig(&pencil_of(&x, y)?) < -tol.feas {
            return Ok(false);
        }
    }
    Ok(true)
}
