//! Classical, matrix and free extreme-point tests for free spectrahedra,
//! each a homogeneous linear system built on the kernel of `L_A(X)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, columns_to_real, hermitian_basis, null_space_complex, null_space_real, push_real_coords, CMat};
use crate::pencil::{kernel_and_range, LinearPencil};
use crate::tol::Tolerances;
use crate::tuples::{irreducible, Field, MatrixTuple};

/// Orthonormal basis of `𝔎_{A,X} = {β : ker L_A(X) ⊆ ker Λ_A(β^*)}`.
#[derive(Debug, Clone)]
pub struct DilationSubspace {
    /// Each element is a g-tuple of `n x 1` columns.
    pub basis: Vec<Vec<CMat>>,
    /// Smallest relative singular value counted as nonzero.
    pub residual: f64,
}

impl DilationSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

struct Kernel {
    k: CMat,
    field: Field,
}

fn kernel_of(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances) -> Result<Kernel> {
    let l = pencil.evaluate(x)?;
    let (e, k, _) = kernel_and_range(&l, tol);
    if x.n() > 0 && e.min() < -tol.feas {
        return Err(Error::OutsideDomain(e.min()));
    }
    Ok(Kernel { k, field: pencil.field().join(x.field()) })
}

fn unit_column(n: usize, p: usize) -> CMat {
    let mut e = CMat::zeros(n, 1);
    e[(p, 0)] = c(1.0);
    e
}

/// Computes `𝔎_{A,X}` as the null space of `β -> Λ_A(β^*) K`.
///
/// The map is conjugate-linear in `β`; it is solved for `w = conj(β)`,
/// where it is linear with columns `(A_j ⊗ e_p^T) K`.
pub fn dilation_subspace(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances) -> Result<DilationSubspace> {
    let kern = kernel_of(pencil, x, tol)?;
    dilation_subspace_from_kernel(pencil, x, &kern, tol)
}

fn dilation_subspace_from_kernel(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kern: &Kernel,
    tol: &Tolerances,
) -> Result<DilationSubspace> {
    let (g, n, m) = (pencil.g(), x.n(), pencil.m());
    let unpack = |w: &[linalg::C64]| -> Vec<CMat> {
        (0..g).map(|j| CMat::from_fn(n, 1, |p, _| w[j * n + p].conj())).collect()
    };
    if kern.k.ncols() == 0 {
        let basis = (0..g * n)
            .map(|i| {
                let mut w = vec![linalg::ZERO; g * n];
                w[i] = c(1.0);
                unpack(&w)
            })
            .collect();
        return Ok(DilationSubspace { basis, residual: f64::INFINITY });
    }
    let mut cols: Vec<CMat> = Vec::with_capacity(g * n);
    for aj in pencil.coefficients().matrices() {
        for p in 0..n {
            let row = unit_column(n, p).transpose();
            cols.push(aj.kronecker(&row) * &kern.k);
        }
    }
    let rows = m * kern.k.ncols();
    let (basis, residual) = match kern.field {
        Field::Real => {
            let real_cols: Vec<Vec<f64>> = cols.iter().map(|cm| cm.iter().map(|z| z.re).collect()).collect();
            let ns = null_space_real(&columns_to_real(&real_cols), tol.ker);
            let basis = (0..ns.dim())
                .map(|k| {
                    let w: Vec<linalg::C64> = ns.basis.column(k).iter().map(|&v| c(v)).collect();
                    unpack(&w)
                })
                .collect();
            (basis, ns.smallest_retained)
        }
        Field::Complex => {
            let mut sys = CMat::zeros(rows, g * n);
            for (j, cm) in cols.iter().enumerate() {
                for (i, z) in cm.iter().enumerate() {
                    sys[(i, j)] = *z;
                }
            }
            let ns = null_space_complex(&sys, tol.ker);
            let basis = (0..ns.dim())
                .map(|k| {
                    let w: Vec<linalg::C64> = ns.basis.column(k).iter().copied().collect();
                    unpack(&w)
                })
                .collect();
            (basis, ns.smallest_retained)
        }
    };
    Ok(DilationSubspace { basis, residual })
}

/// Result of one homogeneous extreme-point system.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SystemVerdict {
    pub extreme: bool,
    pub null_dim: usize,
    /// Smallest relative singular value counted as nonzero.
    pub residual: f64,
}

/// Null space of `(β_0, β_1, .., β_g) -> vec((I ⊗ β_0 + sum A_j ⊗ β_j) K)`
/// over hermitian tuples, with an optional extra real row per solution.
fn hermitian_system(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    kern: &Kernel,
    with_beta0: bool,
    tol: &Tolerances,
) -> SystemVerdict {
    let n = x.n();
    let m = pencil.m();
    let complex = kern.field == Field::Complex;
    let herm = hermitian_basis(n, kern.field);
    let id_m = CMat::identity(m, m);
    let mut coeffs: Vec<&CMat> = Vec::new();
    if with_beta0 {
        coeffs.push(&id_m);
    }
    coeffs.extend(pencil.coefficients().matrices());
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (slot, a) in coeffs.iter().enumerate() {
        for b in &herm {
            let mut col = Vec::new();
            push_real_coords(&(a.kronecker(b) * &kern.k), complex, &mut col);
            if with_beta0 {
                // tr(β_0 - sum_j X_j β_j): orthogonal to the solution
                // (I, -X) that every point admits since L_A(X) K = 0
                let tr = if slot == 0 { b.trace() } else { -(x.get(slot - 1) * b).trace() };
                col.push(tr.re);
            }
            cols.push(col);
        }
    }
    let ns = null_space_real(&columns_to_real(&cols), tol.ker);
    SystemVerdict { extreme: ns.dim() == 0, null_dim: ns.dim(), residual: ns.smallest_retained }
}

fn interior_verdict(x: &MatrixTuple, kern: &Kernel) -> Option<SystemVerdict> {
    (kern.k.ncols() == 0 || x.n() == 0).then_some(SystemVerdict { extreme: false, null_dim: 0, residual: f64::INFINITY })
}

/// Classical extremeness of `X` in `D_A(n)`: the only hermitian tuple `β`
/// with `(sum A_j ⊗ β_j) K = 0` is zero.
pub fn classical_extreme_test(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances) -> Result<SystemVerdict> {
    let kern = kernel_of(pencil, x, tol)?;
    Ok(interior_verdict(x, &kern).unwrap_or_else(|| hermitian_system(pencil, x, &kern, false, tol)))
}

/// Matrix extremeness: the only hermitian `(β_0, .., β_g)` with
/// `(I ⊗ β_0 + sum A_j ⊗ β_j) K = 0` and `tr(β_0 - sum X_j β_j) = 0` is zero.
///
/// `(tI, -tX)` always solves the first equation; the trace row is the
/// orthogonal complement of that line, so it is excluded at every point.
pub fn matrix_extreme_test(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances) -> Result<SystemVerdict> {
    let kern = kernel_of(pencil, x, tol)?;
    Ok(interior_verdict(x, &kern).unwrap_or_else(|| hermitian_system(pencil, x, &kern, true, tol)))
}

/// Free extremeness: `X` is irreducible and `𝔎_{A,X} = 0`.
pub fn free_extreme_test(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances) -> Result<bool> {
    let kern = kernel_of(pencil, x, tol)?;
    if interior_verdict(x, &kern).is_some() {
        return Ok(false);
    }
    if dilation_subspace_from_kernel(pencil, x, &kern, tol)?.dim() > 0 {
        return Ok(false);
    }
    Ok(irreducible(x, tol).0)
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Residuals {
    pub classical: f64,
    pub matrix: f64,
    pub dilation: f64,
    pub commutant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremeReport {
    pub classical: bool,
    pub matrix: bool,
    pub free: bool,
    pub irreducible: bool,
    pub kernel_dim: usize,
    #[serde(rename = "dilation_dim")]
    pub dilation_subspace_dim: usize,
    pub residuals: Residuals,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyOptions {
    /// Declares `D_A(2)` closed under complex conjugation, enabling the
    /// level-1 equivalence check for complex pencils.
    pub conj_closed: bool,
}

/// Runs the three extreme-point tests and the irreducibility test, then
/// checks `free ⇒ matrix ⇒ classical` and, at level 1 over the reals,
/// `classical ⇔ free`.
pub fn classify(pencil: &LinearPencil, x: &MatrixTuple, tol: &Tolerances) -> Result<ExtremeReport> {
    classify_with(pencil, x, tol, ClassifyOptions::default())
}

pub fn classify_with(
    pencil: &LinearPencil,
    x: &MatrixTuple,
    tol: &Tolerances,
    opts: ClassifyOptions,
) -> Result<ExtremeReport> {
    let kern = kernel_of(pencil, x, tol)?;
    let commutant = x.commutant(tol.ker);
    let irreducible = x.n() > 0 && commutant.dim() == 1;
    let mut residuals = Residuals { commutant: commutant.smallest_retained, ..Residuals::default() };
    if interior_verdict(x, &kern).is_some() {
        residuals.classical = f64::INFINITY;
        residuals.matrix = f64::INFINITY;
        residuals.dilation = f64::INFINITY;
        return Ok(ExtremeReport {
            classical: false,
            matrix: false,
            free: false,
            irreducible,
            kernel_dim: 0,
            dilation_subspace_dim: pencil.g() * x.n(),
            residuals,
        });
    }
    let cl = hermitian_system(pencil, x, &kern, false, tol);
    let mx = hermitian_system(pencil, x, &kern, true, tol);
    let sub = dilation_subspace_from_kernel(pencil, x, &kern, tol)?;
    residuals.classical = cl.residual;
    residuals.matrix = mx.residual;
    residuals.dilation = sub.residual;
    let free = irreducible && sub.dim() == 0;
    let report = ExtremeReport {
        classical: cl.extreme,
        matrix: mx.extreme,
        free,
        irreducible,
        kernel_dim: kern.k.ncols(),
        dilation_subspace_dim: sub.dim(),
        residuals,
    };
    if report.free && !report.matrix {
        return Err(Error::HierarchyViolation("free extreme but not matrix extreme".into()));
    }
    if report.matrix && !report.classical {
        return Err(Error::HierarchyViolation("matrix extreme but not classical extreme".into()));
    }
    let level1 = x.n() == 1 && (kern.field == Field::Real || opts.conj_closed);
    if level1 && report.classical != report.free {
        return Err(Error::HierarchyViolation(format!(
            "level-1 point with classical = {} and free = {}",
            report.classical, report.free
        )));
    }
    Ok(report)
}
