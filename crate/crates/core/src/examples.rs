//! Canonical free spectrahedra and explicit constructions: the free cube,
//! the matrix ball, `M_{d,g}`, Halmos dilations, the `M_{1,g}` maximal
//! dilation, and the Pauli pair.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c, psd_sqrt, CMat, C64};
use crate::pencil::LinearPencil;
use crate::tuples::{Field, MatrixTuple};

/// A named pencil from the registry.
#[derive(Debug, Clone)]
pub struct NamedSpectrahedron {
    pub name: String,
    pub pencil: LinearPencil,
    pub meta: Meta,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub field: Field,
    pub params: Vec<usize>,
    /// How point coordinates map to the underlying objects, if not direct.
    pub coordinates: Option<String>,
}

fn named(name: String, pencil: LinearPencil, params: Vec<usize>, coordinates: Option<String>) -> NamedSpectrahedron {
    let field = pencil.field();
    NamedSpectrahedron { name, pencil, meta: Meta { field, params, coordinates } }
}

fn unit(m: usize, i: usize, j: usize, v: C64) -> CMat {
    let mut e = CMat::zeros(m, m);
    e[(i, j)] = v;
    e
}

fn check_positive(what: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::DimensionMismatch(format!("{what} must be at least 1")));
    }
    Ok(())
}

/// `C_g = {X : -I ⪯ X_j ⪯ I}` with diagonal coefficients ordered
/// `+x_1, -x_1, +x_2, ...` (`m = 2g`).
pub fn free_cube(g: usize) -> Result<NamedSpectrahedron> {
    check_positive("g", g)?;
    let m = 2 * g;
    let mats = (0..g)
        .map(|j| unit(m, 2 * j, 2 * j, c(1.0)) - unit(m, 2 * j + 1, 2 * j + 1, c(1.0)))
        .collect();
    let pencil = LinearPencil::new(MatrixTuple::from_matrices(Field::Real, mats)?)?;
    Ok(named(format!("cube:{g}"), pencil, vec![g], None))
}

/// `B_g = {X : sum X_j^2 ⪯ I}` via `[[I, row(X)], [col(X), I]] ⪰ 0`
/// (`m = g + 1`).
pub fn matrix_ball(g: usize) -> Result<NamedSpectrahedron> {
    check_positive("g", g)?;
    let m = g + 1;
    let mats = (1..=g).map(|j| unit(m, 0, j, c(1.0)) + unit(m, j, 0, c(1.0))).collect();
    let pencil = LinearPencil::new(MatrixTuple::from_matrices(Field::Real, mats)?)?;
    Ok(named(format!("ball:{g}"), pencil, vec![g], None))
}

/// `M_{d,g} = {(T, X) : sum T_i T_i^* + sum X_j^2 ⪯ I}` in the `2d + g`
/// self-adjoint coordinates `(U_1, V_1, .., U_d, V_d, X_1, .., X_g)` with
/// `T_i = U_i + i V_i`.
///
/// The pencil is the row-contraction LMI
/// `[[I, T_1, .., T_d, X_1, .., X_g], [col(T_i^*, X_j), I]] ⪰ 0` (after the
/// sign flip `-A ⊗ X`), so `m = 1 + d + g`: `U_i` has coefficient
/// `E_{0i} + E_{i0}` and `V_i` has `i (E_{0i} - E_{i0})`.
pub fn mdg_pencil(d: usize, g: usize) -> Result<NamedSpectrahedron> {
    check_positive("d", d)?;
    let m = 1 + d + g;
    let i = C64::new(0.0, 1.0);
    let mut mats = Vec::with_capacity(2 * d + g);
    for k in 1..=d {
        mats.push(unit(m, 0, k, c(1.0)) + unit(m, k, 0, c(1.0)));
        mats.push(unit(m, 0, k, i) - unit(m, k, 0, i));
    }
    for k in (d + 1)..=(d + g) {
        mats.push(unit(m, 0, k, c(1.0)) + unit(m, k, 0, c(1.0)));
    }
    let pencil = LinearPencil::new(MatrixTuple::from_matrices(Field::Complex, mats)?)?;
    Ok(named(
        format!("mdg:{d},{g}"),
        pencil,
        vec![d, g],
        Some("(U_1, V_1, .., U_d, V_d, X_1, .., X_g) with T_i = U_i + i V_i".into()),
    ))
}

/// Self-adjoint coordinates `(U_1, V_1, .., X_1, ..)` of `(T, X)`.
pub fn mdg_point(ts: &[CMat], xs: &MatrixTuple) -> Result<MatrixTuple> {
    let n = xs.n();
    let i = C64::new(0.0, 1.0);
    let mut mats = Vec::with_capacity(2 * ts.len() + xs.g());
    for t in ts {
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::DimensionMismatch("T_i and X_j must share a size".into()));
        }
        mats.push((t + t.adjoint()) * c(0.5));
        mats.push((t - t.adjoint()) * (c(0.5) / i));
    }
    mats.extend(xs.matrices().iter().cloned());
    MatrixTuple::new(Field::Complex, n, mats)
}

/// Inverse of [`mdg_point`]: returns `(T_1..T_d, X)`.
pub fn mdg_split(d: usize, p: &MatrixTuple) -> Result<(Vec<CMat>, MatrixTuple)> {
    if p.g() < 2 * d {
        return Err(Error::DimensionMismatch(format!("need at least {} coordinates", 2 * d)));
    }
    let i = C64::new(0.0, 1.0);
    let ts = (0..d).map(|k| p.get(2 * k) + p.get(2 * k + 1) * i).collect();
    let xs = MatrixTuple::new(p.field(), p.n(), p.matrices()[2 * d..].to_vec())?;
    Ok((ts, xs))
}

/// `λ_max(sum T_i T_i^* + sum X_j^2)`.
pub fn row_contraction_norm(ts: &[CMat], xs: &MatrixTuple) -> f64 {
    let n = xs.n();
    let mut q = CMat::zeros(n, n);
    for t in ts {
        q += t * t.adjoint();
    }
    for x in xs.matrices() {
        q += x * x;
    }
    linalg::herm_eigen(&q).max()
}

/// Dilates each `X_j` to the self-adjoint unitary
/// `[[X_j, √(I - X_j^2)], [√(I - X_j^2), -X_j]]`.
pub fn halmos_dilation(x: &MatrixTuple) -> Result<MatrixTuple> {
    let n = x.n();
    let id = CMat::identity(n, n);
    let mut out = Vec::with_capacity(x.g());
    for xj in x.matrices() {
        let e = linalg::herm_eigen(xj);
        let top = e.max().abs().max(e.min().abs());
        if top > 1.0 + 1e-10 {
            return Err(Error::OutsideCube(top));
        }
        let s = psd_sqrt(&(&id - xj * xj));
        let mut h = CMat::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(xj);
        h.view_mut((0, n), (n, n)).copy_from(&s);
        h.view_mut((n, 0), (n, n)).copy_from(&s);
        h.view_mut((n, n), (n, n)).copy_from(&(-xj));
        out.push(h);
    }
    MatrixTuple::new(x.field(), 2 * n, out)
}

/// Output of [`m1g_maximal_dilation`].
#[derive(Debug, Clone)]
pub struct M1gDilation {
    pub s: CMat,
    pub y: MatrixTuple,
    pub delta: f64,
}

/// Explicit `2n`-dimensional dilation `(S, Y)` of a strict contraction
/// `(T, X)` with `T` invertible:
/// `A = (I - TT^* - sum X_j^2)^{1/2}`, `C = δI`, `B = -C A^* (T^{-1})^*`,
/// `D = (I - BB^* - CC^*)^{1/2}`, `S = [[T, A], [B, C]]`,
/// `Y_1 = X_1 ⊕ D`, `Y_j = X_j ⊕ 0`. `δ` starts at `σ_min(T)/2` and is
/// halved until `BB^* + CC^* ⪯ (1 - 1e-6) I`.
pub fn m1g_maximal_dilation(t: &CMat, x: &MatrixTuple) -> Result<M1gDilation> {
    let n = x.n();
    if t.nrows() != n || t.ncols() != n {
        return Err(Error::DimensionMismatch(format!("T is {}x{}, X has n = {n}", t.nrows(), t.ncols())));
    }
    if x.g() == 0 {
        return Err(Error::DimensionMismatch("the construction needs g >= 1".into()));
    }
    let sv = linalg::singular_values(t);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin <= 1e-12 * sv.first().copied().unwrap_or(0.0).max(1.0) {
        return Err(Error::SingularT(smin));
    }
    let top = row_contraction_norm(std::slice::from_ref(t), x);
    if top >= 1.0 - 1e-12 {
        return Err(Error::NotStrictContraction(top));
    }
    let id = CMat::identity(n, n);
    let mut q = t * t.adjoint();
    for xj in x.matrices() {
        q += xj * xj;
    }
    let a = psd_sqrt(&(&id - &q));
    let t_inv_adj = t.clone().try_inverse().ok_or(Error::SingularT(smin))?.adjoint();
    let mut delta = smin / 2.0;
    let (b, cm) = loop {
        let cm = &id * c(delta);
        let b = -(&cm * a.adjoint() * &t_inv_adj);
        let load = linalg::herm_eigen(&(&b * b.adjoint() + &cm * cm.adjoint())).max();
        if load <= 1.0 - 1e-6 {
            break (b, cm);
        }
        delta /= 2.0;
        if delta < 1e-300 {
            return Err(Error::NotStrictContraction(top));
        }
    };
    let dmat = psd_sqrt(&(&id - &b * b.adjoint() - &cm * cm.adjoint()));
    let mut s = CMat::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(t);
    s.view_mut((0, n), (n, n)).copy_from(&a);
    s.view_mut((n, 0), (n, n)).copy_from(&b);
    s.view_mut((n, n), (n, n)).copy_from(&cm);
    let zero = CMat::zeros(n, n);
    let ys = x
        .matrices()
        .iter()
        .enumerate()
        .map(|(j, xj)| linalg::block_diag(&[xj, if j == 0 { &dmat } else { &zero }]))
        .collect();
    let field = if linalg::is_real_matrix(t) { x.field() } else { Field::Complex };
    Ok(M1gDilation { s, y: MatrixTuple::new(field, 2 * n, ys)?, delta })
}

/// `(σ_z, σ_x)`.
pub fn pauli_pair() -> MatrixTuple {
    MatrixTuple::from_rows(2, &[&[1.0, 0.0, 0.0, -1.0], &[0.0, 1.0, 1.0, 0.0]]).expect("valid")
}

/// Registry lookup: `cube:g`, `ball:g`, `mdg:d,g`, `pauli`.
pub fn parse_named(name: &str) -> Result<NamedSpectrahedron> {
    let (head, args) = name.split_once(':').unwrap_or((name, ""));
    let nums = || -> Result<Vec<usize>> {
        args.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad parameter in `{name}`"))))
            .collect()
    };
    match head {
        "cube" | "ball" => {
            let p = nums()?;
            if p.len() != 1 {
                return Err(Error::Parse(format!("`{head}` takes one parameter")));
            }
            if head == "cube" {
                free_cube(p[0])
            } else {
                matrix_ball(p[0])
            }
        }
        "mdg" => {
            let p = nums()?;
            if p.len() != 2 {
                return Err(Error::Parse("`mdg` takes two parameters d,g".into()));
            }
            mdg_pencil(p[0], p[1])
        }
        "pauli" if args.is_empty() => {
            let pencil = LinearPencil::new(pauli_pair())?;
            Ok(named("pauli".into(), pencil, vec![], None))
        }
        _ => Err(Error::Parse(format!("unknown named set `{name}`"))),
    }
}
