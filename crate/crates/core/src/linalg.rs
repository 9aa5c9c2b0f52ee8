//! Dense linear-algebra helpers over `f64` and `Complex64`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::tuples::Field;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn is_real_matrix(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn max_imag(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn complexify(m: &RMat) -> CMat {
    m.map(c)
}

pub fn hermitian_deviation(m: &CMat) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn symmetrize(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Block-diagonal matrix with the given blocks along the diagonal.
pub fn block_diag(blocks: &[&CMat]) -> CMat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let (mut r, mut col) = (0, 0);
    for b in blocks {
        out.view_mut((r, col), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        col += b.ncols();
    }
    out
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// Columns whose eigenvalue satisfies `pred`.
    pub fn select(&self, pred: impl Fn(f64) -> bool) -> CMat {
        let idx: Vec<usize> = (0..self.values.len()).filter(|&i| pred(self.values[i])).collect();
        let mut out = CMat::zeros(self.vectors.nrows(), idx.len());
        for (k, &i) in idx.iter().enumerate() {
            out.set_column(k, &self.vectors.column(i));
        }
        out
    }
}

fn sorted_pairs(values: Vec<f64>, vectors: CMat) -> HermEigen {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut sorted = CMat::zeros(vectors.nrows(), vectors.ncols());
    for (k, &i) in order.iter().enumerate() {
        sorted.set_column(k, &vectors.column(i));
    }
    HermEigen { values: order.iter().map(|&i| values[i]).collect(), vectors: sorted }
}

pub fn herm_eigen(m: &CMat) -> HermEigen {
    if m.nrows() == 0 {
        return HermEigen { values: vec![], vectors: CMat::zeros(0, 0) };
    }
    if is_real_matrix(m) {
        let e = sym_eigen(&real_part(m));
        return HermEigen { values: e.values, vectors: complexify(&e.vectors) };
    }
    let e = SymmetricEigen::new(symmetrize(m));
    sorted_pairs(e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: RMat,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn select(&self, pred: impl Fn(f64) -> bool) -> RMat {
        let idx: Vec<usize> = (0..self.values.len()).filter(|&i| pred(self.values[i])).collect();
        let mut out = RMat::zeros(self.vectors.nrows(), idx.len());
        for (k, &i) in idx.iter().enumerate() {
            out.set_column(k, &self.vectors.column(i));
        }
        out
    }
}

pub fn sym_eigen(m: &RMat) -> SymEigen {
    if m.nrows() == 0 {
        return SymEigen { values: vec![], vectors: RMat::zeros(0, 0) };
    }
    let sym = (m + m.transpose()) * 0.5;
    let e = SymmetricEigen::new(sym);
    let values: Vec<f64> = e.eigenvalues.iter().copied().collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut vectors = RMat::zeros(m.nrows(), m.ncols());
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &e.eigenvectors.column(i));
    }
    SymEigen { values: order.iter().map(|&i| values[i]).collect(), vectors }
}

pub fn min_eig(m: &CMat) -> f64 {
    herm_eigen(m).min()
}

pub fn min_eig_real(m: &RMat) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Real symmetric matrix whose spectrum is that of `m` (doubled for
/// genuinely complex input): `A + iB -> [[A, -B], [B, A]]`.
pub fn realify(m: &CMat) -> RMat {
    if is_real_matrix(m) {
        return real_part(m);
    }
    let n = m.nrows();
    let mut out = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

/// Positive square root of a hermitian PSD matrix; negative eigenvalues are
/// clipped to zero.
pub fn psd_sqrt(m: &CMat) -> CMat {
    let e = herm_eigen(m);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        e.values.len(),
        e.values.iter().map(|&v| c(v.max(0.0).sqrt())),
    ));
    &e.vectors * d * e.vectors.adjoint()
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = if is_real_matrix(m) {
        real_part(m).singular_values().iter().copied().collect()
    } else {
        m.singular_values().iter().copied().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Null space of a linear map, computed by SVD with a relative threshold.
#[derive(Debug, Clone)]
pub struct NullSpace<M> {
    /// Orthonormal columns spanning the numerical null space.
    pub basis: M,
    /// Largest singular value of the map.
    pub sigma_max: f64,
    /// Smallest singular value counted as nonzero (infinity if none),
    /// relative to `sigma_max`.
    pub smallest_retained: f64,
}

impl<M> NullSpace<M> {
    fn threshold(sigma_max: f64, rel: f64) -> f64 {
        rel * sigma_max
    }
}

impl NullSpace<RMat> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

impl NullSpace<CMat> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Real null space of `m` (`rows x cols`). Rows are zero-padded so that the
/// SVD returns a full right factor.
pub fn null_space_real(m: &RMat, rel: f64) -> NullSpace<RMat> {
    let cols = m.ncols();
    if cols == 0 {
        return NullSpace { basis: RMat::zeros(0, 0), sigma_max: 0.0, smallest_retained: f64::INFINITY };
    }
    let rows = m.nrows().max(cols);
    let mut padded = RMat::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let sigma_max = s.iter().copied().fold(0.0, f64::max);
    let thr = NullSpace::<RMat>::threshold(sigma_max, rel);
    let mut null_idx = Vec::new();
    let mut smallest = f64::INFINITY;
    for i in 0..cols {
        if sigma_max == 0.0 || s[i] <= thr {
            null_idx.push(i);
        } else {
            smallest = smallest.min(s[i] / sigma_max);
        }
    }
    let mut basis = RMat::zeros(cols, null_idx.len());
    for (k, &i) in null_idx.iter().enumerate() {
        basis.set_column(k, &v_t.row(i).transpose());
    }
    NullSpace { basis, sigma_max, smallest_retained: smallest }
}

/// Complex null space of `m`.
pub fn null_space_complex(m: &CMat, rel: f64) -> NullSpace<CMat> {
    if is_real_matrix(m) {
        let ns = null_space_real(&real_part(m), rel);
        return NullSpace {
            basis: complexify(&ns.basis),
            sigma_max: ns.sigma_max,
            smallest_retained: ns.smallest_retained,
        };
    }
    let cols = m.ncols();
    if cols == 0 {
        return NullSpace { basis: CMat::zeros(0, 0), sigma_max: 0.0, smallest_retained: f64::INFINITY };
    }
    let rows = m.nrows().max(cols);
    let mut padded = CMat::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let sigma_max = s.iter().copied().fold(0.0, f64::max);
    let thr = NullSpace::<CMat>::threshold(sigma_max, rel);
    let mut null_idx = Vec::new();
    let mut smallest = f64::INFINITY;
    for i in 0..cols {
        if sigma_max == 0.0 || s[i] <= thr {
            null_idx.push(i);
        } else {
            smallest = smallest.min(s[i] / sigma_max);
        }
    }
    let mut basis = CMat::zeros(cols, null_idx.len());
    for (k, &i) in null_idx.iter().enumerate() {
        basis.set_column(k, &v_t.row(i).adjoint());
    }
    NullSpace { basis, sigma_max, smallest_retained: smallest }
}

/// Orthonormal (Frobenius) basis of the real vector space of hermitian
/// `n x n` matrices over `field`.
pub fn hermitian_basis(n: usize, field: Field) -> Vec<CMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = CMat::zeros(n, n);
        e[(i, i)] = ONE;
        out.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = CMat::zeros(n, n);
            e[(i, j)] = c(s);
            e[(j, i)] = c(s);
            out.push(e);
            if field == Field::Complex {
                let mut e = CMat::zeros(n, n);
                e[(i, j)] = C64::new(0.0, s);
                e[(j, i)] = C64::new(0.0, -s);
                out.push(e);
            }
        }
    }
    out
}

/// Appends the real parts (and imaginary parts if `with_imag`) of `m`,
/// column-major, to `out`.
pub fn push_real_coords(m: &CMat, with_imag: bool, out: &mut Vec<f64>) {
    out.extend(m.iter().map(|z| z.re));
    if with_imag {
        out.extend(m.iter().map(|z| z.im));
    }
}

/// Assembles a real matrix whose columns are given vectors of equal length.
pub fn columns_to_real(cols: &[Vec<f64>]) -> RMat {
    let rows = cols.first().map_or(0, |c| c.len());
    let mut out = RMat::zeros(rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            out[(i, j)] = *v;
        }
    }
    out
}

/// Solves `a x = b` in the least-squares sense through an SVD pseudo-inverse.
pub fn least_squares_real(a: &RMat, b: &nalgebra::DVector<f64>, rel: f64) -> nalgebra::DVector<f64> {
    if a.ncols() == 0 {
        return nalgebra::DVector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(b, rel * smax.max(f64::MIN_POSITIVE)).expect("u and v_t requested")
}
