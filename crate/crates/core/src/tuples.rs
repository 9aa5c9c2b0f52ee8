//! Matrix tuples and their basic algebra: direct sums, isometric
//! conjugation, matrix convex combinations, irreducibility and unitary
//! equivalence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, columns_to_real, hermitian_basis, is_real_matrix, null_space_complex, null_space_real,
    push_real_coords, singular_values, CMat, RMat, C64,
};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

/// A g-tuple of hermitian `n x n` matrices over the reals or complexes.
///
/// Entries are stored as complex matrices; a real tuple has identically zero
/// imaginary parts. Values are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTuple {
    field: Field,
    n: usize,
    mats: Vec<CMat>,
}

impl MatrixTuple {
    /// Builds a tuple of dimension `n`, symmetrizing entries whose hermitian
    /// deviation is within `tol.sym` and rejecting the rest.
    pub fn with_tolerance(field: Field, n: usize, mats: Vec<CMat>, tol: &Tolerances) -> Result<Self> {
        let mut out = Vec::with_capacity(mats.len());
        for (j, m) in mats.into_iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "entry {j} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Parse(format!("entry {j} has non-finite values")));
            }
            let dev = linalg::hermitian_deviation(&m);
            if dev > tol.sym * (1.0 + m.norm()) {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let mut m = linalg::symmetrize(&m);
            if field == Field::Real {
                let im = linalg::max_imag(&m);
                if im > tol.sym * (1.0 + m.norm()) {
                    return Err(Error::ImaginaryInRealTuple(im));
                }
                m.iter_mut().for_each(|z| z.im = 0.0);
            }
            out.push(m);
        }
        Ok(Self { field, n, mats: out })
    }

    pub fn new(field: Field, n: usize, mats: Vec<CMat>) -> Result<Self> {
        Self::with_tolerance(field, n, mats, &Tolerances::default())
    }

    /// Infers `n` from the first entry; the tuple must be nonempty.
    pub fn from_matrices(field: Field, mats: Vec<CMat>) -> Result<Self> {
        let n = mats
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::DimensionMismatch("cannot infer n from an empty tuple".into()))?;
        Self::new(field, n, mats)
    }

    pub fn from_real(mats: Vec<RMat>) -> Result<Self> {
        Self::from_matrices(Field::Real, mats.iter().map(linalg::complexify).collect())
    }

    /// Real tuple from row-major slices; each slice holds `n * n` entries.
    pub fn from_rows(n: usize, rows: &[&[f64]]) -> Result<Self> {
        let mats = rows.iter().map(|r| linalg::complexify(&RMat::from_row_slice(n, n, r))).collect();
        Self::new(Field::Real, n, mats)
    }

    pub fn zeros(field: Field, g: usize, n: usize) -> Self {
        Self { field, n, mats: vec![CMat::zeros(n, n); g] }
    }

    /// The 0-dimensional tuple, neutral for direct sums.
    pub fn empty(field: Field, g: usize) -> Self {
        Self::zeros(field, g, 0)
    }

    pub fn identities(field: Field, g: usize, n: usize) -> Self {
        Self { field, n, mats: vec![CMat::identity(n, n); g] }
    }

    /// Real scalars viewed as a level-1 tuple.
    pub fn scalars(values: &[f64]) -> Self {
        Self {
            field: Field::Real,
            n: 1,
            mats: values.iter().map(|&v| CMat::from_element(1, 1, c(v))).collect(),
        }
    }

    pub fn g(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn get(&self, j: usize) -> &CMat {
        &self.mats[j]
    }

    /// True when every entry is numerically real, regardless of the declared
    /// field.
    pub fn has_real_entries(&self) -> bool {
        self.mats.iter().all(is_real_matrix)
    }

    /// Same entries, declared over `field`.
    pub fn with_field(&self, field: Field) -> Result<Self> {
        Self::new(field, self.n, self.mats.clone())
    }

    /// Level-1 tuple as real coordinates; `None` unless `n == 1`.
    pub fn as_scalars(&self) -> Option<Vec<f64>> {
        (self.n == 1).then(|| self.mats.iter().map(|m| m[(0, 0)].re).collect())
    }

    /// Frobenius norm of the stacked tuple.
    pub fn norm(&self) -> f64 {
        self.mats.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.g(), other.g());
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| (a - b).norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, t: f64) -> Self {
        Self { field: self.field, n: self.n, mats: self.mats.iter().map(|m| m * c(t)).collect() }
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Result<Self> {
        Self::new(self.field, self.n, self.mats.iter().map(f).collect())
    }

    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.g() != other.g() || self.n != other.n {
            return Err(Error::DimensionMismatch("linear combination of unlike tuples".into()));
        }
        Ok(Self {
            field: self.field.join(other.field),
            n: self.n,
            mats: self.mats.iter().zip(&other.mats).map(|(x, y)| x * c(a) + y * c(b)).collect(),
        })
    }

    /// Entrywise block-diagonal `X ⊕ Y`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.g() != other.g() {
            return Err(Error::DimensionMismatch(format!("g = {} vs {}", self.g(), other.g())));
        }
        if self.field != other.field {
            return Err(Error::DimensionMismatch("direct sum of tuples over different fields".into()));
        }
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| linalg::block_diag(&[a, b]))
            .collect();
        Ok(Self { field: self.field, n: self.n + other.n, mats })
    }

    /// `V^* X V` for a `n x k` matrix `V`.
    pub fn conjugate(&self, v: &CMat) -> Result<Self> {
        if v.nrows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "conjugating matrix has {} rows, tuple has n = {}",
                v.nrows(),
                self.n
            )));
        }
        let field = if is_real_matrix(v) { self.field } else { Field::Complex };
        let vh = v.adjoint();
        let mats = self.mats.iter().map(|m| linalg::symmetrize(&(&vh * m * v))).collect();
        Ok(Self { field, n: v.ncols(), mats })
    }

    /// Restriction to a principal block `[start, start + len)`.
    pub fn principal_block(&self, start: usize, len: usize) -> Self {
        Self {
            field: self.field,
            n: len,
            mats: self.mats.iter().map(|m| m.view((start, start), (len, len)).into_owned()).collect(),
        }
    }

    /// `max_j |X_j^2 - I|_F`.
    pub fn unitary_defect(&self) -> f64 {
        let id = CMat::identity(self.n, self.n);
        self.mats.iter().map(|m| (m * m - &id).norm()).fold(0.0, f64::max)
    }

    /// Real dimension and an orthonormal basis of the self-adjoint commutant
    /// `{S = S^* : S X_j = X_j S}` over the tuple's field.
    pub fn commutant(&self, rel: f64) -> Commutant {
        let n = self.n;
        let basis = hermitian_basis(n, self.field);
        let with_imag = self.field == Field::Complex;
        let cols: Vec<Vec<f64>> = basis
            .iter()
            .map(|s| {
                let mut col = Vec::new();
                for x in &self.mats {
                    push_real_coords(&(s * x - x * s), with_imag, &mut col);
                }
                col
            })
            .collect();
        if cols.is_empty() {
            return Commutant { elements: vec![], smallest_retained: f64::INFINITY };
        }
        let a = if cols[0].is_empty() { RMat::zeros(0, cols.len()) } else { columns_to_real(&cols) };
        let ns = null_space_real(&a, rel);
        let elements = (0..ns.dim())
            .map(|k| {
                let mut s = CMat::zeros(n, n);
                for (b, e) in basis.iter().enumerate() {
                    s += e * c(ns.basis[(b, k)]);
                }
                s
            })
            .collect();
        Commutant { elements, smallest_retained: ns.smallest_retained }
    }
}

/// Self-adjoint commutant of a tuple.
#[derive(Debug, Clone)]
pub struct Commutant {
    pub elements: Vec<CMat>,
    /// Smallest relative singular value not counted as null.
    pub smallest_retained: f64,
}

impl Commutant {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }
}

/// Irreducibility verdict with the real dimension of the self-adjoint
/// commutant. The empty tuple is reported reducible with dimension 0.
pub fn irreducible(x: &MatrixTuple, tol: &Tolerances) -> (bool, usize) {
    if x.n() == 0 {
        return (false, 0);
    }
    let dim = x.commutant(tol.ker).dim();
    (dim == 1, dim)
}

/// A list of `(gamma_i, X^i)` representing `sum gamma_i^* X^i gamma_i`.
#[derive(Debug, Clone)]
pub struct MatrixConvexCombination {
    terms: Vec<(CMat, MatrixTuple)>,
    target_dim: usize,
}

impl MatrixConvexCombination {
    /// Checks shapes only; normalization is checked by [`apply_combination`].
    pub fn new(terms: Vec<(CMat, MatrixTuple)>, target_dim: usize) -> Result<Self> {
        let g = terms.first().map(|(_, x)| x.g());
        for (i, (gamma, x)) in terms.iter().enumerate() {
            if gamma.nrows() != x.n() || gamma.ncols() != target_dim {
                return Err(Error::DimensionMismatch(format!(
                    "gamma_{i} is {}x{}, expected {}x{target_dim}",
                    gamma.nrows(),
                    gamma.ncols(),
                    x.n()
                )));
            }
            if Some(x.g()) != g {
                return Err(Error::DimensionMismatch("terms with different g".into()));
            }
            if gamma.norm() == 0.0 {
                return Err(Error::IllFormedCombination(f64::NAN));
            }
        }
        Ok(Self { terms, target_dim })
    }

    pub fn terms(&self) -> &[(CMat, MatrixTuple)] {
        &self.terms
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    /// `|sum gamma_i^* gamma_i - I|_F`.
    pub fn normalization_error(&self) -> f64 {
        let mut acc = CMat::zeros(self.target_dim, self.target_dim);
        for (gamma, _) in &self.terms {
            acc += gamma.adjoint() * gamma;
        }
        (acc - CMat::identity(self.target_dim, self.target_dim)).norm()
    }

    pub fn with_scaled_gammas(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(gm, x)| (gm * c(s), x.clone())).collect(),
            target_dim: self.target_dim,
        }
    }
}

/// Evaluates `sum gamma_i^* X^i gamma_i`.
pub fn apply_combination(comb: &MatrixConvexCombination, tol: &Tolerances) -> Result<MatrixTuple> {
    let err = comb.normalization_error();
    if err > tol.comb {
        return Err(Error::IllFormedCombination(err));
    }
    let first = comb.terms.first().ok_or_else(|| Error::IllFormedCombination(err))?;
    let g = first.1.g();
    let n = comb.target_dim;
    let mut field = Field::Real;
    let mut mats = vec![CMat::zeros(n, n); g];
    for (gamma, x) in &comb.terms {
        let y = x.conjugate(gamma)?;
        field = field.join(y.field());
        for (acc, m) in mats.iter_mut().zip(y.matrices()) {
            *acc += m;
        }
    }
    MatrixTuple::with_tolerance(field, n, mats, tol)
}

/// True iff every `gamma_i` is onto, i.e. has numerical rank equal to its
/// number of rows.
pub fn is_proper(comb: &MatrixConvexCombination, tol: &Tolerances) -> bool {
    comb.terms.iter().all(|(gamma, _)| numerical_rank(gamma, tol.rank) == gamma.nrows())
}

pub fn numerical_rank(m: &CMat, rel: f64) -> usize {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel * smax).count()
}

/// The pair `(gamma^* gamma, gamma^* X gamma)`.
#[derive(Debug, Clone)]
pub struct GammaPoint {
    pub mass: CMat,
    pub image: MatrixTuple,
}

impl GammaPoint {
    /// `t * self + (1 - t) * other`.
    pub fn blend(&self, other: &Self, t: f64) -> Result<Self> {
        Ok(Self {
            mass: &self.mass * c(t) + &other.mass * c(1.0 - t),
            image: self.image.linear_combination(t, &other.image, 1.0 - t)?,
        })
    }

    pub fn distance(&self, other: &Self) -> f64 {
        ((&self.mass - &other.mass).norm_squared() + self.image.distance(&other.image).powi(2)).sqrt()
    }
}

pub fn gamma_embed(x: &MatrixTuple, gamma: &CMat, tol: &Tolerances) -> Result<GammaPoint> {
    let mass = gamma.adjoint() * gamma;
    let tr = mass.trace().re;
    if (tr - 1.0).abs() > tol.comb {
        return Err(Error::BadNormalization(tr));
    }
    Ok(GammaPoint { mass, image: x.conjugate(gamma)? })
}

/// Traces of all words of length `1..=max_len` in the tuple's entries, in a
/// fixed enumeration order. Stops after `cap` words.
pub fn word_traces(x: &MatrixTuple, max_len: usize, cap: usize) -> Vec<C64> {
    let g = x.g();
    let mut out = Vec::new();
    let mut frontier: Vec<CMat> = vec![CMat::identity(x.n(), x.n())];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * g);
        for w in &frontier {
            for m in x.matrices() {
                let p = w * m;
                out.push(p.trace());
                next.push(p);
                if out.len() >= cap {
                    return out;
                }
            }
        }
        frontier = next;
    }
    out
}

/// Word-trace prefilter length and budget. Exhaustive Specht-type lists grow
/// like `g^(2 n^2)`; the decision is made by the intertwiner test instead.
const WORD_LEN: usize = 4;
const WORD_CAP: usize = 4096;

/// Decides `X ~_u Y`.
///
/// Word traces up to a short length act as a fast rejection filter; the
/// verdict comes from the intertwiner space `{T : T X_j = Y_j T}`, whose
/// generic element is invertible exactly when the tuples are similar, and
/// its unitary polar factor then conjugates `X` onto `Y`.
pub fn unitarily_equivalent(x: &MatrixTuple, y: &MatrixTuple, tol: &Tolerances) -> bool {
    if x.g() != y.g() || x.n() != y.n() {
        return false;
    }
    let n = x.n();
    if n == 0 {
        return true;
    }
    let tx = word_traces(x, WORD_LEN.min(2 * n * n), WORD_CAP);
    let ty = word_traces(y, WORD_LEN.min(2 * n * n), WORD_CAP);
    let scale = tx.iter().chain(&ty).fold(0.0_f64, |a, z| a.max(z.norm()));
    if tx.iter().zip(&ty).any(|(a, b)| (a - b).norm() > tol.trace(scale)) {
        return false;
    }
    match intertwining_unitary(x, y, tol) {
        Some(u) => {
            let resid: f64 = x
                .matrices()
                .iter()
                .zip(y.matrices())
                .map(|(xm, ym)| (&u * xm * u.adjoint() - ym).norm())
                .fold(0.0, f64::max);
            resid <= 1e-6 * (1.0 + x.norm().max(y.norm()))
        }
        None => false,
    }
}

/// A unitary `U` with `U X_j U^* ≈ Y_j`, if the intertwiner space contains
/// an invertible element.
pub fn intertwining_unitary(x: &MatrixTuple, y: &MatrixTuple, tol: &Tolerances) -> Option<CMat> {
    let n = x.n();
    let field = x.field().join(y.field());
    let mut cols: Vec<CMat> = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let mut e = CMat::zeros(n, n);
            e[(i, j)] = c(1.0);
            let mut col = CMat::zeros(n * n * x.g(), 1);
            for (k, (xm, ym)) in x.matrices().iter().zip(y.matrices()).enumerate() {
                let r = &e * xm - ym * &e;
                for (p, z) in r.iter().enumerate() {
                    col[(k * n * n + p, 0)] = *z;
                }
            }
            cols.push(col);
        }
    }
    let mut sys = CMat::zeros(n * n * x.g(), n * n);
    for (j, col) in cols.iter().enumerate() {
        sys.set_column(j, &col.column(0));
    }
    let ns = null_space_complex(&sys, tol.ker);
    if ns.dim() == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1bad_5eed);
    let mut t = CMat::zeros(n, n);
    for k in 0..ns.dim() {
        let w: f64 = StandardNormal.sample(&mut rng);
        let col = ns.basis.column(k);
        for (p, z) in col.iter().enumerate() {
            t[(p % n, p / n)] += z * c(w);
        }
    }
    if field == Field::Real {
        t.iter_mut().for_each(|z| z.im = 0.0);
    }
    let s = singular_values(&t);
    if s.is_empty() || s[s.len() - 1] <= 1e-6 * s[0] {
        return None;
    }
    let svd = t.svd(true, true);
    Some(svd.u? * svd.v_t?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn pauli() -> MatrixTuple {
        MatrixTuple::from_rows(2, &[&[1.0, 0.0, 0.0, -1.0], &[0.0, 1.0, 1.0, 0.0]]).unwrap()
    }

    #[test]
    fn direct_sum_with_empty_is_identity() {
        let x = pauli();
        let s = x.direct_sum(&MatrixTuple::empty(Field::Real, 2)).unwrap();
        assert_eq!(s, x);
    }

    #[test]
    fn direct_sum_of_scalars() {
        let s = MatrixTuple::scalars(&[1.0]).direct_sum(&MatrixTuple::scalars(&[-1.0])).unwrap();
        assert_eq!(s.get(0)[(0, 0)].re, 1.0);
        assert_eq!(s.get(0)[(1, 1)].re, -1.0);
        assert_eq!(s.get(0)[(0, 1)].re, 0.0);
    }

    #[test]
    fn direct_sum_rejects_unlike_tuples() {
        let x = pauli();
        let y = MatrixTuple::scalars(&[1.0]);
        assert!(matches!(x.direct_sum(&y), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn pauli_pair_is_irreducible_and_doubled_commutant_has_dim_3() {
        let tol = Tolerances::default();
        assert_eq!(irreducible(&pauli(), &tol), (true, 1));
        // Over the reals the self-adjoint commutant of X ⊕ X is Sym_2 ⊗ I.
        let d = pauli().direct_sum(&pauli()).unwrap();
        assert_eq!(irreducible(&d, &tol), (false, 3));
        // Over the complexes it is Herm_2 ⊗ I, matching the full commutant M_2 ⊗ I of dimension 4.
        let dc = d.with_field(Field::Complex).unwrap();
        assert_eq!(irreducible(&dc, &tol), (false, 4));
    }

    #[test]
    fn diagonal_pair_is_reducible() {
        let x = MatrixTuple::from_rows(2, &[&[1.0, 0.0, 0.0, 2.0], &[3.0, 0.0, 0.0, -1.0]]).unwrap();
        assert_eq!(irreducible(&x, &Tolerances::default()), (false, 2));
    }

    #[test]
    fn scalar_tuple_is_irreducible() {
        assert_eq!(irreducible(&MatrixTuple::scalars(&[0.3, -2.0]), &Tolerances::default()), (true, 1));
    }

    #[test]
    fn combination_examples() {
        let tol = Tolerances::default();
        let x = pauli();
        let id = MatrixConvexCombination::new(vec![(CMat::identity(2, 2), x.clone())], 2).unwrap();
        assert!(apply_combination(&id, &tol).unwrap().distance(&x) < 1e-14);

        let y = MatrixTuple::scalars(&[1.0, 2.0]);
        let z = MatrixTuple::scalars(&[-1.0, 0.5]);
        let t: f64 = 0.3;
        let comb = MatrixConvexCombination::new(
            vec![
                (CMat::from_element(1, 1, c(t.sqrt())), y.clone()),
                (CMat::from_element(1, 1, c((1.0 - t).sqrt())), z.clone()),
            ],
            1,
        )
        .unwrap();
        let out = apply_combination(&comb, &tol).unwrap();
        let expect = y.linear_combination(t, &z, 1.0 - t).unwrap();
        assert!(out.distance(&expect) < 1e-14);

        let bad = comb.with_scaled_gammas(1.01);
        assert!(matches!(apply_combination(&bad, &tol), Err(Error::IllFormedCombination(_))));
    }

    #[test]
    fn unitary_conjugation_preserves_spectra() {
        let tol = Tolerances::default();
        let mut rng = random::rng(4);
        let x = random::hermitian_tuple(&mut rng, 2, 3, Field::Complex);
        let u = random::unitary(&mut rng, 3, Field::Complex);
        let comb = MatrixConvexCombination::new(vec![(u, x.clone())], 3).unwrap();
        let y = apply_combination(&comb, &tol).unwrap();
        for (a, b) in x.matrices().iter().zip(y.matrices()) {
            let ea = linalg::herm_eigen(a).values;
            let eb = linalg::herm_eigen(b).values;
            for (p, q) in ea.iter().zip(&eb) {
                assert!((p - q).abs() < 1e-12);
            }
        }
        assert!(unitarily_equivalent(&x, &y, &tol));
    }

    #[test]
    fn is_proper_examples() {
        let tol = Tolerances::default();
        let x = MatrixTuple::scalars(&[0.0]);
        let c1 = MatrixConvexCombination::new(vec![(CMat::identity(1, 1), x.clone())], 1).unwrap();
        assert!(is_proper(&c1, &tol));
        // 1x2 gamma of rank 1: onto F^1.
        let row = CMat::from_row_slice(1, 2, &[c(1.0), c(0.0)]);
        let c2 = MatrixConvexCombination::new(vec![(row, x.clone())], 2).unwrap();
        assert!(is_proper(&c2, &tol));
        // 2x2 gamma of rank 1 is not onto F^2.
        let pad = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let y = MatrixTuple::zeros(Field::Real, 1, 2);
        let c3 = MatrixConvexCombination::new(vec![(pad, y)], 2).unwrap();
        assert!(!is_proper(&c3, &tol));
    }

    #[test]
    fn pauli_swap_is_unitarily_equivalent_via_hadamard() {
        let tol = Tolerances::default();
        let x = pauli();
        let swapped = MatrixTuple::new(Field::Real, 2, vec![x.get(1).clone(), x.get(0).clone()]).unwrap();
        let h = CMat::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]) * c(std::f64::consts::FRAC_1_SQRT_2);
        assert!(x.conjugate(&h).unwrap().distance(&swapped) < 1e-14);
        assert!(unitarily_equivalent(&x, &swapped, &tol));
    }

    #[test]
    fn different_spectra_are_not_equivalent() {
        let tol = Tolerances::default();
        let a = MatrixTuple::from_rows(2, &[&[1.0, 0.0, 0.0, -1.0]]).unwrap();
        let b = MatrixTuple::from_rows(2, &[&[1.0, 0.0, 0.0, 1.0]]).unwrap();
        assert!(!unitarily_equivalent(&a, &b, &tol));
        let c3 = MatrixTuple::from_rows(3, &[&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]]).unwrap();
        assert!(!unitarily_equivalent(&a, &c3, &tol));
    }

    #[test]
    fn gamma_embed_examples() {
        let tol = Tolerances::default();
        let x = MatrixTuple::scalars(&[0.7]);
        let p = gamma_embed(&x, &CMat::identity(1, 1), &tol).unwrap();
        assert_eq!(p.mass[(0, 0)].re, 1.0);
        assert_eq!(p.image.get(0)[(0, 0)].re, 0.7);
        assert!(matches!(
            gamma_embed(&x, &CMat::from_element(1, 1, c(2.0)), &tol),
            Err(Error::BadNormalization(_))
        ));
    }

    #[test]
    fn gamma_embed_through_range_isometry() {
        // gamma of rank one: gamma = xi * (xi^* gamma) with xi the range isometry.
        let tol = Tolerances::default();
        let mut rng = random::rng(9);
        let x = random::hermitian_tuple(&mut rng, 2, 3, Field::Real);
        let u = random::unitary(&mut rng, 3, Field::Real);
        let xi = u.columns(0, 1).into_owned();
        let w = CMat::from_row_slice(1, 2, &[c(0.6), c(0.8)]);
        let gamma = &xi * &w;
        let direct = gamma_embed(&x, &gamma, &tol).unwrap();
        let compressed = x.conjugate(&xi).unwrap();
        let via = gamma_embed(&compressed, &(xi.adjoint() * &gamma), &tol).unwrap();
        assert!(direct.distance(&via) < 1e-12);
    }
}
