//! Acceptance suite: ten property checks with pinned tolerances, one
//! PASS/FAIL line each. Run with `cargo test -p freespec-core --test acceptance`;
//! pass criterion numbers as arguments to run a subset.

use std::f64::consts::PI;
use std::time::Instant;

use freespec::dilation::{decompose_to_free_extremes, DilationOptions};
use freespec::examples::{free_cube, halmos_dilation, m1g_maximal_dilation, matrix_ball, mdg_pencil, mdg_point, pauli_pair};
use freespec::extreme::{classical_extreme_test, free_extreme_test, matrix_extreme_test};
use freespec::linalg::{self, c, CMat, RMat};
use freespec::oracles::search_nontrivial_dilation;
use freespec::pencil::{mconv_membership, membership, pencil_of};
use freespec::random::{self, Placement, SeededRng};
use freespec::solver::{extreme_point_of_spectrahedron, maximize_alpha, max_step, sigma_system};
use freespec::tuples::irreducible;
use freespec::{AffinePencil, Field, LinearPencil, MatrixTuple, SolverOptions, Status, Tolerances};
use rand::Rng;

const SEED: u64 = 20_240_601;

// pinned tolerances
const RECONSTRUCT_TOL: f64 = 1e-6;
const UNITARY_TOL: f64 = 1e-6;
const DISK_RADIAL_TOL: f64 = 1e-5;
const POLAR_TOL: f64 = 1e-6;
const M1G_TOL: f64 = 1e-8;
const ORACLE_TRIALS: usize = 10_000;
const SOLVER_MATCH_TOL: f64 = 1e-4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng_for(criterion: u64, i: usize) -> SeededRng {
    random::rng(random::derive_seed(SEED + criterion, i as u64))
}

/// Coefficient size for the `k`-th instance: `m ∈ {2, 3, 4}`, but at least
/// 3 when `g = 3` (three real 2x2 coefficients always give an unbounded set).
fn m_for(g: usize, k: usize) -> usize {
    if g >= 3 { 3 + k % 2 } else { 2 + k % 3 }
}

fn complex_bounded_pencil(rng: &mut SeededRng, g: usize, m: usize) -> LinearPencil {
    loop {
        let p = LinearPencil::new(random::hermitian_tuple(rng, g, m, Field::Complex)).unwrap();
        if p.is_bounded_level1() {
            return p;
        }
    }
}

/// `cos θ σ_z + sin θ σ_x` scaled eigenvalues: `R(θ) diag(a, b) R(θ)^T`.
fn rotated_diag(a: f64, b: f64, theta: f64) -> CMat {
    let (s, co) = theta.sin_cos();
    let r = RMat::from_row_slice(2, 2, &[co, -s, s, co]);
    let d = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b]));
    linalg::complexify(&(&r * d * r.transpose()))
}

// ---------------------------------------------------------------- 1 and 2

struct SpanStats {
    runs: usize,
    failures: Vec<String>,
    max_residual: f64,
    max_size_ratio: f64,
    descent_steps: usize,
    descent_violations: usize,
}

fn spanning_runs() -> SpanStats {
    let tol = Tolerances::default();
    let mut st = SpanStats { runs: 50, failures: vec![], max_residual: 0.0, max_size_ratio: 0.0, descent_steps: 0, descent_violations: 0 };
    for i in 0..st.runs {
        let mut rng = rng_for(1, i);
        let g = 2 + i % 2;
        let m = m_for(g, i / 2);
        let n = 1 + (i / 6) % 3;
        let p = random::bounded_pencil(&mut rng, g, m);
        let x = random::point(&mut rng, &p, n, Field::Real, Placement::Mixed);
        let opts = DilationOptions { seed: i as u64, ..Default::default() };
        let d = match decompose_to_free_extremes(&p, &x, &tol, &opts) {
            Ok(d) => d,
            Err(e) => {
                st.failures.push(format!("#{i} (g={g}, m={m}, n={n}): {e}"));
                continue;
            }
        };
        st.max_residual = st.max_residual.max(d.residual);
        if d.residual > RECONSTRUCT_TOL {
            st.failures.push(format!("#{i}: residual {:.2e}", d.residual));
        }
        for (k, s) in d.summands.iter().enumerate() {
            if !matches!(free_extreme_test(&p, s, &tol), Ok(true)) {
                st.failures.push(format!("#{i}: summand {k} (size {}) not free extreme", s.n()));
            }
        }
        st.max_size_ratio = st.max_size_ratio.max(d.total_size as f64 / (n * (g + 1)) as f64);
        if d.total_size > n * (g + 1) {
            st.failures.push(format!("#{i}: total size {} > {}", d.total_size, n * (g + 1)));
        }
        if d.steps > n * g {
            st.failures.push(format!("#{i}: {} steps > {}", d.steps, n * g));
        }
        for cand in &d.dilation_trace {
            st.descent_steps += 1;
            if cand.dim_after >= cand.dim_before {
                st.descent_violations += 1;
            }
        }
    }
    st
}

fn criterion_1(st: &SpanStats) -> Outcome {
    let detail = format!(
        "{}/{} decompositions ok, max residual {:.1e} (tol {RECONSTRUCT_TOL:.0e}), max size/n(g+1) {:.2}{}",
        st.runs - st.failures.len().min(st.runs),
        st.runs,
        st.max_residual,
        st.max_size_ratio,
        if st.failures.is_empty() { String::new() } else { format!("; first failure: {}", st.failures[0]) }
    );
    outcome(st.failures.is_empty(), detail)
}

fn criterion_2(st: &SpanStats) -> Outcome {
    outcome(
        st.descent_violations == 0 && st.descent_steps > 0,
        format!("{} dilation steps, {} non-decreasing subspace dimensions", st.descent_steps, st.descent_violations),
    )
}

// ---------------------------------------------------------------- 3

fn hierarchy_point(i: usize, rng: &mut SeededRng) -> (LinearPencil, MatrixTuple) {
    match i % 10 {
        0..=6 => {
            let g = 2 + i % 2;
            let (m, n) = (m_for(g, i / 2), 1 + (i / 3) % 3);
            let p = random::bounded_pencil(rng, g, m);
            let x = random::point(rng, &p, n, Field::Real, Placement::Boundary);
            (p, x)
        }
        7 => {
            let p = complex_bounded_pencil(rng, 2, 2 + (i / 10) % 2);
            let x = random::point(rng, &p, 1 + (i / 20) % 2, Field::Complex, Placement::Boundary);
            (p, x)
        }
        8 => {
            let p = free_cube(2).unwrap().pencil;
            let theta = rng.random_range(0.0..PI);
            let vals = [-1.0, 1.0, rng.random_range(-1.0..1.0)];
            let x = MatrixTuple::from_matrices(
                Field::Real,
                vec![rotated_diag(1.0, vals[rng.random_range(0..3)], 0.0), rotated_diag(vals[rng.random_range(0..3)], -1.0, theta)],
            )
            .unwrap();
            (p, x)
        }
        _ => {
            let p = matrix_ball(2 + (i / 10) % 2).unwrap().pencil;
            let x = random::point(rng, &p, 1 + (i / 10) % 2, Field::Real, Placement::Boundary);
            (p, x)
        }
    }
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    let (mut counts, mut violations, mut errors) = ([0usize; 3], Vec::new(), Vec::new());
    for i in 0..1000 {
        let mut rng = rng_for(3, i);
        let (p, x) = hierarchy_point(i, &mut rng);
        let r = (|| -> freespec::Result<(bool, bool, bool)> {
            Ok((free_extreme_test(&p, &x, &tol)?, matrix_extreme_test(&p, &x, &tol)?.extreme, classical_extreme_test(&p, &x, &tol)?.extreme))
        })();
        match r {
            Ok((f, m, cl)) => {
                counts[0] += f as usize;
                counts[1] += m as usize;
                counts[2] += cl as usize;
                if (f && !m) || (m && !cl) {
                    violations.push(format!("#{i} free={f} matrix={m} classical={cl}"));
                }
            }
            Err(e) => errors.push(format!("#{i}: {e}")),
        }
    }
    outcome(
        violations.is_empty() && errors.is_empty(),
        format!(
            "1000 boundary points: free {}, matrix {}, classical {}; {} violations, {} errors{}",
            counts[0],
            counts[1],
            counts[2],
            violations.len(),
            errors.len(),
            violations.first().or(errors.first()).map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let (mut mismatches, mut errors, mut extreme) = (Vec::new(), 0usize, 0usize);
    for i in 0..500 {
        let mut rng = rng_for(4, i);
        let (p, x) = match i % 10 {
            0..=6 => {
                let p = random::bounded_pencil(&mut rng, 2 + i % 2, m_for(2 + i % 2, i / 2));
                let x = random::point(&mut rng, &p, 1, Field::Real, Placement::Boundary);
                (p, x)
            }
            7 | 8 => {
                let g = 2 + i % 2;
                let p = free_cube(g).unwrap().pencil;
                let x = random::point(&mut rng, &p, 1, Field::Real, Placement::Boundary);
                (p, x)
            }
            _ => {
                let p = free_cube(2).unwrap().pencil;
                let v: Vec<f64> = (0..2).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
                (p, MatrixTuple::scalars(&v))
            }
        };
        match (classical_extreme_test(&p, &x, &tol), free_extreme_test(&p, &x, &tol)) {
            (Ok(cl), Ok(f)) => {
                extreme += f as usize;
                if cl.extreme != f {
                    mismatches.push(format!("#{i} classical={} free={f}", cl.extreme));
                }
            }
            _ => errors += 1,
        }
    }
    outcome(
        mismatches.is_empty() && errors == 0,
        format!(
            "500 level-1 points ({extreme} extreme): {} mismatches, {errors} errors{}",
            mismatches.len(),
            mismatches.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 5

fn cube_grid() -> Vec<MatrixTuple> {
    let vals = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mut pairs = Vec::new();
    for (ia, &a) in vals.iter().enumerate() {
        for &b in &vals[ia..] {
            pairs.push((a, b));
        }
    }
    let thetas = [0.0, PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0];
    let mut all = Vec::new();
    for &(a1, b1) in &pairs {
        for &(a2, b2) in &pairs {
            for &th in &thetas {
                let boundary = [a1, b1, a2, b2].iter().any(|v: &f64| v.abs() == 1.0);
                if boundary {
                    all.push(MatrixTuple::from_matrices(Field::Real, vec![rotated_diag(a1, b1, 0.0), rotated_diag(a2, b2, th)]).unwrap());
                }
            }
        }
    }
    let stride = all.len() as f64 / 200.0;
    (0..200).map(|k| all[(k as f64 * stride) as usize].clone()).collect()
}

fn criterion_5() -> Outcome {
    let tol = Tolerances::default();
    let p = free_cube(2).unwrap().pencil;
    let grid = cube_grid();
    let mut points = grid.clone();
    for v in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        for w in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            points.push(halmos_dilation(&MatrixTuple::scalars(&[v, w])).unwrap());
        }
    }
    points.extend(grid.iter().map(|x| halmos_dilation(x).unwrap()));
    let (mut mismatches, mut positives) = (Vec::new(), 0usize);
    for (k, x) in points.iter().enumerate() {
        let sau = x.matrices().iter().all(|m| (m * m - CMat::identity(x.n(), x.n())).norm() <= UNITARY_TOL);
        let expect = sau && irreducible(x, &tol).0;
        match free_extreme_test(&p, x, &tol) {
            Ok(f) => {
                positives += f as usize;
                if f != expect {
                    mismatches.push(format!("#{k} (n={}) test={f} expected={expect}", x.n()));
                }
            }
            Err(e) => mismatches.push(format!("#{k}: {e}")),
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{} tuples (200 grid + Halmos dilations), {positives} free extreme, {} mismatches{}",
            points.len(),
            mismatches.len(),
            mismatches.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let a = pauli_pair();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for i in 0..8 {
        for j in 0..8 {
            pts.push((-1.3 + 2.6 * i as f64 / 7.0, -1.3 + 2.6 * j as f64 / 7.0));
        }
    }
    for (k, r) in [1.0, 1.0 - DISK_RADIAL_TOL, 1.0 + DISK_RADIAL_TOL].into_iter().enumerate() {
        for s in 0..12 {
            let th = 2.0 * PI * (s as f64 + 0.25 * k as f64) / 12.0;
            pts.push((r * th.cos(), r * th.sin()));
        }
    }
    let mut wrong = Vec::new();
    for &(x, y) in &pts {
        let expect = x * x + y * y <= 1.0 + 1e-12;
        match mconv_membership(&a, &MatrixTuple::scalars(&[x, y]), &tol) {
            Ok(v) if v == expect => {}
            other => wrong.push(format!("({x:.6}, {y:.6}) r={:.7}: {other:?}", (x * x + y * y).sqrt())),
        }
    }
    outcome(
        wrong.is_empty(),
        format!(
            "{} points incl. 36 at |r - 1| <= {DISK_RADIAL_TOL:.0e}: {} wrong{}",
            pts.len(),
            wrong.len(),
            wrong.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 7

/// `Y = V^* (I_k ⊗ A) V` for a random isometry `V`.
fn constructive_mconv_point(rng: &mut SeededRng, a: &MatrixTuple, n: usize) -> MatrixTuple {
    let m = a.n();
    let k = rng.random_range(n.div_ceil(m)..=3usize.max(n.div_ceil(m)));
    let w = random::gaussian_matrix(rng, k * m, n, Field::Real);
    let gram = w.adjoint() * &w;
    let e = linalg::herm_eigen(&gram);
    let inv_sqrt = &e.vectors * CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, e.values.iter().map(|v| c(1.0 / v.sqrt())))) * e.vectors.adjoint();
    let v = w * inv_sqrt;
    let id = CMat::identity(k, k);
    let mats = a.matrices().iter().map(|aj| v.adjoint() * id.kronecker(aj) * &v).collect();
    MatrixTuple::new(Field::Real, n, mats).unwrap()
}

fn criterion_7() -> Outcome {
    let (mut checks, mut worst, mut bad) = (0usize, f64::INFINITY, 0usize);
    for i in 0..20 {
        let mut rng = rng_for(7, i);
        let p = random::bounded_pencil(&mut rng, 2 + i % 2, m_for(2 + i % 2, i / 2));
        let ys: Vec<MatrixTuple> = (0..50).map(|s| constructive_mconv_point(&mut rng, p.coefficients(), 1 + s % 3)).collect();
        let xs: Vec<MatrixTuple> = (0..50).map(|s| random::point(&mut rng, &p, 1 + s % 3, Field::Real, Placement::Mixed)).collect();
        for y in &ys {
            for x in &xs {
                let lam = linalg::min_eig(&pencil_of(x, y).unwrap());
                checks += 1;
                worst = worst.min(lam);
                bad += (lam < -POLAR_TOL) as usize;
            }
        }
    }
    outcome(bad == 0, format!("{checks} checks, min λ_min(L_X(Y)) = {worst:.2e} (tol -{POLAR_TOL:.0e}), {bad} below"))
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let mut rng = rng_for(8, i);
        let (g, n) = (1 + i % 2, 1 + (i / 2) % 3);
        let field = if i % 4 < 2 { Field::Complex } else { Field::Real };
        let (t, x) = loop {
            let t = random::gaussian_matrix(&mut rng, n, n, field);
            let x = random::hermitian_tuple(&mut rng, g, n, Field::Real);
            let sv = linalg::singular_values(&t);
            if sv[n - 1] < 1e-2 * sv[0] {
                continue;
            }
            let top = freespec::examples::row_contraction_norm(std::slice::from_ref(&t), &x);
            let s = (rng.random_range(0.3..0.95) / top).sqrt();
            break (t * c(s), x.scale(s));
        };
        let d = match m1g_maximal_dilation(&t, &x) {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("#{i}: {e}"));
                continue;
            }
        };
        let nn = 2 * n;
        let mut q = &d.s * d.s.adjoint() - CMat::identity(nn, nn);
        for yj in d.y.matrices() {
            q += yj * yj;
        }
        worst = worst.max(q.norm());
        if q.norm() > M1G_TOL {
            failures.push(format!("#{i}: |SS* + ΣY² - I| = {:.2e}", q.norm()));
        }
        if linalg::singular_values(&d.s).last().copied().unwrap_or(0.0) <= 0.0 {
            failures.push(format!("#{i}: S singular"));
        }
        let exact = d.s.view((0, 0), (n, n)) == t.view((0, 0), (n, n))
            && x.matrices().iter().zip(d.y.matrices()).all(|(xj, yj)| yj.view((0, 0), (n, n)) == xj.view((0, 0), (n, n)));
        if !exact {
            failures.push(format!("#{i}: compression does not recover (T, X)"));
        }
        let p = mdg_pencil(1, g).unwrap().pencil;
        let pt = mdg_point(std::slice::from_ref(&d.s), &d.y).unwrap();
        if !matches!(membership(&p, &pt, &tol).map(|v| v.status), Ok(Status::Boundary)) {
            failures.push(format!("#{i}: dilation is not on the boundary of M_(1,g)"));
        }
    }
    for g in 1..=2 {
        let p = mdg_pencil(1, g).unwrap().pencil;
        let mut w = vec![0.0; 2 + g];
        w[1 + g] = 1.0;
        let w = MatrixTuple::scalars(&w);
        let cl = classical_extreme_test(&p, &w, &tol).map(|v| v.extreme);
        let fr = free_extreme_test(&p, &w, &tol);
        if !matches!((&cl, &fr), (Ok(true), Ok(false))) {
            failures.push(format!("w in M_(1,{g}): classical {cl:?}, free {fr:?}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "50 dilations, max |SS* + ΣY² - I|_F = {worst:.1e} (tol {M1G_TOL:.0e}); w classical, not free for g = 1, 2{}",
            failures.first().map(|s| format!("; first failure: {s}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    let tol = Tolerances::default();
    let (mut free_count, mut found_count, mut violations, mut agree) = (0usize, 0usize, Vec::new(), 0usize);
    for i in 0..100 {
        let mut rng = rng_for(9, i);
        let (p, x) = match i % 10 {
            0..=3 => {
                let p = random::bounded_pencil(&mut rng, 2 + i % 2, m_for(2 + i % 2, i / 2));
                let x = random::point(&mut rng, &p, 1, Field::Real, Placement::Boundary);
                (p, x)
            }
            4..=7 => {
                let p = random::bounded_pencil(&mut rng, 2 + i % 2, m_for(2 + i % 2, i / 2));
                let x = random::point(&mut rng, &p, 2, Field::Real, Placement::Boundary);
                (p, x)
            }
            8 => {
                let th = rng.random_range(0.1..PI - 0.1);
                let x = MatrixTuple::from_matrices(Field::Real, vec![rotated_diag(1.0, -1.0, 0.0), rotated_diag(1.0, -1.0, th)]).unwrap();
                (free_cube(2).unwrap().pencil, x)
            }
            _ => {
                let p = matrix_ball(2).unwrap().pencil;
                let x = random::point(&mut rng, &p, 2, Field::Real, Placement::Boundary);
                (p, x)
            }
        };
        let f = match free_extreme_test(&p, &x, &tol) {
            Ok(f) => f,
            Err(e) => {
                violations.push(format!("#{i}: {e}"));
                continue;
            }
        };
        let r = search_nontrivial_dilation(&p, &x, ORACLE_TRIALS, random::derive_seed(SEED, i as u64), &tol).unwrap();
        free_count += f as usize;
        found_count += r.found as usize;
        agree += (f != r.found) as usize;
        if f && r.found {
            violations.push(format!("#{i}: free extreme but oracle dilated (λ_min {:.2e})", r.best_violation));
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "100 tuples: {free_count} free extreme, oracle dilated {found_count}, verdicts agree on {agree}; {} contradictions{}",
            violations.len(),
            violations.first().map(|s| format!("; first: {s}")).unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 10

/// `I + Σ y_i M_i ⪰ 0` with `k` variables, resampled until compact with
/// margin.
fn compact_instance(rng: &mut SeededRng, k: usize, dim: usize) -> AffinePencil {
    loop {
        let ms: Vec<RMat> = (0..k).map(|_| linalg::real_part(&random::hermitian(rng, dim, Field::Real))).collect();
        let worst = (0..720)
            .map(|s| {
                let th = 2.0 * PI * s as f64 / 720.0;
                let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                let dir = if k == 1 { sign * &ms[0] } else { th.cos() * &ms[0] + th.sin() * &ms[1] };
                linalg::min_eig_real(&dir)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < -0.05 {
            return AffinePencil::new(RMat::identity(dim, dim), ms).unwrap();
        }
    }
}

/// Largest feasible step from `y` along `d` by scanning and bisection on
/// `λ_min >= -thr`.
fn ray_extent(p: &AffinePencil, y: &[f64], d: &[f64], thr: f64) -> f64 {
    let at = |t: f64| -> f64 {
        let z: Vec<f64> = y.iter().zip(d).map(|(a, b)| a + t * b).collect();
        p.min_eig(&z)
    };
    if at(1e-9) < -thr {
        return 0.0;
    }
    let (mut lo, mut hi) = (1e-9, 1e-9);
    while at(hi) >= -thr {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return f64::INFINITY;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid) >= -thr { lo = mid } else { hi = mid }
    }
    lo
}

/// `α(ψ) = 1 / sqrt(λ_max(L(ψ)^{-1} B))`, zero outside the interior.
fn alpha_at(p: &LinearPencil, b: &CMat, psi: &[f64]) -> f64 {
    let l = p.evaluate(&MatrixTuple::scalars(psi)).unwrap();
    let e = linalg::herm_eigen(&l);
    if e.min() <= 0.0 {
        return 0.0;
    }
    let s = &e.vectors * CMat::from_diagonal(&nalgebra::DVector::from_iterator(e.values.len(), e.values.iter().map(|v| c(1.0 / v.sqrt())))) * e.vectors.adjoint();
    let top = linalg::herm_eigen(&(&s * b * &s)).max();
    if top <= 0.0 { f64::INFINITY } else { 1.0 / top.sqrt() }
}

/// Dense grid over the bounding box of `D_A(1)` with eight zoom rounds.
fn grid_alpha(p: &LinearPencil, b: &CMat) -> (f64, Vec<f64>) {
    let g = p.g();
    // bounding box of D_A(1) from boundary points along many rays
    let mut lo = vec![f64::INFINITY; g];
    let mut hi = vec![f64::NEG_INFINITY; g];
    let rays = if g == 1 { 2 } else { 1440 };
    for s in 0..rays {
        let th = 2.0 * PI * s as f64 / rays as f64;
        let d: Vec<f64> = if g == 1 { vec![if s == 0 { 1.0 } else { -1.0 }] } else { vec![th.cos(), th.sin()] };
        let t = random::boundary_scale(p, &MatrixTuple::scalars(&d)).unwrap();
        for j in 0..g {
            lo[j] = lo[j].min(t * d[j]);
            hi[j] = hi[j].max(t * d[j]);
        }
    }
    let steps = if g == 1 { 2001 } else { 121 };
    let mut best = (0.0, vec![0.0; g]);
    for _round in 0..10 {
        let h: Vec<f64> = (0..g).map(|j| (hi[j] - lo[j]) / (steps - 1) as f64).collect();
        let total = if g == 1 { steps } else { steps * steps };
        for s in 0..total {
            let idx = [s % steps, s / steps];
            let psi: Vec<f64> = (0..g).map(|j| lo[j] + h[j] * idx[j] as f64).collect();
            let a = alpha_at(p, b, &psi);
            if a > best.0 {
                best = (a, psi);
            }
        }
        for j in 0..g {
            lo[j] = best.1[j] - 3.0 * h[j];
            hi[j] = best.1[j] + 3.0 * h[j];
        }
    }
    best
}

fn criterion_10() -> Outcome {
    let tol = Tolerances::default();
    let mut failures = Vec::new();
    let (mut worst_alpha, mut worst_ext) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let mut rng = rng_for(10, i);
        // extreme points of a compact spectrahedron with k ≤ 2 variables
        let k = 1 + i % 2;
        let p = compact_instance(&mut rng, k, 2 + i % 3);
        let dir: Vec<f64> = (0..k).map(|_| random::normal(&mut rng)).collect();
        let reach = max_step(&p, &vec![0.0; k], &dir, &tol).unwrap();
        let start: Vec<f64> = dir.iter().map(|v| v * reach * rng.random_range(0.05..0.9)).collect();
        match extreme_point_of_spectrahedron(&p, &start, &tol) {
            Ok(ep) => {
                let (ns, _, _) = sigma_system(&p, &ep.point, &tol);
                if ns.ncols() != 0 {
                    failures.push(format!("#{i}: σ-system null space of dim {}", ns.ncols()));
                }
                if p.min_eig(&ep.point) < -1e-8 {
                    failures.push(format!("#{i}: extreme point infeasible"));
                }
                let slack = (0..180)
                    .map(|s| {
                        let th = PI * s as f64 / 180.0;
                        let d: Vec<f64> = if k == 1 { vec![1.0] } else { vec![th.cos(), th.sin()] };
                        let nd: Vec<f64> = d.iter().map(|v| -v).collect();
                        ray_extent(&p, &ep.point, &d, 1e-11).min(ray_extent(&p, &ep.point, &nd, 1e-11))
                    })
                    .fold(0.0f64, f64::max);
                worst_ext = worst_ext.max(slack);
                if slack > SOLVER_MATCH_TOL {
                    failures.push(format!("#{i}: a segment of half-length {slack:.2e} passes through the extreme point"));
                }
            }
            Err(e) => failures.push(format!("#{i}: extreme point: {e}")),
        }

        // maximal dilation scale with g ≤ 2 free ψ coordinates
        let (g, m, n) = (1 + i % 2, 2 + (i / 2) % 2, 1 + (i / 4) % 2);
        let pen = random::bounded_pencil(&mut rng, g, m);
        let x = random::point(&mut rng, &pen, n, Field::Real, Placement::Interior);
        let beta: Vec<CMat> = (0..g).map(|_| random::gaussian_matrix(&mut rng, n, 1, Field::Real) * c(0.5)).collect();
        let lb = pen.lambda_rect(&beta).unwrap();
        let lx_inv = pen.evaluate(&x).unwrap().try_inverse().unwrap();
        let b = lb.adjoint() * lx_inv * &lb;
        let (oracle, _) = grid_alpha(&pen, &b);
        match maximize_alpha(&pen, &x, &beta, &tol, &SolverOptions::from_tolerances(&tol)) {
            Ok(r) => {
                let err = (r.alpha - oracle).abs() / oracle.max(1.0);
                worst_alpha = worst_alpha.max(err);
                if err > SOLVER_MATCH_TOL {
                    failures.push(format!("#{i}: alpha {:.6} vs grid {:.6}", r.alpha, oracle));
                }
            }
            Err(e) => failures.push(format!("#{i}: alpha: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "100 + 100 instances: max alpha deviation {worst_alpha:.1e}, max segment through extreme point {worst_ext:.1e} (tol {SOLVER_MATCH_TOL:.0e}){}",
            failures.first().map(|s| format!("; first failure: {s}")).unwrap_or_default()
        ),
    )
}

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |k: usize| wanted.is_empty() || wanted.contains(&k);
    let names = [
        "spanning bound",
        "strict descent",
        "extreme-point hierarchy",
        "level-1 equivalence",
        "free cube characterization",
        "disk membership",
        "polar duality",
        "M_(1,g) construction",
        "dilation oracle agreement",
        "solver soundness",
    ];
    let start = Instant::now();
    let mut all_pass = true;
    let mut report = |k: usize, t: Instant, o: Outcome| {
        all_pass &= o.pass;
        println!(
            "{} criterion {k:>2} {:<28} {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            names[k - 1],
            o.detail,
            t.elapsed().as_secs_f64()
        );
    };
    if run(1) || run(2) {
        let t = Instant::now();
        let st = spanning_runs();
        if run(1) {
            report(1, t, criterion_1(&st));
        }
        if run(2) {
            report(2, t, criterion_2(&st));
        }
    }
    let table: [(usize, fn() -> Outcome); 8] = [
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    for (k, f) in table {
        if run(k) {
            let t = Instant::now();
            report(k, t, f());
        }
    }
    println!("acceptance: {} in {:.1}s", if all_pass { "all criteria passed" } else { "FAILURES" }, start.elapsed().as_secs_f64());
    if !all_pass {
        std::process::exit(1);
    }
}
