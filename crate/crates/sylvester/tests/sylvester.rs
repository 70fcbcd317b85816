//! End-to-end behavior of the constrained Sylvester solver: random
//! well-posed instances across all three paths, agreement with a dense
//! least-squares oracle, invariance under re-presentation of the
//! constraints, and small spectral discretizations with known solutions.

use cheb_core::Interval;
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sylvester::{
    solve_constrained, ConstrainedSylvester, SolveOptions, SolvePath, SylError,
};
use ultra_ops::{conversion_chain, diff_op, BandedOp};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn max_abs(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Band of random entries with a dominant shifted diagonal, so the assembled
/// systems stay comfortably nonsingular.
fn random_banded(rng: &mut ChaCha8Rng, n: usize, l: usize, u: usize, diag: f64) -> BandedOp {
    let mut op = BandedOp::zeros(n, l, u);
    for i in 0..n {
        for j in i.saturating_sub(l)..=(i + u).min(n - 1) {
            let v = if i == j { c(diag) + 0.3 * unit(rng) } else { 0.3 * unit(rng) };
            op.set(i, j, v);
        }
    }
    op
}

fn random_constraints(rng: &mut ChaCha8Rng, k: usize, n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((k, n), |_| unit(rng))
}

/// Chebyshev evaluation rows at the two endpoints.
fn dirichlet_rows(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((2, n), |(r, k)| {
        if r == 0 {
            c(if k % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            c(1.0)
        }
    })
}

/// Endpoint value and first-derivative rows (clamped-edge constraints).
fn dirichlet_neumann_rows(n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((4, n), |(r, k)| {
        let kf = k as f64;
        match r {
            0 => c(if k % 2 == 0 { 1.0 } else { -1.0 }),
            1 => c(1.0),
            2 => c(if k % 2 == 1 { kf * kf } else { -(kf * kf) }),
            _ => c(kf * kf),
        }
    })
}

/// Dense right side `sum_j A_j X C_j^T` for a known solution.
fn dense_rhs(terms: &[(BandedOp, BandedOp)], x: &Array2<Complex64>) -> Array2<Complex64> {
    let mut f = Array2::<Complex64>::zeros((x.nrows(), x.ncols()));
    for (a, cm) in terms {
        f = f + a.to_dense().dot(x).dot(&cm.to_dense().t());
    }
    f
}

/// Independently recomputed residuals: equation over the leading block,
/// then both constraint sets.
fn residuals(sys: &ConstrainedSylvester, x: &Array2<Complex64>) -> (f64, f64, f64) {
    let mut lhs = Array2::<Complex64>::zeros((sys.ny(), sys.nx()));
    for (a, cm) in sys.terms() {
        lhs = lhs + a.to_dense().dot(x).dot(&cm.to_dense().t());
    }
    let mut eq = 0.0f64;
    for i in 0..sys.ny() - sys.ky() {
        for j in 0..sys.nx() - sys.kx() {
            eq = eq.max((lhs[(i, j)] - sys.f()[(i, j)]).norm());
        }
    }
    let ry = max_abs(&(&sys.by().dot(x) - sys.h()));
    let rx = max_abs(&(&x.dot(&sys.bx().t()) - &sys.g().t()));
    (eq, ry, rx)
}

/// Builds a random instance with a known solution: the data `F`, `H`, `G`
/// are manufactured from `x_true`, so the instance is consistent and (by
/// diagonal dominance) uniquely solvable.
fn random_instance(
    rng: &mut ChaCha8Rng,
    k: usize,
) -> (ConstrainedSylvester, Array2<Complex64>) {
    let ny = rng.random_range(6..=24);
    let nx = rng.random_range(6..=24);
    let ky = rng.random_range(1..=2);
    let kx = rng.random_range(1..=2);
    let x_true = Array2::from_shape_fn((ny, nx), |_| unit(rng));
    let terms: Vec<(BandedOp, BandedOp)> = match k {
        1 => vec![(random_banded(rng, ny, 1, 1, 3.0), random_banded(rng, nx, 1, 1, 3.0))],
        2 => vec![
            (random_banded(rng, ny, 1, 1, 3.0), random_banded(rng, nx, 0, 1, 2.0)),
            (random_banded(rng, ny, 0, 1, 1.0), random_banded(rng, nx, 1, 1, 1.5)),
        ],
        _ => {
            let mut t = vec![(
                random_banded(rng, ny, 1, 1, 5.0),
                random_banded(rng, nx, 1, 1, 2.0),
            )];
            for _ in 1..k {
                let mut a = random_banded(rng, ny, 1, 1, 0.0);
                let mut cm = random_banded(rng, nx, 1, 1, 0.0);
                a = a.scale(c(0.2));
                cm = cm.scale(c(0.2));
                t.push((a, cm));
            }
            t
        }
    };
    let by = random_constraints(rng, ky, ny);
    let bx = random_constraints(rng, kx, nx);
    let f = dense_rhs(&terms, &x_true);
    let h = by.dot(&x_true);
    let g = x_true.dot(&bx.t()).t().to_owned();
    let sys = ConstrainedSylvester::new(terms, f, by, bx, h, g).unwrap();
    (sys, x_true)
}

/// Householder least-squares solve of an overdetermined dense system; used
/// as the oracle for the full constrained problem (equation rows plus every
/// constraint row, corner redundancy included).
fn householder_lstsq(mut a: Array2<Complex64>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let (m, n) = a.dim();
    assert!(m >= n && b.len() == m);
    for k in 0..n {
        let norm_x: f64 = (k..m).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[(k, k)];
        let alpha = if x0 == Complex64::ZERO { c(-norm_x) } else { -(x0 / x0.norm()) * norm_x };
        let mut v: Vec<Complex64> = (k..m).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in k..n {
            let dot: Complex64 =
                v.iter().enumerate().map(|(i, &vi)| vi.conj() * a[(k + i, col)]).sum();
            let scale = dot * (2.0 / vnorm2);
            for (i, &vi) in v.iter().enumerate() {
                a[(k + i, col)] -= scale * vi;
            }
        }
        let dot: Complex64 = v.iter().enumerate().map(|(i, &vi)| vi.conj() * b[k + i]).sum();
        let scale = dot * (2.0 / vnorm2);
        for (i, &vi) in v.iter().enumerate() {
            b[k + i] -= scale * vi;
        }
    }
    let mut x = vec![Complex64::ZERO; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in (i + 1)..n {
            acc -= a[(i, j)] * x[j];
        }
        x[i] = acc / a[(i, i)];
    }
    x
}

/// Dense statement of the whole constrained problem, solved by least
/// squares. Row-major unknown ordering: `X[p, q]` sits at `p * nx + q`.
fn oracle_solve(sys: &ConstrainedSylvester) -> Array2<Complex64> {
    let (ny, nx, ky, kx) = (sys.ny(), sys.nx(), sys.ky(), sys.kx());
    let nun = ny * nx;
    let dense: Vec<(Array2<Complex64>, Array2<Complex64>)> =
        sys.terms().iter().map(|(a, cm)| (a.to_dense(), cm.to_dense())).collect();
    let rows = (ny - ky) * (nx - kx) + ky * nx + kx * ny;
    let mut m = Array2::<Complex64>::zeros((rows, nun));
    let mut b = vec![Complex64::ZERO; rows];
    let mut r = 0;
    for i in 0..ny - ky {
        for j in 0..nx - kx {
            for (a, cm) in &dense {
                for p in 0..ny {
                    let aip = a[(i, p)];
                    if aip == Complex64::ZERO {
                        continue;
                    }
                    for q in 0..nx {
                        m[(r, p * nx + q)] += aip * cm[(j, q)];
                    }
                }
            }
            b[r] = sys.f()[(i, j)];
            r += 1;
        }
    }
    for mm in 0..ky {
        for j in 0..nx {
            for p in 0..ny {
                m[(r, p * nx + j)] = sys.by()[(mm, p)];
            }
            b[r] = sys.h()[(mm, j)];
            r += 1;
        }
    }
    for mm in 0..kx {
        for i in 0..ny {
            for q in 0..nx {
                m[(r, i * nx + q)] = sys.bx()[(mm, q)];
            }
            b[r] = sys.g()[(mm, i)];
            r += 1;
        }
    }
    assert_eq!(r, rows);
    let x = householder_lstsq(m, b);
    Array2::from_shape_fn((ny, nx), |(p, q)| x[p * nx + q])
}

#[test]
fn random_instances_satisfy_the_residual_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let opts = SolveOptions::default();
    let mut seen = [false; 3];
    for iter in 0..200 {
        let k = 1 + iter % 3;
        let (sys, x_true) = random_instance(&mut rng, k);
        let sol = solve_constrained(&sys, &opts)
            .unwrap_or_else(|e| panic!("iteration {iter} (k = {k}) failed: {e}"));
        match sol.report.path {
            SolvePath::K1 => seen[0] = true,
            SolvePath::K2 => seen[1] = true,
            SolvePath::Kron { .. } => seen[2] = true,
        }
        let (eq, ry, rx) = residuals(&sys, &sol.x);
        let fmax = max_abs(sys.f());
        assert!(eq <= 1e-9 * fmax, "iteration {iter}: equation residual {eq:e} vs {fmax:e}");
        let hmax = max_abs(sys.h());
        let gmax = max_abs(sys.g());
        assert!(ry <= 1e-10 * (1.0 + hmax), "iteration {iter}: row-constraint residual {ry:e}");
        assert!(rx <= 1e-10 * (1.0 + gmax), "iteration {iter}: col-constraint residual {rx:e}");
        // Diagonal dominance makes the instance well-conditioned enough for
        // the solution itself to be reproduced, not just the residuals.
        let xerr = max_abs(&(&sol.x - &x_true));
        assert!(
            xerr <= 1e-8 * (1.0 + max_abs(&x_true)),
            "iteration {iter}: solution error {xerr:e}"
        );
    }
    assert!(seen.iter().all(|&s| s), "all three paths should be exercised");
}

#[test]
fn all_paths_agree_with_the_dense_least_squares_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = SolveOptions::default();
    for iter in 0..12 {
        let k = 1 + iter % 3;
        let (sys, _) = random_instance(&mut rng, k);
        let sol = solve_constrained(&sys, &opts).unwrap();
        let oracle = oracle_solve(&sys);
        let err = max_abs(&(&sol.x - &oracle));
        let scale = 1.0 + max_abs(&oracle);
        assert!(err <= 1e-10 * scale, "iteration {iter} (k = {k}): oracle gap {err:e}");
    }
}

#[test]
fn constraint_presentation_does_not_change_the_solution() {
    // Recombining the constraint rows (an invertible transform of B and its
    // data) describes the same subspace, so the solution must not move even
    // though the canonical pivots may differ.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (sys, _) = random_instance(&mut rng, 2);
    let opts = SolveOptions::default();
    let base = solve_constrained(&sys, &opts).unwrap();

    let mix = |b: &Array2<Complex64>, d: &Array2<Complex64>| {
        let k = b.nrows();
        let r = Array2::from_shape_fn((k, k), |(i, j)| {
            if i == j {
                c(1.0) + 0.5 * Complex64::new(0.3 * (i as f64 + 1.0), -0.2)
            } else {
                Complex64::new(0.8, 0.1 * (i + j) as f64)
            }
        });
        (r.dot(b), r.dot(d))
    };
    let (by2, h2) = mix(sys.by(), sys.h());
    let (bx2, g2) = mix(sys.bx(), sys.g());
    let resys = ConstrainedSylvester::new(
        sys.terms().to_vec(),
        sys.f().clone(),
        by2,
        bx2,
        h2,
        g2,
    )
    .unwrap();
    let re = solve_constrained(&resys, &opts).unwrap();
    let err = max_abs(&(&base.x - &re.x));
    assert!(err <= 1e-11 * (1.0 + max_abs(&base.x)), "solutions differ by {err:e}");
}

#[test]
fn poisson_on_the_square_recovers_a_polynomial_solution() {
    // u(x, y) = (1 - x^2)(1 - y^2) solves u_xx + u_yy = -2(1 - y^2) - 2(1 - x^2)
    // with zero boundary values. In coefficient space the solution is the
    // outer product of [1/2, 0, -1/2] with itself.
    let n = 6;
    let iv = Interval::new(-1.0, 1.0).unwrap();
    let terms = vec![
        (conversion_chain(0, 2, n), diff_op(2, n, iv)),
        (diff_op(2, n, iv), conversion_chain(0, 2, n)),
    ];
    let mut a = vec![Complex64::ZERO; n];
    a[0] = c(0.5);
    a[2] = c(-0.5);
    let x_true = Array2::from_shape_fn((n, n), |(i, j)| a[i] * a[j]);
    let mut f_cheb = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        f_cheb[(i, 0)] += c(-2.0) * a[i];
        f_cheb[(0, i)] += c(-2.0) * a[i];
    }
    let s = conversion_chain(0, 2, n).to_dense();
    let f = s.dot(&f_cheb).dot(&s.t());
    let sys = ConstrainedSylvester::new(
        terms,
        f,
        dirichlet_rows(n),
        dirichlet_rows(n),
        Array2::zeros((2, n)),
        Array2::zeros((2, n)),
    )
    .unwrap();
    let sol = solve_constrained(&sys, &SolveOptions::default()).unwrap();
    assert_eq!(sol.report.path, SolvePath::K2);
    let err = max_abs(&(&sol.x - &x_true));
    assert!(err <= 1e-12, "coefficient error {err:e}");
}

#[test]
fn biharmonic_like_equation_matches_the_oracle() {
    // u_xxxx + 2 u_xxyy + u_yyyy with clamped-edge rows on both variables,
    // data manufactured from a smooth coefficient matrix. Three terms force
    // the Kronecker path.
    let n = 20;
    let iv = Interval::new(-1.0, 1.0).unwrap();
    let mixed_y = conversion_chain(2, 4, n).mul(&diff_op(2, n, iv)).scale(c(2.0));
    let mixed_x = conversion_chain(2, 4, n).mul(&diff_op(2, n, iv));
    let terms = vec![
        (conversion_chain(0, 4, n), diff_op(4, n, iv)),
        (mixed_y, mixed_x),
        (diff_op(4, n, iv), conversion_chain(0, 4, n)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x_true = Array2::from_shape_fn((n, n), |(i, j)| {
        unit(&mut rng) * (-(0.45 * (i + j) as f64)).exp()
    });
    let by = dirichlet_neumann_rows(n);
    let bx = dirichlet_neumann_rows(n);
    let f = dense_rhs(&terms, &x_true);
    let h = by.dot(&x_true);
    let g = x_true.dot(&bx.t()).t().to_owned();
    let sys = ConstrainedSylvester::new(terms, f, by, bx, h, g).unwrap();
    let sol = solve_constrained(&sys, &SolveOptions::default()).unwrap();
    assert!(matches!(sol.report.path, SolvePath::Kron { .. }));
    let oracle = oracle_solve(&sys);
    let err = max_abs(&(&sol.x - &oracle));
    assert!(err <= 1e-10 * (1.0 + max_abs(&oracle)), "oracle gap {err:e}");
}

#[test]
fn constant_dirichlet_data_is_reproduced_on_the_boundary() {
    // Laplace equation with boundary value 1 everywhere: the solution is the
    // constant 1, whose coefficient matrix is e_0 e_0^T.
    let n = 8;
    let iv = Interval::new(-1.0, 1.0).unwrap();
    let terms = vec![
        (conversion_chain(0, 2, n), diff_op(2, n, iv)),
        (diff_op(2, n, iv), conversion_chain(0, 2, n)),
    ];
    let mut h = Array2::<Complex64>::zeros((2, n));
    let mut g = Array2::<Complex64>::zeros((2, n));
    h[(0, 0)] = c(1.0);
    h[(1, 0)] = c(1.0);
    g[(0, 0)] = c(1.0);
    g[(1, 0)] = c(1.0);
    let sys = ConstrainedSylvester::new(
        terms,
        Array2::zeros((n, n)),
        dirichlet_rows(n),
        dirichlet_rows(n),
        h,
        g,
    )
    .unwrap();
    let sol = solve_constrained(&sys, &SolveOptions::default()).unwrap();
    // Evaluate along the four edges at a few interior points.
    let eval = |x: f64, y: f64| -> Complex64 {
        let tx: Vec<f64> = (0..n).map(|k| (k as f64 * x.acos()).cos()).collect();
        let ty: Vec<f64> = (0..n).map(|k| (k as f64 * y.acos()).cos()).collect();
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += sol.x[(i, j)] * ty[i] * tx[j];
            }
        }
        acc
    };
    for t in [-0.9, -0.3, 0.2, 0.8] {
        for (x, y) in [(t, -1.0), (t, 1.0), (-1.0, t), (1.0, t)] {
            let v = eval(x, y);
            assert!((v - c(1.0)).norm() <= 1e-12, "boundary value {v} at ({x}, {y})");
        }
    }
}

#[test]
fn incompatible_corner_data_is_rejected_with_its_defect() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let (sys, _) = random_instance(&mut rng, 2);
    let mut h = sys.h().clone();
    h[(0, 0)] += c(1e-3);
    let bad = ConstrainedSylvester::new(
        sys.terms().to_vec(),
        sys.f().clone(),
        sys.by().clone(),
        sys.bx().clone(),
        h,
        sys.g().clone(),
    )
    .unwrap();
    match solve_constrained(&bad, &SolveOptions::default()) {
        Err(SylError::IncompatibleData { defect }) => {
            assert!(defect > 1e-5, "defect should reflect the perturbation, got {defect:e}");
        }
        other => panic!("expected incompatible data, got {other:?}"),
    }
}
