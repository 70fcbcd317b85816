//! Splitting ranks of classical operators, reconstruction fidelity, rank
//! minimality, and symmetry under swapping the two variables.

use std::collections::BTreeMap;

use cheb_core::{Cheb2, Interval};
use ndarray::Array2;
use num_complex::Complex64;
use pdo_frontend::{extract_coeffs, parse_pdo, CoeffArray};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use separable::{reconstruct_symbol, splitting_rank, SeparableRep};

fn unit() -> Interval {
    Interval::new(-1.0, 1.0).unwrap()
}

fn extract(text: &str) -> CoeffArray {
    let e = parse_pdo(text).unwrap();
    extract_coeffs(&e, unit(), unit(), 1e-14).unwrap()
}

fn rank_of(text: &str) -> usize {
    splitting_rank(&extract(text), 1e-12).unwrap().k()
}

/// Largest pointwise deviation between two coefficient arrays over a grid.
fn coeff_array_distance(a: &CoeffArray, b: &CoeffArray, grid: usize) -> f64 {
    let mut keys: Vec<(usize, usize)> = a.iter().map(|(key, _)| key).collect();
    for (key, _) in b.iter() {
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut worst = 0.0f64;
    for key in keys {
        for p in 0..grid {
            for q in 0..grid {
                let x = -1.0 + 2.0 * (p as f64) / (grid - 1) as f64;
                let y = -1.0 + 2.0 * (q as f64) / (grid - 1) as f64;
                let va = a
                    .get(key.0, key.1)
                    .map(|c| c.eval(x, y).unwrap())
                    .unwrap_or(Complex64::ZERO);
                let vb = b
                    .get(key.0, key.1)
                    .map(|c| c.eval(x, y).unwrap())
                    .unwrap_or(Complex64::ZERO);
                worst = worst.max((va - vb).norm());
            }
        }
    }
    worst
}

#[test]
fn classical_operators_have_their_known_ranks() {
    let table: &[(&str, usize)] = &[
        ("laplacian(u)", 2),
        ("laplacian(u) + 100*u", 2),
        ("diff(u,y,1) - diff(u,x,2)", 2),
        ("diff(u,y,1) + diff(u,x,1)", 2),
        ("diff(u,y,2) - diff(u,x,2)", 2),
        ("diff(u,x,2) - x*diff(u,y,2)", 2),
        ("diff(u,x,2) + diff(diff(u,x,1),y,1) + diff(u,y,2)", 3),
        ("biharmonic(u)", 3),
        (
            "(2+sin(x+y))*diff(u,x,2) + exp(-(x^2+y^2))*diff(u,y,2)",
            4,
        ),
    ];
    for &(text, expected) in table {
        assert_eq!(rank_of(text), expected, "operator `{text}`");
    }
}

fn example_variable_helmholtz() -> CoeffArray {
    extract("laplacian(u) + (x^2+(y+1)^2)*sin(x*(y+1))^2*u")
}

#[test]
fn variable_helmholtz_splits_into_nine_terms() {
    let rep = splitting_rank(&example_variable_helmholtz(), 1e-12).unwrap();
    assert_eq!(rep.k(), 9, "singular values: {:?}", rep.singular_values());
}

#[test]
fn variable_helmholtz_reconstruction_is_tight_on_a_dense_grid() {
    let original = example_variable_helmholtz();
    let rep = splitting_rank(&original, 1e-12).unwrap();
    let back = reconstruct_symbol(&rep).unwrap();
    let err = coeff_array_distance(&original, &back, 50);
    assert!(err <= 1e-10, "reconstruction error {err:e}");
}

#[test]
fn reconstruction_matches_within_the_rank_tolerance() {
    for text in [
        "laplacian(u) + 100*u",
        "biharmonic(u)",
        "diff(u,x,2) - x*diff(u,y,2)",
    ] {
        let original = extract(text);
        let rep = splitting_rank(&original, 1e-12).unwrap();
        let back = reconstruct_symbol(&rep).unwrap();
        let scale = rep.singular_values()[0];
        let err = coeff_array_distance(&original, &back, 30);
        assert!(err <= 1e-12 * scale.max(1.0), "`{text}`: {err:e}");
    }
}

#[test]
fn every_retained_term_is_necessary() {
    for text in [
        "laplacian(u) + 100*u",
        "biharmonic(u)",
        "diff(u,x,2) + diff(diff(u,x,1),y,1) + diff(u,y,2)",
        "laplacian(u) + (x^2+(y+1)^2)*sin(x*(y+1))^2*u",
    ] {
        let original = extract(text);
        let rep = splitting_rank(&original, 1e-12).unwrap();
        let cutoff = 1e-12 * rep.singular_values()[0];
        for drop in 0..rep.k() {
            let partial = reconstruct_symbol(&rep.without_term(drop)).unwrap();
            let err = coeff_array_distance(&original, &partial, 25);
            assert!(
                err > cutoff,
                "`{text}`: dropping term {drop} still reconstructs within {err:e}"
            );
        }
    }
}

#[test]
fn constant_coefficients_reduce_to_matrix_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for target_rank in 1..=4usize {
        // L[i][j] = sum of `target_rank` outer products: its matrix rank.
        let mut l = [[Complex64::ZERO; 4]; 4];
        for _ in 0..target_rank {
            let col: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let row: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            for i in 0..4 {
                for j in 0..4 {
                    l[i][j] += col[i] * row[j];
                }
            }
        }
        let entries: BTreeMap<(usize, usize), Cheb2> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| ((i, j), Cheb2::constant(l[i][j], unit(), unit())))
            .collect();
        let arr = CoeffArray::new(entries, unit(), unit()).unwrap();
        let rep = splitting_rank(&arr, 1e-12).unwrap();
        assert_eq!(rep.k(), gaussian_rank(&l, 1e-12), "target rank {target_rank}");
        assert_eq!(rep.k(), target_rank);
    }
}

/// Row-echelon rank with full pivoting, relative threshold.
fn gaussian_rank(l: &[[Complex64; 4]; 4], tol: f64) -> usize {
    let mut m = *l;
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let mut rank = 0;
    for _ in 0..4 {
        let mut best = (0usize, 0usize, 0.0f64);
        for r in rank..4 {
            for c in 0..4 {
                if m[r][c].norm() > best.2 {
                    best = (r, c, m[r][c].norm());
                }
            }
        }
        if best.2 <= tol * scale {
            break;
        }
        let (pr, pc, _) = best;
        m.swap(rank, pr);
        let pivot = m[rank][pc];
        for r in (rank + 1)..4 {
            let factor = m[r][pc] / pivot;
            for c in 0..4 {
                let sub = factor * m[rank][c];
                m[r][c] -= sub;
            }
        }
        rank += 1;
    }
    rank
}

/// Transposes the roles of x and y in a coefficient array.
fn swap_variables(c: &CoeffArray) -> CoeffArray {
    let entries: BTreeMap<(usize, usize), Cheb2> = c
        .iter()
        .map(|((i, j), coeff)| {
            let t: Array2<Complex64> = coeff.coeffs().t().to_owned();
            ((j, i), Cheb2::new(t, c.yinterval(), c.xinterval()).unwrap())
        })
        .collect();
    CoeffArray::new(entries, c.yinterval(), c.xinterval()).unwrap()
}

#[test]
fn swapping_the_variables_preserves_the_rank() {
    for text in [
        "diff(u,x,2) - x*diff(u,y,2)",
        "diff(u,x,2) + diff(diff(u,x,1),y,1) + diff(u,y,2)",
        "(2+sin(x+y))*diff(u,x,2) + exp(-(x^2+y^2))*diff(u,y,2)",
        "laplacian(u) + (x^2+(y+1)^2)*sin(x*(y+1))^2*u",
    ] {
        let original = extract(text);
        let swapped = swap_variables(&original);
        let k0 = splitting_rank(&original, 1e-12).unwrap().k();
        let k1 = splitting_rank(&swapped, 1e-12).unwrap().k();
        assert_eq!(k0, k1, "`{text}`");
    }
}

#[test]
fn term_factors_carry_their_intervals() {
    let rep: SeparableRep = splitting_rank(&extract("laplacian(u)"), 1e-12).unwrap();
    for term in rep.terms() {
        assert_eq!(term.ode_y.interval(), unit());
        assert_eq!(term.ode_x.interval(), unit());
    }
}
