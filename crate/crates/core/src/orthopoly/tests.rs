use super::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn pp(b: f64, n: usize) -> PolyParams {
    PolyParams::new(b, n).unwrap()
}

#[test]
fn low_degree_values() {
    assert_eq!(pq_eval(pp(2.0, 1), 3.0), (3.0, -2.0));
    assert_eq!(pq_eval(pp(2.0, 2), 3.0), (7.0, -6.0));
    let (p, _) = pq_eval(pp(2.0, 2), 2.0 * 2f64.sqrt());
    assert!((p - 6.0).abs() < 1e-12);
}

#[test]
fn rejects_small_branching() {
    assert!(PolyParams::new(1.0, 3).is_err());
    assert!(PolyParams::new(0.5, 3).is_err());
}

#[test]
fn roots_of_low_degree() {
    let (p, q) = pq_roots(pp(2.0, 2));
    assert!((p[0] + 2f64.sqrt()).abs() < 1e-14 && (p[1] - 2f64.sqrt()).abs() < 1e-14);
    assert_eq!(q, vec![0.0]);
    let (_, q3) = pq_roots(pp(2.0, 3));
    assert_eq!(q3, p);
}

#[test]
fn roots_match_cosine_formula() {
    for &(b, n) in &[(2.0, 7), (3.0, 12), (1.5, 20)] {
        let (p, _) = pq_roots(pp(b, n));
        for (j, r) in p.iter().enumerate() {
            let exact = -2.0 * f64::sqrt(b) * (((j + 1) as f64) * PI / (n as f64 + 1.0)).cos();
            assert!((r - exact).abs() < 1e-12, "b={b} n={n} j={j}");
        }
    }
}

#[test]
fn consecutive_degrees_interlace() {
    let (a, _) = pq_roots(pp(3.0, 6));
    let (b, _) = pq_roots(pp(3.0, 7));
    assert!(strictly_interlace(&b, &a));
    for n in 1..=60 {
        let (p, q) = pq_roots(pp(2.0, n));
        let (p1, _) = pq_roots(pp(2.0, n + 1));
        assert!(strictly_interlace(&p, &q), "n={n}");
        assert!(strictly_interlace(&p1, &p), "n={n}");
        assert!(p.iter().all(|r| r.abs() < 2.0 * 2f64.sqrt()));
    }
}

#[test]
fn interlace_helper_rejects_ties() {
    assert!(!strictly_interlace(&[0.0, 2.0], &[0.0]));
    assert!(!strictly_interlace(&[0.0, 1.0], &[2.0]));
    assert!(strictly_interlace(&[0.0, 2.0], &[1.0]));
}

#[test]
fn quadrature_for_degree_two() {
    let m = quadrature_measure(pp(2.0, 2)).unwrap();
    assert!((m.weights[0] - 0.5).abs() < 1e-14 && (m.weights[1] - 0.5).abs() < 1e-14);
    assert!((m.moments[2] - 2.0).abs() < 1e-13);
}

#[test]
fn moments_stabilize_in_degree() {
    let a = quadrature_measure(pp(2.0, 5)).unwrap();
    let b = quadrature_measure(pp(2.0, 6)).unwrap();
    for k in 0..=9 {
        assert!(
            (a.moments[k] - b.moments[k]).abs() < 1e-10 * b.moments[k].abs().max(1.0),
            "k={k}"
        );
    }
    let c = quadrature_measure(pp(3.0, 4)).unwrap();
    assert!(c.moments[1].abs() < 1e-14 && c.moments[3].abs() < 1e-13);
}

#[test]
fn moments_are_catalan_multiples() {
    // orthogonality measure √(4b − v²)/(2πb): μ_{2m} = C_m b^m
    let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0];
    let b = 3.0;
    let m = quadrature_measure(pp(b, 6)).unwrap();
    for (k, c) in catalan.iter().enumerate() {
        let exact = c * b.powi(k as i32);
        assert!((m.moments[2 * k] - exact).abs() < 1e-10 * exact);
        // same numbers from the density by quadrature
        let num = integrate_on_band(b, |v| v.powi(2 * k as i32) * orthogonality_density(b, v));
        assert!(
            (num - exact).abs() < 1e-6 * exact,
            "k={k}: {num} vs {exact}"
        );
    }
}

fn integrate_on_band(b: f64, f: impl Fn(f64) -> f64) -> f64 {
    // v = 2√b cos φ, midpoint rule in φ
    let r = 2.0 * b.sqrt();
    let m = 4000;
    let h = PI / m as f64;
    (0..m)
        .map(|i| {
            let phi = (i as f64 + 0.5) * h;
            f(r * phi.cos()) * r * phi.sin() * h
        })
        .sum()
}

#[test]
fn density_values_and_mass() {
    assert!((limiting_root_density(2.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
    assert!((limiting_root_density(4.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-15);
    assert!(limiting_root_density(2.0, 3.0).is_err());
    let mass = integrate_on_band(2.0, |v| limiting_root_density(2.0, v).unwrap());
    assert!((mass - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    let mass = integrate_on_band(2.0, |v| normalized_root_density(2.0, v).unwrap());
    assert!((mass - 1.0).abs() < 1e-9);
}

#[test]
fn root_histogram_matches_density() {
    let b = 2.0;
    let n = 400;
    let (roots, _) = pq_roots(pp(b, n));
    let r = 2.0 * b.sqrt();
    let bins = 20;
    let w = 2.0 * r / bins as f64;
    let cdf = |v: f64| (v / r).clamp(-1.0, 1.0).asin() / PI;
    let mut sup: f64 = 0.0;
    for i in 0..bins {
        let (lo, hi) = (-r + i as f64 * w, -r + (i + 1) as f64 * w);
        let count = roots.iter().filter(|&&x| x >= lo && x < hi).count();
        let empirical = count as f64 / (n as f64 * w);
        let exact = (cdf(hi) - cdf(lo)) / w;
        sup = sup.max((empirical - exact).abs());
    }
    assert!(sup < 0.05, "sup = {sup}");
}

#[test]
fn leading_coefficient_examples() {
    let c = leading_coefficients(pp(2.0, 4), 2).unwrap();
    assert_eq!(c.p, vec![(4, 1.0), (2, -6.0)]);
    let c = leading_coefficients(pp(2.0, 5), 2).unwrap();
    // Q_5 = −2v⁴ + 12v² − 8
    assert_eq!(c.q, vec![(4, -2.0), (2, 12.0)]);
    assert!(leading_coefficients(pp(2.0, 5), 5).is_err());
}

/// Monomial coefficients of `P_n`, `Q_n` by interpolation through `n + 1` points.
fn fitted_coefficients(params: PolyParams) -> (Vec<f64>, Vec<f64>) {
    let n = params.n;
    let xs: Vec<f64> = (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect();
    let v = DMatrix::from_fn(n + 1, n + 1, |i, j| xs[i].powi(j as i32));
    let lu = v.lu();
    let solve = |f: &dyn Fn(f64) -> f64| {
        let rhs = DVector::from_iterator(n + 1, xs.iter().map(|&x| f(x)));
        lu.solve(&rhs).unwrap().iter().copied().collect::<Vec<_>>()
    };
    (
        solve(&|x| pq_eval(params, x).0),
        solve(&|x| pq_eval(params, x).1),
    )
}

#[test]
fn leading_coefficients_match_fit() {
    let params = pp(3.0, 6);
    let c = leading_coefficients(params, 4).unwrap();
    let (pf, qf) = fitted_coefficients(params);
    for (pow, coef) in &c.p {
        assert!(
            (pf[*pow] - coef).abs() < 1e-8 * coef.abs().max(1.0),
            "P v^{pow}"
        );
    }
    for (pow, coef) in &c.q {
        assert!(
            (qf[*pow] - coef).abs() < 1e-8 * coef.abs().max(1.0),
            "Q v^{pow}"
        );
    }
    // the polynomial part of P_6 has four terms, Q_6 three
    assert_eq!(c.p.len(), 4);
    assert_eq!(c.q.len(), 3);
}

#[test]
fn ratio_expansion_first_terms() {
    let r = ratio_expansion_check(pp(2.0, 3), 10.0, 1).unwrap();
    assert!((r.rhs - (1.0 - 2.0 / 100.0)).abs() < 1e-15);
    assert!(r.error() < 1e-3 && r.error() > 1e-5);
    let plus = ratio_expansion_check(pp(3.0, 4), 10.0, 5).unwrap();
    let minus = ratio_expansion_check(pp(3.0, 4), -10.0, 5).unwrap();
    assert!((plus.lhs - minus.lhs).abs() < 1e-15 && (plus.rhs - minus.rhs).abs() < 1e-15);
}

#[test]
fn ratio_expansion_error_scales_like_next_moment() {
    // after truncation 5 the first omitted term is b μ₆ v⁻⁸
    let params = pp(2.0, 3);
    let m = quadrature_measure(PolyParams { n: 4, ..params }).unwrap();
    for v in [10.0f64, 20.0, 40.0] {
        let r = ratio_expansion_check(params, v, 5).unwrap();
        let mu6 = quadrature_measure(params).unwrap().moment(6);
        let predicted = params.b * mu6 / v.powi(8);
        assert!((r.error() / predicted - 1.0).abs() < 0.2, "v={v}");
        assert!(m.moments[6] >= mu6);
    }
}

#[test]
fn ratio_expansion_preconditions() {
    assert!(ratio_expansion_check(pp(2.0, 3), 2.0, 1).is_err());
    assert!(ratio_expansion_check(pp(2.0, 3), 10.0, 6).is_err());
}

proptest! {
    #[test]
    fn q_is_shifted_p(b in 1.1f64..6.0, n in 0usize..40, v in -15.0f64..15.0) {
        let (p, _) = pq_eval(pp(b, n), v);
        let (_, q) = pq_eval(pp(b, n + 1), v);
        prop_assert!((-b * p - q).abs() <= 1e-12 * q.abs().max(1.0));
    }

    #[test]
    fn parity(b in 1.1f64..6.0, n in 1usize..40, v in -15.0f64..15.0) {
        let (p, q) = pq_eval(pp(b, n), v);
        let (pm, qm) = pq_eval(pp(b, n), -v);
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((pm - s * p).abs() <= 1e-12 * p.abs().max(1.0));
        prop_assert!((qm + s * q).abs() <= 1e-12 * q.abs().max(1.0));
    }

    #[test]
    fn signs_outside_band(b in 1.1f64..6.0, n in 1usize..40, t in 2.0f64..6.0, neg in any::<bool>()) {
        let v = if neg { -t } else { t } * b.sqrt();
        let (p, q) = pq_eval(pp(b, n), v);
        let sg = v.signum();
        prop_assert!(p * sg.powi(n as i32) > 0.0);
        prop_assert!(q * sg.powi(n as i32 - 1) < 0.0);
    }

    #[test]
    fn closed_form_matches_recurrence(b in 1.1f64..6.0, n in 0usize..30, t in 0.0f64..10.0) {
        prop_assume!((t - 2.0).abs() > 1e-6);
        let v = t * b.sqrt();
        let (p, q) = pq_eval(pp(b, n), v);
        let (pc, qc) = pq_closed_form(pp(b, n), v);
        // relative to the natural size b^{n/2} of the values near the band
        let scale = b.powf(n as f64 / 2.0) * (n as f64 + 1.0);
        prop_assert!((p - pc).abs() <= 1e-10 * p.abs().max(scale));
        prop_assert!((q - qc).abs() <= 1e-10 * q.abs().max(scale * b.sqrt()));
    }

    #[test]
    fn second_moment_is_b(b in 1.1f64..8.0, n in 2usize..20) {
        let m = quadrature_measure(pp(b, n)).unwrap();
        prop_assert!((m.moments[2] / m.moments[0] - b).abs() < 1e-10 * b);
        prop_assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }
}
