use super::*;
use crate::spectra::{linear_spectrum, RogueKind, Tag};
use proptest::prelude::*;
use std::f64::consts::PI;

fn zero() -> Potential {
    Potential::zero()
}

#[test]
fn regime_examples() {
    let sb = 2f64.sqrt();
    assert_eq!(regime_of_v(2.0, 0.0, 0.0), Regime::Oscillatory);
    assert_eq!(regime_of_v(2.0, 3.0 * sb, 0.0), Regime::Exponential);
    assert_eq!(regime_of_v(2.0, 2.0 * sb, 0.0), Regime::Boundary);
    assert_eq!(regime_of_v(2.0, -2.0 * sb, 0.0), Regime::Boundary);
    assert_eq!(regime_of_v(2.0, 0.5, 80.0), Regime::Exponential);
}

#[test]
fn dirichlet_root_vanishes_at_root() {
    let p = GraphParams::dirichlet(6, 2.0, -3.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 60.0).unwrap();
    for e in &r.eigenvalues {
        let ev = vertex_values(&p, &zero(), e.lambda).unwrap();
        assert_eq!(ev.values[0], 0.0);
    }
}

#[test]
fn xi_solves_quadratic_and_rescaled_values_recur() {
    let p = GraphParams::robin(8, 2.0, -5.0).unwrap();
    let q = Potential::centered_step(-16.0);
    let r = linear_spectrum(&p, &q, -1.0, 120.0).unwrap();
    for e in &r.eigenvalues {
        let ev = vertex_values(&p, &q, e.lambda).unwrap();
        let tv = transfer_at(&q, e.lambda).unwrap();
        let t = tv.v_scaled(2.0, -5.0).to_f64() / 2f64.sqrt();
        if ev.regime == Regime::Oscillatory {
            assert!((2.0 * ev.xi.re - t).abs() < 1e-10);
            assert!((ev.xi.abs() - 1.0).abs() < 1e-14);
        } else if ev.regime == Regime::Exponential && t.abs() < 1e12 {
            assert!(((ev.xi.re + 1.0 / ev.xi.re) - t).abs() < 1e-10 * t.abs());
            assert!(ev.xi.re.abs() >= 1.0);
        }
        let ut = ev.rescaled(2.0);
        let scale = ut.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if t.abs() < 1e6 {
            for k in 1..8 {
                let lhs = ut[k - 1] + ut[k + 1];
                assert!(
                    (lhs - t * ut[k]).abs() <= 1e-8 * scale * t.abs().max(1.0),
                    "k = {k}"
                );
            }
        }
    }
}

#[test]
fn residuals_small_for_reported_eigenvalues() {
    let cases = [
        (GraphParams::robin(8, 2.0, -20.0).unwrap(), zero()),
        (GraphParams::dirichlet(8, 2.0, -20.0).unwrap(), zero()),
        (
            GraphParams::robin(12, 3.0, 3.0).unwrap(),
            Potential::centered_step(-16.0),
        ),
        (GraphParams::robin(1, 2.0, 0.0).unwrap(), zero()),
    ];
    for (p, q) in &cases {
        let r = linear_spectrum(p, q, -1.0, 150.0).unwrap();
        for e in &r.eigenvalues {
            let ev = vertex_values(p, q, e.lambda).unwrap();
            let res = residual(p, q, e.lambda, &ev.values).unwrap();
            assert!(res < 1e-7, "{p:?} λ = {} residual {res}", e.lambda);
        }
    }
}

#[test]
fn residual_detects_perturbation() {
    let p = GraphParams::robin(8, 2.0, -5.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 40.0).unwrap();
    let l = r.cluster(1)[2] + 1e-3;
    let ev = vertex_values(&p, &zero(), l).unwrap();
    assert!(residual(&p, &zero(), l, &ev.values).unwrap() > 1e-5);
}

#[test]
fn kernel_vector_at_double_root() {
    let p = GraphParams::robin(1, 2.0, 0.0).unwrap();
    let ev = vertex_values(&p, &zero(), PI * PI).unwrap();
    assert_eq!(ev.source, VectorSource::Kernel);
    assert!(residual(&p, &zero(), PI * PI, &ev.values).unwrap() < 1e-10);
    assert!((ev.values[0] + ev.values[1]).abs() < 1e-12);
}

#[test]
fn neumann_mode_profile() {
    let p = GraphParams::robin(1, 2.0, 0.0).unwrap();
    let l = 4.0 * PI * PI;
    let ev = vertex_values(&p, &zero(), l).unwrap();
    let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let prof = edge_function(&p, &zero(), &ev, 1, &xs).unwrap();
    let s = prof.u[0];
    for (x, u) in xs.iter().zip(&prof.u) {
        assert!((u / s - (2.0 * PI * x).cos()).abs() < 1e-10);
    }
}

#[test]
fn edge_endpoints_match_vertices() {
    let p = GraphParams::robin(6, 2.0, -5.0).unwrap();
    let q = Potential::centered_step(-16.0);
    let r = linear_spectrum(&p, &q, -1.0, 80.0).unwrap();
    for e in &r.eigenvalues {
        let ev = vertex_values(&p, &q, e.lambda).unwrap();
        let prof = sample_eigenfunction(&p, &q, &ev, 5).unwrap();
        for pr in &prof {
            assert!((pr.u[0] - ev.values[pr.k - 1]).abs() < 1e-10);
            assert!(
                (pr.u[4] - ev.values[pr.k]).abs() < 1e-10,
                "λ = {} edge {}",
                e.lambda,
                pr.k
            );
        }
    }
}

#[test]
fn oscillatory_energies_are_comparable() {
    let p = GraphParams::robin(8, 2.0, -5.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 40.0).unwrap();
    for l in r.cluster(1) {
        let ev = vertex_values(&p, &zero(), l).unwrap();
        assert_eq!(ev.regime, Regime::Oscillatory);
        let en = weighted_energies(&p, &zero(), &ev, 32).unwrap();
        let (lo, hi) = en
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi <= 10.0 * lo, "{en:?}");
    }
}

#[test]
fn rogue_coefficient_ratios() {
    let p = GraphParams::robin(8, 2.0, -20.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 0.0).unwrap();
    let dbl = r.rogue(RogueKind::Double).unwrap();
    let ratio = coefficient_ratio(&p, &zero(), dbl).unwrap();
    assert!((ratio.re - (1.0 - 2.0)).abs() <= 0.05);
    let minus = r.rogue(RogueKind::Minus).unwrap();
    let ratio = coefficient_ratio(&p, &zero(), minus).unwrap();
    let c = transfer_at(&zero(), minus).unwrap().c();
    assert!(ratio.abs() <= 10.0 / (c * c), "{ratio:?} c = {c}");
    let up = vertex_values(&p, &zero(), dbl).unwrap();
    assert!(up.values[8].abs() > up.values[0].abs());
    let down = vertex_values(&p, &zero(), minus).unwrap();
    assert!(down.values[8].abs() < down.values[0].abs());
}

#[test]
fn cluster_tags_have_bounded_sign_changes() {
    let p = GraphParams::robin(6, 2.0, 0.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 30.0).unwrap();
    for e in r
        .eigenvalues
        .iter()
        .filter(|e| matches!(e.tag, Tag::Cluster { .. }))
    {
        let ev = vertex_values(&p, &zero(), e.lambda).unwrap();
        assert!(ev.sign_changes <= 6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn residual_small_on_random_graphs(n in 2usize..10, b in 2u8..4, alpha in -12.0f64..6.0, dir in any::<bool>()) {
        let rc = if dir { RootCondition::Dirichlet } else { RootCondition::Robin };
        let p = GraphParams::new(n, b as f64, alpha, rc).unwrap();
        let r = linear_spectrum(&p, &zero(), -1.0, 50.0).unwrap();
        for e in &r.eigenvalues {
            let ev = vertex_values(&p, &zero(), e.lambda).unwrap();
            prop_assert!(residual(&p, &zero(), e.lambda, &ev.values).unwrap() < 1e-7);
        }
    }
}
