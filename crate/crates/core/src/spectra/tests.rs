use super::infinite::*;
use super::tree::{origin_multiplicity, Origin};
use super::*;
use crate::transfer::dirichlet_first;
use proptest::prelude::*;
use std::f64::consts::PI;

fn zero() -> Potential {
    Potential::zero()
}

fn step() -> Potential {
    Potential::centered_step(-16.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn neumann_interval() {
    let p = GraphParams::robin(1, 2.0, 0.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 100.0).unwrap();
    let v = r.values();
    assert_eq!(v.len(), 4);
    assert!(v[0].abs() < 1e-10);
    for k in 1..4 {
        let exact = (k as f64 * PI).powi(2);
        assert!(rel(v[k], exact) < 1e-8, "{} vs {exact}", v[k]);
    }
    assert!(r.eigenvalues.iter().all(|e| e.tag == Tag::Unclassified));
    assert!(!r.counts_checked);
}

#[test]
fn mixed_interval() {
    let p = GraphParams::dirichlet(1, 2.0, 0.0).unwrap();
    let r = linear_spectrum(&p, &zero(), 0.0, 130.0).unwrap();
    let v = r.values();
    assert_eq!(v.len(), 4);
    for (k, x) in v.iter().enumerate() {
        assert!(rel(*x, ((k as f64 + 0.5) * PI).powi(2)) < 1e-8);
    }
}

#[test]
fn rogues_at_minus_twenty() {
    let p = GraphParams::robin(8, 2.0, -20.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 50.0).unwrap();
    let dbl = r.rogue(RogueKind::Double).unwrap();
    let minus = r.rogue(RogueKind::Minus).unwrap();
    assert!((-405.0..=-395.0).contains(&dbl));
    assert!((-105.0..=-95.0).contains(&minus));
    let s = r.summary(0).unwrap();
    assert_eq!(s.count, 6);
    let center = 0.5 * (s.min + s.max);
    assert!((center + 400.0 / 9.0).abs() <= 2.0);
    assert!(s.width <= rogue::width_bound(2.0, -20.0));
    for e in &r.eigenvalues[..2] {
        assert_eq!(e.regime, Regime::Exponential);
    }
}

#[test]
fn single_rogue_for_dirichlet_root() {
    let p = GraphParams::dirichlet(8, 2.0, -20.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 50.0).unwrap();
    assert!((r.rogue(RogueKind::Double).unwrap() + 400.0).abs() <= 2.0);
    assert!(r.rogue(RogueKind::Minus).is_none());
    let rogues = r
        .eigenvalues
        .iter()
        .filter(|e| matches!(e.tag, Tag::Rogue { .. }))
        .count();
    assert_eq!(rogues, 1);
}

#[test]
fn no_rogue_tags_at_zero_alpha() {
    let p = GraphParams::robin(5, 2.0, 0.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 60.0).unwrap();
    assert!(r
        .eigenvalues
        .iter()
        .all(|e| !matches!(e.tag, Tag::Rogue { .. })));
    assert_eq!(r.cluster(0).len(), 5);
}

fn assert_structure(r: &SpectrumReport) {
    let n = r.params.n;
    let d = &r.dirichlet;
    let robin = r.params.root_condition == RootCondition::Robin;
    let full = d.len().saturating_sub(1);
    for k in 1..full {
        let c = r.cluster(k);
        assert_eq!(c.len(), if robin { n - 1 } else { n - 2 }, "cluster {k}");
        assert!(
            c.iter().all(|&x| x > d[k - 1] && x < d[k]),
            "containment {k}"
        );
        let prev_max = r
            .cluster(k - 1)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let this_min = c.iter().copied().fold(f64::INFINITY, f64::min);
        if robin {
            let lk = r.intermediate(k, None).unwrap();
            assert!(prev_max < lk && lk < this_min, "interlacing at {k}");
        } else {
            let lm = r.intermediate(k, Some(Side::Minus)).unwrap();
            let lp = r.intermediate(k, Some(Side::Plus)).unwrap();
            assert!(
                prev_max < lm && lm < d[k - 1] && d[k - 1] < lp && lp < this_min,
                "chain at {k}"
            );
        }
    }
    let v = r.values();
    assert!(v.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn structure_over_parameter_grid() {
    for q in [zero(), step()] {
        let top = dirichlet_first(&q, 7).unwrap()[6] - 1e-6;
        for n in [4, 8] {
            for alpha in [-5.0, 0.0, 3.0] {
                for rc in [RootCondition::Robin, RootCondition::Dirichlet] {
                    let p = GraphParams::new(n, 3.0, alpha, rc).unwrap();
                    let r = linear_spectrum(&p, &q, -1.0, top).unwrap();
                    assert!(r.counts_checked);
                    assert_structure(&r);
                }
            }
        }
    }
}

#[test]
fn robin_and_dirichlet_clusters_alternate() {
    let q = step();
    let top = dirichlet_first(&q, 5).unwrap()[4] - 1e-6;
    let rob = linear_spectrum(&GraphParams::robin(6, 2.0, -4.0).unwrap(), &q, -1.0, top).unwrap();
    let dir = linear_spectrum(
        &GraphParams::dirichlet(6, 2.0, -4.0).unwrap(),
        &q,
        -1.0,
        top,
    )
    .unwrap();
    for k in 1..4 {
        let mut all: Vec<(f64, bool)> = rob.cluster(k).into_iter().map(|x| (x, true)).collect();
        all.extend(dir.cluster(k).into_iter().map(|x| (x, false)));
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(
            all.windows(2).all(|w| w[0].1 != w[1].1),
            "cluster {k}: {all:?}"
        );
    }
}

#[test]
fn intermediates_approach_dirichlet_points_in_root_scale() {
    let p = GraphParams::robin(8, 2.0, -5.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 11.5f64.powi(2) * PI * PI).unwrap();
    let gaps: Vec<f64> = (1..=10)
        .map(|k| (r.intermediate(k, None).unwrap().sqrt() - r.dirichlet[k - 1].sqrt()).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn regime_tags_match_discriminant() {
    let p = GraphParams::robin(6, 2.0, -5.0).unwrap();
    let r = linear_spectrum(&p, &step(), -1.0, 150.0).unwrap();
    for e in &r.eigenvalues {
        let t = transfer_at(&step(), e.lambda).unwrap();
        let v = t.v_scaled(2.0, -5.0).to_f64().abs() / 2f64.sqrt();
        match e.regime {
            Regime::Oscillatory => assert!(v < 2.0),
            Regime::Exponential => assert!(v > 2.0),
            Regime::Boundary => assert!((v - 2.0).abs() < 1e-6),
        }
    }
}

#[test]
fn eigenvalues_decrease_with_alpha_without_collisions() {
    let alphas: Vec<f64> = (0..9).map(|i| 2.0 - i as f64).collect();
    let spectra: Vec<Vec<f64>> = alphas
        .iter()
        .map(|&a| {
            linear_spectrum(&GraphParams::robin(5, 2.0, a).unwrap(), &zero(), -1.0, 80.0)
                .unwrap()
                .values()
        })
        .collect();
    let m = spectra.iter().map(Vec::len).min().unwrap();
    for w in spectra.windows(2) {
        for i in 0..m {
            assert!(w[1][i] <= w[0][i] + 1e-12);
        }
        assert!(w[1].windows(2).all(|p| p[0] < p[1]));
    }
}

#[test]
fn components_match_zero_set_ordering() {
    let p = GraphParams::robin(8, 2.0, -20.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 20.0).unwrap();
    let comps: Vec<usize> = r
        .eigenvalues
        .iter()
        .take(9)
        .filter_map(|e| e.component)
        .collect();
    assert_eq!(comps, vec![8, 7, 6, 5, 4, 3, 2, 1, 0]);
}

#[test]
fn tag_layout() {
    let p = GraphParams::robin(4, 2.0, -1.0).unwrap();
    assert_eq!(
        tag_for_rank(&p, 0),
        Tag::Rogue {
            kind: RogueKind::Double
        }
    );
    assert_eq!(
        tag_for_rank(&p, 1),
        Tag::Rogue {
            kind: RogueKind::Minus
        }
    );
    assert_eq!(tag_for_rank(&p, 3), Tag::Cluster { k: 0, position: 1 });
    assert_eq!(tag_for_rank(&p, 8), Tag::Intermediate { k: 2, side: None });
    assert_eq!(tag_for_rank(&p, 11), Tag::Cluster { k: 2, position: 2 });
    let d = p.with_root(RootCondition::Dirichlet);
    assert_eq!(
        tag_for_rank(&d, 0),
        Tag::Rogue {
            kind: RogueKind::Double
        }
    );
    assert_eq!(tag_for_rank(&d, 2), Tag::Cluster { k: 0, position: 1 });
    assert_eq!(
        tag_for_rank(&d, 3),
        Tag::Intermediate {
            k: 1,
            side: Some(Side::Minus)
        }
    );
    assert_eq!(
        tag_for_rank(&d, 4),
        Tag::Intermediate {
            k: 1,
            side: Some(Side::Plus)
        }
    );
    assert_eq!(tag_for_rank(&d, 6), Tag::Cluster { k: 1, position: 1 });
}

#[test]
fn double_root_detected_at_neumann_point() {
    let p = GraphParams::robin(1, 2.0, 0.0).unwrap();
    let m = dirichlet_multiplicity(&p, &zero(), 1).unwrap();
    assert!(m.eigenvalue && m.tangential && !m.indeterminate);
    assert!(rel(m.lambda_d, PI * PI) < 1e-12);
}

#[test]
fn transversal_crossing_is_not_an_eigenvalue() {
    let p = GraphParams::robin(3, 2.0, -5.0).unwrap();
    let m = dirichlet_multiplicity(&p, &zero(), 1).unwrap();
    assert!(!m.eigenvalue && !m.indeterminate);
}

#[test]
fn tangency_only_at_sign_change() {
    let alphas: Vec<f64> = (0..41).map(|i| -10.0 + 0.5 * i as f64).collect();
    let flags: Vec<DirichletMultiplicity> = alphas
        .iter()
        .map(|&a| {
            dirichlet_multiplicity(&GraphParams::robin(1, 2.0, a).unwrap(), &zero(), 1).unwrap()
        })
        .collect();
    for (i, f) in flags.iter().enumerate() {
        if f.tangential {
            assert!(alphas[i] == 0.0);
        }
        assert!(!f.indeterminate);
    }
    assert!(flags[20].tangential);
    assert!(flags[19].f_limit.signum() != flags[21].f_limit.signum());
    assert!(flags[..19]
        .windows(2)
        .all(|w| w[0].f_limit.signum() == w[1].f_limit.signum()));
}

#[test]
fn dirichlet_point_tagged_when_double() {
    let p = GraphParams::robin(1, 2.0, 0.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 50.0).unwrap();
    assert!(r.dirichlet_flags.iter().all(|f| f.eigenvalue));
    let p = GraphParams::robin(4, 2.0, 0.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 50.0).unwrap();
    assert!(r
        .eigenvalues
        .iter()
        .any(|e| matches!(e.tag, Tag::DirichletPoint { k: 1 })));
}

#[test]
fn tree_multiplicities_at_zero_alpha() {
    let p = GraphParams::robin(2, 2.0, 0.0).unwrap();
    assert_eq!(origin_multiplicity(&p, Origin::Dirichlet { m: 1 }), 2);
    assert_eq!(origin_multiplicity(&p, Origin::Dirichlet { m: 2 }), 1);
    assert_eq!(origin_multiplicity(&p, Origin::Robin), 1);
    let t = tree_spectrum(&p, &zero(), 0.0, 100.0).unwrap();
    for k in 0..3 {
        let x = ((k as f64 + 0.5) * PI).powi(2);
        let e = t.entries.iter().find(|e| rel(e.lambda, x) < 1e-9).unwrap();
        assert!(e.origins.contains(&Origin::Dirichlet { m: 1 }));
        assert!(e.multiplicity >= 2);
    }
    let expanded = t.expanded();
    assert_eq!(expanded.len(), t.total_multiplicity());
    assert!(expanded.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn tree_without_collisions_at_negative_alpha() {
    let p = GraphParams::robin(2, 2.0, -5.0).unwrap();
    let t = tree_spectrum(&p, &zero(), -40.0, 60.0).unwrap();
    assert!(t.collisions.is_empty());
    assert!(t.entries.iter().all(|e| e.origins.len() == 1));
    let d1 = t
        .entries
        .iter()
        .filter(|e| e.origins[0] == Origin::Dirichlet { m: 1 });
    assert!(d1.clone().all(|e| e.multiplicity == 2));
    assert!(d1.count() > 0);
}

#[test]
fn tree_requires_integer_branching() {
    let p = GraphParams::robin(2, 2.5, 0.0).unwrap();
    assert!(tree_spectrum(&p, &zero(), 0.0, 10.0).is_err());
}

#[test]
fn rogue_rows() {
    let p = GraphParams::robin(8, 2.0, -10.0).unwrap();
    let rows = rogue_trajectory(&p, &zero(), &[-10.0, -20.0, -30.0, -40.0]).unwrap();
    let r20 = &rows[1];
    assert!(r20.residual_double.abs() <= 2.0);
    assert!(r20.residual_minus.unwrap().abs() <= 2.0);
    assert!(r20.residual_center.abs() <= 2.0);
    assert!((r20.width_bound - 0.452).abs() < 1e-3);
    assert!((rows[2].width_bound - 0.0363).abs() < 1e-4);
    for row in &rows {
        assert!(row.width <= row.width_bound);
    }
    for w in rows.windows(2) {
        assert!(w[1].residual_double.abs() <= w[0].residual_double.abs() + 1e-9);
        assert!(w[1].residual_minus.unwrap().abs() <= w[0].residual_minus.unwrap().abs() + 1e-9);
        assert!(w[1].residual_center.abs() <= w[0].residual_center.abs() + 1e-9);
    }
    assert!(rogue_trajectory(&p, &zero(), &[1.0]).is_err());
}

#[test]
fn rogue_rows_for_dirichlet_root_omit_minus() {
    let p = GraphParams::dirichlet(8, 2.0, -10.0).unwrap();
    let rows = rogue_trajectory(&p, &zero(), &[-20.0]).unwrap();
    assert!(rows[0].lambda_minus.is_none());
    assert!(rows[0].residual_double.abs() <= 2.0);
}

#[test]
fn beta_values() {
    assert!((beta(2.0) - (2.0 * 2f64.sqrt() / 3.0).acos()).abs() < 1e-15);
    assert!((beta(2.0) - 0.33984).abs() < 1e-5);
    assert!((beta(4.0) - 0.8f64.acos()).abs() < 1e-15);
}

#[test]
fn free_bands_are_exact() {
    let bd = infinite_bands(2.0, 0.0, &zero(), 200.0).unwrap();
    let b = bd.beta;
    assert!((bd.bands[0].0 - 0.1155).abs() < 1e-3);
    assert!((bd.bands[0].1 - 7.8500).abs() < 1e-3);
    for (k, &(lo, hi)) in bd.bands.iter().enumerate().take(4) {
        let kp = k as f64 * PI;
        assert!((lo.sqrt() - (kp + b)).abs() < 1e-9);
        assert!((hi.sqrt() - (kp + PI - b)).abs() < 1e-9);
    }
}

#[test]
fn cluster_hulls_converge_into_bands() {
    let bd = infinite_bands(2.0, -5.0, &zero(), 200.0).unwrap();
    let mut prev: Option<Vec<(f64, f64)>> = None;
    for n in [8, 16, 32] {
        let r = linear_spectrum(
            &GraphParams::robin(n, 2.0, -5.0).unwrap(),
            &zero(),
            -1.0,
            200.0,
        )
        .unwrap();
        let gaps: Vec<(f64, f64)> = (0..4)
            .map(|k| {
                let s = r.summary(k).unwrap();
                let (lo, hi) = bd.bands[k];
                assert!(s.min >= lo - 1e-9 && s.max <= hi + 1e-9);
                (s.min - lo, hi - s.max)
            })
            .collect();
        if let Some(p) = &prev {
            for (a, b) in p.iter().zip(&gaps) {
                assert!(b.0 < a.0 && b.1 < a.1);
            }
        }
        prev = Some(gaps);
    }
}

#[test]
fn dirichlet_root_point_spectrum() {
    let pts = infinite_point_spectrum(2.0, -5.0, &zero(), 100.0, RootCondition::Dirichlet).unwrap();
    assert_eq!(pts.len(), 3);
    for (j, p) in pts.iter().enumerate() {
        assert!(rel(p.lambda, ((j + 1) as f64 * PI).powi(2)) < 1e-10);
    }
}

#[test]
fn robin_point_spectrum_near_minus_rogue() {
    let pts = infinite_point_spectrum(2.0, -5.0, &zero(), 100.0, RootCondition::Robin).unwrap();
    assert_eq!(pts.len(), 1);
    let r = linear_spectrum(
        &GraphParams::robin(16, 2.0, -5.0).unwrap(),
        &zero(),
        -1.0,
        0.0,
    )
    .unwrap();
    let minus = r.rogue(RogueKind::Minus).unwrap();
    assert!(
        rel(pts[0].lambda, minus) < 1e-6,
        "{} vs {minus}",
        pts[0].lambda
    );
}

#[test]
fn one_candidate_root_per_gap() {
    let q = step();
    let bd = infinite_bands(2.0, -5.0, &q, 700.0).unwrap();
    let roots = gap_candidates(2.0, -5.0, &q, 700.0).unwrap();
    assert!(roots.iter().all(|r| bd.band_of(r.lambda).is_none()));
    for (lo, hi) in bd.gaps().into_iter().take(8) {
        assert_eq!(
            roots
                .iter()
                .filter(|r| r.lambda > lo && r.lambda < hi)
                .count(),
            1
        );
    }
}

#[test]
fn density_at_band_center() {
    let l = (1.5 * PI).powi(2);
    let d = density_of_states(2.0, 0.0, &zero(), l).unwrap();
    let mu = 1.5 * PI;
    let dv = 3.0 * mu.sin().abs() / (2.0 * mu);
    assert!(rel(d, dv / PI) < 1e-8);
    assert!(density_of_states(2.0, 0.0, &zero(), 9.0).is_err());
}

#[test]
fn density_high_energy_form() {
    let b: f64 = 2.0;
    let mu = 40.0 * PI + 0.5 * PI + 0.3;
    let l = mu * mu;
    let d = density_of_states(b, -5.0, &zero(), l).unwrap();
    let cos = mu.cos();
    let asym = mu.sin().abs() / (PI * mu) * b.sqrt() * (b + 1.0)
        / (4.0 * b - (b + 1.0).powi(2) * cos * cos).sqrt();
    assert!(rel(d, asym) < 0.01);
}

#[test]
fn band_carries_unit_mass() {
    let bd = infinite_bands(2.0, -5.0, &zero(), 50.0).unwrap();
    for band in &bd.bands[..2] {
        let m = band_mass(2.0, -5.0, &zero(), *band, 400).unwrap();
        assert!((m - 1.0).abs() < 0.02, "{m}");
    }
}

#[test]
fn report_roundtrips_through_json() {
    let p = GraphParams::dirichlet(4, 2.0, -3.0).unwrap();
    let r = linear_spectrum(&p, &zero(), -1.0, 30.0).unwrap();
    let s = serde_json::to_string(&r).unwrap();
    let back: SpectrumReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back.values(), r.values());
    assert!(s.contains("\"type\":\"intermediate\""));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn windows_hold_for_random_params(n in 3usize..9, b in 2u8..4, alpha in -15.0f64..8.0, dir in any::<bool>()) {
        let rc = if dir { RootCondition::Dirichlet } else { RootCondition::Robin };
        let p = GraphParams::new(n, b as f64, alpha, rc).unwrap();
        let q = step();
        let top = dirichlet_first(&q, 4).unwrap()[3] - 1e-6;
        let r = linear_spectrum(&p, &q, -1.0, top).unwrap();
        assert_structure(&r);
    }

    #[test]
    fn ranks_are_consecutive(n in 1usize..7, alpha in -10.0f64..10.0) {
        let p = GraphParams::robin(n, 2.0, alpha).unwrap();
        let r = linear_spectrum(&p, &zero(), -1.0, 60.0).unwrap();
        for (i, e) in r.eigenvalues.iter().enumerate() {
            prop_assert_eq!(e.rank, i);
        }
    }
}
