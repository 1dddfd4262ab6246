mod common;

use proptest::prelude::*;
use quasinorm_lab::bound::{BoundKind, Witness};
use quasinorm_lab::convexity::{mii_check, p_envelope, p_envelope_with, Decomposition, EnvelopeConfig};
use quasinorm_lab::ftc::{hl_maximal, vector_maximal, GridSpace};
use quasinorm_lab::galb_tensor::{galb_gauge_estimate, tensor_norm_estimate, witness_terms, TensorRep, Term};
use quasinorm_lab::gauges::{Gauge, OrliczFunction, QuasiNormedSpace};
use quasinorm_lab::measure::{conditional_expectation, MeasureSpace, Partition, ScalarField, VectorField};

fn gauge() -> impl Strategy<Value = Gauge> {
    prop_oneof![
        (0.2f64..4.0).prop_map(Gauge::lp),
        Just(Gauge::weak_l1()),
        Just(Gauge::loglog()),
        Just(Gauge::rational()),
        (0.3f64..1.0).prop_map(|p| Gauge::orlicz(OrliczFunction::power(p).unwrap())),
    ]
}

/// Weights and a nonnegative field over the same atoms.
fn space_and_field(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(0.05f64..5.0, n),
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..10.0], n),
        )
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lp_and_weak_l1_match_oracles((w, f) in space_and_field(8), p in 0.2f64..4.0) {
        let space = MeasureSpace::new(w.clone()).unwrap();
        let field = ScalarField::new(f.clone());
        let lp = Gauge::lp(p).eval(&space, &field).unwrap();
        prop_assert_eq!(lp.kind, BoundKind::Exact);
        prop_assert!(rel(lp.value, common::lp(&w, &f, p)) <= 1e-12);
        let weak = Gauge::weak_l1().value(&space, &field).unwrap();
        prop_assert!(rel(weak, common::weak_l1(&w, &f)) <= 1e-12);
    }

    #[test]
    fn luxemburg_matches_bisection((w, f) in space_and_field(8), which in 0usize..3) {
        let (g, phi) = match which {
            0 => (Gauge::loglog(), common::Phi::LogLog),
            1 => (Gauge::rational(), common::Phi::Rational),
            _ => (Gauge::orlicz(OrliczFunction::power(0.5).unwrap()), common::Phi::Power(0.5)),
        };
        let v = g.value(&MeasureSpace::new(w.clone()).unwrap(), &ScalarField::new(f.clone())).unwrap();
        let o = common::luxemburg(phi, &w, &f);
        prop_assert!((v - o).abs() <= 1e-9 * o.max(1e-12), "{} vs {}", v, o);
    }

    #[test]
    fn homogeneous(g in gauge(), (w, f) in space_and_field(8), t in 0.01f64..100.0) {
        let space = MeasureSpace::new(w).unwrap();
        let f = ScalarField::new(f);
        let a = g.value(&space, &f.scaled(t)).unwrap();
        let b = t * g.value(&space, &f).unwrap();
        prop_assert!(rel(a, b) <= 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn monotone(g in gauge(), (w, f) in space_and_field(8), bump in prop::collection::vec(0.0f64..3.0, 8)) {
        let space = MeasureSpace::new(w).unwrap();
        let bigger: Vec<f64> = f.iter().zip(&bump).map(|(a, b)| a + b).collect();
        let small = g.value(&space, &ScalarField::new(f)).unwrap();
        let large = g.value(&space, &ScalarField::new(bigger)).unwrap();
        prop_assert!(small <= large * (1.0 + 1e-12));
    }

    #[test]
    fn invariant_under_relabelling(g in gauge(), (w, f) in space_and_field(8), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..w.len()).collect();
        let mut r = common::rng(seed);
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut r);
        let w2: Vec<f64> = order.iter().map(|&i| w[i]).collect();
        let f2: Vec<f64> = order.iter().map(|&i| f[i]).collect();
        let a = g.value(&MeasureSpace::new(w).unwrap(), &ScalarField::new(f)).unwrap();
        let b = g.value(&MeasureSpace::new(w2).unwrap(), &ScalarField::new(f2)).unwrap();
        prop_assert!(rel(a, b) <= 1e-12);
    }

    #[test]
    fn quasi_triangle_with_known_modulus((w, f) in space_and_field(6), h in prop::collection::vec(0.0f64..10.0, 6), which in 0usize..4) {
        let g = [Gauge::lp(0.5), Gauge::lp(1.0), Gauge::lp(3.0), Gauge::weak_l1()][which].clone();
        let kappa = g.known_kappa().unwrap();
        let space = MeasureSpace::new(w).unwrap();
        let h = ScalarField::new(h[..f.len()].to_vec());
        let sum = ScalarField::new(f.iter().zip(&h.values).map(|(a, b)| a + b).collect());
        let f = ScalarField::new(f);
        let lhs = g.value(&space, &sum).unwrap();
        let rhs = kappa * (g.value(&space, &f).unwrap() + g.value(&space, &h).unwrap());
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn conditional_expectation_contracts_in_l1((w, f) in space_and_field(8), seed in any::<u64>()) {
        let n = w.len();
        let mut r = common::rng(seed);
        let blocks = quasinorm_lab::sampling::random_partition(&mut quasinorm_lab::sampling::rng(rand::Rng::gen(&mut r)), n);
        let space = MeasureSpace::new(w).unwrap();
        let f = ScalarField::new(f);
        let e = conditional_expectation(&space, &Partition::new(blocks, n).unwrap(), &f).unwrap();
        for p in [1.0, 2.0] {
            let g = Gauge::lp(p);
            prop_assert!(g.value(&space, &e).unwrap() <= g.value(&space, &f).unwrap() * (1.0 + 1e-12));
        }
        // mass is preserved
        prop_assert!(rel(space.integrate(&e.values), space.integrate(&f.values)) <= 1e-12);
    }

    #[test]
    fn classical_minkowski(rows in prop::collection::vec(prop::collection::vec(0.0f64..5.0, 4), 1..6), wa in prop::collection::vec(0.1f64..2.0, 6), wb in prop::collection::vec(0.1f64..2.0, 4)) {
        let sa = MeasureSpace::new(wa[..rows.len()].to_vec()).unwrap();
        let sb = MeasureSpace::new(wb).unwrap();
        for (outer, inner) in [(2.0, 1.0), (3.0, 1.5), (1.0, 0.5)] {
            let r = mii_check(&Gauge::lp(outer), &sa, &Gauge::lp(inner), &sb, &rows).unwrap();
            prop_assert!(r.ratio <= 1.0 + 1e-12, "{} {} {}", outer, inner, r.ratio);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `env(f + g)^p <= env(f)^p + env(g)^p`, seeding the search of `f + g`
    /// with the concatenated witnesses.
    #[test]
    fn envelope_p_triangle_via_concat(
        f in prop::collection::vec(0.0f64..5.0, 3),
        g in prop::collection::vec(0.0f64..5.0, 3),
        p in prop_oneof![Just(0.5), Just(0.75), Just(1.0)],
        which in 0usize..3,
    ) {
        let gauge = [Gauge::lp(0.3), Gauge::weak_l1(), Gauge::loglog()][which].clone();
        let space = MeasureSpace::counting(3);
        let (ff, gg) = (ScalarField::new(f.clone()), ScalarField::new(g.clone()));
        let ef = p_envelope(&gauge, p, &space, &ff, 4).unwrap();
        let eg = p_envelope(&gauge, p, &space, &gg, 4).unwrap();
        let parts = |w: &Option<Witness>, fallback: &ScalarField| match w {
            Some(Witness::Family { parts }) => Decomposition { parts: parts.iter().cloned().map(ScalarField::new).collect() },
            _ => Decomposition::trivial(fallback),
        };
        let init = parts(&ef.witness, &ff).concat(&parts(&eg.witness, &gg));
        let sum = init.sum();
        let cfg = EnvelopeConfig { budget: 4, initial: Some(init), ..EnvelopeConfig::default() };
        let e = p_envelope_with(&gauge, p, &space, &sum, &cfg).unwrap();
        let bound = (ef.value.powf(p) + eg.value.powf(p)).powf(1.0 / p);
        prop_assert!(e.value <= bound * (1.0 + 1e-9), "{} > {}", e.value, bound);
        // an envelope never exceeds the gauge
        prop_assert!(e.value <= gauge.value(&space, &sum).unwrap() * (1.0 + 1e-12));
    }

    /// For `lambda = L_1` the estimates are subadditive once the witnesses are
    /// concatenated, and never undercut the Bochner norm for Banach `X`.
    #[test]
    fn tensor_estimate_subadditive_via_concat(seed in any::<u64>(), q in prop_oneof![Just(1.0), Just(2.0)]) {
        let mut r = common::rng(seed);
        let x = QuasiNormedSpace::lq(2, q).unwrap();
        let space = MeasureSpace::new(vec![0.5, 1.0, 1.5]).unwrap();
        let make = |r: &mut rand_chacha::ChaCha8Rng| {
            let terms: Vec<Term> = (0..3)
                .map(|_| Term {
                    x: (0..2).map(|_| rand::Rng::gen_range(r, -2.0..2.0)).collect(),
                    f: (0..3).map(|_| rand::Rng::gen_range(r, -2.0..2.0)).collect(),
                })
                .collect();
            TensorRep::new(Gauge::lp(1.0), x.clone(), terms).unwrap()
        };
        let (a, b) = (make(&mut r), make(&mut r));
        let ea = tensor_norm_estimate(&a, &space, 200, seed).unwrap();
        let eb = tensor_norm_estimate(&b, &space, 200, seed).unwrap();
        let wa = a.with_terms(witness_terms(ea.witness.as_ref().unwrap()).unwrap());
        let wb = b.with_terms(witness_terms(eb.witness.as_ref().unwrap()).unwrap());
        let joint = wa.concat(&wb);
        let e = tensor_norm_estimate(&joint, &space, 200, seed).unwrap();
        prop_assert!(e.value <= (ea.value + eb.value) * (1.0 + 1e-12));

        let j = common::j_of(&joint.terms.iter().map(|t| (t.x.clone(), t.f.clone())).collect::<Vec<_>>(), 3, 2);
        let bochner = common::bochner_l1(space.weights(), &j, q);
        prop_assert!(e.value >= bochner - 1e-9);
    }

    #[test]
    fn galb_estimate_is_a_lower_bound(a in prop::collection::vec(0.0f64..10.0, 1..5), q in prop_oneof![Just(0.5), Just(1.0), Just(2.0)]) {
        let x = QuasiNormedSpace::lq(4, q).unwrap();
        let r = galb_gauge_estimate(&x, &a, 500, 0).unwrap();
        let truth = common::galb_closed_form(&a, q.min(1.0));
        prop_assert!(r.value <= truth * (1.0 + 1e-9) + 1e-12);
        if let Some(Witness::Galb(w)) = &r.witness {
            prop_assert!(rel(w.verify(&x).unwrap(), r.value) <= 1e-9);
        }
    }

    /// `M[X](sum x_j f_j) <= lambda((M f_j)_j)` pointwise for unit `x_j`.
    #[test]
    fn series_domination(seed in any::<u64>(), which in 0usize..3) {
        let mut r = common::rng(seed);
        let grid = GridSpace::new(1, 32).unwrap();
        let (q, lp, lambda) = [(1.0, 1.0, Gauge::lp(1.0)), (2.0, 0.5, Gauge::lp(0.5)), (0.5, 0.5, Gauge::lp(0.5))][which].clone();
        let x = QuasiNormedSpace::lq(2, q).unwrap();
        let terms: Vec<Term> = (0..3)
            .map(|_| {
                let raw: Vec<f64> = (0..2).map(|_| rand::Rng::gen_range(&mut r, -1.0..1.0)).collect();
                let n = common::lq(&raw, q);
                Term { x: raw.iter().map(|v| v / n).collect(), f: (0..32).map(|_| rand::Rng::gen_range(&mut r, -2.0..2.0)).collect() }
            })
            .collect();
        let field: Vec<Vec<f64>> = common::j_of(&terms.iter().map(|t| (t.x.clone(), t.f.clone())).collect::<Vec<_>>(), 32, 2);
        let scales = grid.all_scales();
        let v = vector_maximal(&grid, &VectorField::from_vectors(field.clone()).unwrap(), &x, &scales).unwrap();
        let brute = common::brute_vector_maximal_containing(&field, |u| common::lq(u, q));
        let ms: Vec<Vec<f64>> = terms.iter().map(|t| hl_maximal(&grid, &ScalarField::new(t.f.clone()), &scales).unwrap().values).collect();
        for y in 0..32 {
            prop_assert!(rel(v.values[y], brute[y]) <= 1e-12);
            let profile: Vec<f64> = ms.iter().map(|m| m[y]).collect();
            prop_assert!(v.values[y] <= common::lp(&[1.0; 3], &profile, lp) + 1e-9);
            prop_assert!(lambda.eval_sequence(&profile).unwrap().value >= v.values[y] - 1e-9);
        }
    }

    #[test]
    fn gauge_json_round_trips(g in gauge()) {
        let s = serde_json::to_string(&g).unwrap();
        let back: Gauge = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, g);
    }
}
