use costab::coslice::{metric, Distance};
use costab::costab::{
    act_g, act_shift, arg_phase, conditions_close, hn_decompose, is_semistable, pack, random_condition, random_function,
    check_split_hn, unpack, validate_condition, CoStabilityCondition, GElement,
};
use costab::cotstruct::{enumerate_cohearts, split_k0_class, CoheartCandidate};
use costab::engine::AlgebraPresentation;
use costab::phase::Phase;
use costab::snapshot::{BuildConfig, FormalObject, Snapshot};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

struct Fixture {
    snap: Snapshot,
    cohearts: Vec<CoheartCandidate>,
}

fn fixture(which: usize) -> &'static Fixture {
    static F: OnceLock<[Fixture; 2]> = OnceLock::new();
    &F.get_or_init(|| {
        let make = |p: AlgebraPresentation, w: usize| {
            let snap = Snapshot::build(p, &BuildConfig { width_bound: w, ..BuildConfig::default() }).unwrap();
            let cohearts = enumerate_cohearts(&snap).found;
            Fixture { snap, cohearts }
        };
        [make(AlgebraPresentation::a2(), 2), make(AlgebraPresentation::dual_numbers(), 3)]
    })[which]
}

fn condition(which: usize, seed: u64) -> CoStabilityCondition {
    let f = fixture(which);
    random_condition(&f.snap, &f.cohearts, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn object(s: &Snapshot, picks: &[(usize, u32)]) -> FormalObject {
    let ids = s.window_ids();
    let mut t = FormalObject::zero();
    for &(i, m) in picks {
        t.add_id(ids[i % ids.len()], m);
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn charges_match_slice_phases(which in 0usize..2, seed: u64) {
        let f = fixture(which);
        let c = condition(which, seed);
        for (q, p) in c.slicing.members_with_phase() {
            let z = c.charge.of_id(&f.snap, q);
            prop_assert!(z.norm() > 0.0);
            let gap = (arg_phase(z) - p.value()).rem_euclid(2.0);
            prop_assert!(gap.min(2.0 - gap) < 1e-9);
        }
    }

    #[test]
    fn left_and_right_actions_commute(which in 0usize..2, seed: u64, k in -1i32..=1, s in 0.1f64..3.0, a in -1.5f64..1.5) {
        let f = fixture(which);
        let c = condition(which, seed);
        let g = GElement::from_polar(s, Phase::Approx(a)).unwrap();
        let left = act_g(&act_shift(&c, k), &g);
        let right = act_shift(&act_g(&c, &g), k);
        prop_assert!(conditions_close(&left, &right, 1e-12));
        let v = validate_condition(&f.snap, &left);
        prop_assert!(!v.any_fail(), "{}", v);
        // the inverse undoes the action
        prop_assert!(conditions_close(&act_g(&left, &g.inverse()), &act_shift(&c, k), 1e-9));
    }

    #[test]
    fn hn_parts_ascend_and_add_up(which in 0usize..2, seed: u64, picks in prop::collection::vec((0usize..100, 1u32..3), 1..5)) {
        let f = fixture(which);
        let cand = &f.cohearts[(seed % f.cohearts.len() as u64) as usize];
        let func = random_function(&cand.coheart, &mut ChaCha8Rng::seed_from_u64(seed));
        let members = cand.coheart.ids.clone();
        let mut t = FormalObject::zero();
        for (i, m) in picks {
            t.add_id(members[i % members.len()], m);
        }
        let parts = hn_decompose(&func, &t).unwrap();
        for w in parts.windows(2) {
            prop_assert!(w[0].0.value() < w[1].0.value());
        }
        for (_, part) in &parts {
            prop_assert!(is_semistable(&func, part).unwrap());
        }
        let total = FormalObject::sum_all(parts.iter().map(|(_, o)| o));
        prop_assert_eq!(total, t);
    }

    #[test]
    fn metric_is_symmetric_and_separates(which in 0usize..2, s1: u64, s2: u64) {
        let f = fixture(which);
        let (q, r) = (condition(which, s1).slicing, condition(which, s2).slicing);
        let d = metric(&f.snap, &q, &r);
        prop_assert_eq!(d, metric(&f.snap, &r, &q));
        prop_assert_eq!(d == Distance::Exact(0.0), q == r);
        prop_assert_eq!(metric(&f.snap, &q, &q), Distance::Exact(0.0));
    }

    #[test]
    fn translation_moves_distance_exactly(which in 0usize..2, seed: u64, a in -0.45f64..0.45) {
        let f = fixture(which);
        let q = condition(which, seed).slicing;
        let d = metric(&f.snap, &q, &q.translate(Phase::Approx(a)));
        prop_assert!(matches!(d, Distance::Exact(v) if (v - a.abs()).abs() < 1e-12), "{}", d);
    }

    #[test]
    fn unpack_inverts_pack(which in 0usize..2, seed: u64) {
        let f = fixture(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cand = &f.cohearts[(seed % f.cohearts.len() as u64) as usize];
        let func = random_function(&cand.coheart, &mut rng);
        prop_assume!(check_split_hn(&f.snap, &func).unwrap().holds());
        let c = pack(&f.snap, &cand.structure, &func).unwrap();
        let (p, g) = unpack(&f.snap, &c).unwrap();
        prop_assert_eq!(&p, &cand.structure);
        for (k, v) in &func.values {
            prop_assert!((g.values[k] - v).norm() < 1e-12);
        }
    }

    #[test]
    fn split_image_is_the_class(which in 0usize..2, seed: u64, picks in prop::collection::vec((0usize..200, 1u32..3), 1..4)) {
        let f = fixture(which);
        let cand = &f.cohearts[(seed % f.cohearts.len() as u64) as usize];
        let t = object(&f.snap, &picks);
        match split_k0_class(&f.snap, &cand.coheart, &t, Some(seed)) {
            Ok(c) => prop_assert_eq!(c.k0, f.snap.class(&t)),
            Err(costab::Error::WindowExhausted(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn suspension_negates_class(which in 0usize..2, picks in prop::collection::vec((0usize..200, 1u32..3), 1..4)) {
        let s = &fixture(which).snap;
        let t = object(s, &picks);
        let neg: Vec<i64> = s.class(&t).iter().map(|v| -v).collect();
        prop_assert_eq!(s.class(&t.suspend(1)), neg);
    }
}
