//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

use costab::cli::{self, Context};
use costab::coslice::{
    check_axioms, check_condition_s, epsilon0, metric, orthogonality_identity, CoSlicing, Distance,
};
use costab::costab::{
    check_split_hn, conditions_close, counterexample_scan, deform, perturbed_charge, random_condition, random_function, separation_check, unpack,
    pack, CoStabilityCondition, DeformOptions, ScanVerdict, Separation,
};
use costab::cotstruct::{enumerate_cohearts, split_k0_class, CoheartCandidate};
use costab::engine::AlgebraPresentation;
use costab::phase::Phase;
use costab::snapshot::{BuildConfig, FormalObject, IndecId, Snapshot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

const SEED: u64 = cli::DEFAULT_SEED;

fn build(name: &str, width: usize) -> Snapshot {
    let cfg = BuildConfig { width_bound: width, ..BuildConfig::default() };
    Snapshot::build(AlgebraPresentation::builtin(name).unwrap(), &cfg).unwrap()
}

struct Env {
    a2: Snapshot,
    dual: Snapshot,
    a2_cohearts: Vec<CoheartCandidate>,
    dual_cohearts: Vec<CoheartCandidate>,
}

impl Env {
    fn both(&self) -> [(&str, &Snapshot, &[CoheartCandidate]); 2] {
        [("kA2", &self.a2, &self.a2_cohearts), ("dual", &self.dual, &self.dual_cohearts)]
    }
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn hom_oracle() -> Outcome {
    let start = Instant::now();
    let s = build("a2", 2);
    let id = |t: &str| s.parse_id(t).unwrap();
    let h = |a: &str, b: &str| s.hom(id(a), id(b)).unwrap();
    for (a, b, want) in [("x", "y", 1), ("y", "x", 0), ("z", "x[1]", 1), ("x", "x[1]", 0)] {
        ensure(h(a, b) == want, || format!("hom({a}, {b}) = {}, expected {want}", h(a, b)))?;
    }
    let ids = s.window_ids();
    let mut pairs = 0;
    for &a in &ids {
        for &b in &ids {
            for k in -4..=4 {
                let (sa, sb) = (a.suspend(k), b.suspend(k));
                if s.in_window(sa) && s.in_window(sb) {
                    pairs += 1;
                    let (h1, h2) = (s.hom(a, b).unwrap(), s.hom(sa, sb).unwrap());
                    ensure(h1 == h2, || format!("hom({a:?}, {b:?}) = {h1} but shifted by {k} gives {h2}"))?;
                }
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{pairs} shifted pairs, {:?}", start.elapsed()))
}

fn random_slicing(s: &Snapshot, c: &[CoheartCandidate], rng: &mut ChaCha8Rng) -> CoSlicing {
    let q = random_condition(s, c, rng).unwrap().slicing;
    // spread phases over a few integer translates as well
    q.translate(Phase::integer(rng.random_range(-1..=1)))
}

fn metric_axioms(env: &Env) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut triples = 0;
    let mut zeros = 0;
    let mut undetermined = 0;
    for (name, s, c) in env.both() {
        for i in 0..60 {
            let q = random_slicing(s, c, &mut rng);
            let r = if i % 6 == 0 { q.clone() } else { random_slicing(s, c, &mut rng) };
            let t = random_slicing(s, c, &mut rng);
            triples += 1;
            for (a, b) in [(&q, &r), (&r, &t), (&q, &t)] {
                let (d1, d2) = (metric(s, a, b), metric(s, b, a));
                ensure(d1 == d2, || format!("{name}: d not symmetric: {d1} vs {d2}"))?;
                let zero = d1 == Distance::Exact(0.0);
                ensure(zero == (a == b), || format!("{name}: d = {d1} but equality is {}", a == b))?;
                zeros += zero as usize;
                let same = metric(s, a, a);
                ensure(same == Distance::Exact(0.0), || format!("{name}: d(Q, Q) = {same}"))?;
            }
            let d = |a: &CoSlicing, b: &CoSlicing| metric(s, a, b).value();
            match (d(&q, &r), d(&r, &t), d(&q, &t)) {
                (Some(a), Some(b), Some(c)) => {
                    ensure(c <= a + b + 1e-9, || format!("{name}: d(Q,T) = {c} > {a} + {b}"))?;
                    ensure(a <= c + b + 1e-9, || format!("{name}: d(Q,R) = {a} > {c} + {b}"))?;
                    ensure(b <= a + c + 1e-9, || format!("{name}: d(R,T) = {b} > {a} + {c}"))?;
                }
                _ => undetermined += 1,
            }
        }
    }
    within(start, Duration::from_secs(60))?;
    ensure(triples >= 100, || format!("only {triples} triples"))?;
    ensure(undetermined == 0, || format!("{undetermined} triples with an undetermined distance"))?;
    Ok(format!("{triples} triples, {zeros} zero distances, {:?}", start.elapsed()))
}

fn orthogonality(env: &Env) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut instances = 0;
    let mut checked = 0;
    let mut inconclusive = 0;
    let quarter = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1), (5, 4)];
    for (name, s, c) in env.both() {
        for _ in 0..6 {
            let q = random_condition(s, c, &mut rng).unwrap().slicing;
            for (closed, (a, b)) in [(false, (0, 2)), (true, (1, 3)), (false, (1, 5)), (true, (0, 0))] {
                let a = Phase::ratio(quarter[a].0, quarter[a].1);
                let b = Phase::ratio(quarter[b].0, quarter[b].1);
                let o = orthogonality_identity(s, &q, a, b, closed).map_err(|e| format!("{name}: {e}"))?;
                ensure(o.holds(), || format!("{name}: {}: {:?}", q.describe(s), o.discrepancies))?;
                instances += 1;
                checked += o.checked;
                inconclusive += o.inconclusive.len();
            }
            // intervals ending exactly at member phases
            let p = q.support();
            let (a, b) = (p[0], p[p.len() - 1]);
            for closed in [false, true] {
                let o = orthogonality_identity(s, &q, a, b, closed).map_err(|e| format!("{name}: {e}"))?;
                ensure(o.holds(), || format!("{name}: {}: {:?}", q.describe(s), o.discrepancies))?;
                instances += 1;
                checked += o.checked;
                inconclusive += o.inconclusive.len();
            }
        }
    }
    ensure(instances >= 20, || format!("only {instances} instances"))?;
    Ok(format!("{instances} instances, {checked} objects compared, {inconclusive} undecided by the window"))
}

fn round_trip(env: &Env) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut n = 0;
    for (name, s, cands) in env.both() {
        while n < if name == "kA2" { 30 } else { 60 } {
            let cand = &cands[rng.random_range(0..cands.len())];
            let f = random_function(&cand.coheart, &mut rng);
            if !check_split_hn(s, &f).unwrap().holds() {
                continue;
            }
            // unpack after pack
            let c = pack(s, &cand.structure, &f).map_err(|e| format!("{name}: {e}"))?;
            let (p, g) = unpack(s, &c).map_err(|e| format!("{name}: {e}"))?;
            ensure(p == cand.structure, || format!("{name}: co-t-structure changed"))?;
            ensure(g.coheart == f.coheart, || format!("{name}: co-heart changed"))?;
            for (k, v) in &f.values {
                ensure((g.values[k] - v).norm() <= 1e-12, || format!("{name}: value moved at {k:?}"))?;
            }
            // pack after unpack
            let again = pack(s, &p, &g).map_err(|e| format!("{name}: {e}"))?;
            ensure(again.slicing.members() == c.slicing.members(), || format!("{name}: ids changed"))?;
            ensure(conditions_close(&again, &c, 1e-12), || format!("{name}: pack(unpack(C)) != C"))?;
            n += 1;
        }
    }
    ensure(n >= 50, || format!("only {n} inputs"))?;
    Ok(format!("{n} inputs, both directions"))
}

fn deformation(env: &Env) -> Outcome {
    let start = Instant::now();
    // two orthogonal objects sharing a slice, so that the deformed
    // filtrations have to be reordered
    let kxk = build("kxk", 2);
    let pair = cli::orthogonal_pair_condition(&kxk).unwrap();
    let conds = [
        ("kA2", &env.a2, cli::arrow_good_condition(&env.a2).unwrap()),
        ("dual", &env.dual, cli::dual_condition(&env.dual, 0, num_complex::Complex64::from_polar(1.3, 0.4 * PI)).unwrap()),
        ("kxk", &kxk, pair),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut swaps = 0;
    let mut towers = 0;
    for (name, s, c) in &conds {
        ensure(check_condition_s(s, &c.slicing).unwrap().holds(), || format!("{name}: starting point lacks (S)"))?;
        let eps = epsilon0(&c.slicing).unwrap() / 2.0;
        let opts = DeformOptions::new(eps);
        for i in 0..100 {
            let w = perturbed_charge(s, c, 0.999 * (PI * eps).sin(), &mut rng).unwrap();
            let d = deform(s, c, &w, &opts).map_err(|e| format!("{name} sample {i}: {e}"))?;
            let ax = check_axioms(s, &d.condition.slicing);
            ensure(ax.all_pass(), || format!("{name} sample {i}: {ax}"))?;
            let cs = check_condition_s(s, &d.condition.slicing).unwrap();
            ensure(cs.holds(), || format!("{name} sample {i}: output lacks (S)"))?;
            let m = metric(s, &c.slicing, &d.condition.slicing);
            ensure(matches!(m, Distance::Exact(v) if v < eps), || format!("{name} sample {i}: d = {m}"))?;
            swaps += d.swaps;
            towers += d.towers_rebuilt;
        }
    }
    within(start, Duration::from_secs(300))?;
    ensure(swaps > 0, || "no filtration needed reordering".into())?;
    Ok(format!("300 deformations, {towers} filtrations rebuilt, {swaps} legal swaps, {:?}", start.elapsed()))
}

/// Distinct co-slicings sharing the charge of `c`: packs of every other
/// co-heart on which the charge lies in the upper half plane, plus moved phases.
fn rivals(s: &Snapshot, cands: &[CoheartCandidate], c: &CoStabilityCondition, rng: &mut ChaCha8Rng) -> Vec<CoSlicing> {
    let mut out = Vec::new();
    for cand in cands {
        let values = cand.coheart.ids.iter().map(|&q| (q, c.charge.of_id(s, q))).collect();
        if let Ok(f) = costab::costab::CoStabilityFunction::new(cand.coheart.clone(), values) {
            if let Ok(r) = pack(s, &cand.structure, &f) {
                out.push(r.slicing);
            }
        }
    }
    for (q, p) in c.slicing.members_with_phase() {
        let moved = Phase::Approx(p.value() + rng.random_range(-0.49..0.49));
        if let Ok(r) = c.slicing.with_phase(q.orbit, moved) {
            out.push(r);
        }
        if let Ok(r) = c.slicing.with_phase(q.orbit, p.add_int(2)) {
            out.push(r);
        }
    }
    out
}

fn separation(env: &Env) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let (mut trials, mut equal, mut distant, mut invalid) = (0, 0, 0, 0);
    for i in 0..600 {
        let (s, cands) = if i % 2 == 0 { (&env.a2, &env.a2_cohearts) } else { (&env.dual, &env.dual_cohearts) };
        let c = random_condition(s, cands, &mut rng).unwrap();
        for r in rivals(s, cands, &c, &mut rng) {
            let other = CoStabilityCondition { charge: c.charge.clone(), slicing: r };
            trials += 1;
            match separation_check(s, &c, &other) {
                Separation::Violation(d) => {
                    return Err(format!("{} and {} at distance {d}", c.slicing.describe(s), other.slicing.describe(s)))
                }
                Separation::Equal => equal += 1,
                Separation::Distant(_) => distant += 1,
                Separation::Invalid(_) => invalid += 1,
            }
        }
    }
    ensure(trials >= 1000, || format!("only {trials} trials"))?;
    ensure(distant > 0 && equal > 0, || "search never produced both equal and distant valid pairs".into())?;
    Ok(format!("{trials} trials: {equal} equal, {distant} at distance >= 1/2, {invalid} invalid"))
}

fn theorem_b(env: &Env) -> Outcome {
    let s = &env.dual;
    let c0 = IndecId::new(0, 0);
    let want: Vec<Vec<IndecId>> = s.window_ids().into_iter().filter(|i| i.orbit == c0.orbit).map(|i| vec![i]).collect();
    let got: Vec<Vec<IndecId>> = env.dual_cohearts.iter().map(|c| c.coheart.ids.clone()).collect();
    ensure(got == want, || format!("co-hearts {got:?}"))?;
    ensure(s.k0_rank() == 1, || format!("K0 rank {}", s.k0_rank()))?;
    let mut ctx = Context::new("dual");
    ctx.width = 3;
    let w = cli::cmd_demo_theorem_b(&ctx, 50).map_err(|e| e.to_string())?;
    ensure(w.report.all_pass(), || format!("{}", w.report))?;
    ensure(w.csv.lines().count() == 51, || "chart has the wrong number of rows".into())?;
    Ok(format!("{} co-hearts, rank 1, dimension 2, 50 sampled conditions", got.len()))
}

fn counterexample(env: &Env) -> Outcome {
    let start = Instant::now();
    let s = &env.a2;
    let c = cli::counterexample_condition(s).unwrap();
    let (x, y) = (s.parse_id("x").unwrap(), s.parse_id("y").unwrap());
    let w = check_condition_s(s, &c.slicing).unwrap().witness;
    ensure(w == Some((x, y)), || format!("condition (S) witness {w:?}"))?;
    for eps in [0.1, 0.25, 0.49] {
        let wc = cli::counterexample_charge(s, eps).unwrap();
        let scan = counterexample_scan(s, &c, &wc).map_err(|e| e.to_string())?;
        ensure(matches!(scan.verdict, ScanVerdict::NoneExists), || format!("eps {eps}: {:?}", scan.verdict))?;
        let forced_y = format!("forces phase {}", 0.5 + eps);
        ensure(scan.trace.iter().any(|l| l.starts_with("x ") && l.contains("forces phase 0.5 ")), || {
            format!("eps {eps}: no forcing of x in {:?}", scan.trace)
        })?;
        ensure(scan.trace.iter().any(|l| l.starts_with("y ") && l.contains(&forced_y)), || {
            format!("eps {eps}: no forcing of y to {} in {:?}", 0.5 + eps, scan.trace)
        })?;
        ensure(scan.trace.iter().any(|l| l.contains("contradiction") && l.contains("Hom(x, y)")), || {
            format!("eps {eps}: no Hom contradiction in {:?}", scan.trace)
        })?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("witness (x, y), no deformation for eps in {{0.1, 0.25, 0.49}}, {:?}", start.elapsed()))
}

fn random_object(s: &Snapshot, rng: &mut ChaCha8Rng) -> FormalObject {
    let ids = s.window_ids();
    let mut t = FormalObject::zero();
    for _ in 0..rng.random_range(1..=3) {
        t.add_id(ids[rng.random_range(0..ids.len())], rng.random_range(1..=2));
    }
    t
}

fn split_class(env: &Env) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut objects = 0;
    let mut skipped = 0;
    let mut different_filtrations = 0;
    for (name, s, cands) in env.both() {
        for _ in 0..80 {
            let cand = &cands[rng.random_range(0..cands.len())];
            let t = random_object(s, &mut rng);
            let base = match split_k0_class(s, &cand.coheart, &t, None) {
                Ok(c) => c,
                Err(costab::Error::WindowExhausted(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(format!("{name}: {}: {e}", s.object_label(&t))),
            };
            ensure(base.k0 == s.class(&t), || {
                format!("{name}: {} has split image {:?}, class {:?}", s.object_label(&t), base.k0, s.class(&t))
            })?;
            let mut varied = false;
            for seed in 1..=4u64 {
                let other = split_k0_class(s, &cand.coheart, &t, Some(seed * 7919)).map_err(|e| e.to_string())?;
                ensure(other.coefficients == base.coefficients && other.k0 == base.k0, || {
                    format!("{name}: class of {} depends on search order", s.object_label(&t))
                })?;
                varied |= other.terms != base.terms;
            }
            different_filtrations += varied as usize;
            objects += 1;
        }
    }
    ensure(objects >= 50, || format!("only {objects} objects ({skipped} left the window)"))?;
    Ok(format!(
        "{objects} objects, 5 search orders each ({different_filtrations} with differing filtrations), {skipped} skipped at the window edge"
    ))
}

fn main() {
    let start = Instant::now();
    let a2 = build("a2", 2);
    let dual = build("dual", 3);
    let a2_cohearts = enumerate_cohearts(&a2).found;
    let dual_cohearts = enumerate_cohearts(&dual).found;
    let env = Env { a2, dual, a2_cohearts, dual_cohearts };

    let criteria: [(&str, &dyn Fn() -> Outcome); 9] = [
        ("1 hom oracle", &hom_oracle),
        ("2 metric axioms", &|| metric_axioms(&env)),
        ("3 orthogonality identity", &|| orthogonality(&env)),
        ("4 pack/unpack round trip", &|| round_trip(&env)),
        ("5 deformation", &|| deformation(&env)),
        ("6 separation", &|| separation(&env)),
        ("7 dual numbers chart", &|| theorem_b(&env)),
        ("8 arrow counterexample", &|| counterexample(&env)),
        ("9 split class well-defined", &|| split_class(&env)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of 9 passed in {:?}", 9 - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
