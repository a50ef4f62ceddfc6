//! Command implementations behind the `costab` binary, and the standard
//! scenario data they run on.

use crate::coslice::{check_axioms, check_condition_s, epsilon0, metric, CoSlicing, Distance, COSLICING_SCHEMA};
use crate::costab::{
    act_g, arg_phase, chart_sample, conditions_close, counterexample_scan, deform, deformation_inequality, lift_charge, pack,
    validate_condition, CentralCharge, CoStabilityCondition, CoStabilityFunction, DeformOptions, GElement,
    ScanVerdict, CONDITION_SCHEMA,
};
use crate::cotstruct::{
    check_cotstructure, enumerate_cohearts, heart_filtration, Coheart, CoTStructure, COTSTRUCT_SCHEMA,
};
use crate::engine::AlgebraPresentation;
use crate::error::{Error, Result};
use crate::field::FieldChoice;
use crate::phase::Phase;
use crate::report::{Report, Verdict};
use crate::snapshot::{BuildConfig, IndecId, Snapshot, SNAPSHOT_SCHEMA};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const DEFAULT_SEED: u64 = 20240917;

/// How to obtain the snapshot a command runs on.
#[derive(Debug, Clone)]
pub struct Context {
    /// Builtin algebra name or algebra file.
    pub algebra: String,
    /// Snapshot file; overrides `algebra`.
    pub snapshot: Option<PathBuf>,
    pub window: (i32, i32),
    pub width: usize,
    pub field: FieldChoice,
    pub seed: u64,
}

impl Context {
    pub fn new(algebra: &str) -> Context {
        Context {
            algebra: algebra.into(),
            snapshot: None,
            window: (-2, 2),
            width: 2,
            field: FieldChoice::Rationals,
            seed: DEFAULT_SEED,
        }
    }

    pub fn build(&self) -> Result<Snapshot> {
        if let Some(p) = &self.snapshot {
            return Snapshot::load(p);
        }
        let pres = AlgebraPresentation::resolve(&self.algebra)?.with_field(self.field);
        let cfg = BuildConfig { width_bound: self.width, window: self.window, seed: self.seed, ..BuildConfig::default() };
        Snapshot::build(pres, &cfg)
    }

    fn report(&self, scenario: &str, snap: &Snapshot) -> Report {
        let mut r = Report::new(scenario, snap.window);
        r.field = Some(snap.field.clone());
        r
    }
}

fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * phi)
}

fn ids(snap: &Snapshot, labels: &[&str]) -> Result<Vec<IndecId>> {
    labels.iter().map(|l| snap.parse_id(l)).collect()
}

/// `add(x, y)` on the arrow algebra.
pub fn arrow_coheart(snap: &Snapshot) -> Result<Coheart> {
    Coheart::new(ids(snap, &["x", "y"])?)
}

fn arrow_condition(snap: &Snapshot, zx: Complex64, zy: Complex64) -> Result<CoStabilityCondition> {
    let coheart = arrow_coheart(snap)?;
    let p = CoTStructure::from_coheart(snap, &coheart)?;
    let [x, y] = [coheart.ids[0], coheart.ids[1]];
    let f = CoStabilityFunction::new(coheart, BTreeMap::from([(x, zx), (y, zy)]))?;
    pack(snap, &p, &f)
}

/// `Z(x) = Z(y) = i`, both in the slice of phase 1/2.
pub fn counterexample_condition(snap: &Snapshot) -> Result<CoStabilityCondition> {
    arrow_condition(snap, cis(0.5), cis(0.5))
}

/// `W(x) = Z(x)` and `W(y) = cos(pi eps) exp(i pi (1/2 + eps))`.
pub fn counterexample_charge(snap: &Snapshot, eps: f64) -> Result<CentralCharge> {
    let coheart = arrow_coheart(snap)?;
    let [x, y] = [coheart.ids[0], coheart.ids[1]];
    let values = BTreeMap::from([(x, cis(0.5)), (y, (PI * eps).cos() * cis(0.5 + eps))]);
    lift_charge(snap, &CoStabilityFunction { coheart, values })
}

/// `x` at phase 3/4 and `y` at 1/4; satisfies condition (S).
pub fn arrow_good_condition(snap: &Snapshot) -> Result<CoStabilityCondition> {
    arrow_condition(snap, cis(0.75), cis(0.25))
}

/// `a` and `b` of `k x k` together in the slice of phase 1/2.
pub fn orthogonal_pair_condition(snap: &Snapshot) -> Result<CoStabilityCondition> {
    let coheart = Coheart::new(ids(snap, &["a", "b"])?)?;
    let p = CoTStructure::from_coheart(snap, &coheart)?;
    let values = coheart.ids.iter().map(|&q| (q, cis(0.5))).collect();
    pack(snap, &p, &CoStabilityFunction::new(coheart, values)?)
}

/// The condition on the dual numbers with co-heart `add(c[j])` and `Z(c[j]) = z`.
pub fn dual_condition(snap: &Snapshot, j: i32, z: Complex64) -> Result<CoStabilityCondition> {
    let c = IndecId::new(0, j);
    let coheart = Coheart::new([c])?;
    let p = CoTStructure::from_coheart(snap, &coheart)?;
    pack(snap, &p, &CoStabilityFunction::new(coheart, BTreeMap::from([(c, z)]))?)
}

fn verdict_of<T>(r: Result<T>, ok: impl FnOnce(T) -> Verdict) -> Verdict {
    match r {
        Ok(v) => ok(v),
        Err(Error::WindowExhausted(m)) | Err(Error::ResourceLimit(m)) => Verdict::Unverifiable(m),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

fn schema_of(text: &str) -> Result<String> {
    let v: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match v.get("schema").and_then(|s| s.as_str()) {
        Some(s) => Ok(s.to_string()),
        None => Err(Error::Schema("missing `schema` field".into())),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn locate(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
        e => e,
    }
}

/// Runs the checker matching each file's schema. A snapshot file replaces
/// the context snapshot for the files after it.
pub fn cmd_validate(ctx: &Context, paths: &[PathBuf]) -> Result<Report> {
    let start = Instant::now();
    let mut snap: Option<Snapshot> = None;
    let mut report = Report::new("validate", ctx.window);
    for path in paths {
        let text = read(path)?;
        let schema = schema_of(&text).map_err(|e| locate(path, e))?;
        let name = path.display().to_string();
        if schema == SNAPSHOT_SCHEMA {
            let s = Snapshot::from_toml(&text).map_err(|e| locate(path, e))?;
            report.push(format!("{name}.snapshot"), verdict_of(s.validate(), |_| Verdict::Pass));
            report.window = [s.window.0, s.window.1];
            snap = Some(s);
            continue;
        }
        if snap.is_none() {
            snap = Some(ctx.build()?);
        }
        let s = snap.as_ref().expect("snapshot set");
        report.window = [s.window.0, s.window.1];
        report.field = Some(s.field.clone());
        let mut sub = match schema.as_str() {
            COTSTRUCT_SCHEMA => check_cotstructure(s, &CoTStructure::from_toml(s, &text).map_err(|e| locate(path, e))?),
            COSLICING_SCHEMA => {
                let q = CoSlicing::from_toml(s, &text).map_err(|e| locate(path, e))?;
                let mut r = check_axioms(s, &q);
                // (S) is a property, not an axiom
                let cs = verdict_of(check_condition_s(s, &q), |c| condition_s_verdict(s, &c));
                r.note(format!("condition (S): {cs}"));
                r
            }
            CONDITION_SCHEMA => {
                let c = CoStabilityCondition::from_toml(s, &text, path.parent()).map_err(|e| locate(path, e))?;
                validate_condition(s, &c)
            }
            other => return Err(Error::Schema(format!("{name}: unknown schema `{other}`"))),
        };
        sub.scenario = name;
        report.extend(sub);
    }
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

fn condition_s_verdict(snap: &Snapshot, c: &crate::coslice::ConditionS) -> Verdict {
    match c.witness {
        None => Verdict::Pass,
        Some((a, b)) => Verdict::Fail(format!(
            "{} and {} share a slice and Hom({}, {}) has dimension {}",
            snap.id_label(a),
            snap.id_label(b),
            snap.id_label(a),
            snap.id_label(b),
            c.dimension
        )),
    }
}

/// Output of a command that also produces a CSV artifact.
#[derive(Debug, Clone)]
pub struct WithCsv {
    pub report: Report,
    pub csv: String,
}

/// Co-hearts of the dual numbers, the `(z0, phi0)` chart and the free
/// transitive action of the rotation-scaling group on sampled conditions.
pub fn cmd_demo_theorem_b(ctx: &Context, samples: usize) -> Result<WithCsv> {
    let start = Instant::now();
    let snap = Context { algebra: "dual".into(), snapshot: None, width: ctx.width.max(3), ..ctx.clone() }.build()?;
    let mut r = ctx.report("demo-theorem-b", &snap);
    r.note(format!("snapshot: {} orbits, width bound {}", snap.orbits.len(), snap.width_bound));

    let en = enumerate_cohearts(&snap);
    let c0 = IndecId::new(0, 0);
    let expected: Vec<Vec<IndecId>> = snap.window_ids().into_iter().filter(|i| i.orbit == 0).map(|i| vec![i]).collect();
    let found: Vec<Vec<IndecId>> = en.found.iter().map(|c| c.coheart.ids.clone()).collect();
    r.push(
        "cohearts",
        if found == expected && !en.partial {
            Verdict::Pass
        } else {
            Verdict::Fail(format!(
                "expected the shifts of add({}), found {:?}{}",
                snap.id_label(c0),
                en.found.iter().map(|c| c.coheart.label(&snap)).collect::<Vec<_>>(),
                if en.partial { " with undecided candidates" } else { "" }
            ))
        },
    );
    for n in en.notes {
        r.note(n);
    }
    let rank = snap.k0_rank();
    r.push("k0_rank", if rank == 1 { Verdict::Pass } else { Verdict::Fail(format!("rank {rank}")) });

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let (lo, hi) = snap.window;
    let mut conds = Vec::with_capacity(samples);
    let mut csv = String::from("j,re_z0,im_z0,phi0\n");
    for _ in 0..samples {
        let j = rng.random_range(lo..=hi);
        let phi = 1.0 - 0.98 * rng.random::<f64>();
        let z = Complex64::from_polar(0.2 + 3.0 * rng.random::<f64>(), PI * phi);
        let c = dual_condition(&snap, j, z)?;
        let phi0 = c.slicing.phase_of(c0).expect("orbit present").value();
        let z0 = c.charge.of_id(&snap, c0);
        csv.push_str(&format!("{j},{},{},{}\n", z0.re, z0.im, phi0));
        conds.push((c, z0, phi0));
    }

    let tol = 1e-9;
    let mut valid = Verdict::Pass;
    let mut chart = Verdict::Pass;
    for (c, z0, phi0) in &conds {
        let v = validate_condition(&snap, c);
        if !v.all_pass() {
            valid = valid.and(if v.any_fail() { Verdict::Fail(format!("{v}")) } else { Verdict::Unverifiable(format!("{v}")) });
        }
        let gap = (arg_phase(*z0) - phi0).rem_euclid(2.0);
        if gap.min(2.0 - gap) > tol {
            chart = Verdict::Fail(format!("z0 = {z0} does not have phase {phi0} modulo 2"));
        }
    }
    r.push("conditions_valid", valid);
    r.push("chart_consistent", chart);

    // transitivity: the element carrying one condition to another
    let mut trans = Verdict::Pass;
    let mut free = Verdict::Pass;
    for (i, (ci, zi, pi)) in conds.iter().enumerate() {
        let (cj, zj, pj) = &conds[(i + 1) % conds.len()];
        let g = GElement::new(zi / zj, Phase::Approx(pi - pj));
        match g {
            Ok(g) => {
                if !conditions_close(&act_g(ci, &g), cj, tol) {
                    trans = Verdict::Fail(format!("sample {i}: the recovered element does not reach sample {}", (i + 1) % conds.len()));
                }
            }
            Err(e) => trans = Verdict::Fail(format!("sample {i}: {e}")),
        }
        // freeness: the element carrying C to C.g is recovered as g, and a
        // non-identity element moves C
        let a = rng.random_range(-2.0..2.0);
        let g = GElement::from_polar(0.5 + rng.random::<f64>(), Phase::Approx(a))?;
        let moved = act_g(ci, &g);
        let zm = moved.charge.of_id(&snap, c0);
        let pm = moved.slicing.phase_of(c0).expect("orbit present").value();
        let (lambda, shift) = (zi / zm, pi - pm);
        if (lambda - g.lambda).norm() > tol || (shift - a).abs() > tol {
            free = Verdict::Fail(format!("sample {i}: recovered ({lambda}, {shift}) instead of ({}, {a})", g.lambda));
        }
        let trivial = (g.lambda - 1.0).norm() <= tol && a.abs() <= tol;
        if (zm - zi).norm() <= tol && (pm - pi).abs() <= tol && !trivial {
            free = Verdict::Fail(format!("sample {i} is fixed by {g:?}"));
        }
    }
    r.push("action_transitive", trans);
    r.push("action_free", free);

    if let Some((c, _, _)) = conds.first() {
        let e = epsilon0(&c.slicing)? / 2.0;
        let ch = chart_sample(&snap, c, e, (PI * e).sin() * 0.9, samples.min(20), ctx.seed)?;
        r.push(
            "chart_dimension",
            if ch.dimension == 2 { Verdict::Pass } else { Verdict::Fail(format!("dimension {}", ch.dimension)) },
        );
        r.note(format!("chart: rank {} dimension {} from {} deformations", ch.rank, ch.dimension, ch.rows.len()));
    }
    r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(WithCsv { report: r, csv })
}

/// Condition (S) failing on the arrow algebra, no deformation to the
/// rotated charge, and a successful deformation of a condition with (S).
pub fn cmd_demo_counterexample(ctx: &Context, eps_list: &[f64]) -> Result<Report> {
    let start = Instant::now();
    let snap = Context { algebra: "a2".into(), snapshot: None, ..ctx.clone() }.build()?;
    let mut r = ctx.report("demo-counterexample", &snap);
    let c = counterexample_condition(&snap)?;
    r.push("condition_valid", {
        let v = validate_condition(&snap, &c);
        if v.all_pass() {
            Verdict::Pass
        } else {
            Verdict::Fail(format!("{v}"))
        }
    });
    let s = check_condition_s(&snap, &c.slicing)?;
    let (x, y) = (snap.parse_id("x")?, snap.parse_id("y")?);
    r.push(
        "condition_s_fails",
        match s.witness {
            Some(w) if w == (x, y) => Verdict::Pass,
            w => Verdict::Fail(format!("expected witness (x, y), got {w:?}")),
        },
    );
    r.note(format!("condition (S): {}", condition_s_verdict(&snap, &s)));
    for &eps in eps_list {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1/2)")));
        }
        let w = counterexample_charge(&snap, eps)?;
        let ineq = deformation_inequality(&snap, &c, &w, eps, 4);
        r.note(format!(
            "eps = {eps}: max |W(q) - Z(q)| / (sin(pi eps) |Z(q)|) = {:.15} at {} (strict inequality {})",
            ineq.worst_ratio,
            snap.object_label(&ineq.worst),
            if ineq.holds() { "holds" } else { "fails" }
        ));
        let scan = counterexample_scan(&snap, &c, &w)?;
        let v = match &scan.verdict {
            ScanVerdict::NoneExists => Verdict::Pass,
            ScanVerdict::Exists(q) => Verdict::Fail(format!("found {}", q.describe(&snap))),
            ScanVerdict::Inconclusive(m) => Verdict::Unverifiable(m.clone()),
        };
        r.push(format!("no_deformation[eps={eps}]"), v);
        r.note(format!("eps = {eps}: {} candidates, {} within 1/2", scan.candidates, scan.near));
        for line in scan.trace {
            r.note(format!("eps = {eps}: {line}"));
        }
        let refused = deform(&snap, &c, &w, &DeformOptions::new(eps));
        r.push(
            format!("deform_refused[eps={eps}]"),
            match refused {
                Err(Error::Precondition(m)) if m.contains("condition (S)") => Verdict::Pass,
                other => Verdict::Fail(format!("{other:?}")),
            },
        );
    }
    // contrast
    let good = arrow_good_condition(&snap)?;
    let e = epsilon0(&good.slicing)? / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let w = crate::costab::perturbed_charge(&snap, &good, 0.9 * (PI * e).sin(), &mut rng)?;
    r.push(
        "contrast_deform",
        verdict_of(deform(&snap, &good, &w, &DeformOptions::new(e)), |d| {
            if d.distance < e {
                Verdict::Pass
            } else {
                Verdict::Fail(format!("distance {}", d.distance))
            }
        }),
    );
    r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(r)
}

pub struct DeformOutput {
    pub report: Report,
    pub condition: Option<String>,
}

pub fn cmd_deform(
    ctx: &Context,
    condition: &Path,
    charge: &Path,
    eps: Option<f64>,
    snap_denominator: Option<i64>,
) -> Result<DeformOutput> {
    let start = Instant::now();
    let snap = ctx.build()?;
    let c = CoStabilityCondition::from_toml(&snap, &read(condition)?, condition.parent()).map_err(|e| locate(condition, e))?;
    let w = CentralCharge::from_toml(&snap, &read(charge)?).map_err(|e| locate(charge, e))?;
    let e0 = epsilon0(&c.slicing)?;
    let eps = eps.unwrap_or(e0 / 2.0);
    let mut opts = DeformOptions::new(eps);
    opts.snap_denominator = snap_denominator;
    let mut r = ctx.report("deform", &snap);
    r.note(format!("eps = {eps}, eps0 = {e0}"));
    let d = deform(&snap, &c, &w, &opts)?;
    r.push("deformed", Verdict::Pass);
    let ax = check_axioms(&snap, &d.condition.slicing);
    r.extend(ax);
    r.push(
        "condition_s",
        verdict_of(check_condition_s(&snap, &d.condition.slicing), |c| condition_s_verdict(&snap, &c)),
    );
    r.push("distance_below_eps", if d.distance < eps { Verdict::Pass } else { Verdict::Fail(format!("{}", d.distance)) });
    r.note(format!("d(Q, R) = {}", d.distance));
    r.note(format!("R = {}", d.condition.slicing.describe(&snap)));
    r.note(format!("{} filtrations rebuilt with {} swaps", d.towers_rebuilt, d.swaps));
    for n in d.notes {
        r.note(n);
    }
    r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(DeformOutput { report: r, condition: Some(d.condition.to_toml(&snap)) })
}

pub fn cmd_metric(ctx: &Context, a: &Path, b: &Path) -> Result<Report> {
    let snap = ctx.build()?;
    let q = CoSlicing::from_toml(&snap, &read(a)?).map_err(|e| locate(a, e))?;
    let p = CoSlicing::from_toml(&snap, &read(b)?).map_err(|e| locate(b, e))?;
    let mut r = ctx.report("metric", &snap);
    let d = metric(&snap, &q, &p);
    r.push("computed", Verdict::Pass);
    r.note(match d {
        Distance::Exact(v) => format!("d = {v}"),
        Distance::AtLeastHalf { upper, refined } => format!("d >= 1/2 (phase bound {upper}, refined {refined:?})"),
    });
    Ok(r)
}

/// Filtration of `object` with factors in the suspensions of the co-heart of
/// the co-t-structure in `cotstructure`.
pub fn cmd_hn(ctx: &Context, cotstructure: &Path, object: &str) -> Result<Report> {
    let snap = ctx.build()?;
    let p = CoTStructure::from_toml(&snap, &read(cotstructure)?).map_err(|e| locate(cotstructure, e))?;
    let t = snap.parse_object(object)?;
    let coheart = p.coheart(&snap)?;
    let mut r = ctx.report("hn", &snap);
    match heart_filtration(&snap, &coheart, &t, Some(ctx.seed)) {
        Ok(tower) => {
            r.push("filtration", Verdict::Pass);
            let parts: Vec<String> = tower
                .factors
                .iter()
                .map(|f| format!("{} (level {})", snap.object_label(&f.object), f.tag))
                .collect();
            r.note(format!("factors: {}", parts.join(", ")));
        }
        Err(e) => r.push("filtration", verdict_of::<()>(Err(e), |_| Verdict::Pass)),
    }
    Ok(r)
}

pub fn cmd_enumerate_cohearts(ctx: &Context) -> Result<Report> {
    let snap = ctx.build()?;
    let mut r = ctx.report("enumerate-cohearts", &snap);
    let en = enumerate_cohearts(&snap);
    r.push(
        "complete",
        if en.partial {
            Verdict::Unverifiable("some candidates could not be decided in the window".into())
        } else {
            Verdict::Pass
        },
    );
    for c in &en.found {
        r.note(format!("co-heart {}", c.coheart.label(&snap)));
    }
    for n in en.notes {
        r.note(n);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_demo_verdicts() {
        let r = cmd_demo_counterexample(&Context::new("a2"), &[0.1]).unwrap();
        assert_eq!(r.exit_code(), 0, "{r}");
        assert!(r.notes.iter().any(|n| n.contains("Hom(x, y)")));
    }

    #[test]
    fn theorem_b_demo_small() {
        let w = cmd_demo_theorem_b(&Context::new("dual"), 8).unwrap();
        assert_eq!(w.report.exit_code(), 0, "{}", w.report);
        assert_eq!(w.csv.lines().count(), 9);
    }

    #[test]
    fn validate_dispatches_on_schema() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = Context::new("a2");
        let snap = ctx.build().unwrap();
        let c = counterexample_condition(&snap).unwrap();
        let path = dir.path().join("q.toml");
        std::fs::write(&path, c.slicing.to_toml(&snap)).unwrap();
        let r = cmd_validate(&ctx, std::slice::from_ref(&path)).unwrap();
        assert_eq!(r.exit_code(), 0, "{r}");
        std::fs::write(&path, "schema = \"costab-coslicing/1\"\n[[slice]]\nphase = \"1.5.2\"\nids = [\"x\"]\n").unwrap();
        assert!(matches!(cmd_validate(&ctx, &[path]), Err(Error::Parse(_))));
    }
}
