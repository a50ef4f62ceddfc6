//! Co-slicings with finite support, interval subcategories and the metric.

use crate::cotstruct::CoTStructure;
use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::report::{Report, Verdict};
use crate::snapshot::{FormalObject, IndecId, Snapshot};
use crate::towers::{find_tower, SearchOutcome, Tower, TowerQuery};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const COSLICING_SCHEMA: &str = "costab-coslicing/1";

#[derive(Debug, Clone)]
pub struct Slice {
    /// In `(0, 1]`.
    pub phase: Phase,
    pub ids: BTreeSet<IndecId>,
}

/// Finitely many slices with base phases in `(0, 1]`; `Q(phi + 1) = Sigma Q(phi)`
/// is applied on demand.
#[derive(Debug, Clone)]
pub struct CoSlicing {
    slices: Vec<Slice>,
    /// orbit -> (member, phase of member)
    by_orbit: BTreeMap<usize, (IndecId, Phase)>,
}

impl CoSlicing {
    /// Accepts members at any phase; each is moved to its base phase.
    pub fn new(members: impl IntoIterator<Item = (IndecId, Phase)>) -> Result<CoSlicing> {
        let mut by_orbit: BTreeMap<usize, (IndecId, Phase)> = BTreeMap::new();
        for (id, phi) in members {
            let (base, k) = phi.split_base();
            let id = id.suspend(-(k as i32));
            if let Some((old, p)) = by_orbit.insert(id.orbit, (id, base)) {
                if old != id || p.cmp_tol(&base) != Ordering::Equal {
                    return Err(Error::Validation(format!(
                        "orbit {} occurs in two slices (phases {p} and {base})",
                        id.orbit
                    )));
                }
            }
        }
        Ok(Self::from_index(by_orbit))
    }

    pub fn from_slices(slices: impl IntoIterator<Item = (Phase, Vec<IndecId>)>) -> Result<CoSlicing> {
        let mut members = Vec::new();
        for (phi, ids) in slices {
            if ids.is_empty() {
                return Err(Error::Validation(format!("empty slice at phase {phi}")));
            }
            members.extend(ids.into_iter().map(|id| (id, phi)));
        }
        CoSlicing::new(members)
    }

    fn from_index(by_orbit: BTreeMap<usize, (IndecId, Phase)>) -> CoSlicing {
        let mut slices: Vec<Slice> = Vec::new();
        let mut sorted: Vec<(IndecId, Phase)> = by_orbit.values().copied().collect();
        sorted.sort_by(|a, b| a.1.cmp_tol(&b.1).then(a.0.cmp(&b.0)));
        for (id, phi) in sorted {
            match slices.last_mut() {
                Some(s) if s.phase.cmp_tol(&phi) == Ordering::Equal => {
                    s.ids.insert(id);
                }
                _ => slices.push(Slice { phase: phi, ids: BTreeSet::from([id]) }),
            }
        }
        CoSlicing { slices, by_orbit }
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// Base members of all slices.
    pub fn members(&self) -> Vec<IndecId> {
        self.by_orbit.values().map(|(id, _)| *id).collect()
    }

    pub fn members_with_phase(&self) -> impl Iterator<Item = (IndecId, Phase)> + '_ {
        self.by_orbit.values().copied()
    }

    /// The phase `phi` with `id` in `Q(phi)`, if `id` lies in a slice.
    pub fn phase_of(&self, id: IndecId) -> Option<Phase> {
        self.by_orbit.get(&id.orbit).map(|(m, p)| p.add_int((id.shift - m.shift) as i64))
    }

    /// The slice member of the orbit of `id`.
    pub fn member(&self, orbit: usize) -> Option<(IndecId, Phase)> {
        self.by_orbit.get(&orbit).copied()
    }

    pub fn support(&self) -> Vec<Phase> {
        self.slices.iter().map(|s| s.phase).collect()
    }

    /// `Q'(phi) = Q(phi + a)`.
    pub fn translate(&self, a: Phase) -> CoSlicing {
        let members: Vec<_> = self.members_with_phase().map(|(id, p)| (id, p.add(&a.neg()))).collect();
        CoSlicing::new(members).expect("translation keeps orbits distinct")
    }

    /// Moves one orbit to a new phase, keeping the rest.
    pub fn with_phase(&self, orbit: usize, phi: Phase) -> Result<CoSlicing> {
        let (id, _) = self.member(orbit).ok_or_else(|| Error::Precondition(format!("orbit {orbit} has no slice")))?;
        let mut members: Vec<_> = self.members_with_phase().filter(|(m, _)| m.orbit != orbit).collect();
        members.push((id, phi));
        CoSlicing::new(members)
    }

    pub fn describe(&self, snap: &Snapshot) -> String {
        let parts: Vec<String> = self
            .slices
            .iter()
            .map(|s| {
                let ids: Vec<String> = s.ids.iter().map(|&id| snap.id_label(id)).collect();
                format!("{}: add({})", s.phase, ids.join(", "))
            })
            .collect();
        format!("{{{}}}", parts.join("; "))
    }

    pub(crate) fn to_records(&self, snap: &Snapshot) -> Vec<SliceRecord> {
        self.slices
            .iter()
            .map(|s| SliceRecord {
                phase: PhaseRepr::Text(s.phase.to_string()),
                ids: s.ids.iter().map(|&id| snap.id_label(id)).collect(),
            })
            .collect()
    }

    pub(crate) fn from_records(snap: &Snapshot, records: &[SliceRecord]) -> Result<CoSlicing> {
        let mut slices = Vec::new();
        for rec in records {
            let phase = rec.phase.to_phase()?;
            if !phase.in_unit_interval() {
                return Err(Error::Validation(format!("slice phase {phase} is not in (0, 1]")));
            }
            let ids = rec.ids.iter().map(|s| snap.parse_id(s)).collect::<Result<Vec<_>>>()?;
            slices.push((phase, ids));
        }
        CoSlicing::from_slices(slices)
    }

    pub fn to_toml(&self, snap: &Snapshot) -> String {
        let file = CoSlicingFile { schema: COSLICING_SCHEMA.into(), slice: self.to_records(snap) };
        toml::to_string(&file).expect("co-slicing serializes")
    }

    pub fn from_toml(snap: &Snapshot, text: &str) -> Result<CoSlicing> {
        let file: CoSlicingFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema != COSLICING_SCHEMA {
            return Err(Error::Schema(format!("expected `{COSLICING_SCHEMA}`, found `{}`", file.schema)));
        }
        CoSlicing::from_records(snap, &file.slice)
    }
}

impl PartialEq for CoSlicing {
    /// Equality of every slice as a set of indecomposables.
    fn eq(&self, other: &Self) -> bool {
        self.by_orbit.len() == other.by_orbit.len()
            && self.by_orbit.iter().all(|(&o, &(id, p))| {
                other.phase_of(id).is_some_and(|q| q.cmp_tol(&p) == Ordering::Equal) && other.by_orbit.contains_key(&o)
            })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum PhaseRepr {
    Text(String),
    Number(f64),
}

impl PhaseRepr {
    pub(crate) fn to_phase(&self) -> Result<Phase> {
        match self {
            PhaseRepr::Text(s) => s.parse(),
            PhaseRepr::Number(x) => {
                let exact = x.to_string().parse::<Phase>();
                exact.or_else(|_| {
                    if x.is_finite() {
                        Ok(Phase::Approx(*x))
                    } else {
                        Err(Error::Parse(format!("malformed phase `{x}`")))
                    }
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct SliceRecord {
    pub(crate) phase: PhaseRepr,
    pub(crate) ids: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoSlicingFile {
    schema: String,
    #[serde(default)]
    slice: Vec<SliceRecord>,
}

/// Shifts `k` such that `Sigma^k m` may have Hom to or from `t`.
fn relevant_shifts(snap: &Snapshot, m: IndecId, t: IndecId) -> std::ops::RangeInclusive<i32> {
    let w = (snap.orbits[m.orbit].width + snap.orbits[t.orbit].width) as i32;
    let d = t.shift - m.shift;
    (d - w)..=(d + w)
}

/// Semistable indecomposables near `t`, with their phases.
fn semistables_near(snap: &Snapshot, q: &CoSlicing, t: IndecId) -> Vec<(IndecId, Phase)> {
    let mut out = Vec::new();
    for (m, p) in q.members_with_phase() {
        for k in relevant_shifts(snap, m, t) {
            out.push((m.suspend(k), p.add_int(k as i64)));
        }
    }
    out
}

/// Hom vanishing from lower to higher phases among in-window semistables.
pub fn check_hom_ordering(snap: &Snapshot, q: &CoSlicing) -> Verdict {
    let mut phased: Vec<(IndecId, Phase)> =
        snap.window_ids().into_iter().filter_map(|id| q.phase_of(id).map(|p| (id, p))).collect();
    // witnesses near the base phases first
    phased.sort_by_key(|(_, p)| p.split_base().1.abs());
    let mut order = Verdict::Pass;
    'outer: for &(a, pa) in &phased {
        for &(b, pb) in &phased {
            if pa.cmp_tol(&pb) != Ordering::Less {
                continue;
            }
            match snap.hom(a, b) {
                Ok(0) => {}
                Ok(d) => {
                    order = Verdict::Fail(format!(
                        "{} in Q({pa}) and {} in Q({pb}) but Hom({}, {}) has dimension {d}",
                        snap.id_label(a),
                        snap.id_label(b),
                        snap.id_label(a),
                        snap.id_label(b)
                    ));
                    break 'outer;
                }
                Err(e) => order = order.and(Verdict::Unverifiable(e.to_string())),
            }
        }
    }
    order
}

/// Checks slice closure, Hom vanishing from lower to higher phases and the
/// existence of phase-ascending towers for every in-window indecomposable.
pub fn check_axioms(snap: &Snapshot, q: &CoSlicing) -> Report {
    let mut r = Report::new("coslicing", snap.window);
    r.push("slices_closed", Verdict::Pass);

    r.push("hom_ordering", check_hom_ordering(snap, q));

    let tag = |id: IndecId| q.phase_of(id);
    let mut towers = Verdict::Pass;
    let mut missing = Vec::new();
    for t in snap.window_ids() {
        if q.phase_of(t).is_some() {
            continue;
        }
        match find_tower(snap, &FormalObject::single(t), &TowerQuery::new(&tag)) {
            SearchOutcome::Found(_) => {}
            SearchOutcome::DefinitelyNone => missing.push(snap.id_label(t)),
            SearchOutcome::WindowLimited => {
                towers = towers.and(Verdict::Unverifiable(format!("{}: unverifiable in window", snap.id_label(t))))
            }
            SearchOutcome::DepthExhausted { depth } => {
                towers = towers
                    .and(Verdict::Unverifiable(format!("{}: search depth {depth} exhausted", snap.id_label(t))))
            }
        }
    }
    if !missing.is_empty() {
        towers = Verdict::Fail(format!("no phase-ascending tower for {{{}}}", missing.join(", ")));
    }
    r.push("filtrations", towers);
    r
}

/// The slice tower of `t`: factors in slices with strictly ascending phase.
pub fn slice_tower(snap: &Snapshot, q: &CoSlicing, t: &FormalObject) -> Result<Tower> {
    let tag = |id: IndecId| q.phase_of(id);
    match find_tower(snap, t, &TowerQuery::new(&tag)) {
        SearchOutcome::Found(tower) => Ok(tower),
        SearchOutcome::DefinitelyNone => {
            Err(Error::Precondition(format!("{} has no phase-ascending tower", snap.object_label(t))))
        }
        SearchOutcome::WindowLimited => Err(Error::WindowExhausted(format!("tower of {}", snap.object_label(t)))),
        SearchOutcome::DepthExhausted { depth } => {
            Err(Error::ResourceLimit(format!("tower of {} at depth {depth}", snap.object_label(t))))
        }
    }
}

/// Outcome of the same-slice Hom vanishing test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionS {
    /// `(q1, q2)` in one slice with `Hom(q1, q2) != 0`.
    pub witness: Option<(IndecId, IndecId)>,
    pub dimension: u32,
}

impl ConditionS {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn check_condition_s(snap: &Snapshot, q: &CoSlicing) -> Result<ConditionS> {
    for s in q.slices() {
        for &a in &s.ids {
            for &b in &s.ids {
                if a == b {
                    continue;
                }
                let d = snap.hom(a, b)?;
                if d != 0 {
                    return Ok(ConditionS { witness: Some((a, b)), dimension: d });
                }
            }
        }
    }
    Ok(ConditionS { witness: None, dimension: 0 })
}

/// An interval of phases with open or closed ends.
#[derive(Debug, Clone, Copy)]
pub struct Interval {
    pub lo: Phase,
    pub hi: Phase,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Phase, hi: Phase) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    /// `(lo, hi]`.
    pub fn half_open(lo: Phase, hi: Phase) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: true }
    }

    pub fn contains(&self, p: Phase) -> bool {
        let lo = p.cmp_tol(&self.lo);
        let hi = p.cmp_tol(&self.hi);
        (lo == Ordering::Greater || (self.lo_closed && lo == Ordering::Equal))
            && (hi == Ordering::Less || (self.hi_closed && hi == Ordering::Equal))
    }

    /// Whether `Q(I)` is the additive hull of its slices.
    pub fn is_short(&self) -> bool {
        let len = self.hi.add(&self.lo.neg());
        match len.cmp_tol(&Phase::integer(1)) {
            Ordering::Less => true,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => false,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member,
    NotMember,
    /// A search bound or the window stopped the tower search.
    Inconclusive(String),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

/// Decides `t in Q(I)`: by slice phases when `I` is short, otherwise by a
/// tower search per indecomposable summand.
pub fn interval_membership(snap: &Snapshot, q: &CoSlicing, t: &FormalObject, i: Interval) -> Membership {
    if i.is_short() {
        return additive_hull_membership(q, t, i);
    }
    tower_membership(snap, q, t, i)
}

pub fn additive_hull_membership(q: &CoSlicing, t: &FormalObject, i: Interval) -> Membership {
    if t.ids().all(|id| q.phase_of(id).is_some_and(|p| i.contains(p))) {
        Membership::Member
    } else {
        Membership::NotMember
    }
}

/// Tower search restricted to slices inside `I`, one summand at a time.
pub fn tower_membership(snap: &Snapshot, q: &CoSlicing, t: &FormalObject, i: Interval) -> Membership {
    let tag = |id: IndecId| q.phase_of(id).filter(|&p| i.contains(p));
    for id in t.ids() {
        match find_tower(snap, &FormalObject::single(id), &TowerQuery::new(&tag)) {
            SearchOutcome::Found(_) => {}
            SearchOutcome::DefinitelyNone => return Membership::NotMember,
            SearchOutcome::WindowLimited => {
                return Membership::Inconclusive(format!("{}: window", snap.id_label(id)))
            }
            SearchOutcome::DepthExhausted { depth } => {
                return Membership::Inconclusive(format!("{}: depth {depth}", snap.id_label(id)))
            }
        }
    }
    Membership::Member
}

/// `t` has no maps to semistables of phase above `b` and none from
/// semistables of phase below `a` (at most `a` when `strict_lo` is false).
pub fn perp_membership(snap: &Snapshot, q: &CoSlicing, t: IndecId, a: Phase, b: Phase, lo_closed: bool) -> Result<bool> {
    for (r, p) in semistables_near(snap, q, t) {
        if p.cmp_tol(&b) == Ordering::Greater && snap.hom(t, r)? != 0 {
            return Ok(false);
        }
        let below = match p.cmp_tol(&a) {
            Ordering::Less => true,
            Ordering::Equal => !lo_closed,
            Ordering::Greater => false,
        };
        if below && snap.hom(r, t)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Default)]
pub struct OrthogonalityCheck {
    pub checked: usize,
    pub discrepancies: Vec<String>,
    pub inconclusive: Vec<String>,
}

impl OrthogonalityCheck {
    pub fn holds(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Compares the perpendicular description of `Q((a, b])` (or `Q([a, b])`
/// when `closed`) with direct membership, for every in-window indecomposable.
pub fn orthogonality_identity(snap: &Snapshot, q: &CoSlicing, a: Phase, b: Phase, closed: bool) -> Result<OrthogonalityCheck> {
    if a.cmp_tol(&b) == Ordering::Greater {
        return Err(Error::Precondition(format!("interval end {a} exceeds {b}")));
    }
    let i = Interval { lo: a, hi: b, lo_closed: closed, hi_closed: true };
    let mut out = OrthogonalityCheck::default();
    for t in snap.window_ids() {
        out.checked += 1;
        let lhs = perp_membership(snap, q, t, a, b, closed)?;
        let rhs = interval_membership(snap, q, &FormalObject::single(t), i);
        match rhs {
            Membership::Inconclusive(why) => out.inconclusive.push(format!("{}: {why}", snap.id_label(t))),
            m if m.is_member() != lhs => out.discrepancies.push(format!(
                "{}: perpendicular test says {lhs}, membership in {i} says {}",
                snap.id_label(t),
                m.is_member()
            )),
            _ => {}
        }
    }
    Ok(out)
}

/// Half the smallest circular gap between support phases, capped at 1/2 and
/// shrunk by a factor `1 - 2^-20`.
pub fn epsilon0(q: &CoSlicing) -> Result<f64> {
    let mut ps: Vec<f64> = q.support().iter().map(|p| p.value()).collect();
    if ps.is_empty() {
        return Err(Error::Precondition("empty co-slicing (zero category)".into()));
    }
    ps.sort_by(f64::total_cmp);
    let mut gap = 1.0 + ps[0] - ps[ps.len() - 1];
    for w in ps.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    Ok((gap / 2.0).min(0.5) * (1.0 - 2f64.powi(-20)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    /// Below 1/2 the per-indecomposable phase difference is the distance.
    Exact(f64),
    /// At least 1/2; `upper` is the per-indecomposable maximum (possibly
    /// infinite), `refined` the value from perpendicular tests when available.
    AtLeastHalf { upper: f64, refined: Option<f64> },
}

impl Distance {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Distance::Exact(v) => Some(v),
            Distance::AtLeastHalf { refined, .. } => refined,
        }
    }

    pub fn is_below_half(&self) -> bool {
        matches!(self, Distance::Exact(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(v) => write!(f, "{v}"),
            Distance::AtLeastHalf { upper, refined: Some(r) } => write!(f, "{r} (>= 1/2, per-object bound {upper})"),
            Distance::AtLeastHalf { upper, refined: None } => write!(f, ">= 1/2 (at most {upper})"),
        }
    }
}

/// Largest phase difference over slice members of either co-slicing.
pub fn phase_difference(q: &CoSlicing, r: &CoSlicing) -> f64 {
    let mut v: f64 = 0.0;
    for (x, y) in [(q, r), (r, q)] {
        for (id, p) in x.members_with_phase() {
            match y.phase_of(id) {
                Some(p2) => v = v.max((p.value() - p2.value()).abs()),
                None => return f64::INFINITY,
            }
        }
    }
    v
}

/// Smallest `e` with `Q(phi)` inside `R([phi - e, phi + e])` for all `phi`,
/// from perpendicular tests on the slice members of `Q`.
fn one_sided_distance(snap: &Snapshot, q: &CoSlicing, r: &CoSlicing) -> Result<f64> {
    let mut e: f64 = 0.0;
    for (m, p) in q.members_with_phase() {
        for (s, ps) in semistables_near(snap, r, m) {
            let diff = ps.value() - p.value();
            if diff > e && snap.hom(m, s)? != 0 {
                e = diff;
            }
            if -diff > e && snap.hom(s, m)? != 0 {
                e = -diff;
            }
        }
    }
    Ok(e)
}

pub fn metric(snap: &Snapshot, q: &CoSlicing, r: &CoSlicing) -> Distance {
    let v = phase_difference(q, r);
    if v < 0.5 {
        return Distance::Exact(v);
    }
    let refined = one_sided_distance(snap, q, r)
        .and_then(|a| one_sided_distance(snap, r, q).map(|b| a.max(b)))
        .ok()
        .filter(|d| *d >= 0.5 - crate::phase::TAU);
    Distance::AtLeastHalf { upper: v, refined }
}

/// `(Q(<= 1), Q(> 1))`, by perpendicular tests within the window.
pub fn induced_cotstructure(snap: &Snapshot, q: &CoSlicing) -> Result<CoTStructure> {
    let mut aisle = BTreeSet::new();
    let mut coaisle = BTreeSet::new();
    for t in snap.window_ids() {
        let mut in_a = true;
        let mut in_b = true;
        for (r, p) in semistables_near(snap, q, t) {
            let high = p.cmp_tol(&Phase::integer(1)) == Ordering::Greater;
            if high && in_a && snap.hom(t, r)? != 0 {
                in_a = false;
            }
            if !high && in_b && snap.hom(r, t)? != 0 {
                in_b = false;
            }
        }
        if in_a {
            aisle.insert(t);
        }
        if in_b {
            coaisle.insert(t);
        }
    }
    Ok(CoTStructure { aisle, coaisle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cotstruct::check_cotstructure;
    use crate::engine::AlgebraPresentation;
    use crate::snapshot::BuildConfig;
    use std::sync::OnceLock;

    fn a2() -> &'static Snapshot {
        static S: OnceLock<Snapshot> = OnceLock::new();
        S.get_or_init(|| Snapshot::build(AlgebraPresentation::a2(), &BuildConfig::default()).unwrap())
    }

    fn id(s: &Snapshot, t: &str) -> IndecId {
        s.parse_id(t).unwrap()
    }

    fn half_xy(s: &Snapshot) -> CoSlicing {
        CoSlicing::from_slices([(Phase::ratio(1, 2), vec![id(s, "x"), id(s, "y")])]).unwrap()
    }

    fn good(s: &Snapshot) -> CoSlicing {
        CoSlicing::from_slices([(Phase::ratio(1, 4), vec![id(s, "y")]), (Phase::ratio(3, 4), vec![id(s, "x")])])
            .unwrap()
    }

    #[test]
    fn base_phases_normalize() {
        let s = a2();
        let q = CoSlicing::new([(id(s, "x[1]"), Phase::ratio(3, 2))]).unwrap();
        assert_eq!(q.slices()[0].ids, BTreeSet::from([id(s, "x")]));
        assert_eq!(q.phase_of(id(s, "x[-1]")), Some(Phase::ratio(-1, 2)));
        assert!(CoSlicing::new([(id(s, "x"), Phase::ratio(1, 2)), (id(s, "x[1]"), Phase::ratio(1, 4))]).is_err());
    }

    #[test]
    fn axioms_for_half_xy_and_failure_when_split() {
        let s = a2();
        let r = check_axioms(s, &half_xy(s));
        assert!(r.all_pass(), "{r}");
        let bad =
            CoSlicing::from_slices([(Phase::ratio(1, 2), vec![id(s, "x")]), (Phase::ratio(3, 5), vec![id(s, "y")])])
                .unwrap();
        let r = check_axioms(s, &bad);
        match r.verdict("hom_ordering").unwrap() {
            Verdict::Fail(m) => assert!(m.contains("Hom(x, y)"), "{m}"),
            v => panic!("{v}"),
        }
        assert!(check_axioms(s, &good(s)).all_pass());
    }

    #[test]
    fn condition_s() {
        let s = a2();
        let c = check_condition_s(s, &half_xy(s)).unwrap();
        assert_eq!(c.witness, Some((id(s, "x"), id(s, "y"))));
        assert!(check_condition_s(s, &good(s)).unwrap().holds());
        let single = CoSlicing::from_slices([(Phase::integer(1), vec![id(s, "z")])]).unwrap();
        assert!(check_condition_s(s, &single).unwrap().holds());
    }

    #[test]
    fn interval_membership_examples() {
        let s = a2();
        let q = half_xy(s);
        let z = s.parse_object("z").unwrap();
        let wide = Interval::closed(Phase::ratio(1, 2), Phase::ratio(3, 2));
        assert_eq!(interval_membership(s, &q, &z, wide), Membership::Member);
        let point = Interval::closed(Phase::ratio(1, 2), Phase::ratio(1, 2));
        assert_eq!(interval_membership(s, &q, &z, point), Membership::NotMember);
        let x = s.parse_object("x + y").unwrap();
        assert_eq!(interval_membership(s, &q, &x, point), Membership::Member);
    }

    #[test]
    fn fast_path_agrees_with_tower_search_on_short_intervals() {
        let s = a2();
        for q in [half_xy(s), good(s)] {
            for (lo, hi, closed) in [(0, 1, false), (1, 3, true), (-1, 1, false), (1, 5, false)] {
                let i = Interval {
                    lo: Phase::ratio(lo, 4),
                    hi: Phase::ratio(hi, 4),
                    lo_closed: closed,
                    hi_closed: true,
                };
                for t in s.window_ids() {
                    let t = FormalObject::single(t);
                    let slow = tower_membership(s, &q, &t, i);
                    if let Membership::Inconclusive(_) = slow {
                        continue;
                    }
                    assert_eq!(additive_hull_membership(&q, &t, i), slow, "{} in {i}", s.object_label(&t));
                }
            }
        }
    }

    #[test]
    fn orthogonality_identity_on_half_xy() {
        let s = a2();
        let q = half_xy(s);
        let c = orthogonality_identity(s, &q, Phase::integer(0), Phase::ratio(1, 2), false).unwrap();
        assert!(c.holds(), "{:?}", c.discrepancies);
        let c = orthogonality_identity(s, &q, Phase::ratio(1, 2), Phase::ratio(1, 2), true).unwrap();
        assert!(c.holds(), "{:?}", c.discrepancies);
        // empty range: only the zero object
        let c = orthogonality_identity(s, &q, Phase::ratio(1, 5), Phase::ratio(2, 5), false).unwrap();
        assert!(c.holds(), "{:?}", c.discrepancies);
    }

    #[test]
    fn epsilon0_values() {
        let s = a2();
        let e = epsilon0(&half_xy(s)).unwrap();
        assert!((e - 0.5 * (1.0 - 2f64.powi(-20))).abs() < 1e-15 && e > 0.4999995 && e < 0.5);
        let e = epsilon0(&good(s)).unwrap();
        assert!((e - 0.25 * (1.0 - 2f64.powi(-20))).abs() < 1e-15);
        let one = CoSlicing::from_slices([(Phase::integer(1), vec![id(s, "x"), id(s, "y")])]).unwrap();
        assert_eq!(epsilon0(&one).unwrap(), epsilon0(&half_xy(s)).unwrap());
        assert!(epsilon0(&CoSlicing::new([]).unwrap()).is_err());
    }

    #[test]
    fn metric_examples() {
        let s = a2();
        let q = good(s);
        assert_eq!(metric(s, &q, &q), Distance::Exact(0.0));
        let delta = Phase::ratio(1, 10);
        let r = q.with_phase(id(s, "x").orbit, Phase::ratio(3, 4).add(&delta)).unwrap();
        match metric(s, &q, &r) {
            Distance::Exact(v) => assert!((v - 0.1).abs() < 1e-12),
            d => panic!("{d}"),
        }
        let t = q.translate(Phase::ratio(1, 5));
        assert!((metric(s, &q, &t).value().unwrap() - 0.2).abs() < 1e-12);
        // far apart: bound and refinement
        let far = q.translate(Phase::integer(1));
        match metric(s, &q, &far) {
            Distance::AtLeastHalf { upper, refined } => {
                assert!((upper - 1.0).abs() < 1e-12);
                assert!((refined.unwrap() - 1.0).abs() < 1e-12);
            }
            d => panic!("{d}"),
        }
    }

    #[test]
    fn induced_cotstructure_has_coheart_of_the_unit_interval() {
        let s = a2();
        for q in [half_xy(s), good(s)] {
            let p = induced_cotstructure(s, &q).unwrap();
            let r = check_cotstructure(s, &p);
            assert!(!r.any_fail(), "{r}");
            let want: BTreeSet<IndecId> = q.members().into_iter().collect();
            let got: BTreeSet<IndecId> = p.coheart_ids(s).into_iter().collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn file_round_trip() {
        let s = a2();
        let q = good(s);
        let text = q.to_toml(s);
        assert_eq!(CoSlicing::from_toml(s, &text).unwrap(), q);
        let bad = text.replace("1/4", "1.5.2");
        assert!(matches!(CoSlicing::from_toml(s, &bad), Err(Error::Parse(_))));
        let dec = format!("schema = \"{COSLICING_SCHEMA}\"\n[[slice]]\nphase = 0.25\nids = [\"y\"]\n[[slice]]\nphase = \"0.75\"\nids = [\"x\"]\n");
        assert_eq!(CoSlicing::from_toml(s, &dec).unwrap(), q);
    }
}
