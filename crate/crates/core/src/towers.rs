//! Towers `0 = t_0 -> t_1 -> ... -> t_n = t` with triangles
//! `t_{j-1} -> t_j -> f_j`, their search over the triangle catalog, and the
//! refine / swap / coalesce / truncate operations.

use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::realize::TwistedTower;
use crate::snapshot::{FormalObject, IndecId, Snapshot};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

/// Why the triangle `t_{j-1} -> t_j -> f_j` exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `t_j = t_{j-1} + f_j`.
    Split,
    /// Catalog triangle `index`, rotated and suspended, plus an identity summand.
    Catalog { index: usize, rotation: i8, shift: i32, padding: FormalObject },
    /// Several consecutive steps merged into one.
    Composite(Vec<(FormalObject, Witness)>),
    /// Produced by an operation on the realized tower.
    Engine,
    /// Justified by Hom vanishing alone; no realization was available.
    Formal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub object: FormalObject,
    pub tag: Phase,
}

#[derive(Clone)]
pub struct Tower {
    pub total: FormalObject,
    pub factors: Vec<Factor>,
    pub witnesses: Vec<Witness>,
    /// `t_1, ..., t_n`; `None` where no realization pinned the object down.
    pub intermediates: Vec<Option<FormalObject>>,
    pub concrete: Option<Arc<dyn TwistedTower>>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tower")
            .field("total", &self.total)
            .field("factors", &self.factors)
            .field("witnesses", &self.witnesses)
            .field("realized", &self.concrete.is_some())
            .finish()
    }
}

/// `t_j -> t -> e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cofactor {
    pub position: usize,
    pub object: Option<FormalObject>,
    pub later_factors: Vec<FormalObject>,
}

fn hom_shifted(snap: &Snapshot, a: &FormalObject, b: &FormalObject) -> Result<u64> {
    snap.hom_obj(a, &b.suspend(1))
}

impl Tower {
    pub fn zero() -> Tower {
        Tower { total: FormalObject::zero(), factors: vec![], witnesses: vec![], intermediates: vec![], concrete: None }
    }

    /// Split tower with the given factors in order.
    pub fn split(snap: &Snapshot, factors: Vec<Factor>) -> Tower {
        let mut acc = FormalObject::zero();
        let mut intermediates = Vec::new();
        for f in &factors {
            acc = acc.sum(&f.object);
            intermediates.push(Some(acc.clone()));
        }
        let concrete = snap
            .realization()
            .ok()
            .and_then(|r| r.split_tower(&factors.iter().map(|f| f.object.clone()).collect::<Vec<_>>()).ok());
        Tower {
            total: acc,
            witnesses: vec![Witness::Split; factors.len()],
            factors,
            intermediates,
            concrete,
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn tags(&self) -> Vec<Phase> {
        self.factors.iter().map(|f| f.tag).collect()
    }

    pub fn factor_objects(&self) -> Vec<FormalObject> {
        self.factors.iter().map(|f| f.object.clone()).collect()
    }

    /// `t_j` for `0 <= j <= n`.
    pub fn intermediate(&self, j: usize) -> Option<FormalObject> {
        if j == 0 {
            Some(FormalObject::zero())
        } else {
            self.intermediates[j - 1].clone()
        }
    }

    pub fn strictly_ascending(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].tag.cmp_tol(&w[1].tag) == Ordering::Less)
    }

    /// Sum of the factor classes in K0.
    pub fn class_sum(&self, snap: &Snapshot) -> Vec<i64> {
        snap.class(&FormalObject::sum_all(self.factors.iter().map(|f| &f.object)))
    }

    fn flat_steps(&self) -> (Vec<(FormalObject, Witness)>, Vec<(usize, usize)>) {
        let mut steps = Vec::new();
        let mut groups = Vec::new();
        for (f, w) in self.factors.iter().zip(&self.witnesses) {
            match w {
                Witness::Composite(parts) => {
                    groups.push((steps.len(), parts.len()));
                    steps.extend(parts.iter().cloned());
                }
                other => steps.push((f.object.clone(), other.clone())),
            }
        }
        (steps, groups)
    }

    /// Builds the twisted complex and fills in every intermediate object.
    pub fn realize(&mut self, snap: &Snapshot) -> Result<()> {
        if self.concrete.is_none() {
            let real = snap.realization()?;
            let (steps, groups) = self.flat_steps();
            if steps.iter().any(|(_, w)| matches!(w, Witness::Engine | Witness::Formal)) {
                return Err(Error::Precondition("tower has steps without a constructive witness".into()));
            }
            let mut tw = real.realize(snap, &steps)?;
            for &(start, len) in groups.iter().rev() {
                for _ in 1..len {
                    tw = tw.coalesce(start)?;
                }
            }
            self.concrete = Some(tw);
        }
        let tw = self.concrete.as_ref().unwrap().clone();
        for m in 1..=self.len() {
            let found = tw.intermediate(m)?;
            if let Some(known) = &self.intermediates[m - 1] {
                if *known != found {
                    return Err(Error::Internal(format!(
                        "realized t_{m} is {} but the formal tower claims {}",
                        snap.object_label(&found),
                        snap.object_label(known)
                    )));
                }
            }
            self.intermediates[m - 1] = Some(found);
        }
        Ok(())
    }

    /// Structural invariants: K0 additivity, endpoints and `D o D = 0`.
    pub fn check(&self, snap: &Snapshot) -> Result<()> {
        if self.class_sum(snap) != snap.class(&self.total) {
            return Err(Error::Validation("factor classes do not sum to the class of the total".into()));
        }
        if let Some(Some(last)) = self.intermediates.last() {
            if *last != self.total {
                return Err(Error::Validation("last intermediate differs from the total".into()));
            }
        }
        if let Some(tw) = &self.concrete {
            tw.check()?;
            if tw.len() != self.len() {
                return Err(Error::Internal("realized tower has a different length".into()));
            }
            for (j, f) in self.factors.iter().enumerate() {
                if tw.factor(j) != f.object {
                    return Err(Error::Internal(format!("realized factor {} differs", j + 1)));
                }
            }
        }
        Ok(())
    }

    fn refresh_intermediates(&mut self) -> Result<()> {
        if let Some(tw) = &self.concrete {
            for m in 1..=self.len() {
                self.intermediates[m - 1] = Some(tw.intermediate(m)?);
            }
        }
        Ok(())
    }

    /// Replaces factor `j = c1 + rest` by `rest, c1`, with `c1` its smallest summand.
    pub fn split_factor(&self, j: usize) -> Result<Tower> {
        let f = self.factors.get(j).ok_or_else(|| Error::Precondition(format!("no factor {}", j + 1)))?;
        if f.object.count() < 2 {
            return Err(Error::Precondition(format!("factor {} is already indecomposable", j + 1)));
        }
        let c1 = FormalObject::single(f.object.first().unwrap());
        let rest = f.object.minus(&c1).unwrap();
        let mut out = self.clone();
        out.factors.splice(j..=j, [Factor { object: rest.clone(), tag: f.tag }, Factor { object: c1, tag: f.tag }]);
        let (w, mid) = match (&self.concrete, &self.witnesses[j]) {
            (Some(_), _) => ((Witness::Engine, Witness::Engine), None),
            (None, Witness::Split) => ((Witness::Split, Witness::Split), self.intermediate(j).map(|t| t.sum(&rest))),
            (None, _) => ((Witness::Formal, Witness::Formal), None),
        };
        out.witnesses.splice(j..=j, [w.0, w.1]);
        out.intermediates.insert(j, mid);
        if let Some(tw) = &self.concrete {
            out.concrete = Some(tw.split(j)?);
            out.refresh_intermediates()?;
        }
        Ok(out)
    }

    /// Splits until every factor is indecomposable.
    pub fn refine(&self) -> Result<Tower> {
        let mut t = self.clone();
        let mut j = 0;
        while j < t.len() {
            if t.factors[j].object.count() > 1 {
                t = t.split_factor(j)?;
            } else {
                j += 1;
            }
        }
        Ok(t)
    }

    fn check_exchange(&self, snap: &Snapshot, j: usize) -> Result<()> {
        if j + 1 >= self.len() {
            return Err(Error::Precondition(format!("no factor after position {}", j + 1)));
        }
        let (a, b) = (&self.factors[j].object, &self.factors[j + 1].object);
        let h = hom_shifted(snap, b, a)?;
        if h != 0 {
            return Err(Error::Precondition(format!(
                "Hom({}, Sigma {}) has dimension {h}",
                snap.object_label(b),
                snap.object_label(a)
            )));
        }
        Ok(())
    }

    /// Exchanges factors `j` and `j + 1`; needs `Hom(f_{j+1}, Sigma f_j) = 0`.
    pub fn swap_adjacent(&self, snap: &Snapshot, j: usize) -> Result<Tower> {
        self.check_exchange(snap, j)?;
        let mut out = self.clone();
        out.factors.swap(j, j + 1);
        let both_split = self.witnesses[j] == Witness::Split && self.witnesses[j + 1] == Witness::Split;
        if let Some(tw) = &self.concrete {
            out.concrete = Some(tw.swap(j)?);
            out.witnesses[j] = Witness::Engine;
            out.witnesses[j + 1] = Witness::Engine;
            out.refresh_intermediates()?;
        } else if both_split {
            out.intermediates[j] = self.intermediate(j).map(|t| t.sum(&out.factors[j].object));
        } else {
            out.witnesses[j] = Witness::Formal;
            out.witnesses[j + 1] = Witness::Formal;
            out.intermediates[j] = None;
        }
        Ok(out)
    }

    /// Merges factors `j` and `j + 1` into their direct sum (tag of factor `j`).
    pub fn coalesce(&self, snap: &Snapshot, j: usize) -> Result<Tower> {
        self.check_exchange(snap, j)?;
        let mut out = self.clone();
        let merged = self.factors[j].object.sum(&self.factors[j + 1].object);
        out.factors.splice(j..=j + 1, [Factor { object: merged, tag: self.factors[j].tag }]);
        out.intermediates.remove(j);
        let w = if self.concrete.is_some() {
            Witness::Engine
        } else {
            let mut parts = Vec::new();
            for k in [j, j + 1] {
                match &self.witnesses[k] {
                    Witness::Composite(p) => parts.extend(p.iter().cloned()),
                    w => parts.push((self.factors[k].object.clone(), w.clone())),
                }
            }
            if parts.iter().all(|(_, w)| *w == Witness::Split) {
                Witness::Split
            } else {
                Witness::Composite(parts)
            }
        };
        out.witnesses.splice(j..=j + 1, [w]);
        if let Some(tw) = &self.concrete {
            out.concrete = Some(tw.coalesce(j)?);
            out.refresh_intermediates()?;
        }
        Ok(out)
    }

    /// Coalesces every run of neighbours with equal tags.
    pub fn coalesce_equal_tags(&self, snap: &Snapshot) -> Result<Tower> {
        let mut t = self.clone();
        let mut j = 0;
        while j + 1 < t.len() {
            if t.factors[j].tag.cmp_tol(&t.factors[j + 1].tag) == Ordering::Equal {
                t = t.coalesce(snap, j)?;
            } else {
                j += 1;
            }
        }
        Ok(t)
    }

    /// Bubble sort of the factors by tag through legal swaps.
    pub fn sort_by_tag(&self, snap: &Snapshot) -> Result<(Tower, usize)> {
        let mut t = self.clone();
        let mut swaps = 0;
        loop {
            let mut changed = false;
            for j in 0..t.len().saturating_sub(1) {
                if t.factors[j].tag.cmp_tol(&t.factors[j + 1].tag) == Ordering::Greater {
                    t = t.swap_adjacent(snap, j)?;
                    swaps += 1;
                    changed = true;
                }
            }
            if !changed {
                return Ok((t, swaps));
            }
        }
    }

    /// `e_j` with `t_j -> t -> e_j`; lies in the extension closure of the later factors.
    pub fn truncate(&self, j: usize) -> Result<Cofactor> {
        if j > self.len() {
            return Err(Error::Precondition(format!("position {j} beyond tower length {}", self.len())));
        }
        let later: Vec<FormalObject> = self.factors[j..].iter().map(|f| f.object.clone()).collect();
        let object = if j == self.len() {
            Some(FormalObject::zero())
        } else if j == 0 {
            Some(self.total.clone())
        } else if let Some(tw) = &self.concrete {
            Some(tw.cofactor(j)?)
        } else if self.witnesses[j..].iter().all(|w| *w == Witness::Split) {
            Some(FormalObject::sum_all(&later))
        } else {
            None
        };
        Ok(Cofactor { position: j, object, later_factors: later })
    }
}

/// Result of a bounded tower search.
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(Tower),
    /// The whole (finite) search space was explored.
    DefinitelyNone,
    /// Some branch hit the depth or size bound.
    DepthExhausted { depth: usize },
    /// Some branch needed an object outside the window.
    WindowLimited,
}

impl SearchOutcome {
    pub fn tower(&self) -> Option<&Tower> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn is_definitely_none(&self) -> bool {
        matches!(self, SearchOutcome::DefinitelyNone)
    }
}

/// Which factors a tower may use, and with which tags.
pub struct TowerQuery<'a> {
    pub tag: &'a dyn Fn(IndecId) -> Option<Phase>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    /// Cap on the number of summands of intermediate states.
    pub max_size: Option<usize>,
}

impl<'a> TowerQuery<'a> {
    pub fn new(tag: &'a dyn Fn(IndecId) -> Option<Phase>) -> Self {
        TowerQuery { tag, depth: None, seed: None, max_size: None }
    }
}

struct Step {
    factor: FormalObject,
    tag: Phase,
    witness: Witness,
    /// `t_j`, the object this step ends at.
    upper: FormalObject,
}

struct Search<'a, 'q> {
    snap: &'a Snapshot,
    q: &'a TowerQuery<'q>,
    rng: Option<ChaCha8Rng>,
    failed: HashMap<(FormalObject, String), usize>,
    on_path: HashSet<(FormalObject, String)>,
    depth_cut: bool,
    window_cut: bool,
    max_size: usize,
}

fn tag_key(t: &Option<(Phase, FormalObject)>) -> String {
    match t {
        None => "top".into(),
        Some((p, f)) => format!("{:.12}|{:?}", p.value(), f),
    }
}

impl Search<'_, '_> {
    fn uniform_tag(&self, c: &FormalObject) -> Option<Phase> {
        let mut tag: Option<Phase> = None;
        for id in c.ids() {
            let t = (self.q.tag)(id)?;
            match tag {
                None => tag = Some(t),
                Some(p) if p.cmp_tol(&t) == Ordering::Equal => {}
                Some(_) => return None,
            }
        }
        tag
    }

    /// Whether `c` with tag `tag` may sit directly below `top`.
    fn fits_below(&mut self, c: &FormalObject, tag: Phase, top: &Option<(Phase, FormalObject)>) -> bool {
        match top {
            None => true,
            Some((p, above)) => match tag.cmp_tol(p) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => match hom_shifted(self.snap, above, c) {
                    Ok(h) => h == 0,
                    Err(_) => {
                        self.window_cut = true;
                        false
                    }
                },
            },
        }
    }

    /// All summands allowed: one split factor per tag, ascending.
    fn split_all(&mut self, t: &FormalObject, top: &Option<(Phase, FormalObject)>) -> Option<Vec<Step>> {
        let mut groups: Vec<(Phase, FormalObject)> = Vec::new();
        for (id, m) in t.iter() {
            let tag = (self.q.tag)(id)?;
            match groups.iter_mut().find(|(p, _)| p.cmp_tol(&tag) == Ordering::Equal) {
                Some((_, f)) => f.add_id(id, m),
                None => {
                    let mut f = FormalObject::zero();
                    f.add_id(id, m);
                    groups.push((tag, f));
                }
            }
        }
        groups.sort_by(|a, b| a.0.cmp_tol(&b.0));
        // groups of one tag must also be free of self-extensions
        for (_, f) in &groups {
            match hom_shifted(self.snap, f, f) {
                Ok(0) => {}
                Ok(_) => return None,
                Err(_) => {
                    self.window_cut = true;
                    return None;
                }
            }
        }
        let (tag, f) = groups.last()?.clone();
        if !self.fits_below(&f, tag, top) {
            return None;
        }
        let mut acc = FormalObject::zero();
        Some(
            groups
                .into_iter()
                .map(|(tag, factor)| {
                    acc = acc.sum(&factor);
                    Step { factor, tag, witness: Witness::Split, upper: acc.clone() }
                })
                .collect(),
        )
    }

    fn run(&mut self, t: &FormalObject, top: &Option<(Phase, FormalObject)>, depth: usize) -> Option<Vec<Step>> {
        if t.is_zero() {
            return Some(Vec::new());
        }
        if let Some(steps) = self.split_all(t, top) {
            return Some(steps);
        }
        if !self.snap.object_in_window(t) {
            self.window_cut = true;
            return None;
        }
        if depth == 0 || t.count() > self.max_size {
            self.depth_cut = true;
            return None;
        }
        let key = (t.clone(), tag_key(top));
        if self.failed.get(&key).is_some_and(|&d| d >= depth) || self.on_path.contains(&key) {
            return None;
        }
        self.on_path.insert(key.clone());

        // candidate top factors: (factor, tag, next state, witness)
        let mut moves: Vec<(FormalObject, Phase, FormalObject, Witness)> = Vec::new();
        for id in t.ids() {
            if let Some(tag) = (self.q.tag)(id) {
                let c = FormalObject::single(id);
                moves.push((c.clone(), tag, t.minus(&c).unwrap(), Witness::Split));
            }
        }
        for v in self.snap.triangles_into(t) {
            if v.c.is_zero() {
                continue;
            }
            let Some(tag) = self.uniform_tag(&v.c) else { continue };
            let padding = t.minus(&v.b).unwrap();
            let next = v.a.sum(&padding);
            moves.push((
                v.c.clone(),
                tag,
                next,
                Witness::Catalog { index: v.index, rotation: v.rotation, shift: v.shift, padding },
            ));
        }
        moves.sort_by(|a, b| b.1.cmp_tol(&a.1).then_with(|| a.2.count().cmp(&b.2.count())));
        if let Some(rng) = self.rng.as_mut() {
            moves.shuffle(rng);
        }
        let mut result = None;
        for (c, tag, next, witness) in moves {
            if !self.fits_below(&c, tag, top) {
                continue;
            }
            let new_top = Some((tag, c.clone()));
            if let Some(mut steps) = self.run(&next, &new_top, depth - 1) {
                steps.push(Step { factor: c, tag, witness, upper: t.clone() });
                result = Some(steps);
                break;
            }
        }
        self.on_path.remove(&key);
        if result.is_none() {
            let e = self.failed.entry(key).or_insert(0);
            *e = (*e).max(depth);
        }
        result
    }
}

/// Searches the catalog for a tower of `t` whose factors are allowed with a
/// uniform tag each; tags ascend strictly after equal neighbours are merged.
pub fn find_tower(snap: &Snapshot, t: &FormalObject, q: &TowerQuery) -> SearchOutcome {
    let depth = q.depth.unwrap_or(t.count() + snap.window_span() as usize + 1);
    let mut s = Search {
        snap,
        q,
        rng: q.seed.map(ChaCha8Rng::seed_from_u64),
        failed: HashMap::new(),
        on_path: HashSet::new(),
        depth_cut: false,
        window_cut: false,
        max_size: q.max_size.unwrap_or(2 * t.count() + 2),
    };
    match s.run(t, &None, depth) {
        Some(steps) => {
            let mut tower = Tower::zero();
            tower.total = t.clone();
            for st in steps {
                tower.factors.push(Factor { object: st.factor, tag: st.tag });
                tower.witnesses.push(st.witness);
                tower.intermediates.push(Some(st.upper));
            }
            let tower = match tower.coalesce_equal_tags(snap) {
                Ok(t) => t,
                Err(_) => tower,
            };
            SearchOutcome::Found(tower)
        }
        None if s.window_cut => SearchOutcome::WindowLimited,
        None if s.depth_cut => SearchOutcome::DepthExhausted { depth },
        None => SearchOutcome::DefinitelyNone,
    }
}

/// Realizes a found tower when the snapshot can, so every intermediate is known.
pub fn realize_if_possible(snap: &Snapshot, tower: &mut Tower) -> Result<bool> {
    if !snap.has_realization() {
        return Ok(false);
    }
    tower.realize(snap)?;
    Ok(true)
}
