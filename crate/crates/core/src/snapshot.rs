//! Windowed combinatorial presentation of the category: indecomposable ids,
//! suspension, Hom table, generating triangles and the K0 class map.

use crate::engine::{enumerate, Algebra, AlgebraPresentation, Complex, GradedMap, HomSpace};
use crate::error::{Error, Result};
use crate::field::{Field, FieldChoice, Fp, Rational};
use crate::realize::{EngineRealization, Realization};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

pub const SNAPSHOT_SCHEMA: &str = "costab-snapshot/1";

/// `Sigma^shift` of the representative of orbit `orbit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndecId {
    pub orbit: usize,
    pub shift: i32,
}

impl IndecId {
    pub fn new(orbit: usize, shift: i32) -> Self {
        IndecId { orbit, shift }
    }

    pub fn suspend(self, k: i32) -> Self {
        IndecId { orbit: self.orbit, shift: self.shift + k }
    }
}

/// Krull-Schmidt normal form: multiplicity of each indecomposable summand.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormalObject(BTreeMap<IndecId, u32>);

impl FormalObject {
    pub fn zero() -> Self {
        FormalObject(BTreeMap::new())
    }

    pub fn single(id: IndecId) -> Self {
        FormalObject(BTreeMap::from([(id, 1)]))
    }

    pub fn from_ids(ids: impl IntoIterator<Item = IndecId>) -> Self {
        let mut f = Self::zero();
        for id in ids {
            f.add_id(id, 1);
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_id(&mut self, id: IndecId, mult: u32) {
        if mult > 0 {
            *self.0.entry(id).or_insert(0) += mult;
        }
    }

    pub fn sum(&self, other: &FormalObject) -> FormalObject {
        let mut out = self.clone();
        for (&id, &m) in &other.0 {
            out.add_id(id, m);
        }
        out
    }

    pub fn sum_all<'a>(parts: impl IntoIterator<Item = &'a FormalObject>) -> FormalObject {
        parts.into_iter().fold(Self::zero(), |acc, p| acc.sum(p))
    }

    /// Multiset inclusion.
    pub fn contains(&self, other: &FormalObject) -> bool {
        other.0.iter().all(|(id, &m)| self.0.get(id).copied().unwrap_or(0) >= m)
    }

    /// `self - other`, if `other` is a summand.
    pub fn minus(&self, other: &FormalObject) -> Option<FormalObject> {
        if !self.contains(other) {
            return None;
        }
        let mut out = self.0.clone();
        for (id, &m) in &other.0 {
            let e = out.get_mut(id).unwrap();
            *e -= m;
            if *e == 0 {
                out.remove(id);
            }
        }
        Some(FormalObject(out))
    }

    pub fn suspend(&self, k: i32) -> FormalObject {
        FormalObject(self.0.iter().map(|(id, &m)| (id.suspend(k), m)).collect())
    }

    pub fn multiplicity(&self, id: IndecId) -> u32 {
        self.0.get(&id).copied().unwrap_or(0)
    }

    /// Distinct summands with multiplicities, in id order.
    pub fn iter(&self) -> impl Iterator<Item = (IndecId, u32)> + '_ {
        self.0.iter().map(|(&id, &m)| (id, m))
    }

    pub fn ids(&self) -> impl Iterator<Item = IndecId> + '_ {
        self.0.keys().copied()
    }

    /// Summands listed with repetition, in id order.
    pub fn summands(&self) -> Vec<IndecId> {
        self.0.iter().flat_map(|(&id, &m)| std::iter::repeat_n(id, m as usize)).collect()
    }

    pub fn count(&self) -> usize {
        self.0.values().map(|&m| m as usize).sum()
    }

    pub fn first(&self) -> Option<IndecId> {
        self.0.keys().next().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitInfo {
    pub label: String,
    pub shape: String,
    pub width: usize,
    /// K0 class of the representative (shift 0).
    pub class: Vec<i64>,
}

/// A generating triangle `a -> b -> c -> Sigma a`, the cone of a map `a -> b`
/// between indecomposables; `a` always has shift 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogTriangle {
    pub a: FormalObject,
    pub b: FormalObject,
    pub c: FormalObject,
    /// Coordinates of the map `a -> b` in the Hom basis.
    pub coeffs: Vec<i64>,
}

/// A generating triangle after rotation and suspension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleView {
    pub index: usize,
    /// `+1`: `(b, c, Sigma a)`; `-1`: `(Sigma^-1 c, a, b)`.
    pub rotation: i8,
    pub shift: i32,
    pub a: FormalObject,
    pub b: FormalObject,
    pub c: FormalObject,
}

#[derive(Debug, Clone, Copy)]
pub struct BuildConfig {
    pub width_bound: usize,
    pub window: (i32, i32),
    pub seed: u64,
    pub orbit_cap: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { width_bound: 2, window: (-2, 2), seed: 0, orbit_cap: enumerate::DEFAULT_ORBIT_CAP }
    }
}

#[derive(Clone)]
pub struct Snapshot {
    pub algebra: String,
    pub field: String,
    pub window: (i32, i32),
    pub width_bound: usize,
    pub orbits: Vec<OrbitInfo>,
    hom: Vec<u32>,
    pub catalog: Vec<CatalogTriangle>,
    /// Some cone had a summand wider than the width bound and was dropped.
    pub catalog_partial: bool,
    pub k0_basis: Vec<String>,
    pub warnings: Vec<String>,
    realization: Option<Arc<dyn Realization>>,
}

impl fmt::Debug for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Snapshot")
            .field("algebra", &self.algebra)
            .field("field", &self.field)
            .field("window", &self.window)
            .field("orbits", &self.orbits.iter().map(|o| &o.label).collect::<Vec<_>>())
            .field("triangles", &self.catalog.len())
            .field("realized", &self.realization.is_some())
            .finish()
    }
}

impl PartialEq for Snapshot {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra
            && self.field == other.field
            && self.window == other.window
            && self.width_bound == other.width_bound
            && self.orbits == other.orbits
            && self.hom == other.hom
            && self.catalog == other.catalog
            && self.catalog_partial == other.catalog_partial
            && self.k0_basis == other.k0_basis
    }
}

fn build_generic<F: Field>(pres: AlgebraPresentation, cfg: &BuildConfig) -> Result<Snapshot> {
    if cfg.window.0 > cfg.window.1 {
        return Err(Error::Precondition(format!("empty shift window {:?}", cfg.window)));
    }
    let alg = Algebra::<F>::new(pres)?;
    let en = enumerate::enumerate_indecomposables(&alg, cfg.width_bound, cfg.orbit_cap, cfg.seed)?;
    let nv = alg.num_vertices();
    let orbits: Vec<OrbitInfo> = en
        .orbits
        .iter()
        .map(|o| OrbitInfo {
            label: o.label.clone(),
            shape: o.shape.clone(),
            width: o.width(),
            class: o.complex.euler_vector(nv),
        })
        .collect();
    let mut snap = Snapshot {
        algebra: alg.presentation.name.clone(),
        field: F::name(),
        window: cfg.window,
        width_bound: cfg.width_bound,
        orbits,
        hom: Vec::new(),
        catalog: Vec::new(),
        catalog_partial: false,
        k0_basis: (0..nv).map(|v| format!("P{}", alg.vertex_label(v))).collect(),
        warnings: Vec::new(),
        realization: None,
    };

    let ids = snap.window_ids();
    let mut table = vec![0u32; ids.len() * ids.len()];
    let complexes: Vec<Complex<F>> = ids.iter().map(|id| en.orbits[id.orbit].at(id.shift)).collect();
    for (i, x) in complexes.iter().enumerate() {
        for (j, y) in complexes.iter().enumerate() {
            table[i * ids.len() + j] = HomSpace::new(&alg, x, y).dim() as u32;
        }
    }
    snap.hom = table;

    // generating triangles: a = (o1, 0), b = (o2, s)
    let span = cfg.window.1 - cfg.window.0;
    let mut seen = std::collections::HashSet::new();
    for o1 in 0..en.orbits.len() {
        for o2 in 0..en.orbits.len() {
            for s in -span..=span {
                let x = en.orbits[o1].at(0);
                let y = en.orbits[o2].at(s);
                let hom = HomSpace::new(&alg, &x, &y);
                if hom.dim() == 0 {
                    continue;
                }
                let mut choices: Vec<Vec<i64>> = (0..hom.dim())
                    .map(|k| (0..hom.dim()).map(|l| i64::from(l == k)).collect())
                    .collect();
                if hom.dim() > 1 {
                    choices.push(vec![1; hom.dim()]);
                }
                for coeffs in choices {
                    let f = map_from_int_coeffs(&hom, &coeffs, &x, &y);
                    let c = crate::engine::cone(&alg, &x, &y, &f);
                    let c = match en.identify(&alg, &c, cfg.seed) {
                        Ok(parts) => FormalObject::from_ids(parts.into_iter().map(|(o, sh)| IndecId::new(o, sh))),
                        Err(Error::UnknownIndecomposable(_)) => {
                            snap.catalog_partial = true;
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    let a = FormalObject::single(IndecId::new(o1, 0));
                    let b = FormalObject::single(IndecId::new(o2, s));
                    if seen.insert((a.clone(), b.clone(), c.clone())) {
                        snap.catalog.push(CatalogTriangle { a, b, c, coeffs });
                    }
                }
            }
        }
    }
    if snap.catalog_partial {
        snap.warnings.push("some cones have summands wider than the width bound; catalog is partial".into());
    }
    snap.realization = Some(Arc::new(EngineRealization::new(alg, en, cfg.seed)));
    Ok(snap)
}

pub(crate) fn map_from_int_coeffs<F: Field>(
    hom: &HomSpace<F>,
    coeffs: &[i64],
    x: &Complex<F>,
    y: &Complex<F>,
) -> GradedMap<F> {
    let c: Vec<F> = coeffs.iter().map(|&v| F::from_i64(v)).collect();
    hom.map_from_coords(&c, x, y)
}

impl Snapshot {
    /// Builds the snapshot from a presentation, enumerating orbits and filling
    /// the Hom table and triangle catalog with the homotopy engine.
    pub fn build(pres: AlgebraPresentation, cfg: &BuildConfig) -> Result<Snapshot> {
        match pres.field {
            FieldChoice::Rationals => build_generic::<Rational>(pres, cfg),
            FieldChoice::Prime => build_generic::<Fp>(pres, cfg),
        }
    }

    pub fn realization(&self) -> Result<&Arc<dyn Realization>> {
        self.realization
            .as_ref()
            .ok_or_else(|| Error::RealizationRequired("rebuild the snapshot from its algebra".into()))
    }

    pub fn has_realization(&self) -> bool {
        self.realization.is_some()
    }

    pub fn window_span(&self) -> i32 {
        self.window.1 - self.window.0
    }

    pub fn in_window(&self, id: IndecId) -> bool {
        id.orbit < self.orbits.len() && id.shift >= self.window.0 && id.shift <= self.window.1
    }

    pub fn object_in_window(&self, t: &FormalObject) -> bool {
        t.ids().all(|id| self.in_window(id))
    }

    /// All in-window ids, orbit-major.
    pub fn window_ids(&self) -> Vec<IndecId> {
        (0..self.orbits.len())
            .flat_map(|o| (self.window.0..=self.window.1).map(move |s| IndecId::new(o, s)))
            .collect()
    }

    fn index_of(&self, id: IndecId) -> usize {
        let per = (self.window_span() + 1) as usize;
        id.orbit * per + (id.shift - self.window.0) as usize
    }

    /// Degrees occupied by an indecomposable.
    pub fn support(&self, id: IndecId) -> (i32, i32) {
        let w = self.orbits[id.orbit].width as i32;
        (-(w - 1) - id.shift, -id.shift)
    }

    /// `dim Hom(a, b)`, using suspension equivariance outside the window.
    pub fn hom(&self, a: IndecId, b: IndecId) -> Result<u32> {
        if a.orbit >= self.orbits.len() || b.orbit >= self.orbits.len() {
            return Err(Error::UnknownIndecomposable(format!("orbit index {} or {}", a.orbit, b.orbit)));
        }
        let n = (self.window_span() + 1) as usize * self.orbits.len();
        if self.in_window(a) && self.in_window(b) {
            return Ok(self.hom[self.index_of(a) * n + self.index_of(b)]);
        }
        let delta = b.shift - a.shift;
        if delta.abs() <= self.window_span() {
            let base = if delta >= 0 { self.window.0 } else { self.window.0 - delta };
            let (a2, b2) = (IndecId::new(a.orbit, base), IndecId::new(b.orbit, base + delta));
            return Ok(self.hom[self.index_of(a2) * n + self.index_of(b2)]);
        }
        let (sa, sb) = (self.support(a), self.support(b));
        if sa.1 < sb.0 || sb.1 < sa.0 {
            return Ok(0);
        }
        Err(Error::WindowExhausted(format!(
            "Hom({}, {}) needs relative shift {delta} beyond window {:?}",
            self.id_label(a),
            self.id_label(b),
            self.window
        )))
    }

    /// Biadditive extension of `hom` to formal objects.
    pub fn hom_obj(&self, a: &FormalObject, b: &FormalObject) -> Result<u64> {
        let mut total = 0u64;
        for (x, m) in a.iter() {
            for (y, n) in b.iter() {
                total += u64::from(self.hom(x, y)?) * u64::from(m) * u64::from(n);
            }
        }
        Ok(total)
    }

    pub fn k0_rank(&self) -> usize {
        self.k0_basis.len()
    }

    pub fn class_of_id(&self, id: IndecId) -> Vec<i64> {
        let sign = if id.shift.rem_euclid(2) == 0 { 1 } else { -1 };
        self.orbits[id.orbit].class.iter().map(|&c| sign * c).collect()
    }

    /// Alternating sum of projective multiplicities.
    pub fn class(&self, t: &FormalObject) -> Vec<i64> {
        let mut v = vec![0i64; self.k0_rank()];
        for (id, m) in t.iter() {
            for (x, c) in v.iter_mut().zip(self.class_of_id(id)) {
                *x += c * i64::from(m);
            }
        }
        v
    }

    pub fn orbit_index(&self, label: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.label == label)
    }

    pub fn id_label(&self, id: IndecId) -> String {
        let base = self.orbits.get(id.orbit).map(|o| o.label.as_str()).unwrap_or("?");
        if id.shift == 0 {
            base.to_string()
        } else {
            format!("{base}[{}]", id.shift)
        }
    }

    /// Parses `x`, `x[2]` or `z[-1]`.
    pub fn parse_id(&self, text: &str) -> Result<IndecId> {
        let text = text.trim();
        let (label, shift) = match text.find('[') {
            Some(p) => {
                let inner = text[p + 1..]
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse(format!("id `{text}`: missing `]`")))?;
                let s: i32 = inner.trim().parse().map_err(|_| Error::Parse(format!("id `{text}`: bad shift")))?;
                (&text[..p], s)
            }
            None => (text, 0),
        };
        let orbit = self
            .orbit_index(label.trim())
            .ok_or_else(|| Error::UnknownIndecomposable(format!("no orbit labelled `{}`", label.trim())))?;
        Ok(IndecId::new(orbit, shift))
    }

    pub fn object_label(&self, t: &FormalObject) -> String {
        if t.is_zero() {
            return "0".into();
        }
        t.iter()
            .map(|(id, m)| if m == 1 { self.id_label(id) } else { format!("{m} {}", self.id_label(id)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses `x + 2 y[1]`; `0` is the zero object.
    pub fn parse_object(&self, text: &str) -> Result<FormalObject> {
        let text = text.trim();
        let mut out = FormalObject::zero();
        if text == "0" || text.is_empty() {
            return Ok(out);
        }
        for term in text.split('+') {
            let term = term.trim();
            let (mult, rest) = match term.split_once(char::is_whitespace) {
                Some((m, r)) if m.chars().all(|c| c.is_ascii_digit()) => {
                    (m.parse::<u32>().map_err(|_| Error::Parse(format!("bad multiplicity in `{term}`")))?, r)
                }
                _ => (1, term),
            };
            out.add_id(self.parse_id(rest)?, mult);
        }
        Ok(out)
    }

    /// Rotations and suspensions of catalog triangles whose middle term is a
    /// summand of `t`.
    pub fn triangles_into(&self, t: &FormalObject) -> Vec<TriangleView> {
        let mut out = Vec::new();
        for (index, tri) in self.catalog.iter().enumerate() {
            for rotation in [0i8, 1, -1] {
                let (a, b, c) = match rotation {
                    0 => (tri.a.clone(), tri.b.clone(), tri.c.clone()),
                    1 => (tri.b.clone(), tri.c.clone(), tri.a.suspend(1)),
                    _ => (tri.c.suspend(-1), tri.a.clone(), tri.b.clone()),
                };
                let Some(anchor) = b.first() else { continue };
                let mut shifts: Vec<i32> =
                    t.ids().filter(|id| id.orbit == anchor.orbit).map(|id| id.shift - anchor.shift).collect();
                shifts.dedup();
                for k in shifts {
                    let bk = b.suspend(k);
                    if t.contains(&bk) {
                        out.push(TriangleView { index, rotation, shift: k, a: a.suspend(k), b: bk, c: c.suspend(k) });
                    }
                }
            }
        }
        out
    }

    /// Checks Sigma-equivariance of the table and K0 additivity of triangles.
    pub fn validate(&self) -> Result<()> {
        let n = (self.window_span() + 1) as usize * self.orbits.len();
        if self.hom.len() != n * n {
            return Err(Error::Validation(format!("hom table has {} entries, expected {}", self.hom.len(), n * n)));
        }
        for a in self.window_ids() {
            for b in self.window_ids() {
                let (sa, sb) = (a.suspend(1), b.suspend(1));
                if self.in_window(sa) && self.in_window(sb) {
                    let h1 = self.hom[self.index_of(a) * n + self.index_of(b)];
                    let h2 = self.hom[self.index_of(sa) * n + self.index_of(sb)];
                    if h1 != h2 {
                        return Err(Error::Validation(format!(
                            "hom({}, {}) = {h1} but hom({}, {}) = {h2}",
                            self.id_label(a),
                            self.id_label(b),
                            self.id_label(sa),
                            self.id_label(sb)
                        )));
                    }
                }
            }
        }
        for (i, t) in self.catalog.iter().enumerate() {
            let (ca, cb, cc) = (self.class(&t.a), self.class(&t.b), self.class(&t.c));
            if ca.iter().zip(&cc).map(|(x, y)| x + y).collect::<Vec<_>>() != cb {
                return Err(Error::Validation(format!("triangle {i} violates K0 additivity")));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Snapshot> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        let ids = self.window_ids();
        let n = ids.len();
        let file = SnapshotFile {
            schema: SNAPSHOT_SCHEMA.into(),
            algebra: self.algebra.clone(),
            field: self.field.clone(),
            width_bound: self.width_bound,
            ids: IdsSection {
                window: [self.window.0, self.window.1],
                orbits: self.orbits.clone(),
                list: ids.iter().map(|&id| self.id_label(id)).collect(),
            },
            suspension: SuspensionSection { rule: "shift + 1".into() },
            hom: HomSection { rows: (0..n).map(|i| self.hom[i * n..(i + 1) * n].to_vec()).collect() },
            triangles: TrianglesSection {
                partial: self.catalog_partial,
                list: self
                    .catalog
                    .iter()
                    .map(|t| TriangleRecord {
                        a: self.object_label(&t.a),
                        b: self.object_label(&t.b),
                        c: self.object_label(&t.c),
                        coeffs: t.coeffs.clone(),
                    })
                    .collect(),
            },
            k0: K0Section { basis: self.k0_basis.clone() },
        };
        toml::to_string(&file).expect("snapshot serializes")
    }

    pub fn from_toml(text: &str) -> Result<Snapshot> {
        let file: SnapshotFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if file.schema != SNAPSHOT_SCHEMA {
            return Err(Error::Schema(format!("expected `{SNAPSHOT_SCHEMA}`, found `{}`", file.schema)));
        }
        let [lo, hi] = file.ids.window;
        if lo > hi {
            return Err(Error::Validation(format!("empty window [{lo}, {hi}]")));
        }
        let mut snap = Snapshot {
            algebra: file.algebra,
            field: file.field,
            window: (lo, hi),
            width_bound: file.width_bound,
            orbits: file.ids.orbits,
            hom: Vec::new(),
            catalog: Vec::new(),
            catalog_partial: file.triangles.partial,
            k0_basis: file.k0.basis,
            warnings: Vec::new(),
            realization: None,
        };
        if snap.orbits.iter().any(|o| o.class.len() != snap.k0_basis.len()) {
            return Err(Error::Validation("orbit class length differs from K0 rank".into()));
        }
        let ids = snap.window_ids();
        let listed: Vec<String> = ids.iter().map(|&id| snap.id_label(id)).collect();
        if listed != file.ids.list {
            return Err(Error::Validation("id list does not match orbits and window".into()));
        }
        if file.hom.rows.len() != ids.len() || file.hom.rows.iter().any(|r| r.len() != ids.len()) {
            return Err(Error::Validation(format!("hom table must be {0} x {0}", ids.len())));
        }
        snap.hom = file.hom.rows.concat();
        for t in &file.triangles.list {
            snap.catalog.push(CatalogTriangle {
                a: snap.parse_object(&t.a)?,
                b: snap.parse_object(&t.b)?,
                c: snap.parse_object(&t.c)?,
                coeffs: t.coeffs.clone(),
            });
        }
        snap.validate()?;
        snap.check_catalog_closure();
        Ok(snap)
    }

    /// A generating triangle must exist for every ordered pair of orbits and
    /// relative shift with nonzero Hom; a missing one marks the catalog partial.
    fn check_catalog_closure(&mut self) {
        let span = self.window_span();
        for o1 in 0..self.orbits.len() {
            for o2 in 0..self.orbits.len() {
                for s in -span..=span {
                    let (a, b) = (IndecId::new(o1, 0), IndecId::new(o2, s));
                    if self.hom(a, b).unwrap_or(0) == 0 {
                        continue;
                    }
                    let (fa, fb) = (FormalObject::single(a), FormalObject::single(b));
                    if !self.catalog.iter().any(|t| t.a == fa && t.b == fb) {
                        self.warnings.push(format!(
                            "no triangle for a map {} -> {}; catalog marked partial",
                            self.id_label(a),
                            self.id_label(b)
                        ));
                        self.catalog_partial = true;
                    }
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotFile {
    schema: String,
    algebra: String,
    field: String,
    width_bound: usize,
    ids: IdsSection,
    suspension: SuspensionSection,
    hom: HomSection,
    triangles: TrianglesSection,
    k0: K0Section,
}

#[derive(Serialize, Deserialize)]
struct IdsSection {
    window: [i32; 2],
    orbits: Vec<OrbitInfo>,
    list: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SuspensionSection {
    rule: String,
}

#[derive(Serialize, Deserialize)]
struct HomSection {
    rows: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct TrianglesSection {
    partial: bool,
    list: Vec<TriangleRecord>,
}

#[derive(Serialize, Deserialize)]
struct TriangleRecord {
    a: String,
    b: String,
    c: String,
    coeffs: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct K0Section {
    basis: Vec<String>,
}
