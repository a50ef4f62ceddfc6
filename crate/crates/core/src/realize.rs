//! Concrete realization of formal towers as twisted complexes.
//!
//! A tower with factors `F_1, ..., F_n` is a complex on `F_1 + ... + F_n`
//! whose differential is block lower triangular: the diagonal blocks are the
//! differentials of the factors and the block `H_jk: F_j -> F_k` (`k < j`) has
//! degree one. The first `m` factors span the subcomplex `t_m`.

use crate::engine::{cone, complex::cone_maps, Algebra, Complex, Enumeration, GradedMap, HomSpace, PMat};
use crate::engine::hom::{differential_matrix, find_iso, MapSpace};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::snapshot::{map_from_int_coeffs, FormalObject, IndecId, Snapshot};
use crate::towers::Witness;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Access to the concrete category behind a snapshot.
pub trait Realization: Send + Sync {
    fn describe(&self) -> String;

    /// `dim Hom` computed directly from complexes.
    fn hom_dim(&self, a: &FormalObject, b: &FormalObject) -> usize;

    /// Builds the twisted complex of a formal tower from its step witnesses.
    fn realize(&self, snap: &Snapshot, steps: &[(FormalObject, Witness)]) -> Result<Arc<dyn TwistedTower>>;

    /// A tower of one split factor per summand group, in the given order.
    fn split_tower(&self, factors: &[FormalObject]) -> Result<Arc<dyn TwistedTower>>;
}

/// A realized tower; all operations return new towers.
pub trait TwistedTower: Send + Sync + fmt::Debug {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn factor(&self, j: usize) -> FormalObject;
    /// Whether the connecting block from factor `j` to factor `k < j` vanishes.
    fn block_is_zero(&self, j: usize, k: usize) -> bool;
    /// `t_m`, the subcomplex on the first `m` factors.
    fn intermediate(&self, m: usize) -> Result<FormalObject>;
    /// `e_m`, the quotient by `t_m`.
    fn cofactor(&self, m: usize) -> Result<FormalObject>;
    /// `D o D = 0`.
    fn check(&self) -> Result<()>;
    /// Exchanges factors `j` and `j + 1` after gauging their block to zero.
    fn swap(&self, j: usize) -> Result<Arc<dyn TwistedTower>>;
    /// Merges factors `j` and `j + 1` into their direct sum.
    fn coalesce(&self, j: usize) -> Result<Arc<dyn TwistedTower>>;
    /// Replaces factor `j = c1 + rest` (`c1` its smallest summand) by `rest, c1`.
    fn split(&self, j: usize) -> Result<Arc<dyn TwistedTower>>;
}

struct Ctx<F: Field> {
    alg: Algebra<F>,
    en: Enumeration<F>,
    seed: u64,
}

impl<F: Field> Ctx<F> {
    fn rep(&self, id: IndecId) -> Complex<F> {
        self.en.orbits[id.orbit].at(id.shift)
    }

    fn identify(&self, c: &Complex<F>) -> Result<FormalObject> {
        let parts = self.en.identify(&self.alg, c, self.seed)?;
        Ok(FormalObject::from_ids(parts.into_iter().map(|(o, s)| IndecId::new(o, s))))
    }

    fn iso(&self, x: &Complex<F>, y: &Complex<F>, what: &str) -> Result<GradedMap<F>> {
        if x == y {
            return Ok(GradedMap::identity(&self.alg, x));
        }
        find_iso(&self.alg, x, y, self.seed)
            .map(|w| w.forward)
            .ok_or_else(|| Error::Internal(format!("no isomorphism found for {what}")))
    }
}

pub struct EngineRealization<F: Field> {
    ctx: Arc<Ctx<F>>,
}

impl<F: Field> EngineRealization<F> {
    pub fn new(alg: Algebra<F>, en: Enumeration<F>, seed: u64) -> Self {
        EngineRealization { ctx: Arc::new(Ctx { alg, en, seed }) }
    }

    fn standard(&self, t: &FormalObject) -> Complex<F> {
        Complex::direct_sum_all(&t.summands().into_iter().map(|id| self.ctx.rep(id)).collect::<Vec<_>>())
    }
}

/// Sizes of the consecutive parts of a direct sum in degree `i`.
fn part_ranges<F: Field>(parts: &[Complex<F>], i: i32) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::with_capacity(parts.len());
    let mut start = 0;
    for p in parts {
        let n = p.term(i).len();
        out.push(start..start + n);
        start += n;
    }
    out
}

/// Restriction of `g: X -> Y` to the given row/column ranges in every degree.
fn restrict<F: Field>(
    g: &GradedMap<F>,
    rows: impl Fn(i32) -> std::ops::Range<usize>,
    cols: impl Fn(i32) -> std::ops::Range<usize>,
) -> GradedMap<F> {
    let mut out = GradedMap::zero(g.degree);
    for i in g.degrees().collect::<Vec<_>>() {
        let m = g.comp_ref(i).unwrap();
        let r: Vec<usize> = rows(i).collect();
        let c: Vec<usize> = cols(i + g.degree).collect();
        out.set(i, m.select(&r, &c));
    }
    out
}

/// Block matrix of graded maps of a common degree between direct sums.
fn assemble_map<F: Field>(
    src: &[Complex<F>],
    tgt: &[Complex<F>],
    degree: i32,
    block: impl Fn(usize, usize) -> Option<GradedMap<F>>,
) -> GradedMap<F> {
    let mut out = GradedMap::zero(degree);
    let lo = src.iter().filter(|c| !c.is_zero()).map(|c| c.lo()).min();
    let hi = src.iter().filter(|c| !c.is_zero()).map(|c| c.hi()).max();
    let (Some(lo), Some(hi)) = (lo, hi) else { return out };
    let blocks: Vec<Vec<Option<GradedMap<F>>>> =
        (0..src.len()).map(|j| (0..tgt.len()).map(|k| block(j, k)).collect()).collect();
    for i in lo..=hi {
        let sp: Vec<Vec<usize>> = src.iter().map(|c| c.term(i).to_vec()).collect();
        let tp: Vec<Vec<usize>> = tgt.iter().map(|c| c.term(i + degree).to_vec()).collect();
        let mats: Vec<Vec<Option<PMat<F>>>> = (0..src.len())
            .map(|j| {
                (0..tgt.len())
                    .map(|k| blocks[j][k].as_ref().and_then(|g| g.comp_ref(i).cloned()))
                    .collect()
            })
            .collect();
        let refs: Vec<Vec<Option<&PMat<F>>>> = mats.iter().map(|r| r.iter().map(|m| m.as_ref()).collect()).collect();
        out.set(i, PMat::blocks(&sp, &tp, &refs));
    }
    out
}

#[derive(Clone)]
struct Twisted<F: Field> {
    ctx: Arc<Ctx<F>>,
    /// Summand ids and their complexes, per factor.
    atoms: Vec<Vec<(IndecId, Complex<F>)>>,
    blocks: Vec<Complex<F>>,
    h: BTreeMap<(usize, usize), GradedMap<F>>,
}

impl<F: Field> fmt::Debug for Twisted<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<Vec<IndecId>> = self.atoms.iter().map(|a| a.iter().map(|(id, _)| *id).collect()).collect();
        f.debug_struct("TwistedTower").field("factors", &factors).field("blocks", &self.h.len()).finish()
    }
}

impl<F: Field> Twisted<F> {
    fn new(ctx: Arc<Ctx<F>>) -> Self {
        Twisted { ctx, atoms: Vec::new(), blocks: Vec::new(), h: BTreeMap::new() }
    }

    fn push_factor(&mut self, atoms: Vec<(IndecId, Complex<F>)>) {
        let parts: Vec<Complex<F>> = atoms.iter().map(|(_, c)| c.clone()).collect();
        self.blocks.push(Complex::direct_sum_all(&parts));
        self.atoms.push(atoms);
    }

    fn assemble(&self, range: std::ops::Range<usize>) -> Result<Complex<F>> {
        let parts = &self.blocks[range.clone()];
        let nonzero: Vec<&Complex<F>> = parts.iter().filter(|c| !c.is_zero()).collect();
        if nonzero.is_empty() {
            return Ok(Complex::zero());
        }
        let lo = nonzero.iter().map(|c| c.lo()).min().unwrap();
        let hi = nonzero.iter().map(|c| c.hi()).max().unwrap();
        let terms: Vec<Vec<usize>> = (lo..=hi).map(|i| parts.iter().flat_map(|c| c.term(i).to_vec()).collect()).collect();
        let mut diffs = Vec::new();
        for i in lo..hi {
            let sp: Vec<Vec<usize>> = parts.iter().map(|c| c.term(i).to_vec()).collect();
            let tp: Vec<Vec<usize>> = parts.iter().map(|c| c.term(i + 1).to_vec()).collect();
            let mats: Vec<Vec<Option<PMat<F>>>> = (0..parts.len())
                .map(|a| {
                    (0..parts.len())
                        .map(|b| {
                            let (j, k) = (range.start + a, range.start + b);
                            if j == k {
                                Some(parts[a].diff(i))
                            } else if k < j {
                                self.h.get(&(j, k)).and_then(|g| g.comp_ref(i).cloned())
                            } else {
                                None
                            }
                        })
                        .collect()
                })
                .collect();
            let refs: Vec<Vec<Option<&PMat<F>>>> =
                mats.iter().map(|r| r.iter().map(|m| m.as_ref()).collect()).collect();
            diffs.push(PMat::blocks(&sp, &tp, &refs));
        }
        Complex::new(lo, terms, diffs)
    }

    /// Splits a degree one map `F -> T_m` into blocks on the first `m` factors.
    fn set_connecting(&mut self, j: usize, map: &GradedMap<F>) {
        let parts = &self.blocks[..j];
        for k in 0..j {
            let block = restrict(
                map,
                |i| 0..self.blocks[j].term(i).len(),
                |i| part_ranges(parts, i)[k].clone(),
            );
            if !block.is_zero() {
                self.h.insert((j, k), block);
            }
        }
    }

    /// `K: F_{j+1} -> F_j` with `d K - K d = -H`, or an error when `H` is not
    /// nullhomotopic.
    fn gauge(&self, j: usize) -> Result<Option<GradedMap<F>>> {
        let Some(hmap) = self.h.get(&(j + 1, j)) else { return Ok(None) };
        let (fb, fa) = (&self.blocks[j + 1], &self.blocks[j]);
        let alg = &self.ctx.alg;
        let src = MapSpace::new(alg, fb, fa, 0);
        let tgt = MapSpace::new(alg, fb, fa, 1);
        let m = differential_matrix(alg, fb, fa, &src, &tgt);
        let rhs = tgt.to_vector(&hmap.scale(-F::one()));
        let sol = m.solve(&rhs)?.ok_or_else(|| {
            Error::Precondition(format!("connecting map between factors {} and {} is not nullhomotopic", j + 1, j + 2))
        })?;
        Ok(Some(src.from_vector(&sol, fb, fa)))
    }

    /// Conjugates `D` by `1 + K` so that the block `(j+1, j)` vanishes.
    fn gauged(&self, j: usize) -> Result<Twisted<F>> {
        let mut out = self.clone();
        let Some(k) = self.gauge(j)? else { return Ok(out) };
        let alg = &self.ctx.alg;
        out.h.remove(&(j + 1, j));
        for kk in 0..j {
            if let Some(hjk) = self.h.get(&(j, kk)) {
                let cur = out.h.remove(&(j + 1, kk)).unwrap_or_else(|| GradedMap::zero(1));
                let new = cur.sub(&k.then(alg, hjk));
                if !new.is_zero() {
                    out.h.insert((j + 1, kk), new);
                }
            }
        }
        for m in j + 2..self.blocks.len() {
            if let Some(hmj1) = self.h.get(&(m, j + 1)) {
                let cur = out.h.remove(&(m, j)).unwrap_or_else(|| GradedMap::zero(1));
                let new = cur.add(&hmj1.then(alg, &k));
                if !new.is_zero() {
                    out.h.insert((m, j), new);
                }
            }
        }
        out.verify()?;
        Ok(out)
    }

    fn verify(&self) -> Result<()> {
        self.assemble(0..self.blocks.len())?
            .check(&self.ctx.alg)
            .map_err(|e| Error::Internal(format!("twisted differential: {e}")))
    }

    fn reindex(&self, perm: impl Fn(usize) -> usize) -> BTreeMap<(usize, usize), GradedMap<F>> {
        self.h.iter().map(|(&(a, b), g)| ((perm(a), perm(b)), g.clone())).collect()
    }
}

impl<F: Field> TwistedTower for Twisted<F> {
    fn len(&self) -> usize {
        self.blocks.len()
    }

    fn factor(&self, j: usize) -> FormalObject {
        FormalObject::from_ids(self.atoms[j].iter().map(|(id, _)| *id))
    }

    fn block_is_zero(&self, j: usize, k: usize) -> bool {
        !self.h.contains_key(&(j, k))
    }

    fn intermediate(&self, m: usize) -> Result<FormalObject> {
        self.ctx.identify(&self.assemble(0..m)?)
    }

    fn cofactor(&self, m: usize) -> Result<FormalObject> {
        self.ctx.identify(&self.assemble(m..self.blocks.len())?)
    }

    fn check(&self) -> Result<()> {
        self.verify()
    }

    fn swap(&self, j: usize) -> Result<Arc<dyn TwistedTower>> {
        if j + 1 >= self.len() {
            return Err(Error::Precondition(format!("no factor after position {}", j + 1)));
        }
        let g = self.gauged(j)?;
        let perm = |a: usize| if a == j { j + 1 } else if a == j + 1 { j } else { a };
        let mut out = g.clone();
        out.h = g.reindex(perm);
        out.atoms.swap(j, j + 1);
        out.blocks.swap(j, j + 1);
        out.verify()?;
        Ok(Arc::new(out))
    }

    fn coalesce(&self, j: usize) -> Result<Arc<dyn TwistedTower>> {
        if j + 1 >= self.len() {
            return Err(Error::Precondition(format!("no factor after position {}", j + 1)));
        }
        let g = self.gauged(j)?;
        let n = g.blocks.len();
        let mut out = Twisted::new(g.ctx.clone());
        for idx in 0..n {
            if idx == j + 1 {
                continue;
            }
            let mut atoms = g.atoms[idx].clone();
            if idx == j {
                atoms.extend(g.atoms[j + 1].iter().cloned());
            }
            out.push_factor(atoms);
        }
        let pair = [g.blocks[j].clone(), g.blocks[j + 1].clone()];
        let new_index = |a: usize| if a > j + 1 { a - 1 } else { a.min(j) };
        for (&(a, b), map) in &g.h {
            let (na, nb) = (new_index(a), new_index(b));
            if na == j || nb == j {
                continue;
            }
            out.h.insert((na, nb), map.clone());
        }
        // rows out of the merged factor
        for k in 0..j {
            let merged = assemble_map(&pair, std::slice::from_ref(&g.blocks[k]), 1, |r, _| g.h.get(&(j + r, k)).cloned());
            if !merged.is_zero() {
                out.h.insert((j, k), merged);
            }
        }
        // columns into the merged factor
        for m in j + 2..n {
            let merged = assemble_map(std::slice::from_ref(&g.blocks[m]), &pair, 1, |_, c| g.h.get(&(m, j + c)).cloned());
            if !merged.is_zero() {
                out.h.insert((m - 1, j), merged);
            }
        }
        out.verify()?;
        Ok(Arc::new(out))
    }

    fn split(&self, j: usize) -> Result<Arc<dyn TwistedTower>> {
        let atoms = &self.atoms[j];
        if atoms.len() < 2 {
            return Err(Error::Precondition(format!("factor {} is already indecomposable", j + 1)));
        }
        let p = (0..atoms.len()).min_by_key(|&i| atoms[i].0).unwrap();
        let rest_idx: Vec<usize> = (0..atoms.len()).filter(|&i| i != p).collect();
        let parts: Vec<Complex<F>> = atoms.iter().map(|(_, c)| c.clone()).collect();
        // index sets of c1 and rest inside the factor, per degree
        let sel = |idx: Vec<usize>| {
            let parts = parts.clone();
            move |i: i32| -> Vec<usize> {
                let ranges = part_ranges(&parts, i);
                idx.iter().flat_map(|&a| ranges[a].clone()).collect()
            }
        };
        let rest_sel = sel(rest_idx.clone());
        let c1_sel = sel(vec![p]);
        let n = self.blocks.len();
        let mut out = Twisted::new(self.ctx.clone());
        for idx in 0..n {
            if idx == j {
                out.push_factor(rest_idx.iter().map(|&a| atoms[a].clone()).collect());
                out.push_factor(vec![atoms[p].clone()]);
            } else {
                out.push_factor(self.atoms[idx].clone());
            }
        }
        let shift_idx = |a: usize| if a > j { a + 1 } else { a };
        let pick = |g: &GradedMap<F>, rows: Option<&dyn Fn(i32) -> Vec<usize>>, cols: Option<&dyn Fn(i32) -> Vec<usize>>, src: &Complex<F>, tgt: &Complex<F>| {
            let mut o = GradedMap::zero(g.degree);
            for i in g.degrees().collect::<Vec<_>>() {
                let m = g.comp_ref(i).unwrap();
                let r: Vec<usize> = match rows {
                    Some(f) => f(i),
                    None => (0..src.term(i).len()).collect(),
                };
                let c: Vec<usize> = match cols {
                    Some(f) => f(i + g.degree),
                    None => (0..tgt.term(i + g.degree).len()).collect(),
                };
                o.set(i, m.select(&r, &c));
            }
            o
        };
        for (&(a, b), map) in &self.h {
            if a == j {
                let tgt = &self.blocks[b];
                let r = pick(map, Some(&rest_sel), None, &self.blocks[j], tgt);
                let c = pick(map, Some(&c1_sel), None, &self.blocks[j], tgt);
                if !r.is_zero() {
                    out.h.insert((j, b), r);
                }
                if !c.is_zero() {
                    out.h.insert((j + 1, b), c);
                }
            } else if b == j {
                let src = &self.blocks[a];
                let r = pick(map, None, Some(&rest_sel), src, &self.blocks[j]);
                let c = pick(map, None, Some(&c1_sel), src, &self.blocks[j]);
                if !r.is_zero() {
                    out.h.insert((a + 1, j), r);
                }
                if !c.is_zero() {
                    out.h.insert((a + 1, j + 1), c);
                }
            } else {
                out.h.insert((shift_idx(a), shift_idx(b)), map.clone());
            }
        }
        out.verify()?;
        Ok(Arc::new(out))
    }
}

impl<F: Field> Realization for EngineRealization<F> {
    fn describe(&self) -> String {
        format!("{} over {}", self.ctx.alg.presentation.name, F::name())
    }

    fn hom_dim(&self, a: &FormalObject, b: &FormalObject) -> usize {
        HomSpace::new(&self.ctx.alg, &self.standard(a), &self.standard(b)).dim()
    }

    fn split_tower(&self, factors: &[FormalObject]) -> Result<Arc<dyn TwistedTower>> {
        let mut tw = Twisted::new(self.ctx.clone());
        for f in factors {
            tw.push_factor(f.summands().into_iter().map(|id| (id, self.ctx.rep(id))).collect());
        }
        Ok(Arc::new(tw))
    }

    fn realize(&self, snap: &Snapshot, steps: &[(FormalObject, Witness)]) -> Result<Arc<dyn TwistedTower>> {
        let ctx = &self.ctx;
        let alg = &ctx.alg;
        let mut tw = Twisted::new(ctx.clone());
        for (j, (factor, witness)) in steps.iter().enumerate() {
            tw.push_factor(factor.summands().into_iter().map(|id| (id, ctx.rep(id))).collect());
            let (index, rotation, shift, padding) = match witness {
                Witness::Split => continue,
                Witness::Catalog { index, rotation, shift, padding } => (*index, *rotation, *shift, padding),
                other => {
                    return Err(Error::Internal(format!("step witness {other:?} cannot be realized directly")));
                }
            };
            let tri = snap
                .catalog
                .get(index)
                .ok_or_else(|| Error::Validation(format!("catalog index {index} out of range")))?;
            let (ida, idb) = (tri.a.first().unwrap(), tri.b.first().unwrap());
            let x = ctx.rep(ida);
            let y = ctx.rep(idb);
            let hom = HomSpace::new(alg, &x, &y);
            let g = map_from_int_coeffs(&hom, &tri.coeffs, &x, &y);
            let cn = cone(alg, &x, &y, &g);
            let (incl, proj) = cone_maps(alg, &x, &y, &cn);
            let (pa, pc, h) = match rotation {
                0 => (x.clone(), cn.clone(), proj.regrade(1)),
                1 => (y.clone(), x.shift(1), g.shift(1).regrade(1)),
                _ => (cn.shift(-1), y.clone(), incl.regrade(1)),
            };
            let (pa, pc, h) = (pa.shift(shift), pc.shift(shift), h.shift(shift));
            debug_assert!(h.differential(alg, &pc, &pa).is_zero());

            let fc = &tw.blocks[j];
            let iso_c = ctx.iso(fc, &pc, "a catalog third term")?;
            let d = self.standard(padding);
            let pad = [pa.clone(), d.clone()];
            let h_pad = assemble_map(std::slice::from_ref(&pc), &pad, 1, |_, c| (c == 0).then(|| h.clone()));
            let t_prev = tw.assemble(0..j)?;
            let phi = ctx.iso(&pa.direct_sum(&d), &t_prev, "the previous tower stage")?;
            let hmap = iso_c.then(alg, &h_pad).then(alg, &phi);
            debug_assert!(hmap.differential(alg, fc, &t_prev).is_zero());
            tw.set_connecting(j, &hmap);
        }
        tw.verify()?;
        Ok(Arc::new(tw))
    }
}
