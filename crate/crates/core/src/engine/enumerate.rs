//! Suspension orbits of indecomposables up to a width bound.

use super::algebra::Algebra;
use super::complex::{cone, Complex, GradedMap};
use super::decompose::decompose;
use super::hom::{find_iso, HomSpace};
use crate::error::{Error, Result};
use crate::field::Field;

/// Representative of a suspension orbit, normalized so its top degree is 0.
#[derive(Debug, Clone)]
pub struct OrbitRep<F: Field> {
    pub label: String,
    pub shape: String,
    pub complex: Complex<F>,
}

impl<F: Field> OrbitRep<F> {
    pub fn width(&self) -> usize {
        self.complex.width()
    }

    /// `Sigma^shift` of the representative.
    pub fn at(&self, shift: i32) -> Complex<F> {
        self.complex.shift(shift)
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration<F: Field> {
    pub orbits: Vec<OrbitRep<F>>,
    pub width_bound: usize,
    /// Set when the orbit cap stopped the search early.
    pub partial: bool,
}

pub const DEFAULT_ORBIT_CAP: usize = 64;

fn normalize<F: Field>(c: &Complex<F>) -> (Complex<F>, i32) {
    let top = c.hi();
    (c.shift(top), -top)
}

impl<F: Field> Enumeration<F> {
    pub fn orbit_index(&self, label: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.label == label)
    }

    /// Orbit of a minimal indecomposable whose top degree is 0.
    fn match_normalized(&self, alg: &Algebra<F>, c: &Complex<F>, shape: &str, seed: u64) -> Option<usize> {
        self.orbits.iter().position(|o| o.shape == shape && find_iso(alg, &o.complex, c, seed).is_some())
    }

    /// Krull-Schmidt normal form of `x` as `(orbit, shift)` pairs, sorted.
    pub fn identify(&self, alg: &Algebra<F>, x: &Complex<F>, seed: u64) -> Result<Vec<(usize, i32)>> {
        let mut out = Vec::new();
        for part in decompose(alg, x, seed)? {
            let (n, shift) = normalize(&part);
            let shape = n.shape_label(alg);
            let orbit = self.match_normalized(alg, &n, &shape, seed).ok_or_else(|| {
                Error::UnknownIndecomposable(format!("{shape} (width {}) is not among the enumerated orbits", n.width()))
            })?;
            out.push((orbit, shift));
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Grows orbit representatives from the projective stalks by taking cones of
/// Hom-basis maps (and their sum) between representatives at all relative
/// shifts, keeping indecomposable summands of width at most `width_bound`.
pub fn enumerate_indecomposables<F: Field>(
    alg: &Algebra<F>,
    width_bound: usize,
    orbit_cap: usize,
    seed: u64,
) -> Result<Enumeration<F>> {
    if width_bound == 0 {
        return Err(Error::Precondition("width bound must be positive".into()));
    }
    let mut en = Enumeration { orbits: Vec::new(), width_bound, partial: false };
    let mut queue: Vec<Complex<F>> = (0..alg.num_vertices()).map(|v| Complex::stalk(&[v], 0)).collect();
    let mut processed = 0usize;
    loop {
        for c in queue.drain(..) {
            let (n, _) = normalize(&c);
            let shape = n.shape_label(alg);
            if n.width() == 0 || n.width() > width_bound || en.match_normalized(alg, &n, &shape, seed).is_some() {
                continue;
            }
            if en.orbits.len() >= orbit_cap {
                en.partial = true;
                return Err(Error::ResourceLimit(format!(
                    "more than {orbit_cap} orbits of width <= {width_bound}; partial list has {}",
                    en.orbits.len()
                )));
            }
            en.orbits.push(OrbitRep { label: shape.clone(), shape, complex: n });
        }
        if processed == en.orbits.len() {
            break;
        }
        // cones between every new orbit and every orbit, in both directions
        let upto = en.orbits.len();
        for i in processed..upto {
            for j in 0..upto {
                for (a, b) in [(i, j), (j, i)] {
                    let xa = &en.orbits[a].complex;
                    let xb = &en.orbits[b].complex;
                    let span = (xa.width() + xb.width()) as i32;
                    for s in -span..=span {
                        let src = xa.shift(s);
                        let hom = HomSpace::new(alg, &src, xb);
                        if hom.dim() == 0 {
                            continue;
                        }
                        let maps = hom.basis_maps(&src, xb);
                        let mut sum = GradedMap::zero(0);
                        for f in &maps {
                            sum = sum.add(f);
                        }
                        for f in maps.iter().chain(std::iter::once(&sum)) {
                            let c = cone(alg, &src, xb, f).minimize(alg);
                            if c.width() > 2 * width_bound + 1 {
                                continue;
                            }
                            queue.extend(decompose(alg, &c, seed)?);
                        }
                    }
                }
            }
        }
        processed = upto;
    }

    en.orbits.sort_by(|a, b| (a.width(), a.complex.total_rank(), &a.shape).cmp(&(b.width(), b.complex.total_rank(), &b.shape)));
    let mut seen: std::collections::BTreeMap<String, usize> = Default::default();
    for o in &mut en.orbits {
        let base = alg.presentation.aliases.get(&o.shape).cloned().unwrap_or_else(|| o.shape.clone());
        let k = seen.entry(base.clone()).or_insert(0);
        *k += 1;
        o.label = if *k == 1 { base } else { format!("{base}#{k}") };
    }
    Ok(en)
}
