//! Bounded complexes of projectives and graded maps between them.
//!
//! Matrices follow the composition order of the path category: rows index the
//! source summands, columns the target summands, and `f` followed by `g` is the
//! product `f * g`.

use super::algebra::{Algebra, Elem};
use crate::error::{Error, Result};
use crate::field::Field;
use std::collections::BTreeMap;

pub fn elem_add<F: Field>(a: &Elem<F>, b: &Elem<F>) -> Elem<F> {
    let mut out: Elem<F> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            let s = a[i].1 + b[j].1;
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn elem_scale<F: Field>(a: &Elem<F>, s: F) -> Elem<F> {
    if s.is_zero() {
        return Vec::new();
    }
    a.iter().map(|&(b, c)| (b, c * s)).collect()
}

pub fn elem_mul<F: Field>(alg: &Algebra<F>, a: &Elem<F>, b: &Elem<F>) -> Elem<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc: BTreeMap<usize, F> = BTreeMap::new();
    for &(i, ci) in a {
        for &(j, cj) in b {
            for &(k, ck) in alg.mul_basis(i, j) {
                *acc.entry(k).or_insert_with(F::zero) += ci * cj * ck;
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn elem_coefficient<F: Field>(a: &Elem<F>, b: usize) -> F {
    a.iter().find(|(k, _)| *k == b).map_or(F::zero(), |(_, c)| *c)
}

/// Inverse of `lambda * e_v + (radical part)` in the local ring `e_v A e_v`.
pub fn elem_unit_inverse<F: Field>(alg: &Algebra<F>, v: usize, a: &Elem<F>) -> Option<Elem<F>> {
    let e = alg.idempotent(v);
    let lambda = elem_coefficient(a, e);
    let linv = lambda.inv()?;
    // a = lambda (e + n) with n radical; (e + n)^-1 = sum (-n)^k
    let n: Elem<F> = a.iter().filter(|(k, _)| *k != e).map(|&(k, c)| (k, -(c * linv))).collect();
    let mut term: Elem<F> = vec![(e, F::one())];
    let mut sum = term.clone();
    for _ in 0..alg.nilpotency() + 1 {
        term = elem_mul(alg, &term, &n);
        if term.is_empty() {
            return Some(elem_scale(&sum, linv));
        }
        sum = elem_add(&sum, &term);
    }
    None
}

/// Matrix of algebra elements between sums of indecomposable projectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PMat<F: Field> {
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    entries: Vec<Elem<F>>,
}

impl<F: Field> PMat<F> {
    pub fn zero(src: &[usize], tgt: &[usize]) -> Self {
        PMat { src: src.to_vec(), tgt: tgt.to_vec(), entries: vec![Vec::new(); src.len() * tgt.len()] }
    }

    pub fn identity(alg: &Algebra<F>, obj: &[usize]) -> Self {
        let mut m = Self::zero(obj, obj);
        for (i, &v) in obj.iter().enumerate() {
            m.set(i, i, vec![(alg.idempotent(v), F::one())]);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.src.len()
    }

    pub fn cols(&self) -> usize {
        self.tgt.len()
    }

    pub fn get(&self, r: usize, c: usize) -> &Elem<F> {
        &self.entries[r * self.tgt.len() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: Elem<F>) {
        let n = self.tgt.len();
        self.entries[r * n + c] = e;
    }

    pub fn add_to(&mut self, r: usize, c: usize, e: &Elem<F>) {
        let n = self.tgt.len();
        let cur = &self.entries[r * n + c];
        self.entries[r * n + c] = elem_add(cur, e);
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_empty())
    }

    pub fn mul(&self, alg: &Algebra<F>, other: &PMat<F>) -> PMat<F> {
        debug_assert_eq!(self.tgt, other.src, "composable matrices");
        let mut out = PMat::zero(&self.src, &other.tgt);
        for r in 0..self.rows() {
            for k in 0..self.cols() {
                let a = self.get(r, k);
                if a.is_empty() {
                    continue;
                }
                for c in 0..other.cols() {
                    let b = other.get(k, c);
                    if !b.is_empty() {
                        let p = elem_mul(alg, a, b);
                        if !p.is_empty() {
                            out.add_to(r, c, &p);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &PMat<F>) -> PMat<F> {
        debug_assert_eq!(self.src, other.src);
        debug_assert_eq!(self.tgt, other.tgt);
        PMat {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| elem_add(a, b)).collect(),
        }
    }

    pub fn scale(&self, s: F) -> PMat<F> {
        PMat {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            entries: self.entries.iter().map(|a| elem_scale(a, s)).collect(),
        }
    }

    pub fn neg(&self) -> PMat<F> {
        self.scale(-F::one())
    }

    pub fn sub(&self, other: &PMat<F>) -> PMat<F> {
        self.add(&other.neg())
    }

    /// Block matrix from rows of blocks; block shapes must agree.
    pub fn blocks(src_parts: &[Vec<usize>], tgt_parts: &[Vec<usize>], blocks: &[Vec<Option<&PMat<F>>>]) -> PMat<F> {
        let src: Vec<usize> = src_parts.concat();
        let tgt: Vec<usize> = tgt_parts.concat();
        let mut out = PMat::zero(&src, &tgt);
        let mut r0 = 0;
        for (bi, sp) in src_parts.iter().enumerate() {
            let mut c0 = 0;
            for (bj, tp) in tgt_parts.iter().enumerate() {
                if let Some(b) = blocks[bi][bj] {
                    debug_assert_eq!(&b.src, sp);
                    debug_assert_eq!(&b.tgt, tp);
                    for r in 0..sp.len() {
                        for c in 0..tp.len() {
                            out.set(r0 + r, c0 + c, b.get(r, c).clone());
                        }
                    }
                }
                c0 += tp.len();
            }
            r0 += sp.len();
        }
        out
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PMat<F> {
        let src: Vec<usize> = rows.iter().map(|&r| self.src[r]).collect();
        let tgt: Vec<usize> = cols.iter().map(|&c| self.tgt[c]).collect();
        let mut out = PMat::zero(&src, &tgt);
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    /// Scalar part on the trivial paths, per (row, column) with equal vertices.
    pub fn scalar_part(&self, alg: &Algebra<F>, r: usize, c: usize) -> F {
        if self.src[r] != self.tgt[c] {
            return F::zero();
        }
        elem_coefficient(self.get(r, c), alg.idempotent(self.src[r]))
    }

    /// Whether entry (r, c) is a unit of the local ring at its vertex.
    pub fn is_unit_entry(&self, alg: &Algebra<F>, r: usize, c: usize) -> bool {
        !self.scalar_part(alg, r, c).is_zero()
    }

    /// Inverse of a square matrix that is invertible modulo the radical.
    pub fn inverse(&self, alg: &Algebra<F>) -> Option<PMat<F>> {
        if self.src.len() != self.tgt.len() {
            return None;
        }
        let mut sorted_src = self.src.clone();
        sorted_src.sort_unstable();
        let mut sorted_tgt = self.tgt.clone();
        sorted_tgt.sort_unstable();
        if sorted_src != sorted_tgt {
            return None;
        }
        // invert the scalar part per vertex, then correct by a Neumann series
        let n = self.src.len();
        let mut s0 = PMat::zero(&self.tgt, &self.src);
        let mut vertices = self.src.clone();
        vertices.sort_unstable();
        vertices.dedup();
        for v in vertices {
            let rows: Vec<usize> = (0..n).filter(|&r| self.src[r] == v).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| self.tgt[c] == v).collect();
            let mut m = crate::linalg::Matrix::<F>::zeros(rows.len(), cols.len());
            for (i, &r) in rows.iter().enumerate() {
                for (j, &c) in cols.iter().enumerate() {
                    m[(i, j)] = self.scalar_part(alg, r, c);
                }
            }
            let inv = m.inverse()?;
            for (j, &c) in cols.iter().enumerate() {
                for (i, &r) in rows.iter().enumerate() {
                    let s = inv[(j, i)];
                    if !s.is_zero() {
                        s0.set(c, r, vec![(alg.idempotent(v), s)]);
                    }
                }
            }
        }
        // self * s0 = 1 - nil on the source side
        let id = PMat::identity(alg, &self.src);
        let nil = id.sub(&self.mul(alg, &s0));
        let mut term = id.clone();
        let mut sum = id.clone();
        for _ in 0..alg.nilpotency() * (n + 1) + 1 {
            term = term.mul(alg, &nil);
            if term.is_zero() {
                let inv = s0.mul(alg, &sum);
                debug_assert!(self.mul(alg, &inv) == id);
                return Some(inv);
            }
            sum = sum.add(&term);
        }
        None
    }
}

/// Bounded cochain complex of finitely generated projectives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex<F: Field> {
    lo: i32,
    terms: Vec<Vec<usize>>,
    diffs: Vec<PMat<F>>,
}

impl<F: Field> Complex<F> {
    pub fn zero() -> Self {
        Complex { lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    pub fn stalk(vertices: &[usize], degree: i32) -> Self {
        Complex { lo: degree, terms: vec![vertices.to_vec()], diffs: Vec::new() }
    }

    /// `terms[k]` sits in degree `lo + k`; `diffs[k]` maps it to the next term.
    pub fn new(lo: i32, terms: Vec<Vec<usize>>, diffs: Vec<PMat<F>>) -> Result<Self> {
        if terms.is_empty() {
            if !diffs.is_empty() {
                return Err(Error::InvalidComplex("differentials without terms".into()));
            }
            return Ok(Self::zero());
        }
        if diffs.len() + 1 != terms.len() {
            return Err(Error::InvalidComplex(format!("{} terms need {} differentials", terms.len(), terms.len() - 1)));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.src != terms[k] || d.tgt != terms[k + 1] {
                return Err(Error::InvalidComplex(format!("differential {k} has the wrong shape")));
            }
        }
        let mut c = Complex { lo, terms, diffs };
        c.trim();
        Ok(c)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.terms.len() as i32 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_empty())
    }

    pub fn width(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.terms.len()
        }
    }

    pub fn term(&self, i: i32) -> &[usize] {
        if i < self.lo || i > self.hi() {
            &[]
        } else {
            &self.terms[(i - self.lo) as usize]
        }
    }

    /// The differential `X^i -> X^{i+1}` (zero outside the support).
    pub fn diff(&self, i: i32) -> PMat<F> {
        if i >= self.lo && i < self.hi() {
            self.diffs[(i - self.lo) as usize].clone()
        } else {
            PMat::zero(self.term(i), self.term(i + 1))
        }
    }

    pub fn diff_ref(&self, i: i32) -> Option<&PMat<F>> {
        if i >= self.lo && i < self.hi() {
            Some(&self.diffs[(i - self.lo) as usize])
        } else {
            None
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn total_rank(&self) -> usize {
        self.terms.iter().map(|t| t.len()).sum()
    }

    fn trim(&mut self) {
        while self.terms.first().is_some_and(|t| t.is_empty()) {
            self.terms.remove(0);
            if !self.diffs.is_empty() {
                self.diffs.remove(0);
            }
            self.lo += 1;
        }
        while self.terms.last().is_some_and(|t| t.is_empty()) {
            self.terms.pop();
            self.diffs.pop();
        }
        if self.terms.is_empty() {
            *self = Self::zero();
        }
    }

    /// `Sigma^k X`: degree `i` holds `X^{i+k}`, differential scaled by `(-1)^k`.
    pub fn shift(&self, k: i32) -> Complex<F> {
        if self.is_zero() {
            return Self::zero();
        }
        let sign = if k.rem_euclid(2) == 1 { -F::one() } else { F::one() };
        Complex { lo: self.lo - k, terms: self.terms.clone(), diffs: self.diffs.iter().map(|d| d.scale(sign)).collect() }
    }

    pub fn direct_sum(&self, other: &Complex<F>) -> Complex<F> {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let terms: Vec<Vec<usize>> = (lo..=hi).map(|i| [self.term(i), other.term(i)].concat()).collect();
        let diffs = (lo..hi)
            .map(|i| {
                let (a, b) = (self.diff(i), other.diff(i));
                PMat::blocks(
                    &[self.term(i).to_vec(), other.term(i).to_vec()],
                    &[self.term(i + 1).to_vec(), other.term(i + 1).to_vec()],
                    &[vec![Some(&a), None], vec![None, Some(&b)]],
                )
            })
            .collect();
        Complex { lo, terms, diffs }
    }

    pub fn direct_sum_all(parts: &[Complex<F>]) -> Complex<F> {
        parts.iter().fold(Self::zero(), |acc, p| acc.direct_sum(p))
    }

    /// Checks `d o d = 0` and that every entry respects vertex endpoints.
    pub fn check(&self, alg: &Algebra<F>) -> Result<()> {
        for (k, d) in self.diffs.iter().enumerate() {
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    for &(b, _) in d.get(r, c) {
                        let p = &alg.basis()[b];
                        if p.source != d.src[r] || p.target != d.tgt[c] {
                            return Err(Error::InvalidComplex(format!(
                                "entry ({r},{c}) of differential in degree {} has wrong endpoints",
                                self.lo + k as i32
                            )));
                        }
                    }
                }
            }
        }
        for i in self.lo..self.hi() - 1 {
            let dd = self.diff(i).mul(alg, &self.diff(i + 1));
            if !dd.is_zero() {
                return Err(Error::InvalidComplex(format!("d o d is nonzero starting in degree {i}")));
            }
        }
        Ok(())
    }

    /// Vertices per degree from lowest to highest, e.g. `P1>P2`.
    pub fn shape_label(&self, alg: &Algebra<F>) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|t| {
                let mut vs: Vec<usize> = t.clone();
                vs.sort_unstable();
                if vs.is_empty() {
                    "0".to_string()
                } else {
                    vs.iter().map(|&v| format!("P{}", alg.vertex_label(v))).collect::<Vec<_>>().join("+")
                }
            })
            .collect::<Vec<_>>()
            .join(">")
    }

    /// Vertex multiplicity counts weighted by `(-1)^degree`.
    pub fn euler_vector(&self, num_vertices: usize) -> Vec<i64> {
        let mut v = vec![0i64; num_vertices];
        for i in self.degrees() {
            let s = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            for &p in self.term(i) {
                v[p] += s;
            }
        }
        v
    }

    /// Cancels invertible differential entries until none remain.
    pub fn minimize(&self, alg: &Algebra<F>) -> Complex<F> {
        let mut c = self.clone();
        'outer: loop {
            for k in 0..c.diffs.len() {
                let d = &c.diffs[k];
                for r in 0..d.rows() {
                    for s in 0..d.cols() {
                        if d.is_unit_entry(alg, r, s) {
                            c = c.eliminate(alg, k, r, s);
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
        c.trim();
        c
    }

    /// Gaussian elimination of the invertible entry (r, s) of `diffs[k]`.
    fn eliminate(&self, alg: &Algebra<F>, k: usize, r: usize, s: usize) -> Complex<F> {
        let d = &self.diffs[k];
        let phi_inv = elem_unit_inverse(alg, d.src[r], d.get(r, s)).expect("unit entry");
        let rows_b: Vec<usize> = (0..d.rows()).filter(|&i| i != r).collect();
        let cols_d: Vec<usize> = (0..d.cols()).filter(|&j| j != s).collect();
        // new B -> D block: eps - gamma phi^-1 delta
        let mut new_d = d.select(&rows_b, &cols_d);
        for (bi, &b) in rows_b.iter().enumerate() {
            let gamma = d.get(b, s);
            if gamma.is_empty() {
                continue;
            }
            let g_phi = elem_mul(alg, gamma, &phi_inv);
            for (dj, &dd) in cols_d.iter().enumerate() {
                let delta = d.get(r, dd);
                if delta.is_empty() {
                    continue;
                }
                let corr = elem_mul(alg, &g_phi, delta);
                new_d.add_to(bi, dj, &elem_scale(&corr, -F::one()));
            }
        }
        let mut terms = self.terms.clone();
        let mut diffs = self.diffs.clone();
        terms[k].remove(r);
        terms[k + 1].remove(s);
        diffs[k] = new_d;
        if k > 0 {
            let prev = &diffs[k - 1];
            let all_rows: Vec<usize> = (0..prev.rows()).collect();
            let keep: Vec<usize> = (0..prev.cols()).filter(|&j| j != r).collect();
            diffs[k - 1] = prev.select(&all_rows, &keep);
        }
        if k + 1 < diffs.len() {
            let next = &diffs[k + 1];
            let keep: Vec<usize> = (0..next.rows()).filter(|&i| i != s).collect();
            let all_cols: Vec<usize> = (0..next.cols()).collect();
            diffs[k + 1] = next.select(&keep, &all_cols);
        }
        Complex { lo: self.lo, terms, diffs }
    }

    /// Whether some differential entry is invertible.
    pub fn is_minimal(&self, alg: &Algebra<F>) -> bool {
        self.diffs.iter().all(|d| (0..d.rows()).all(|r| (0..d.cols()).all(|s| !d.is_unit_entry(alg, r, s))))
    }
}

/// A family of maps `X^i -> Y^{i+degree}`; missing components are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap<F: Field> {
    pub degree: i32,
    comps: BTreeMap<i32, PMat<F>>,
}

impl<F: Field> GradedMap<F> {
    pub fn zero(degree: i32) -> Self {
        GradedMap { degree, comps: BTreeMap::new() }
    }

    pub fn identity(alg: &Algebra<F>, x: &Complex<F>) -> Self {
        let mut m = Self::zero(0);
        for i in x.degrees() {
            if !x.term(i).is_empty() {
                m.comps.insert(i, PMat::identity(alg, x.term(i)));
            }
        }
        m
    }

    /// Component `X^i -> Y^{i+degree}`, materialized with the right shape.
    pub fn comp(&self, x: &Complex<F>, y: &Complex<F>, i: i32) -> PMat<F> {
        match self.comps.get(&i) {
            Some(m) => m.clone(),
            None => PMat::zero(x.term(i), y.term(i + self.degree)),
        }
    }

    pub fn comp_ref(&self, i: i32) -> Option<&PMat<F>> {
        self.comps.get(&i)
    }

    pub fn set(&mut self, i: i32, m: PMat<F>) {
        if m.is_zero() {
            self.comps.remove(&i);
        } else {
            self.comps.insert(i, m);
        }
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.comps.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|m| m.is_zero())
    }

    pub fn add(&self, other: &GradedMap<F>) -> GradedMap<F> {
        debug_assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (&i, m) in &other.comps {
            let sum = match out.comps.get(&i) {
                Some(a) => a.add(m),
                None => m.clone(),
            };
            out.set(i, sum);
        }
        out
    }

    pub fn scale(&self, s: F) -> GradedMap<F> {
        let mut out = Self::zero(self.degree);
        for (&i, m) in &self.comps {
            out.set(i, m.scale(s));
        }
        out
    }

    pub fn sub(&self, other: &GradedMap<F>) -> GradedMap<F> {
        self.add(&other.scale(-F::one()))
    }

    /// `self` followed by `other`.
    pub fn then(&self, alg: &Algebra<F>, other: &GradedMap<F>) -> GradedMap<F> {
        let mut out = Self::zero(self.degree + other.degree);
        for (&i, a) in &self.comps {
            if let Some(b) = other.comps.get(&(i + self.degree)) {
                out.set(i, a.mul(alg, b));
            }
        }
        out
    }

    /// `d_X g - (-1)^k g d_Y`, a map of degree `k + 1`.
    pub fn differential(&self, alg: &Algebra<F>, x: &Complex<F>, y: &Complex<F>) -> GradedMap<F> {
        let k = self.degree;
        let sign = if k.rem_euclid(2) == 0 { -F::one() } else { F::one() };
        let mut out = Self::zero(k + 1);
        let lo = x.lo() - 1;
        let hi = x.hi();
        for i in lo..=hi {
            if x.term(i).is_empty() || y.term(i + k + 1).is_empty() {
                continue;
            }
            let mut acc = PMat::zero(x.term(i), y.term(i + k + 1));
            if let (Some(dx), Some(g)) = (x.diff_ref(i), self.comps.get(&(i + 1))) {
                acc = acc.add(&dx.mul(alg, g));
            }
            if let (Some(g), Some(dy)) = (self.comps.get(&i), y.diff_ref(i + k)) {
                acc = acc.add(&g.mul(alg, dy).scale(sign));
            }
            out.set(i, acc);
        }
        out
    }

    pub fn is_chain_map(&self, alg: &Algebra<F>, x: &Complex<F>, y: &Complex<F>) -> bool {
        self.differential(alg, x, y).is_zero()
    }

    /// Same components, read as a map of another degree (e.g. a chain map
    /// into `Sigma Y` as a degree one map into `Y`).
    pub fn regrade(&self, degree: i32) -> GradedMap<F> {
        GradedMap { degree, comps: self.comps.clone() }
    }

    /// `Sigma^s` of a map `X -> Y`, viewed as `Sigma^s X -> Sigma^s Y`.
    pub fn shift(&self, s: i32) -> GradedMap<F> {
        // components are unchanged; only the indexing moves
        let mut out = Self::zero(self.degree);
        let sign = if (s * self.degree).rem_euclid(2) == 1 { -F::one() } else { F::one() };
        for (&i, m) in &self.comps {
            out.set(i - s, m.scale(sign));
        }
        out
    }
}

/// Mapping cone of a chain map `f: X -> Y`: degree `i` holds `X^{i+1} + Y^i`.
pub fn cone<F: Field>(_alg: &Algebra<F>, x: &Complex<F>, y: &Complex<F>, f: &GradedMap<F>) -> Complex<F> {
    debug_assert_eq!(f.degree, 0);
    if x.is_zero() {
        return y.clone();
    }
    if y.is_zero() {
        return x.shift(1);
    }
    let lo = (x.lo() - 1).min(y.lo());
    let hi = (x.hi() - 1).max(y.hi());
    let terms: Vec<Vec<usize>> = (lo..=hi).map(|i| [x.term(i + 1), y.term(i)].concat()).collect();
    let diffs = (lo..hi)
        .map(|i| {
            let mdx = x.diff(i + 1).neg();
            let fi = f.comp(x, y, i + 1);
            let dy = y.diff(i);
            PMat::blocks(
                &[x.term(i + 1).to_vec(), y.term(i).to_vec()],
                &[x.term(i + 2).to_vec(), y.term(i + 1).to_vec()],
                &[vec![Some(&mdx), Some(&fi)], vec![None, Some(&dy)]],
            )
        })
        .collect();
    Complex::new(lo, terms, diffs).expect("cone has consistent shapes")
}

/// The canonical maps `Y -> cone(f)` and `cone(f) -> Sigma X`.
pub fn cone_maps<F: Field>(
    alg: &Algebra<F>,
    x: &Complex<F>,
    y: &Complex<F>,
    c: &Complex<F>,
) -> (GradedMap<F>, GradedMap<F>) {
    let mut incl = GradedMap::zero(0);
    let mut proj = GradedMap::zero(0);
    let sx = x.shift(1);
    for i in c.degrees() {
        let nx = x.term(i + 1).len();
        let ny = y.term(i).len();
        if ny > 0 {
            let mut m = PMat::zero(y.term(i), c.term(i));
            for j in 0..ny {
                m.set(j, nx + j, vec![(alg.idempotent(y.term(i)[j]), F::one())]);
            }
            incl.set(i, m);
        }
        if nx > 0 {
            let mut m = PMat::zero(c.term(i), sx.term(i));
            for j in 0..nx {
                m.set(j, j, vec![(alg.idempotent(x.term(i + 1)[j]), F::one())]);
            }
            proj.set(i, m);
        }
    }
    (incl, proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::algebra::AlgebraPresentation;
    use crate::field::Rational;

    fn a2() -> Algebra<Rational> {
        Algebra::new(AlgebraPresentation::a2()).unwrap()
    }

    fn arrow_map(alg: &Algebra<Rational>) -> PMat<Rational> {
        let a = alg.paths_between(0, 1)[0];
        let mut m = PMat::zero(&[0], &[1]);
        m.set(0, 0, vec![(a, Rational::ONE)]);
        m
    }

    #[test]
    fn cone_of_arrow_is_two_term_complex() {
        let alg = a2();
        let x = Complex::stalk(&[0], 0);
        let y = Complex::stalk(&[1], 0);
        let mut f = GradedMap::zero(0);
        f.set(0, arrow_map(&alg));
        assert!(f.is_chain_map(&alg, &x, &y));
        let c = cone(&alg, &x, &y, &f);
        c.check(&alg).unwrap();
        assert_eq!(c.shape_label(&alg), "P1>P2");
        assert_eq!((c.lo(), c.hi()), (-1, 0));
        assert!(c.is_minimal(&alg));
        let (incl, proj) = cone_maps(&alg, &x, &y, &c);
        assert!(incl.is_chain_map(&alg, &y, &c));
        assert!(proj.is_chain_map(&alg, &c, &x.shift(1)));
    }

    #[test]
    fn cone_of_identity_minimizes_to_zero() {
        let alg = a2();
        let x = Complex::stalk(&[0, 1], 0);
        let id = GradedMap::identity(&alg, &x);
        let c = cone(&alg, &x, &x, &id);
        c.check(&alg).unwrap();
        assert!(c.minimize(&alg).is_zero());
    }

    #[test]
    fn shift_moves_support() {
        let alg = a2();
        let x = Complex::stalk(&[0], 0);
        let y = Complex::stalk(&[1], 0);
        let mut f = GradedMap::zero(0);
        f.set(0, arrow_map(&alg));
        let c = cone(&alg, &x, &y, &f);
        let s = c.shift(2);
        assert_eq!((s.lo(), s.hi()), (-3, -2));
        s.check(&alg).unwrap();
        assert_eq!(c.euler_vector(2), vec![-1, 1]);
        assert_eq!(c.shift(1).euler_vector(2), vec![1, -1]);
    }

    #[test]
    fn unit_inverse_in_dual_numbers() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::dual_numbers()).unwrap();
        let e = alg.idempotent(0);
        let x = alg.paths_between(0, 0).iter().copied().find(|&b| b != e).unwrap();
        let a = vec![(e, Rational::integer(2)), (x, Rational::integer(3))];
        let inv = elem_unit_inverse(&alg, 0, &a).unwrap();
        assert_eq!(elem_mul(&alg, &a, &inv), vec![(e, Rational::ONE)]);
    }

    #[test]
    fn pmat_inverse_with_radical_part() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::dual_numbers()).unwrap();
        let e = alg.idempotent(0);
        let x = alg.paths_between(0, 0).iter().copied().find(|&b| b != e).unwrap();
        let mut m = PMat::zero(&[0, 0], &[0, 0]);
        m.set(0, 1, vec![(e, Rational::ONE), (x, Rational::integer(5))]);
        m.set(1, 0, vec![(e, Rational::ONE)]);
        m.set(1, 1, vec![(x, Rational::ONE)]);
        let inv = m.inverse(&alg).unwrap();
        assert_eq!(m.mul(&alg, &inv), PMat::identity(&alg, &[0, 0]));
    }
}
