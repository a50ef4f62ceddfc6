//! Finite dimensional quiver algebras with relations.
//!
//! A morphism `P_u -> P_v` between indecomposable projectives is an element of
//! the span of paths from `u` to `v`; composing `P_u -> P_v -> P_w` concatenates
//! the paths in that order.

use crate::error::{Error, Result};
use crate::field::{Field, FieldChoice, Rational};
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: usize,
    pub target: usize,
}

/// Linear combination of paths; each path is a sequence of arrow indices.
pub type PathCombination = Vec<(Rational, Vec<usize>)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub name: String,
    pub field: FieldChoice,
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub relations: Vec<PathCombination>,
    /// Shape label of an indecomposable (e.g. `P1>P2`) to a friendly orbit name.
    pub aliases: BTreeMap<String, String>,
    pub length_bound: usize,
}

pub const DEFAULT_LENGTH_BOUND: usize = 10;
const MAX_PATHS: usize = 20_000;

impl AlgebraPresentation {
    /// The ground field `k` itself: one vertex, no arrows.
    pub fn trivial() -> Self {
        AlgebraPresentation {
            name: "k".into(),
            field: FieldChoice::Rationals,
            vertices: vec!["1".into()],
            arrows: vec![],
            relations: vec![],
            aliases: BTreeMap::from([("P1".to_string(), "c".to_string())]),
            length_bound: DEFAULT_LENGTH_BOUND,
        }
    }

    /// Path algebra of `1 -> 2`.
    pub fn a2() -> Self {
        AlgebraPresentation {
            name: "kA2".into(),
            field: FieldChoice::Rationals,
            vertices: vec!["1".into(), "2".into()],
            arrows: vec![Arrow { label: "a".into(), source: 0, target: 1 }],
            relations: vec![],
            aliases: BTreeMap::from([
                ("P1".to_string(), "x".to_string()),
                ("P2".to_string(), "y".to_string()),
                ("P1>P2".to_string(), "z".to_string()),
            ]),
            length_bound: DEFAULT_LENGTH_BOUND,
        }
    }

    /// `k x k`: two vertices, no arrows.
    pub fn two_points() -> Self {
        AlgebraPresentation {
            name: "kxk".into(),
            field: FieldChoice::Rationals,
            vertices: vec!["1".into(), "2".into()],
            arrows: vec![],
            relations: vec![],
            aliases: BTreeMap::from([("P1".to_string(), "a".to_string()), ("P2".to_string(), "b".to_string())]),
            length_bound: DEFAULT_LENGTH_BOUND,
        }
    }

    /// `k[X]/(X^2)`: one vertex with a loop squaring to zero.
    pub fn dual_numbers() -> Self {
        AlgebraPresentation {
            name: "dual".into(),
            field: FieldChoice::Rationals,
            vertices: vec!["1".into()],
            arrows: vec![Arrow { label: "X".into(), source: 0, target: 0 }],
            relations: vec![vec![(Rational::ONE, vec![0, 0])]],
            aliases: BTreeMap::from([("P1".to_string(), "c".to_string())]),
            length_bound: DEFAULT_LENGTH_BOUND,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "k" | "trivial" => Some(Self::trivial()),
            "kA2" | "A2" | "a2" => Some(Self::a2()),
            "dual" | "dual-numbers" | "dual_numbers" => Some(Self::dual_numbers()),
            "kxk" | "two-points" => Some(Self::two_points()),
            _ => None,
        }
    }

    /// Builtin name or path to an algebra file.
    pub fn resolve(spec: &str) -> Result<Self> {
        match Self::builtin(spec) {
            Some(p) => Ok(p),
            None => Self::load(Path::new(spec)),
        }
    }

    pub fn with_field(mut self, field: FieldChoice) -> Self {
        self.field = field;
        self
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: AlgebraFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_presentation()
    }

    pub fn to_toml(&self) -> String {
        let file = AlgebraFile {
            name: self.name.clone(),
            field: self.field.to_string(),
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| format!("{} : {} -> {}", a.label, self.vertices[a.source], self.vertices[a.target]))
                .collect(),
            relations: self.relations.iter().map(|r| self.format_relation(r)).collect(),
            aliases: self.aliases.clone(),
            length_bound: Some(self.length_bound),
        };
        toml::to_string(&file).expect("algebra serializes")
    }

    fn format_relation(&self, rel: &PathCombination) -> String {
        let mut out = String::new();
        for (i, (c, path)) in rel.iter().enumerate() {
            let word: Vec<&str> = path.iter().map(|&a| self.arrows[a].label.as_str()).collect();
            let (sign, mag) = if c.numer() < 0 { ("-", -*c) } else { ("+", *c) };
            if i == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if mag != Rational::ONE {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(&word.join("."));
        }
        out
    }

    /// Parses `a.b - 2*c.d` against this presentation's arrow labels.
    pub fn parse_relation(&self, text: &str) -> Result<PathCombination> {
        let bad = |msg: &str| Error::Parse(format!("relation `{text}`: {msg}"));
        let mut terms = Vec::new();
        let mut sign = Rational::ONE;
        let mut current = String::new();
        let flush = |tok: &str, sign: Rational, terms: &mut PathCombination| -> Result<()> {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(bad("empty term"));
            }
            let (coef, word) = match tok.split_once('*') {
                Some((c, w)) => (c.trim().parse::<Rational>().map_err(|e| bad(&e))?, w.trim()),
                None => (Rational::ONE, tok),
            };
            let mut path = Vec::new();
            for label in word.split('.') {
                let label = label.trim();
                let idx = self
                    .arrows
                    .iter()
                    .position(|a| a.label == label)
                    .ok_or_else(|| bad(&format!("unknown arrow `{label}`")))?;
                path.push(idx);
            }
            terms.push((sign * coef, path));
            Ok(())
        };
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let mut seen_any = false;
        while i < chars.len() {
            let c = chars[i];
            if (c == '+' || c == '-') && !current.trim().is_empty() {
                flush(&current, sign, &mut terms)?;
                current.clear();
                sign = if c == '-' { -Rational::ONE } else { Rational::ONE };
            } else if (c == '+' || c == '-') && current.trim().is_empty() {
                if c == '-' {
                    sign = -sign;
                }
            } else {
                current.push(c);
                seen_any = true;
            }
            i += 1;
        }
        if !seen_any {
            return Err(bad("empty relation"));
        }
        flush(&current, sign, &mut terms)?;
        Ok(terms)
    }

    fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidAlgebra("no vertices".into()));
        }
        for a in &self.arrows {
            if a.source >= self.vertices.len() || a.target >= self.vertices.len() {
                return Err(Error::InvalidAlgebra(format!("arrow {} has an unknown endpoint", a.label)));
            }
        }
        for rel in &self.relations {
            if rel.is_empty() {
                return Err(Error::InvalidAlgebra("empty relation".into()));
            }
            let mut ends = None;
            for (_, path) in rel {
                if path.len() < 2 {
                    return Err(Error::InvalidAlgebra(format!(
                        "relation term of length {} (admissible relations use paths of length at least 2)",
                        path.len()
                    )));
                }
                for w in path.windows(2) {
                    if self.arrows[w[0]].target != self.arrows[w[1]].source {
                        return Err(Error::InvalidAlgebra("relation contains a non-composable path".into()));
                    }
                }
                let e = (self.arrows[path[0]].source, self.arrows[*path.last().unwrap()].target);
                if *ends.get_or_insert(e) != e {
                    return Err(Error::InvalidAlgebra("relation terms have different endpoints".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct AlgebraFile {
    name: String,
    field: String,
    vertices: Vec<String>,
    #[serde(default)]
    arrows: Vec<String>,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
    #[serde(default)]
    length_bound: Option<usize>,
}

impl AlgebraFile {
    fn into_presentation(self) -> Result<AlgebraPresentation> {
        let field: FieldChoice = self.field.parse().map_err(Error::Parse)?;
        let mut p = AlgebraPresentation {
            name: self.name,
            field,
            vertices: self.vertices,
            arrows: Vec::new(),
            relations: Vec::new(),
            aliases: self.aliases,
            length_bound: self.length_bound.unwrap_or(DEFAULT_LENGTH_BOUND),
        };
        for spec in &self.arrows {
            let (label, ends) = spec
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("arrow `{spec}`: expected `label : source -> target`")))?;
            let (s, t) = ends
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("arrow `{spec}`: missing `->`")))?;
            let source = p
                .vertex_index(s.trim())
                .ok_or_else(|| Error::Parse(format!("arrow `{spec}`: unknown vertex `{}`", s.trim())))?;
            let target = p
                .vertex_index(t.trim())
                .ok_or_else(|| Error::Parse(format!("arrow `{spec}`: unknown vertex `{}`", t.trim())))?;
            p.arrows.push(Arrow { label: label.trim().to_string(), source, target });
        }
        for r in &self.relations {
            let rel = p.parse_relation(r)?;
            p.relations.push(rel);
        }
        p.validate()?;
        Ok(p)
    }
}

/// A basis element of the algebra: a path in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisPath {
    pub source: usize,
    pub target: usize,
    pub arrows: Vec<usize>,
}

impl BasisPath {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// Sparse algebra element: (basis index, coefficient) pairs.
pub type Elem<F> = Vec<(usize, F)>;

#[derive(Debug, Clone)]
pub struct Algebra<F: Field> {
    pub presentation: AlgebraPresentation,
    basis: Vec<BasisPath>,
    mult: Vec<Vec<Elem<F>>>,
    between: Vec<Vec<Vec<usize>>>,
    idempotents: Vec<usize>,
    nilpotency: usize,
}

fn concat(p: &BasisPath, q: &BasisPath) -> Option<BasisPath> {
    if p.target != q.source {
        return None;
    }
    let mut arrows = p.arrows.clone();
    arrows.extend_from_slice(&q.arrows);
    Some(BasisPath { source: p.source, target: q.target, arrows })
}

impl<F: Field> Algebra<F> {
    pub fn new(presentation: AlgebraPresentation) -> Result<Self> {
        presentation.validate()?;
        let nv = presentation.vertices.len();
        let bound = presentation.length_bound.max(1);

        // all paths up to the length bound, grouped by length
        let mut by_len: Vec<Vec<BasisPath>> =
            vec![(0..nv).map(|v| BasisPath { source: v, target: v, arrows: vec![] }).collect()];
        let mut total = nv;
        for len in 1..=bound {
            let mut next = Vec::new();
            for p in &by_len[len - 1] {
                for (ai, a) in presentation.arrows.iter().enumerate() {
                    if a.source == p.target {
                        let mut arrows = p.arrows.clone();
                        arrows.push(ai);
                        next.push(BasisPath { source: p.source, target: a.target, arrows });
                    }
                }
            }
            total += next.len();
            if total > MAX_PATHS {
                return Err(Error::ResourceLimit(format!(
                    "more than {MAX_PATHS} paths of length at most {bound}"
                )));
            }
            by_len.push(next);
        }
        let all: Vec<BasisPath> = by_len.iter().flatten().cloned().collect();
        let index: HashMap<BasisPath, usize> = all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

        let rels: Vec<Vec<(F, BasisPath)>> = presentation
            .relations
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(c, path)| {
                        let coef = F::from_rational(*c).ok_or_else(|| {
                            Error::InvalidAlgebra(format!("coefficient {c} is not defined over {}", F::name()))
                        })?;
                        let a0 = &presentation.arrows[path[0]];
                        let last = &presentation.arrows[*path.last().unwrap()];
                        Ok((coef, BasisPath { source: a0.source, target: last.target, arrows: path.clone() }))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        // ideal generators u.r.v whose terms all fit under the bound
        let ideal_rows = |max_len: usize| -> Vec<Vec<(BasisPath, F)>> {
            let mut rows = Vec::new();
            for rel in &rels {
                let rl_max = rel.iter().map(|(_, p)| p.len()).max().unwrap_or(0);
                let rl_min = rel.iter().map(|(_, p)| p.len()).min().unwrap_or(0);
                let (s, t) = (rel[0].1.source, rel[0].1.target);
                for lu in 0..=bound {
                    for u in by_len[lu].iter().filter(|u| u.target == s) {
                        for lv in 0..=bound {
                            if lu + lv + rl_min > max_len {
                                break;
                            }
                            for v in by_len[lv].iter().filter(|v| v.source == t) {
                                let mut row = Vec::new();
                                for (c, p) in rel {
                                    let up = concat(u, p).unwrap();
                                    let upv = concat(&up, v).unwrap();
                                    if upv.len() <= max_len {
                                        row.push((upv, *c));
                                    }
                                }
                                if lu + lv + rl_max <= bound || max_len < bound {
                                    rows.push(row);
                                }
                            }
                        }
                    }
                }
            }
            rows
        };

        // smallest n with every path of length n inside the ideal
        let full_rows = ideal_rows(bound);
        let mut m = Matrix::<F>::zeros(full_rows.len(), all.len());
        for (i, row) in full_rows.iter().enumerate() {
            for (p, c) in row {
                m[(i, index[p])] += *c;
            }
        }
        m.rref_in_place();
        let in_ideal = |path: &BasisPath| -> bool {
            let mut v = vec![F::zero(); all.len()];
            v[index[path]] = F::one();
            reduce_against(&m, &mut v);
            v.iter().all(|x| x.is_zero())
        };
        let mut nilpotency = None;
        for n in 1..=bound {
            if by_len[n].iter().all(in_ideal) {
                nilpotency = Some(n);
                break;
            }
        }
        let n = nilpotency.ok_or_else(|| {
            Error::InvalidAlgebra(format!(
                "paths do not vanish below length {bound}; the algebra is infinite dimensional or the length bound is too small"
            ))
        })?;

        // quotient of paths shorter than n, columns ordered longest first
        let short: Vec<BasisPath> = (0..n).rev().flat_map(|l| by_len[l].iter().cloned()).collect();
        let short_index: HashMap<BasisPath, usize> =
            short.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let trunc_rows = ideal_rows(n - 1);
        let mut q = Matrix::<F>::zeros(trunc_rows.len(), short.len());
        for (i, row) in trunc_rows.iter().enumerate() {
            for (p, c) in row {
                if let Some(&j) = short_index.get(p) {
                    q[(i, j)] += *c;
                }
            }
        }
        let pivots = q.rref_in_place();
        let mut is_pivot = vec![false; short.len()];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        // basis in ascending length order
        let mut basis_cols: Vec<usize> = (0..short.len()).filter(|&c| !is_pivot[c]).collect();
        basis_cols.sort_by_key(|&c| (short[c].len(), short[c].source, short[c].target, short[c].arrows.clone()));
        let basis: Vec<BasisPath> = basis_cols.iter().map(|&c| short[c].clone()).collect();
        let col_to_basis: HashMap<usize, usize> = basis_cols.iter().enumerate().map(|(b, &c)| (c, b)).collect();

        let reduce_path = |p: &BasisPath| -> Elem<F> {
            if p.len() >= n {
                return Vec::new();
            }
            let c = short_index[p];
            if let Some(&b) = col_to_basis.get(&c) {
                return vec![(b, F::one())];
            }
            let row = pivots.iter().position(|&pc| pc == c).expect("pivot row");
            let mut out = Vec::new();
            for (&col, &b) in &col_to_basis {
                let v = q[(row, col)];
                if !v.is_zero() {
                    out.push((b, -v));
                }
            }
            out.sort_by_key(|(b, _)| *b);
            out
        };

        let dim = basis.len();
        let mut mult = vec![vec![Vec::new(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                if let Some(p) = concat(&basis[i], &basis[j]) {
                    mult[i][j] = reduce_path(&p);
                }
            }
        }
        let mut between = vec![vec![Vec::new(); nv]; nv];
        for (b, p) in basis.iter().enumerate() {
            between[p.source][p.target].push(b);
        }
        let idempotents = (0..nv)
            .map(|v| basis.iter().position(|p| p.is_trivial() && p.source == v).expect("trivial path survives"))
            .collect();
        Ok(Algebra { presentation, basis, mult, between, idempotents, nilpotency: n })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.presentation.vertices.len()
    }

    pub fn basis(&self) -> &[BasisPath] {
        &self.basis
    }

    /// Basis indices of paths from `u` to `v`.
    pub fn paths_between(&self, u: usize, v: usize) -> &[usize] {
        &self.between[u][v]
    }

    pub fn idempotent(&self, v: usize) -> usize {
        self.idempotents[v]
    }

    /// Every path of this length or longer vanishes.
    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &Elem<F> {
        &self.mult[i][j]
    }

    pub fn path_label(&self, b: usize) -> String {
        let p = &self.basis[b];
        if p.is_trivial() {
            format!("e{}", self.presentation.vertices[p.source])
        } else {
            p.arrows.iter().map(|&a| self.presentation.arrows[a].label.clone()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        &self.presentation.vertices[v]
    }
}

fn reduce_against<F: Field>(rref: &Matrix<F>, v: &mut [F]) {
    for i in 0..rref.rows() {
        let row = rref.row(i);
        let Some(p) = row.iter().position(|x| !x.is_zero()) else { break };
        let f = v[p];
        if f.is_zero() {
            continue;
        }
        for (vj, &rj) in v.iter_mut().zip(row) {
            if !rj.is_zero() {
                *vj -= f * rj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rational};

    #[test]
    fn a2_has_three_paths() {
        let a = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.paths_between(0, 1).len(), 1);
        assert_eq!(a.paths_between(1, 0).len(), 0);
        assert_eq!(a.nilpotency(), 2);
    }

    #[test]
    fn dual_numbers_square_zero() {
        let a = Algebra::<Rational>::new(AlgebraPresentation::dual_numbers()).unwrap();
        assert_eq!(a.dim(), 2);
        let x = a.paths_between(0, 0).iter().copied().find(|&b| !a.basis()[b].is_trivial()).unwrap();
        assert!(a.mul_basis(x, x).is_empty());
        let e = a.idempotent(0);
        assert_eq!(a.mul_basis(e, x), &vec![(x, Rational::ONE)]);
    }

    #[test]
    fn commutative_square_identifies_paths() {
        let text = r#"
            name = "square"
            field = "Q"
            vertices = ["1", "2", "3", "4"]
            arrows = ["a : 1 -> 2", "b : 2 -> 4", "c : 1 -> 3", "d : 3 -> 4"]
            relations = ["a.b - c.d"]
        "#;
        let p = AlgebraPresentation::parse(text).unwrap();
        let a = Algebra::<Fp>::new(p).unwrap();
        // e1..e4, a, b, c, d and one path 1 -> 4
        assert_eq!(a.dim(), 9);
        assert_eq!(a.paths_between(0, 3).len(), 1);
    }

    #[test]
    fn loop_without_relation_rejected() {
        let text = r#"
            name = "poly"
            field = "Q"
            vertices = ["1"]
            arrows = ["X : 1 -> 1"]
        "#;
        let p = AlgebraPresentation::parse(text).unwrap();
        assert!(matches!(Algebra::<Rational>::new(p), Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn relation_must_be_admissible() {
        let text = r#"
            name = "bad"
            field = "Q"
            vertices = ["1", "2"]
            arrows = ["a : 1 -> 2"]
            relations = ["a"]
        "#;
        assert!(AlgebraPresentation::parse(text).is_err());
    }

    #[test]
    fn relation_round_trip() {
        let p = AlgebraPresentation::dual_numbers();
        let again = AlgebraPresentation::parse(&p.to_toml()).unwrap();
        assert_eq!(again.relations, p.relations);
        let rel = p.parse_relation("X.X - 1/2*X.X").unwrap();
        assert_eq!(rel[1].0, Rational::new(-1, 2));
    }
}
