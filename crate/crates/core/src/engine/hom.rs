//! Morphisms in the homotopy category: chain maps modulo null-homotopic maps.

use super::algebra::Algebra;
use super::complex::{elem_mul, Complex, GradedMap, PMat};
use crate::field::Field;
use crate::linalg::{independent_subset, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

type Coord = (i32, usize, usize, usize);

/// Coordinates of degree-`k` maps `X -> Y`: one per (degree, source summand,
/// target summand, basis path between their vertices).
#[derive(Debug, Clone)]
pub struct MapSpace {
    pub degree: i32,
    coords: Vec<Coord>,
    index: HashMap<Coord, usize>,
}

impl MapSpace {
    pub fn new<F: Field>(alg: &Algebra<F>, x: &Complex<F>, y: &Complex<F>, k: i32) -> Self {
        let mut coords = Vec::new();
        if !x.is_zero() && !y.is_zero() {
            for i in x.degrees() {
                let (xs, ys) = (x.term(i), y.term(i + k));
                for (r, &u) in xs.iter().enumerate() {
                    for (c, &v) in ys.iter().enumerate() {
                        for &b in alg.paths_between(u, v) {
                            coords.push((i, r, c, b));
                        }
                    }
                }
            }
        }
        let index = coords.iter().enumerate().map(|(j, &c)| (c, j)).collect();
        MapSpace { degree: k, coords, index }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_vector<F: Field>(&self, f: &GradedMap<F>) -> Vec<F> {
        debug_assert_eq!(f.degree, self.degree);
        let mut v = vec![F::zero(); self.dim()];
        for i in f.degrees() {
            let m = f.comp_ref(i).unwrap();
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    for &(b, coef) in m.get(r, c) {
                        let j = self.index[&(i, r, c, b)];
                        v[j] += coef;
                    }
                }
            }
        }
        v
    }

    pub fn from_vector<F: Field>(&self, v: &[F], x: &Complex<F>, y: &Complex<F>) -> GradedMap<F> {
        let mut comps: HashMap<i32, PMat<F>> = HashMap::new();
        for (j, &(i, r, c, b)) in self.coords.iter().enumerate() {
            if v[j].is_zero() {
                continue;
            }
            let m = comps.entry(i).or_insert_with(|| PMat::zero(x.term(i), y.term(i + self.degree)));
            m.add_to(r, c, &vec![(b, v[j])]);
        }
        let mut out = GradedMap::zero(self.degree);
        for (i, m) in comps {
            out.set(i, m);
        }
        out
    }

    pub fn unit<F: Field>(&self, j: usize, x: &Complex<F>, y: &Complex<F>) -> GradedMap<F> {
        let mut v = vec![F::zero(); self.dim()];
        v[j] = F::one();
        self.from_vector(&v, x, y)
    }
}

/// Matrix of `g -> d_X g - (-1)^k g d_Y` from degree-`k` to degree-`k+1` maps.
pub fn differential_matrix<F: Field>(
    alg: &Algebra<F>,
    x: &Complex<F>,
    y: &Complex<F>,
    src: &MapSpace,
    tgt: &MapSpace,
) -> Matrix<F> {
    let k = src.degree;
    debug_assert_eq!(tgt.degree, k + 1);
    let sign = if k.rem_euclid(2) == 0 { -F::one() } else { F::one() };
    let mut m = Matrix::zeros(tgt.dim(), src.dim());
    for (j, &(i, r, c, b)) in src.coords.iter().enumerate() {
        let unit = vec![(b, F::one())];
        if let Some(dx) = x.diff_ref(i - 1) {
            for r2 in 0..dx.rows() {
                let e = dx.get(r2, r);
                if e.is_empty() {
                    continue;
                }
                for (b2, coef) in elem_mul(alg, e, &unit) {
                    m[(tgt.index[&(i - 1, r2, c, b2)], j)] += coef;
                }
            }
        }
        if let Some(dy) = y.diff_ref(i + k) {
            for c2 in 0..dy.cols() {
                let e = dy.get(c, c2);
                if e.is_empty() {
                    continue;
                }
                for (b2, coef) in elem_mul(alg, &unit, e) {
                    m[(tgt.index[&(i, r, c2, b2)], j)] += sign * coef;
                }
            }
        }
    }
    m
}

/// `Hom_K(X, Y)` with a basis of chain-map representatives.
#[derive(Debug, Clone)]
pub struct HomSpace<F: Field> {
    pub space: MapSpace,
    basis: Vec<Vec<F>>,
    solver: Matrix<F>,
    n_boundaries: usize,
}

impl<F: Field> HomSpace<F> {
    pub fn new(alg: &Algebra<F>, x: &Complex<F>, y: &Complex<F>) -> Self {
        let c_m1 = MapSpace::new(alg, x, y, -1);
        let c0 = MapSpace::new(alg, x, y, 0);
        let c1 = MapSpace::new(alg, x, y, 1);
        let d0 = differential_matrix(alg, x, y, &c0, &c1);
        let dm1 = differential_matrix(alg, x, y, &c_m1, &c0);
        let cycles = if c1.dim() == 0 {
            (0..c0.dim())
                .map(|j| {
                    let mut v = vec![F::zero(); c0.dim()];
                    v[j] = F::one();
                    v
                })
                .collect()
        } else {
            d0.kernel()
        };
        let bcols: Vec<Vec<F>> = (0..dm1.cols()).map(|j| dm1.column(j)).collect();
        let bidx = independent_subset(c0.dim(), &bcols);
        let boundaries: Vec<Vec<F>> = bidx.iter().map(|&j| bcols[j].clone()).collect();
        let mut all = boundaries.clone();
        all.extend(cycles.iter().cloned());
        let chosen = independent_subset(c0.dim(), &all);
        let nb = boundaries.len();
        let basis: Vec<Vec<F>> = chosen.iter().filter(|&&j| j >= nb).map(|&j| all[j].clone()).collect();
        let mut cols = boundaries;
        cols.extend(basis.iter().cloned());
        let solver = Matrix::from_columns(c0.dim(), &cols).expect("consistent column lengths");
        HomSpace { space: c0, basis, solver, n_boundaries: nb }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_vectors(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn basis_maps(&self, x: &Complex<F>, y: &Complex<F>) -> Vec<GradedMap<F>> {
        self.basis.iter().map(|v| self.space.from_vector(v, x, y)).collect()
    }

    pub fn map_from_coords(&self, coords: &[F], x: &Complex<F>, y: &Complex<F>) -> GradedMap<F> {
        let mut v = vec![F::zero(); self.space.dim()];
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (vi, &bi) in v.iter_mut().zip(b) {
                *vi += *c * bi;
            }
        }
        self.space.from_vector(&v, x, y)
    }

    /// Coordinates of the homotopy classes of chain maps, one column per map.
    pub fn class_coords_many(&self, maps: &[GradedMap<F>]) -> Option<Matrix<F>> {
        let cols: Vec<Vec<F>> = maps.iter().map(|f| self.space.to_vector(f)).collect();
        let rhs = Matrix::from_columns(self.space.dim(), &cols).ok()?;
        let sol = self.solver.solve_many(&rhs).ok()??;
        let mut out = Matrix::zeros(self.dim(), maps.len());
        for i in 0..self.dim() {
            for j in 0..maps.len() {
                out[(i, j)] = sol[(self.n_boundaries + i, j)];
            }
        }
        Some(out)
    }

    pub fn class_coords(&self, f: &GradedMap<F>) -> Option<Vec<F>> {
        self.class_coords_many(std::slice::from_ref(f)).map(|m| m.column(0))
    }

    pub fn is_nullhomotopic(&self, f: &GradedMap<F>) -> bool {
        self.class_coords(f).is_some_and(|v| v.iter().all(|x| x.is_zero()))
    }
}

pub fn hom_dim<F: Field>(alg: &Algebra<F>, x: &Complex<F>, y: &Complex<F>) -> usize {
    HomSpace::new(alg, x, y).dim()
}

/// Mutually inverse homotopy equivalences.
#[derive(Debug, Clone)]
pub struct IsoWitness<F: Field> {
    pub forward: GradedMap<F>,
    pub backward: GradedMap<F>,
}

fn random_coeff<F: Field>(rng: &mut ChaCha8Rng) -> F {
    F::from_i64(rng.random_range(-20i64..=20))
}

/// Searches for a homotopy equivalence `X -> Y`.
///
/// A random class `f` is fixed; `g`, `K1`, `K2` with `g` a chain map,
/// `f g - 1 = dK1 + K1 d` and `g f - 1 = dK2 + K2 d` then form a linear system.
pub fn find_iso<F: Field>(alg: &Algebra<F>, x: &Complex<F>, y: &Complex<F>, seed: u64) -> Option<IsoWitness<F>> {
    let nv = alg.num_vertices();
    if x.euler_vector(nv) != y.euler_vector(nv) {
        return None;
    }
    let hxy = HomSpace::new(alg, x, y);
    let hyx = HomSpace::new(alg, y, x);
    if hxy.dim() != hyx.dim() {
        return None;
    }
    let hxx_dim = hom_dim(alg, x, x);
    if hxx_dim != hxy.dim() {
        return None;
    }
    if hxx_dim == 0 {
        // both are contractible
        if hom_dim(alg, y, y) != 0 {
            return None;
        }
        return Some(IsoWitness { forward: GradedMap::zero(0), backward: GradedMap::zero(0) });
    }

    let g_space = MapSpace::new(alg, y, x, 0);
    let g_next = MapSpace::new(alg, y, x, 1);
    let k1 = MapSpace::new(alg, x, x, -1);
    let k2 = MapSpace::new(alg, y, y, -1);
    let exx = MapSpace::new(alg, x, x, 0);
    let eyy = MapSpace::new(alg, y, y, 0);
    let dg = differential_matrix(alg, y, x, &g_space, &g_next);
    let dk1 = differential_matrix(alg, x, x, &k1, &exx);
    let dk2 = differential_matrix(alg, y, y, &k2, &eyy);
    let g_units: Vec<GradedMap<F>> = (0..g_space.dim()).map(|j| g_space.unit(j, y, x)).collect();

    let rows = g_next.dim() + exx.dim() + eyy.dim();
    let cols = g_space.dim() + k1.dim() + k2.dim();
    let mut rhs = vec![F::zero(); rows];
    let idx = exx.to_vector(&GradedMap::identity(alg, x));
    let idy = eyy.to_vector(&GradedMap::identity(alg, y));
    rhs[g_next.dim()..g_next.dim() + exx.dim()].copy_from_slice(&idx);
    rhs[g_next.dim() + exx.dim()..].copy_from_slice(&idy);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..8 {
        let coeffs: Vec<F> = (0..hxy.dim()).map(|_| random_coeff(&mut rng)).collect();
        let f = hxy.map_from_coords(&coeffs, x, y);
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..dg.rows() {
            for j in 0..dg.cols() {
                m[(i, j)] = dg[(i, j)];
            }
        }
        let r0 = g_next.dim();
        let r1 = r0 + exx.dim();
        for (j, gu) in g_units.iter().enumerate() {
            let fg = exx.to_vector(&f.then(alg, gu));
            for (i, v) in fg.into_iter().enumerate() {
                m[(r0 + i, j)] = v;
            }
            let gf = eyy.to_vector(&gu.then(alg, &f));
            for (i, v) in gf.into_iter().enumerate() {
                m[(r1 + i, j)] = v;
            }
        }
        let c1 = g_space.dim();
        for i in 0..dk1.rows() {
            for j in 0..dk1.cols() {
                m[(r0 + i, c1 + j)] = -dk1[(i, j)];
            }
        }
        let c2 = c1 + k1.dim();
        for i in 0..dk2.rows() {
            for j in 0..dk2.cols() {
                m[(r1 + i, c2 + j)] = -dk2[(i, j)];
            }
        }
        if let Ok(Some(sol)) = m.solve(&rhs) {
            let g = g_space.from_vector(&sol[..c1], y, x);
            return Some(IsoWitness { forward: f, backward: g });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::algebra::AlgebraPresentation;
    use crate::engine::complex::cone;
    use crate::field::{Fp, Rational};

    fn stalk(v: usize) -> Complex<Rational> {
        Complex::stalk(&[v], 0)
    }

    #[test]
    fn a2_stalk_homs() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        assert_eq!(hom_dim(&alg, &stalk(0), &stalk(1)), 1);
        assert_eq!(hom_dim(&alg, &stalk(1), &stalk(0)), 0);
        assert_eq!(hom_dim(&alg, &stalk(0), &stalk(0)), 1);
    }

    #[test]
    fn shifted_stalks_have_no_maps() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        for k in [-2, -1, 1, 2] {
            assert_eq!(hom_dim(&alg, &stalk(0), &stalk(0).shift(k)), 0);
        }
    }

    #[test]
    fn dual_numbers_endomorphisms() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::dual_numbers()).unwrap();
        assert_eq!(hom_dim(&alg, &stalk(0), &stalk(0)), 2);
    }

    #[test]
    fn iso_between_cone_and_itself_shifted_back() {
        let alg = Algebra::<Fp>::new(AlgebraPresentation::a2()).unwrap();
        let x = Complex::<Fp>::stalk(&[0], 0);
        let y = Complex::<Fp>::stalk(&[1], 0);
        let h = HomSpace::new(&alg, &x, &y);
        let f = h.basis_maps(&x, &y).remove(0);
        let z = cone(&alg, &x, &y, &f);
        let z2 = z.shift(1).shift(-1);
        let w = find_iso(&alg, &z, &z2, 1).expect("isomorphic");
        assert!(w.forward.is_chain_map(&alg, &z, &z2));
        assert!(w.backward.is_chain_map(&alg, &z2, &z));
        assert!(find_iso(&alg, &z, &x, 1).is_none());
    }

    #[test]
    fn contractible_cone_is_iso_to_zero() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        let x = stalk(0);
        let id = GradedMap::identity(&alg, &x);
        let c = cone(&alg, &x, &x, &id);
        assert!(find_iso(&alg, &c, &Complex::zero(), 0).is_some());
        assert_eq!(hom_dim(&alg, &c, &c), 0);
    }

    #[test]
    fn nullhomotopic_detection() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        let x = stalk(0);
        let id = GradedMap::identity(&alg, &x);
        let c = cone(&alg, &x, &x, &id);
        let idc = GradedMap::identity(&alg, &c);
        assert!(HomSpace::new(&alg, &c, &c).is_nullhomotopic(&idc));
        let h = HomSpace::new(&alg, &x, &x);
        assert!(!h.is_nullhomotopic(&id));
    }
}
