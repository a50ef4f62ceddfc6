//! Krull-Schmidt decomposition by splitting idempotents of `End_K(X)`.

use super::algebra::Algebra;
use super::complex::{Complex, GradedMap, PMat};
use super::hom::HomSpace;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `End_K(X)` as a finite dimensional algebra in a basis of chain maps.
pub struct EndAlgebra<F: Field> {
    pub hom: HomSpace<F>,
    pub maps: Vec<GradedMap<F>>,
    /// `structure[i][j]` = coordinates of `maps[i]` followed by `maps[j]`.
    pub structure: Vec<Vec<Vec<F>>>,
    pub one: Vec<F>,
}

impl<F: Field> EndAlgebra<F> {
    pub fn new(alg: &Algebra<F>, x: &Complex<F>) -> Result<Self> {
        let hom = HomSpace::new(alg, x, x);
        let maps = hom.basis_maps(x, x);
        let n = maps.len();
        let mut products = Vec::with_capacity(n * n);
        for a in &maps {
            for b in &maps {
                products.push(a.then(alg, b));
            }
        }
        products.push(GradedMap::identity(alg, x));
        let coords = hom
            .class_coords_many(&products)
            .ok_or_else(|| Error::Internal("composite of chain maps is not a cycle".into()))?;
        let mut structure = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            for j in 0..n {
                structure[i][j] = coords.column(i * n + j);
            }
        }
        let one = coords.column(n * n);
        Ok(EndAlgebra { hom, maps, structure, one })
    }

    pub fn dim(&self) -> usize {
        self.maps.len()
    }

    pub fn mul(&self, a: &[F], b: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut out = vec![F::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let s = a[i] * b[j];
                for (o, &c) in out.iter_mut().zip(&self.structure[i][j]) {
                    if !c.is_zero() {
                        *o += s * c;
                    }
                }
            }
        }
        out
    }

    /// Dimension of the semisimple quotient, via the rank of the trace form.
    ///
    /// Valid in characteristic zero and in characteristic larger than `dim`.
    pub fn semisimple_rank(&self) -> usize {
        let n = self.dim();
        let traces: Vec<F> =
            (0..n).map(|k| (0..n).fold(F::zero(), |acc, j| acc + self.structure[k][j][j])).collect();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = self.structure[i][j].iter().zip(&traces).fold(F::zero(), |acc, (&c, &t)| acc + c * t);
            }
        }
        g.rank()
    }

    fn eval_poly(&self, poly: &[F], a: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut acc = vec![F::zero(); n];
        for &c in poly.iter().rev() {
            acc = self.mul(&acc, a);
            for (x, &o) in acc.iter_mut().zip(&self.one) {
                *x += c * o;
            }
        }
        acc
    }

    /// Monic minimal polynomial of `a`, constant term first.
    fn min_poly(&self, a: &[F]) -> Vec<F> {
        let n = self.dim();
        let mut powers: Vec<Vec<F>> = vec![self.one.clone()];
        loop {
            let next = self.mul(powers.last().unwrap(), a);
            let m = Matrix::from_columns(n, &powers).expect("equal lengths");
            if let Ok(Some(c)) = m.solve(&next) {
                let mut poly: Vec<F> = c.into_iter().map(|v| -v).collect();
                poly.push(F::one());
                return poly;
            }
            powers.push(next);
            if powers.len() > n + 1 {
                unreachable!("minimal polynomial degree exceeds dimension");
            }
        }
    }

    /// A nontrivial idempotent from the primary decomposition of `a`, if any.
    fn fitting_idempotent(&self, a: &[F]) -> Option<Vec<F>> {
        let mu = self.min_poly(a);
        for lambda in F::roots(&mu) {
            let lin = vec![-lambda, F::one()];
            let mut g = mu.clone();
            let mut h = vec![F::one()];
            loop {
                let (q, r) = poly_divmod(&g, &lin);
                if !r.iter().all(|c| c.is_zero()) {
                    break;
                }
                g = q;
                h = poly_mul(&h, &lin);
            }
            if g.len() <= 1 {
                continue;
            }
            let (_, _, v) = poly_ext_gcd(&h, &g);
            let e_poly = poly_mul(&v, &g);
            let e = self.eval_poly(&e_poly, a);
            let e2 = self.mul(&e, &e);
            if e2 == e && e.iter().any(|c| !c.is_zero()) && e != self.one {
                return Some(e);
            }
        }
        None
    }

    pub fn find_idempotent(&self, seed: u64) -> Option<Vec<F>> {
        let n = self.dim();
        let unit = |i: usize| {
            let mut v = vec![F::zero(); n];
            v[i] = F::one();
            v
        };
        let mut candidates: Vec<Vec<F>> = (0..n).map(unit).collect();
        for i in 0..n {
            for j in i + 1..n {
                let mut v = unit(i);
                v[j] = F::one();
                candidates.push(v);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..24 {
            candidates.push((0..n).map(|_| F::from_i64(rng.random_range(-9i64..=9))).collect());
        }
        candidates.iter().find_map(|a| self.fitting_idempotent(a))
    }
}

fn poly_trim<F: Field>(p: &mut Vec<F>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(F::zero());
    }
}

fn poly_mul<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_sub<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let n = a.len().max(b.len());
    let mut out: Vec<F> = (0..n)
        .map(|i| a.get(i).copied().unwrap_or(F::zero()) - b.get(i).copied().unwrap_or(F::zero()))
        .collect();
    poly_trim(&mut out);
    out
}

fn poly_divmod<F: Field>(a: &[F], b: &[F]) -> (Vec<F>, Vec<F>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    let lead_inv = b.last().unwrap().inv().expect("nonzero divisor");
    if r.len() < b.len() {
        return (vec![F::zero()], r);
    }
    let mut q = vec![F::zero(); r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let c = r[k + b.len() - 1] * lead_inv;
        q[k] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[k + j] -= c * bj;
        }
    }
    r.truncate(b.len() - 1);
    poly_trim(&mut r);
    poly_trim(&mut q);
    (q, r)
}

/// `(g, u, v)` with `u a + v b = g`, `g` monic.
fn poly_ext_gcd<F: Field>(a: &[F], b: &[F]) -> (Vec<F>, Vec<F>, Vec<F>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut u0, mut u1) = (vec![F::one()], vec![F::zero()]);
    let (mut v0, mut v1) = (vec![F::zero()], vec![F::one()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divmod(&r0, &r1);
        let u2 = poly_sub(&u0, &poly_mul(&q, &u1));
        let v2 = poly_sub(&v0, &poly_mul(&q, &v1));
        r0 = std::mem::replace(&mut r1, r);
        u0 = std::mem::replace(&mut u1, u2);
        v0 = std::mem::replace(&mut v1, v2);
    }
    let lead = r0.last().unwrap().inv().expect("nonzero gcd");
    let scale = |p: &[F]| -> Vec<F> { p.iter().map(|&c| c * lead).collect() };
    (scale(&r0), scale(&u0), scale(&v0))
}

/// Turns a homotopy idempotent into a strict idempotent chain map.
fn strict_idempotent<F: Field>(alg: &Algebra<F>, e: &GradedMap<F>) -> Result<GradedMap<F>> {
    let mut e = e.clone();
    for _ in 0..32 {
        let e2 = e.then(alg, &e);
        if e2 == e {
            return Ok(e);
        }
        let e3 = e2.then(alg, &e);
        e = e2.scale(F::from_i64(3)).sub(&e3.scale(F::from_i64(2)));
    }
    Err(Error::Internal("idempotent lifting did not converge; complex is probably not minimal".into()))
}

/// Image of a strict idempotent chain map `e` on a minimal complex.
fn split_image<F: Field>(alg: &Algebra<F>, x: &Complex<F>, e: &GradedMap<F>) -> Result<Complex<F>> {
    let mut terms = Vec::new();
    let mut alphas: Vec<PMat<F>> = Vec::new();
    let mut betas: Vec<PMat<F>> = Vec::new();
    for i in x.degrees() {
        let xt = x.term(i);
        let ei = e.comp(x, x, i);
        let mut vertices: Vec<usize> = xt.to_vec();
        vertices.sort_unstable();
        vertices.dedup();
        let mut y_terms = Vec::new();
        // (y index, x index, scalar) entries
        let mut a0 = Vec::new();
        let mut b0 = Vec::new();
        for v in vertices {
            let idx: Vec<usize> = (0..xt.len()).filter(|&r| xt[r] == v).collect();
            let mut m = Matrix::<F>::zeros(idx.len(), idx.len());
            for (a, &r) in idx.iter().enumerate() {
                for (b, &c) in idx.iter().enumerate() {
                    m[(a, b)] = ei.scalar_part(alg, r, c);
                }
            }
            let (red, pivots) = m.rref();
            for (row, &p) in pivots.iter().enumerate() {
                let yi = y_terms.len();
                y_terms.push(v);
                for (b, &c) in idx.iter().enumerate() {
                    let s = red[(row, b)];
                    if !s.is_zero() {
                        a0.push((yi, c, s));
                    }
                }
                for (a, &r) in idx.iter().enumerate() {
                    let s = m[(a, p)];
                    if !s.is_zero() {
                        b0.push((r, yi, s));
                    }
                }
            }
        }
        let mut alpha0 = PMat::zero(&y_terms, xt);
        for (yi, c, s) in a0 {
            alpha0.set(yi, c, vec![(alg.idempotent(y_terms[yi]), s)]);
        }
        let mut beta0 = PMat::zero(xt, &y_terms);
        for (r, yi, s) in b0 {
            beta0.set(r, yi, vec![(alg.idempotent(y_terms[yi]), s)]);
        }
        let alpha = alpha0.mul(alg, &ei);
        let beta = ei.mul(alg, &beta0);
        let gamma = alpha.mul(alg, &beta);
        let ginv = gamma
            .inverse(alg)
            .ok_or_else(|| Error::Internal("idempotent image map is not invertible modulo the radical".into()))?;
        let alpha = ginv.mul(alg, &alpha);
        debug_assert!(alpha.mul(alg, &beta) == PMat::identity(alg, &y_terms));
        terms.push(y_terms);
        alphas.push(alpha);
        betas.push(beta);
    }
    let diffs: Vec<PMat<F>> = (0..terms.len().saturating_sub(1))
        .map(|k| {
            let d = x.diff(x.lo() + k as i32);
            alphas[k].mul(alg, &d).mul(alg, &betas[k + 1])
        })
        .collect();
    let y = Complex::new(x.lo(), terms, diffs)?;
    debug_assert!(y.check(alg).is_ok());
    Ok(y)
}

/// Whether `End_K(X)` is local (no nontrivial idempotents).
pub fn is_indecomposable<F: Field>(alg: &Algebra<F>, x: &Complex<F>) -> Result<bool> {
    let m = x.minimize(alg);
    if m.is_zero() {
        return Ok(false);
    }
    let end = EndAlgebra::new(alg, &m)?;
    Ok(end.dim() == 1 || end.semisimple_rank() == 1)
}

/// Indecomposable summands of `X` (each minimal), in no particular order.
pub fn decompose<F: Field>(alg: &Algebra<F>, x: &Complex<F>, seed: u64) -> Result<Vec<Complex<F>>> {
    let mut out = Vec::new();
    let mut stack = vec![x.minimize(alg)];
    while let Some(c) = stack.pop() {
        if c.is_zero() {
            continue;
        }
        let end = EndAlgebra::new(alg, &c)?;
        if end.dim() == 1 {
            out.push(c);
            continue;
        }
        let rank = end.semisimple_rank();
        if rank == 1 {
            out.push(c);
            continue;
        }
        let Some(coords) = end.find_idempotent(seed) else {
            return Err(Error::IdempotentSearchFailed { dim: end.dim(), rank, field: F::name() });
        };
        let e = end.hom.map_from_coords(&coords, &c, &c);
        let e = strict_idempotent(alg, &e)?;
        let f = GradedMap::identity(alg, &c).sub(&e);
        let y1 = split_image(alg, &c, &e)?.minimize(alg);
        let y2 = split_image(alg, &c, &f)?.minimize(alg);
        if y1.total_rank() + y2.total_rank() != c.total_rank() {
            return Err(Error::Internal("idempotent split lost summands".into()));
        }
        stack.push(y1);
        stack.push(y2);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::algebra::AlgebraPresentation;
    use crate::engine::complex::cone;
    use crate::engine::hom::{find_iso, HomSpace};
    use crate::field::{Fp, Rational};

    #[test]
    fn sum_of_equal_stalks_splits() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        let x = Complex::stalk(&[0, 0], 0);
        let parts = decompose(&alg, &x, 0).unwrap();
        assert_eq!(parts.len(), 2);
        for p in parts {
            assert!(find_iso(&alg, &p, &Complex::stalk(&[0], 0), 0).is_some());
        }
    }

    #[test]
    fn zero_map_cone_splits_into_target_and_shift() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        let x = Complex::stalk(&[0], 0);
        let y = Complex::stalk(&[1], 0);
        let c = cone(&alg, &x, &y, &GradedMap::zero(0));
        let parts = decompose(&alg, &c, 0).unwrap();
        assert_eq!(parts.len(), 2);
        let labels: Vec<(String, i32)> = parts.iter().map(|p| (p.shape_label(&alg), p.hi())).collect();
        assert!(labels.contains(&("P2".to_string(), 0)));
        assert!(labels.contains(&("P1".to_string(), -1)));
    }

    #[test]
    fn arrow_cone_is_indecomposable() {
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        let x = Complex::stalk(&[0], 0);
        let y = Complex::stalk(&[1], 0);
        let f = HomSpace::new(&alg, &x, &y).basis_maps(&x, &y).remove(0);
        let z = cone(&alg, &x, &y, &f);
        assert!(is_indecomposable(&alg, &z).unwrap());
        assert_eq!(decompose(&alg, &z, 0).unwrap().len(), 1);
    }

    #[test]
    fn dual_number_string_is_indecomposable() {
        let alg = Algebra::<Fp>::new(AlgebraPresentation::dual_numbers()).unwrap();
        let r = Complex::<Fp>::stalk(&[0], 0);
        let e = alg.idempotent(0);
        let xb = alg.paths_between(0, 0).iter().copied().find(|&b| b != e).unwrap();
        let mut d = PMat::zero(&[0], &[0]);
        d.set(0, 0, vec![(xb, Fp::one())]);
        let s = Complex::new(-1, vec![vec![0], vec![0]], vec![d]).unwrap();
        s.check(&alg).unwrap();
        assert!(is_indecomposable(&alg, &s).unwrap());
        assert!(is_indecomposable(&alg, &r).unwrap());
        let both = s.direct_sum(&s.shift(3)).direct_sum(&r);
        assert_eq!(decompose(&alg, &both, 0).unwrap().len(), 3);
    }

    #[test]
    fn twisted_sum_splits_after_base_change() {
        // P1 + P1 with an endomorphism mixing the summands still splits into two stalks
        let alg = Algebra::<Rational>::new(AlgebraPresentation::a2()).unwrap();
        let x = Complex::stalk(&[0], 0);
        let y = Complex::stalk(&[1], 0);
        let f = HomSpace::new(&alg, &x, &y).basis_maps(&x, &y).remove(0);
        let z = cone(&alg, &x, &y, &f);
        let sum = z.direct_sum(&z).direct_sum(&y);
        let parts = decompose(&alg, &sum, 7).unwrap();
        assert_eq!(parts.len(), 3);
        let again: usize = parts.iter().map(|p| decompose(&alg, p, 1).unwrap().len()).sum();
        assert_eq!(again, 3);
    }

    #[test]
    fn polynomial_helpers() {
        let q = |n: i128| Rational::integer(n);
        // (t-1)^2 (t+2)
        let p = poly_mul(&poly_mul(&[q(-1), q(1)], &[q(-1), q(1)]), &[q(2), q(1)]);
        let (quo, rem) = poly_divmod(&p, &[q(2), q(1)]);
        assert_eq!(rem, vec![q(0)]);
        assert_eq!(quo, vec![q(1), q(-2), q(1)]);
        let (g, u, v) = poly_ext_gcd(&quo, &[q(2), q(1)]);
        assert_eq!(g, vec![q(1)]);
        let lhs = poly_sub(&poly_mul(&u, &quo), &poly_mul(&v.iter().map(|&c| -c).collect::<Vec<_>>(), &[q(2), q(1)]));
        assert_eq!(lhs, vec![q(1)]);
    }
}
