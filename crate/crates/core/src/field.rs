//! Exact ground fields: the rationals and a small prime field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Exact field arithmetic used by every linear solve in the engine.
pub trait Field:
    Copy
    + Clone
    + PartialEq
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_rational(q: Rational) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Human-readable field name, e.g. `Q` or `F_32003`.
    fn name() -> String;
    /// All roots of `poly` (coefficients, constant term first) lying in the field.
    fn roots(poly: &[Self]) -> Vec<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// Which ground field a presentation asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldChoice {
    Rationals,
    Prime,
}

impl FieldChoice {
    pub fn name(&self) -> String {
        match self {
            FieldChoice::Rationals => Rational::name(),
            FieldChoice::Prime => Fp::name(),
        }
    }
}

impl FromStr for FieldChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Q" | "q" | "QQ" | "rationals" => Ok(FieldChoice::Rationals),
            "F32003" | "F_32003" | "Fp" | "GF(32003)" => Ok(FieldChoice::Prime),
            other => Err(format!("unknown field `{other}` (expected Q or F32003)")),
        }
    }
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Exact rational number with `i128` numerator and positive denominator.
///
/// Arithmetic is checked; an overflow panics instead of silently wrapping.
/// Desk-scale computations over the shipped algebras stay far from the limit.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd_i128(num, den);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        Rational { num: n, den: d }
    }

    pub fn integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// Largest integer not exceeding `self`.
    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> i128 {
        -(-self.num).div_euclid(self.den)
    }

    pub fn abs(&self) -> Self {
        Rational { num: self.num.abs(), den: self.den }
    }

    fn checked(op: &str, v: Option<i128>) -> i128 {
        v.unwrap_or_else(|| panic!("rational overflow in {op}"))
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational { num: 0, den: 1 }
    }
    fn one() -> Self {
        Rational { num: 1, den: 1 }
    }
    fn from_i64(n: i64) -> Self {
        Rational::integer(n as i128)
    }
    fn from_rational(q: Rational) -> Option<Self> {
        Some(q)
    }
    fn is_zero(&self) -> bool {
        self.num == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.num == 0 {
            None
        } else {
            Some(Rational::new(self.den, self.num))
        }
    }
    fn name() -> String {
        "Q".to_string()
    }
    fn roots(poly: &[Self]) -> Vec<Self> {
        rational_roots(poly)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        if self.den == o.den {
            return Rational::new(Self::checked("add", self.num.checked_add(o.num)), self.den);
        }
        let g = gcd_i128(self.den, o.den);
        let l = self.den / g;
        let r = o.den / g;
        let a = Self::checked("add", self.num.checked_mul(r));
        let b = Self::checked("add", o.num.checked_mul(l));
        let d = Self::checked("add", self.den.checked_mul(r));
        Rational::new(Self::checked("add", a.checked_add(b)), d)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        self + (-o)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        if self.num == 0 || o.num == 0 {
            return Rational::zero();
        }
        let g1 = gcd_i128(self.num, o.den);
        let g2 = gcd_i128(o.num, self.den);
        let n = Self::checked("mul", (self.num / g1).checked_mul(o.num / g2));
        let d = Self::checked("mul", (self.den / g2).checked_mul(o.den / g1));
        Rational::new(n, d)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, o: Rational) -> Rational {
        self * o.inv().expect("division by zero")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, o: Rational) {
        *self = *self + o;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, o: Rational) {
        *self = *self - o;
    }
}

impl MulAssign for Rational {
    fn mul_assign(&mut self, o: Rational) {
        *self = *self * o;
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let l = Self::checked("cmp", self.num.checked_mul(other.den));
        let r = Self::checked("cmp", other.num.checked_mul(self.den));
        l.cmp(&r)
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = String;

    /// Accepts integers, fractions `p/q` and finite decimals `-1.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("malformed rational `{s}`");
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            return Ok(Rational::new(p, q));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty())
            || !digits_ok(int_part)
            || !digits_ok(frac_part)
            || frac_part.len() > 30
        {
            return Err(bad());
        }
        let mut num: i128 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
        let mut den: i128 = 1;
        for c in frac_part.chars() {
            num = num.checked_mul(10).and_then(|v| v.checked_add((c as u8 - b'0') as i128)).ok_or_else(bad)?;
            den = den.checked_mul(10).ok_or_else(bad)?;
        }
        Ok(Rational::new(if neg { -num } else { num }, den))
    }
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = 1i128;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
        if d > 2_000_000 {
            break;
        }
    }
    out
}

fn eval_poly<F: Field>(poly: &[F], x: F) -> F {
    poly.iter().rev().fold(F::zero(), |acc, &c| acc * x + c)
}

/// Rational root theorem on the integer-scaled polynomial.
fn rational_roots(poly: &[Rational]) -> Vec<Rational> {
    let mut p: Vec<Rational> = poly.to_vec();
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    // strip factors of t
    let lead_zero = p.iter().take_while(|c| c.is_zero()).count();
    if lead_zero > 0 {
        roots.push(Rational::zero());
        p.drain(..lead_zero);
    }
    if p.len() <= 1 {
        return roots;
    }
    let lcm = p.iter().fold(1i128, |acc, c| {
        let g = gcd_i128(acc, c.denom());
        acc / g * c.denom()
    });
    let ints: Vec<i128> = p.iter().map(|c| c.numer() * (lcm / c.denom())).collect();
    let a0 = ints[0];
    let an = *ints.last().unwrap();
    for num in divisors(a0) {
        for den in divisors(an) {
            for sign in [1i128, -1] {
                let cand = Rational::new(sign * num, den);
                if !roots.contains(&cand) && eval_poly(&p, cand).is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// The prime used for the finite ground field.
pub const PRIME: u32 = 32003;

/// Element of the prime field of order [`PRIME`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp(u32);

impl Fp {
    pub fn new(v: i64) -> Self {
        Fp(v.rem_euclid(PRIME as i64) as u32)
    }

    pub fn value(&self) -> u32 {
        self.0
    }

    fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i64(n: i64) -> Self {
        Fp::new(n)
    }
    fn from_rational(q: Rational) -> Option<Self> {
        let p = PRIME as i128;
        let n = Fp(q.numer().rem_euclid(p) as u32);
        let d = Fp(q.denom().rem_euclid(p) as u32);
        d.inv().map(|di| n * di)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(PRIME as u64 - 2))
        }
    }
    fn name() -> String {
        format!("F_{PRIME}")
    }
    fn roots(poly: &[Self]) -> Vec<Self> {
        if poly.iter().all(|c| c.is_zero()) || poly.len() <= 1 {
            return Vec::new();
        }
        (0..PRIME).map(Fp).filter(|&x| eval_poly(poly, x).is_zero()).collect()
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        Fp(((self.0 as u64 + o.0 as u64) % PRIME as u64) as u32)
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        Fp(((self.0 as u64 + PRIME as u64 - o.0 as u64) % PRIME as u64) as u32)
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(((self.0 as u64 * o.0 as u64) % PRIME as u64) as u32)
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp((PRIME - self.0) % PRIME)
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, o: Fp) {
        *self = *self + o;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, o: Fp) {
        *self = *self - o;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, o: Fp) {
        *self = *self * o;
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_normalizes() {
        assert_eq!(Rational::new(2, -4), Rational::new(-1, 2));
        assert_eq!(Rational::new(0, 7), Rational::zero());
        assert_eq!(Rational::new(3, 4) + Rational::new(1, 4), Rational::one());
        assert_eq!(Rational::new(3, 4) * Rational::new(4, 3), Rational::one());
    }

    #[test]
    fn rational_parse() {
        assert_eq!("1/2".parse::<Rational>().unwrap(), Rational::new(1, 2));
        assert_eq!("0.75".parse::<Rational>().unwrap(), Rational::new(3, 4));
        assert_eq!("-3".parse::<Rational>().unwrap(), Rational::integer(-3));
        assert!("1.5.2".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn floor_and_ceil() {
        let q = Rational::new(-3, 2);
        assert_eq!(q.floor(), -2);
        assert_eq!(q.ceil(), -1);
        assert_eq!(Rational::integer(2).ceil(), 2);
    }

    #[test]
    fn rational_roots_found() {
        // (t - 1)(t + 1/2) t = t^3 - t^2/2 - t/2
        let poly = [Rational::zero(), Rational::new(-1, 2), Rational::new(-1, 2), Rational::one()];
        let roots = Rational::roots(&poly);
        assert_eq!(roots, vec![Rational::new(-1, 2), Rational::zero(), Rational::one()]);
        // t^2 + 1 has none
        assert!(Rational::roots(&[Rational::one(), Rational::zero(), Rational::one()]).is_empty());
    }

    #[test]
    fn prime_field_inverse() {
        for v in [1i64, 2, 7, 32002, 12345] {
            let x = Fp::new(v);
            assert_eq!(x * x.inv().unwrap(), Fp::one());
        }
        assert_eq!(Fp::from_rational(Rational::new(1, 2)).unwrap() * Fp::new(2), Fp::one());
        let roots = Fp::roots(&[Fp::new(-4), Fp::zero(), Fp::one()]);
        assert_eq!(roots, vec![Fp::new(2), Fp::new(-2)]);
    }
}
