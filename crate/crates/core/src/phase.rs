//! Phases: exact rationals where possible, floats from central charges.

use crate::error::{Error, Result};
use crate::field::Rational;
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Tolerance for comparisons involving float phases.
pub const TAU: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub enum Phase {
    Exact(Rational),
    Approx(f64),
}

impl Phase {
    pub fn integer(n: i64) -> Phase {
        Phase::Exact(Rational::integer(n as i128))
    }

    pub fn ratio(p: i64, q: i64) -> Phase {
        Phase::Exact(Rational::new(p as i128, q as i128))
    }

    pub fn value(&self) -> f64 {
        match self {
            Phase::Exact(r) => r.to_f64(),
            Phase::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Phase::Exact(_))
    }

    pub fn add_int(&self, k: i64) -> Phase {
        match self {
            Phase::Exact(r) => Phase::Exact(*r + Rational::integer(k as i128)),
            Phase::Approx(x) => Phase::Approx(x + k as f64),
        }
    }

    pub fn add(&self, other: &Phase) -> Phase {
        match (self, other) {
            (Phase::Exact(a), Phase::Exact(b)) => Phase::Exact(*a + *b),
            _ => Phase::Approx(self.value() + other.value()),
        }
    }

    pub fn neg(&self) -> Phase {
        match self {
            Phase::Exact(a) => Phase::Exact(-*a),
            Phase::Approx(x) => Phase::Approx(-x),
        }
    }

    /// `(base, k)` with `self = base + k` and `base` in `(0, 1]`.
    pub fn split_base(&self) -> (Phase, i64) {
        match self {
            Phase::Exact(r) => {
                let k = (r.ceil() - 1) as i64;
                (Phase::Exact(*r - Rational::integer(k as i128)), k)
            }
            Phase::Approx(x) => {
                let mut k = x.ceil() as i64 - 1;
                // values within TAU of an integer count as that integer
                if (x - (k as f64 + 1.0)).abs() < TAU {
                    k = (x.round() as i64) - 1;
                } else if (x - k as f64).abs() < TAU {
                    k -= 1;
                }
                (Phase::Approx(x - k as f64), k)
            }
        }
    }

    pub fn in_unit_interval(&self) -> bool {
        self.cmp_tol(&Phase::integer(0)) == Ordering::Greater && self.cmp_tol(&Phase::integer(1)) != Ordering::Greater
    }

    /// Exact comparison between exact phases, `TAU`-tolerant otherwise.
    pub fn cmp_tol(&self, other: &Phase) -> Ordering {
        match (self, other) {
            (Phase::Exact(a), Phase::Exact(b)) => a.cmp(b),
            _ => {
                let d = self.value() - other.value();
                if d.abs() < TAU {
                    Ordering::Equal
                } else if d < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    /// Nearest rational with denominator at most `max_den`, if within `TAU`.
    pub fn snapped(&self, max_den: i64) -> Phase {
        match self {
            Phase::Exact(_) => *self,
            Phase::Approx(x) => {
                for q in 1..=max_den {
                    let p = (x * q as f64).round();
                    if (p / q as f64 - x).abs() < TAU {
                        return Phase::ratio(p as i64, q);
                    }
                }
                *self
            }
        }
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }
}

impl PartialOrd for Phase {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_tol(other))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Exact(r) => write!(f, "{r}"),
            Phase::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Phase {
    type Err = Error;

    /// Integers, `p/q` and finite decimals are exact; exponent notation is a float.
    fn from_str(s: &str) -> Result<Phase> {
        let s = s.trim();
        if let Ok(r) = s.parse::<Rational>() {
            return Ok(Phase::Exact(r));
        }
        if s.contains(['e', 'E']) {
            if let Ok(x) = s.parse::<f64>() {
                if x.is_finite() {
                    return Ok(Phase::Approx(x));
                }
            }
        }
        Err(Error::Parse(format!("malformed phase `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_representative() {
        let (b, k) = Phase::ratio(5, 2).split_base();
        assert_eq!((b, k), (Phase::ratio(1, 2), 2));
        let (b, k) = Phase::integer(1).split_base();
        assert_eq!((b, k), (Phase::integer(1), 0));
        let (b, k) = Phase::integer(0).split_base();
        assert_eq!((b, k), (Phase::integer(1), -1));
        let (b, k) = Phase::Approx(2.0 + 1e-12).split_base();
        assert!((b.value() - 1.0).abs() < 1e-9 && k == 1);
        let (b, k) = Phase::Approx(-0.25).split_base();
        assert!((b.value() - 0.75).abs() < 1e-12 && k == -1);
    }

    #[test]
    fn parse_phases() {
        assert_eq!("1/2".parse::<Phase>().unwrap(), Phase::ratio(1, 2));
        assert_eq!("0.75".parse::<Phase>().unwrap(), Phase::ratio(3, 4));
        assert!("1.5.2".parse::<Phase>().is_err());
        assert!("abc".parse::<Phase>().is_err());
        assert!(!"1e-3".parse::<Phase>().unwrap().is_exact());
    }

    #[test]
    fn tolerant_comparison() {
        assert_eq!(Phase::Approx(0.5 + 1e-12), Phase::ratio(1, 2));
        assert!(Phase::Approx(0.5 + 1e-6) > Phase::ratio(1, 2));
        assert_eq!(Phase::Approx(0.2500000000001).snapped(12), Phase::ratio(1, 4));
    }
}
