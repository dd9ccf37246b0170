use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An exact absolute value: either zero or `β^logval` with rational `logval`.
///
/// The derived order is the order of magnitudes: `Zero` is below every
/// finite value and finite values compare by exponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AbsValue {
    Zero,
    Finite(Rational),
}

impl AbsValue {
    pub fn one() -> Self {
        AbsValue::Finite(Rational::zero())
    }

    /// `β^q`.
    pub fn beta_pow(q: Rational) -> Self {
        AbsValue::Finite(q)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, AbsValue::Zero)
    }

    pub fn logval(&self) -> Option<&Rational> {
        match self {
            AbsValue::Zero => None,
            AbsValue::Finite(q) => Some(q),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (AbsValue::Finite(a), AbsValue::Finite(b)) => AbsValue::Finite(a + b),
            _ => AbsValue::Zero,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            AbsValue::Zero => Err(Error::DivisionByZero),
            AbsValue::Finite(q) => Ok(AbsValue::Finite(-q)),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; `Zero^0 = 1`, negative powers of `Zero` fail.
    pub fn pow(&self, e: i64) -> Result<Self> {
        match self {
            AbsValue::Finite(q) => Ok(AbsValue::Finite(q * rational::int(e))),
            AbsValue::Zero if e == 0 => Ok(AbsValue::one()),
            AbsValue::Zero if e > 0 => Ok(AbsValue::Zero),
            AbsValue::Zero => Err(Error::DivisionByZero),
        }
    }

    /// Rational power, only meaningful for finite magnitudes.
    pub fn pow_rational(&self, e: &Rational) -> Result<Self> {
        match self {
            AbsValue::Finite(q) => Ok(AbsValue::Finite(q * e)),
            AbsValue::Zero if e.is_positive() => Ok(AbsValue::Zero),
            AbsValue::Zero if e.is_zero() => Ok(AbsValue::one()),
            AbsValue::Zero => Err(Error::DivisionByZero),
        }
    }

    /// `max(1, self)`.
    pub fn max_one(&self) -> Self {
        self.clone().max(AbsValue::one())
    }

    /// Compares `β^logval` against a real rational `c` for a numeric `β`.
    ///
    /// With `logval = n/d` (`d > 0`) this compares `β^n` with `c^d`, which
    /// is exact.
    pub fn cmp_real(&self, base: u64, c: &Rational) -> Ordering {
        if !c.is_positive() {
            return match (self, c.is_zero()) {
                (AbsValue::Zero, true) => Ordering::Equal,
                _ => Ordering::Greater,
            };
        }
        let q = match self {
            AbsValue::Zero => return Ordering::Less,
            AbsValue::Finite(q) => q,
        };
        let n = i64::try_from(q.numer()).expect("exponent numerator fits i64");
        let d = usize::try_from(q.denom()).expect("exponent denominator fits usize");
        let lhs = rational::pow(&Rational::from_integer(BigInt::from(base)), n);
        let rhs = num_traits::pow(c.clone(), d);
        lhs.cmp(&rhs)
    }

    /// The real value `β^logval` for numeric `β`, when it is rational.
    pub fn to_rational(&self, base: u64) -> Option<Rational> {
        match self {
            AbsValue::Zero => Some(Rational::zero()),
            AbsValue::Finite(q) => {
                let e = rational::to_i64(q)?;
                Some(rational::pow(&Rational::from_integer(BigInt::from(base)), e))
            }
        }
    }

    /// Multiplicative notation: `0`, `1`, or `base^(q)`.
    pub fn format_multiplicative(&self, base: &str) -> String {
        match self {
            AbsValue::Zero => "0".to_string(),
            AbsValue::Finite(q) if q.is_zero() => "1".to_string(),
            AbsValue::Finite(q) if q.is_one() => base.to_string(),
            AbsValue::Finite(q) => format!("{base}^({})", rational::format(q)),
        }
    }
}

/// Log form: `-inf` for zero, otherwise the exponent.
impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsValue::Zero => write!(f, "-inf"),
            AbsValue::Finite(q) => write!(f, "{}", rational::format(q)),
        }
    }
}
