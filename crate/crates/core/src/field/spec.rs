use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::field::ValuedScalar;
use crate::rational::{self, Rational};

/// Which computable valued field a scalar lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    /// Finite Puiseux polynomials over `Q`; `|t| = β^{-1}` for a symbolic `β`.
    Puiseux,
    /// `Q` with the `p`-adic absolute value; `β = p`.
    Padic(u64),
}

impl Backend {
    pub fn zero(self) -> ValuedScalar {
        match self {
            Backend::Puiseux => ValuedScalar::puiseux_zero(),
            Backend::Padic(p) => ValuedScalar::padic(p, rational::zero()),
        }
    }

    pub fn one(self) -> ValuedScalar {
        self.from_rational(rational::one())
    }

    pub fn from_int(self, n: i64) -> ValuedScalar {
        self.from_rational(rational::int(n))
    }

    pub fn from_rational(self, q: Rational) -> ValuedScalar {
        match self {
            Backend::Puiseux => ValuedScalar::puiseux_monomial(q, rational::zero()),
            Backend::Padic(p) => ValuedScalar::padic(p, q),
        }
    }

    /// A scalar of absolute value exactly `β^logval`, when one exists:
    /// `t^{-logval}` over Puiseux, `p^{-logval}` over the `p`-adics.
    pub fn element_of_magnitude(self, logval: &Rational) -> Option<ValuedScalar> {
        match self {
            Backend::Puiseux => Some(ValuedScalar::puiseux_monomial(rational::one(), -logval)),
            Backend::Padic(p) => {
                let e = rational::to_i64(logval)?;
                Some(ValuedScalar::padic(
                    p,
                    rational::pow(&rational::int(p as i64), -e),
                ))
            }
        }
    }

    /// The numeric value of `β`, if the backend fixes one.
    pub fn numeric_base(self) -> Option<u64> {
        match self {
            Backend::Puiseux => None,
            Backend::Padic(p) => Some(p),
        }
    }

    pub fn residue_characteristic(self) -> u64 {
        match self {
            Backend::Puiseux => 0,
            Backend::Padic(p) => p,
        }
    }

    pub(crate) fn check_same(self, other: Backend) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BackendMismatch(self.to_string(), other.to_string()))
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Puiseux => write!(f, "puiseux"),
            Backend::Padic(p) => write!(f, "padic:{p}"),
        }
    }
}

/// A subgroup of `Q` containing `Z`: either all of `Q` or `(1/d)·Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueGroup {
    Rationals,
    Cyclic(BigInt),
}

impl ValueGroup {
    pub fn integers() -> Self {
        ValueGroup::Cyclic(BigInt::one())
    }

    pub fn cyclic(denominator: i64) -> Result<Self> {
        if denominator <= 0 {
            return Err(Error::InvalidField(format!(
                "value group denominator must be positive, got {denominator}"
            )));
        }
        Ok(ValueGroup::Cyclic(BigInt::from(denominator)))
    }

    pub fn contains(&self, q: &Rational) -> bool {
        match self {
            ValueGroup::Rationals => true,
            ValueGroup::Cyclic(d) => (q * Rational::from_integer(d.clone())).is_integer(),
        }
    }

    /// Parses `"Q"`, `"Z"` or `"1/d Z"` (also written `"(1/d)Z"`).
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "Q" => return Ok(ValueGroup::Rationals),
            "Z" => return Ok(ValueGroup::integers()),
            _ => {}
        }
        let inner = compact
            .strip_suffix('Z')
            .map(|r| r.trim_start_matches('(').trim_end_matches(')'))
            .and_then(|r| r.strip_prefix("1/"));
        match inner.and_then(|d| d.parse::<BigInt>().ok()) {
            Some(d) if d.is_positive() => Ok(ValueGroup::Cyclic(d)),
            _ => Err(Error::InvalidField(format!("bad value group {s:?}"))),
        }
    }
}

impl fmt::Display for ValueGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueGroup::Rationals => write!(f, "Q"),
            ValueGroup::Cyclic(d) if d.is_one() => write!(f, "Z"),
            ValueGroup::Cyclic(d) => write!(f, "1/{d} Z"),
        }
    }
}

/// Backend plus declared value group (used to tell type II from type III).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    backend: Backend,
    value_group: ValueGroup,
}

impl FieldSpec {
    pub fn padic(p: u64) -> Result<Self> {
        if !rational::is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(FieldSpec {
            backend: Backend::Padic(p),
            value_group: ValueGroup::integers(),
        })
    }

    pub fn puiseux() -> Self {
        FieldSpec {
            backend: Backend::Puiseux,
            value_group: ValueGroup::Rationals,
        }
    }

    pub fn with_value_group(mut self, value_group: ValueGroup) -> Self {
        self.value_group = value_group;
        self
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn value_group(&self) -> &ValueGroup {
        &self.value_group
    }

    /// Parses `"puiseux"` or `"padic:p"`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "puiseux" | "puiseux-q" => Ok(FieldSpec::puiseux()),
            other => {
                let p = other
                    .strip_prefix("padic:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidField(format!("unknown field {s:?}")))?;
                FieldSpec::padic(p)
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.backend)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn padic_requires_prime() {
        assert!(FieldSpec::padic(4).is_err());
        assert!(FieldSpec::padic(1).is_err());
        assert_eq!(FieldSpec::padic(7).unwrap().backend(), Backend::Padic(7));
    }

    #[test]
    fn default_value_groups() {
        assert_eq!(*FieldSpec::padic(3).unwrap().value_group(), ValueGroup::integers());
        assert_eq!(*FieldSpec::puiseux().value_group(), ValueGroup::Rationals);
    }

    #[test]
    fn value_group_membership() {
        let half = ValueGroup::parse("1/2 Z").unwrap();
        assert!(half.contains(&frac(3, 2)));
        assert!(!half.contains(&frac(1, 3)));
        assert!(ValueGroup::integers().contains(&frac(4, 2)));
        assert!(ValueGroup::Rationals.contains(&frac(1, 7)));
        assert_eq!(ValueGroup::parse("(1/3)Z").unwrap().to_string(), "1/3 Z");
        assert!(ValueGroup::parse("1/0 Z").is_err());
    }

    #[test]
    fn field_parse() {
        assert_eq!(FieldSpec::parse("padic:5").unwrap().backend(), Backend::Padic(5));
        assert_eq!(FieldSpec::parse("puiseux").unwrap().backend(), Backend::Puiseux);
        assert!(FieldSpec::parse("padic:6").is_err());
        assert!(FieldSpec::parse("reals").is_err());
    }
}
