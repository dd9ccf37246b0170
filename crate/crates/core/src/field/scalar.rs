use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{AbsValue, Backend};
use crate::rational::{self, Rational};

/// An element of one of the two computable valued fields.
///
/// Puiseux elements are finite sums `Σ c_q t^q` stored as an exponent to
/// coefficient map with no zero coefficients, so zero is the empty map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValuedScalar {
    Padic { p: u64, value: Rational },
    Puiseux(BTreeMap<Rational, Rational>),
}

impl ValuedScalar {
    pub fn padic(p: u64, value: Rational) -> Self {
        ValuedScalar::Padic { p, value }
    }

    pub fn puiseux_zero() -> Self {
        ValuedScalar::Puiseux(BTreeMap::new())
    }

    /// `coefficient · t^exponent`.
    pub fn puiseux_monomial(coefficient: Rational, exponent: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(exponent, coefficient);
        }
        ValuedScalar::Puiseux(terms)
    }

    /// Builds `Σ c t^q` from `(q, c)` pairs; repeated exponents are summed.
    pub fn puiseux<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut terms: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (q, c) in pairs {
            *terms.entry(q).or_insert_with(Rational::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        ValuedScalar::Puiseux(terms)
    }

    pub fn backend(&self) -> Backend {
        match self {
            ValuedScalar::Padic { p, .. } => Backend::Padic(*p),
            ValuedScalar::Puiseux(_) => Backend::Puiseux,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ValuedScalar::Padic { value, .. } => value.is_zero(),
            ValuedScalar::Puiseux(terms) => terms.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            ValuedScalar::Padic { value, .. } => value.is_one(),
            ValuedScalar::Puiseux(terms) => {
                terms.len() == 1
                    && terms
                        .iter()
                        .next()
                        .is_some_and(|(q, c)| q.is_zero() && c.is_one())
            }
        }
    }

    pub fn puiseux_terms(&self) -> Option<&BTreeMap<Rational, Rational>> {
        match self {
            ValuedScalar::Puiseux(terms) => Some(terms),
            ValuedScalar::Padic { .. } => None,
        }
    }

    pub fn padic_value(&self) -> Option<&Rational> {
        match self {
            ValuedScalar::Padic { value, .. } => Some(value),
            ValuedScalar::Puiseux(_) => None,
        }
    }

    /// `|x|`: `p^{-v_p(x)}` over the `p`-adics, `β^{-min exponent}` over Puiseux.
    pub fn abs(&self) -> AbsValue {
        match self {
            ValuedScalar::Padic { p, value } => {
                if value.is_zero() {
                    AbsValue::Zero
                } else {
                    AbsValue::Finite(rational::int(-rational::valuation(value, *p)))
                }
            }
            ValuedScalar::Puiseux(terms) => match terms.keys().next() {
                None => AbsValue::Zero,
                Some(q) => AbsValue::Finite(-q),
            },
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.backend().check_same(other.backend())?;
        Ok(match (self, other) {
            (ValuedScalar::Padic { p, value: a }, ValuedScalar::Padic { value: b, .. }) => {
                ValuedScalar::padic(*p, a + b)
            }
            (ValuedScalar::Puiseux(a), ValuedScalar::Puiseux(b)) => {
                let mut terms = a.clone();
                for (q, c) in b {
                    let entry = terms.entry(q.clone()).or_insert_with(Rational::zero);
                    *entry += c;
                    if entry.is_zero() {
                        terms.remove(q);
                    }
                }
                ValuedScalar::Puiseux(terms)
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.backend().check_same(other.backend())?;
        Ok(match (self, other) {
            (ValuedScalar::Padic { p, value: a }, ValuedScalar::Padic { value: b, .. }) => {
                ValuedScalar::padic(*p, a * b)
            }
            (ValuedScalar::Puiseux(a), ValuedScalar::Puiseux(b)) => ValuedScalar::puiseux(
                a.iter()
                    .flat_map(|(qa, ca)| b.iter().map(move |(qb, cb)| (qa + qb, ca * cb))),
            ),
            _ => unreachable!(),
        })
    }

    /// Multiplicative inverse. Over Puiseux polynomials only monomials are
    /// invertible; anything else needs an infinite series.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            ValuedScalar::Padic { p, value } => Ok(ValuedScalar::padic(*p, value.recip())),
            ValuedScalar::Puiseux(terms) => {
                if terms.len() != 1 {
                    return Err(Error::NotInvertible(self.to_string()));
                }
                let (q, c) = terms.iter().next().expect("one term");
                Ok(ValuedScalar::puiseux_monomial(c.recip(), -q))
            }
        }
    }

    /// A scalar `b` with `|b - 1/self| <= precision`.
    ///
    /// Exact whenever `inv` succeeds; otherwise the geometric series of
    /// `1/(lead·(1+u))` is truncated once its next term drops below
    /// `precision`.
    pub fn inverse_to_precision(&self, precision: &AbsValue) -> Result<Self> {
        if let Ok(exact) = self.inv() {
            return Ok(exact);
        }
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if precision.is_zero() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let lead_inv = self.leading_term().inv()?;
        let u = &(self * &lead_inv) - &self.backend().one();
        let minus_u = -&u;
        let step = lead_inv.abs();
        let mut acc = lead_inv.clone();
        let mut term = lead_inv;
        loop {
            term = &term * &minus_u;
            if term.abs() <= *precision {
                return Ok(acc);
            }
            acc = &acc + &term;
            debug_assert!(term.abs() < step);
        }
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inv()?)
    }

    fn neg_ref(&self) -> Self {
        match self {
            ValuedScalar::Padic { p, value } => ValuedScalar::padic(*p, -value),
            ValuedScalar::Puiseux(terms) => {
                ValuedScalar::Puiseux(terms.iter().map(|(q, c)| (q.clone(), -c)).collect())
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.backend().one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Lowest-exponent term (`Puiseux`) or the value itself (`p`-adic):
    /// a scalar with the same absolute value and unit "angular" part.
    pub fn leading_term(&self) -> Self {
        match self {
            ValuedScalar::Padic { .. } => self.clone(),
            ValuedScalar::Puiseux(terms) => match terms.iter().next() {
                None => self.clone(),
                Some((q, c)) => ValuedScalar::puiseux_monomial(c.clone(), q.clone()),
            },
        }
    }
}

impl fmt::Display for ValuedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuedScalar::Padic { value, .. } => write!(f, "{}", rational::format(value)),
            ValuedScalar::Puiseux(terms) => {
                if terms.is_empty() {
                    return write!(f, "0");
                }
                for (i, (q, c)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    if q.is_zero() {
                        write!(f, "{}", rational::format(c))?;
                    } else {
                        write!(f, "{}*t^({})", rational::format(c), rational::format(q))?;
                    }
                }
                Ok(())
            }
        }
    }
}

// Operator forms panic on backend mismatch; library code only combines
// scalars that were validated to share a backend.
impl Add for &ValuedScalar {
    type Output = ValuedScalar;
    fn add(self, rhs: &ValuedScalar) -> ValuedScalar {
        self.try_add(rhs).expect("scalar backend mismatch")
    }
}

impl Sub for &ValuedScalar {
    type Output = ValuedScalar;
    fn sub(self, rhs: &ValuedScalar) -> ValuedScalar {
        self.try_sub(rhs).expect("scalar backend mismatch")
    }
}

impl Mul for &ValuedScalar {
    type Output = ValuedScalar;
    fn mul(self, rhs: &ValuedScalar) -> ValuedScalar {
        self.try_mul(rhs).expect("scalar backend mismatch")
    }
}

impl Neg for &ValuedScalar {
    type Output = ValuedScalar;
    fn neg(self) -> ValuedScalar {
        self.neg_ref()
    }
}
