use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Backend, ValuedScalar};

/// A Laurent polynomial `Σ a_n T^n` with coefficients in one backend.
///
/// Exponents may be negative; a polynomial is *plain* when none are.
/// Coefficients are never zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    backend: Backend,
    terms: BTreeMap<i64, ValuedScalar>,
}

impl Poly {
    pub fn zero(backend: Backend) -> Self {
        Poly {
            backend,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: ValuedScalar) -> Self {
        Poly::monomial(c, 0)
    }

    pub fn monomial(c: ValuedScalar, n: i64) -> Self {
        let mut p = Poly::zero(c.backend());
        if !c.is_zero() {
            p.terms.insert(n, c);
        }
        p
    }

    /// The coordinate `T`.
    pub fn variable(backend: Backend) -> Self {
        Poly::monomial(backend.one(), 1)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<I>(backend: Backend, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, ValuedScalar)>,
    {
        let mut p = Poly::zero(backend);
        for (n, c) in terms {
            backend.check_same(c.backend())?;
            p.add_term(n, &c);
        }
        Ok(p)
    }

    /// Plain polynomial from coefficients `a_0, a_1, …`.
    pub fn from_coefficients(backend: Backend, coefficients: Vec<ValuedScalar>) -> Result<Self> {
        Poly::from_terms(backend, coefficients.into_iter().enumerate().map(|(i, c)| (i as i64, c)))
    }

    fn add_term(&mut self, n: i64, c: &ValuedScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get(&n) {
            None => {
                self.terms.insert(n, c.clone());
            }
            Some(old) => {
                let s = old + c;
                if s.is_zero() {
                    self.terms.remove(&n);
                } else {
                    self.terms.insert(n, s);
                }
            }
        }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn terms(&self) -> &BTreeMap<i64, ValuedScalar> {
        &self.terms
    }

    pub fn coefficient(&self, n: i64) -> Option<&ValuedScalar> {
        self.terms.get(&n)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_plain(&self) -> bool {
        self.min_exponent().is_none_or(|n| n >= 0)
    }

    /// Degree in `T`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&n| n == 0)
    }

    /// Multiplies by `T^k`.
    pub fn shift(&self, k: i64) -> Poly {
        Poly {
            backend: self.backend,
            terms: self.terms.iter().map(|(n, c)| (n + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &ValuedScalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.backend);
        }
        Poly {
            backend: self.backend,
            terms: self.terms.iter().map(|(n, a)| (*n, a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(self.backend.one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal derivative with exact integer multipliers, so the magnitude
    /// of `n·a_n` reflects `|n|` in the `p`-adic backend.
    pub fn derivative(&self) -> Poly {
        let mut d = Poly::zero(self.backend);
        for (n, c) in &self.terms {
            if *n != 0 {
                d.add_term(n - 1, &(&self.backend.from_int(*n) * c));
            }
        }
        d
    }

    /// Evaluates at a rigid point; negative exponents need `z ≠ 0`.
    pub fn eval(&self, z: &ValuedScalar) -> Result<ValuedScalar> {
        self.backend.check_same(z.backend())?;
        let mut acc = self.backend.zero();
        for (n, c) in &self.terms {
            let zn = if *n >= 0 {
                z.pow(*n as u32)
            } else {
                if z.is_zero() {
                    return Err(Error::PoleAtPoint(z.to_string()));
                }
                z.inv()?.pow(n.unsigned_abs() as u32)
            };
            acc = &acc + &(c * &zn);
        }
        Ok(acc)
    }

    /// `Q(T) = P(T + a)`, by Horner's scheme.
    pub fn taylor_shift(&self, a: &ValuedScalar) -> Result<Poly> {
        if !self.is_plain() {
            return Err(Error::NotPlainPolynomial);
        }
        self.backend.check_same(a.backend())?;
        let Some(deg) = self.degree() else {
            return Ok(self.clone());
        };
        let t_plus_a = Poly::from_terms(self.backend, [(1, self.backend.one()), (0, a.clone())])?;
        let mut acc = Poly::zero(self.backend);
        for n in (0..=deg).rev() {
            acc = &acc * &t_plus_a;
            if let Some(c) = self.terms.get(&n) {
                acc.add_term(0, c);
            }
        }
        Ok(acc)
    }

    /// `P(Q(T))` for a plain `P`.
    pub fn compose(&self, inner: &Poly) -> Result<Poly> {
        if !self.is_plain() {
            return Err(Error::NotPlainPolynomial);
        }
        self.backend.check_same(inner.backend)?;
        let Some(deg) = self.degree() else {
            return Ok(self.clone());
        };
        let mut acc = Poly::zero(self.backend);
        for n in (0..=deg).rev() {
            acc = &acc * inner;
            if let Some(c) = self.terms.get(&n) {
                acc.add_term(0, c);
            }
        }
        Ok(acc)
    }

    fn check(&self, other: &Poly) {
        assert_eq!(self.backend, other.backend, "polynomial backend mismatch");
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check(rhs);
        let mut out = self.clone();
        for (n, c) in &rhs.terms {
            out.add_term(*n, c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            backend: self.backend,
            terms: self.terms.iter().map(|(n, c)| (*n, -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check(rhs);
        let mut out = Poly::zero(self.backend);
        for (n, a) in &self.terms {
            for (m, b) in &rhs.terms {
                out.add_term(n + m, &(a * b));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (n, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match n {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*T")?,
                _ => write!(f, "({c})*T^{n}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn q(coeffs: &[i64]) -> Poly {
        let b = Backend::Puiseux;
        Poly::from_coefficients(b, coeffs.iter().map(|&c| b.from_int(c)).collect()).unwrap()
    }

    /// Binomial expansion oracle: Σ a_n Σ_k C(n,k) a^{n-k} T^k.
    fn binomial_shift(coeffs: &[i64], a: i64) -> Vec<i64> {
        let mut out = vec![0i64; coeffs.len()];
        for (n, &c) in coeffs.iter().enumerate() {
            let mut binom = 1i64;
            for (k, slot) in out.iter_mut().enumerate().take(n + 1) {
                if k > 0 {
                    binom = binom * (n - k + 1) as i64 / k as i64;
                }
                *slot += c * binom * a.pow((n - k) as u32);
            }
        }
        out
    }

    #[test]
    fn taylor_shift_examples() {
        let b = Backend::Puiseux;
        // T^2 at 1 -> T^2 + 2T + 1
        assert_eq!(q(&[0, 0, 1]).taylor_shift(&b.from_int(1)).unwrap(), q(&[1, 2, 1]));
        // T at c -> T + c
        let c = ValuedScalar::puiseux([(int(1), int(3))]);
        let expected = Poly::from_terms(b, [(1, b.one()), (0, c.clone())]).unwrap();
        assert_eq!(Poly::variable(b).taylor_shift(&c).unwrap(), expected);
        // T^3 - T at 2 -> T^3 + 6T^2 + 11T + 6
        assert_eq!(binomial_shift(&[0, -1, 0, 1], 2), vec![6, 11, 6, 1]);
        assert_eq!(q(&[0, -1, 0, 1]).taylor_shift(&b.from_int(2)).unwrap(), q(&[6, 11, 6, 1]));
    }

    #[test]
    fn taylor_shift_matches_binomial_oracle() {
        let b = Backend::Padic(5);
        for coeffs in [vec![3, -1, 4, 1, -5], vec![0, 0, 0, 0, 0, 0, 2], vec![7]] {
            for a in [-3, 0, 2, 5] {
                let p = Poly::from_coefficients(b, coeffs.iter().map(|&c| b.from_int(c)).collect())
                    .unwrap();
                let expected = binomial_shift(&coeffs, a);
                let expected =
                    Poly::from_coefficients(b, expected.iter().map(|&c| b.from_int(c)).collect())
                        .unwrap();
                assert_eq!(p.taylor_shift(&b.from_int(a)).unwrap(), expected);
            }
        }
    }

    #[test]
    fn laurent_rules() {
        let b = Backend::Padic(3);
        let p = Poly::from_terms(b, [(-1, b.one()), (1, b.from_int(3))]).unwrap();
        assert!(!p.is_plain());
        assert_eq!(p.taylor_shift(&b.one()), Err(Error::NotPlainPolynomial));
        assert!(matches!(p.eval(&b.zero()), Err(Error::PoleAtPoint(_))));
        // 3*3 + 1/3
        assert_eq!(p.eval(&b.from_int(3)).unwrap(), b.from_rational(crate::rational::frac(28, 3)));
    }

    #[test]
    fn derivative_keeps_integer_factors() {
        let b = Backend::Padic(3);
        let p = Poly::monomial(b.one(), 9);
        let d = p.derivative();
        assert_eq!(d.coefficient(8).unwrap().abs(), crate::field::AbsValue::Finite(int(-2)));
        let l = Poly::monomial(b.one(), -2).derivative();
        assert_eq!(l, Poly::monomial(b.from_int(-2), -3));
    }

    #[test]
    fn compose_and_pow() {
        let p = q(&[1, 0, 1]);
        let inner = q(&[0, 2]);
        assert_eq!(p.compose(&inner).unwrap(), q(&[1, 0, 4]));
        assert_eq!(q(&[1, 1]).pow(3), q(&[1, 3, 3, 1]));
        assert_eq!((&q(&[1, 1]) - &q(&[1, 1])), Poly::zero(Backend::Puiseux));
    }
}
