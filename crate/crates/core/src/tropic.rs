//! Tropical analysis of Laurent polynomials on annuli.
//!
//! Everything is in log-radius coordinates: a radius `β^r` is the rational
//! `r`, and `θ(r) = max_n (v_n + n·r)` with `v_n = log|a_n|`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::AbsValue;
use crate::points::Poly;
use crate::rational::{format, Rational};

/// An open interval of log-radii; `None` ends are unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Interval {
    pub fn new(lo: Option<Rational>, hi: Option<Rational>) -> Result<Self> {
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l >= h {
                return Err(Error::InvalidInput(format!(
                    "empty interval ({}, {})",
                    format(l),
                    format(h)
                )));
            }
        }
        Ok(Interval { lo, hi })
    }

    pub fn bounded(lo: Rational, hi: Rational) -> Result<Self> {
        Interval::new(Some(lo), Some(hi))
    }

    pub fn everything() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|l| r > l) && self.hi.as_ref().is_none_or(|h| r < h)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = |e: &Option<Rational>, inf: &str| e.as_ref().map_or(inf.to_string(), format);
        write!(f, "({}, {})", end(&self.lo, "-inf"), end(&self.hi, "inf"))
    }
}

/// The terms `(n, log|a_n|)` of a Laurent polynomial together with the
/// annulus it is considered on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolygon {
    terms: BTreeMap<i64, Rational>,
    domain: Interval,
}

/// A maximal piece of the envelope, owning `[lo, hi)` (the left end is
/// open for the first segment).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub interval: Interval,
    pub slope: i64,
    pub intercept: Rational,
}

impl TropicalPolygon {
    pub fn new<I>(terms: I, domain: Interval) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut map = BTreeMap::new();
        for (n, v) in terms {
            if map.insert(n, v).is_some() {
                return Err(Error::InvalidInput(format!("exponent {n} repeated")));
            }
        }
        if map.is_empty() {
            return Err(Error::ZeroSeries);
        }
        Ok(TropicalPolygon { terms: map, domain })
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rational> {
        &self.terms
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn with_domain(&self, domain: Interval) -> Self {
        TropicalPolygon {
            terms: self.terms.clone(),
            domain,
        }
    }

    fn value(&self, r: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(n, v)| v + Rational::from_integer((*n).into()) * r)
            .max()
            .expect("nonempty")
    }

    /// The term dominating just to the right of `r`: the largest slope among
    /// those attaining the max at `r`.
    fn dominant_at(&self, r: &Rational) -> (i64, Rational) {
        let top = self.value(r);
        self.terms
            .iter()
            .filter(|(n, v)| *v + Rational::from_integer((**n).into()) * r == top)
            .map(|(n, v)| (*n, v.clone()))
            .next_back()
            .expect("max is attained")
    }
}

pub fn from_series(f: &Poly, domain: Interval) -> Result<TropicalPolygon> {
    if f.is_zero() {
        return Err(Error::ZeroSeries);
    }
    let terms = f.terms().iter().map(|(n, a)| {
        let v = a.abs().logval().cloned().expect("stored coefficients are nonzero");
        (*n, v)
    });
    TropicalPolygon::new(terms, domain)
}

pub fn theta_eval(p: &TropicalPolygon, r: &Rational) -> Result<Rational> {
    if !p.domain.contains(r) {
        return Err(Error::OutOfDomain(format!("log-radius {} lies outside the open domain {}", format(r), p.domain)));
    }
    Ok(p.value(r))
}

pub fn segments(p: &TropicalPolygon) -> Vec<Segment> {
    let (mut n, mut v) = match &p.domain.lo {
        Some(lo) => p.dominant_at(lo),
        None => {
            let (n, v) = p.terms.iter().next().expect("nonempty");
            (*n, v.clone())
        }
    };
    let mut left = p.domain.lo.clone();
    let mut out = Vec::new();
    loop {
        // first crossing with a steeper term
        let next = p
            .terms
            .range(n + 1..)
            .map(|(m, w)| (Rational::from_integer((m - n).into()), m, w))
            .map(|(dm, m, w)| ((&v - w) / dm, *m, w.clone()))
            .filter(|(x, _, _)| left.as_ref().is_none_or(|l| x > l))
            .fold(None::<(Rational, i64, Rational)>, |best, cand| match best {
                Some(b) if b.0 < cand.0 || (b.0 == cand.0 && b.1 > cand.1) => Some(b),
                _ => Some(cand),
            });
        match next {
            Some((x, m, w)) if p.domain.hi.as_ref().is_none_or(|h| &x < h) => {
                out.push(Segment {
                    interval: Interval {
                        lo: left,
                        hi: Some(x.clone()),
                    },
                    slope: n,
                    intercept: v,
                });
                left = Some(x);
                n = m;
                v = w;
            }
            _ => {
                out.push(Segment {
                    interval: Interval {
                        lo: left,
                        hi: p.domain.hi.clone(),
                    },
                    slope: n,
                    intercept: v,
                });
                return out;
            }
        }
    }
}

/// `Some(n_0)` when one term dominates on the whole domain.
pub fn single_slope(p: &TropicalPolygon) -> Option<i64> {
    match segments(p).as_slice() {
        [s] => Some(s.slope),
        _ => None,
    }
}

/// Number of zeros, with multiplicity, in `logρ < log|z| < logR`.
pub fn count_zeros_annulus(f: &Poly, log_rho: &Rational, log_r: &Rational) -> Result<u64> {
    let p = from_series(f, Interval::bounded(log_rho.clone(), log_r.clone())?)?;
    let segs = segments(&p);
    let first = segs.first().expect("nonempty").slope;
    let last = segs.last().expect("nonempty").slope;
    Ok((last - first) as u64)
}

/// Outcome of the slope bound on a zero-free annulus map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeBound {
    pub n0: i64,
    /// `n_0 <= logR / logρ`.
    pub holds: bool,
    /// `θ(r) > logR/2` for every `r > logρ/2` in the domain.
    pub half_annulus: bool,
}

pub fn slope_bound_check(
    p: &TropicalPolygon,
    log_r: &Rational,
    log_rho: &Rational,
) -> Result<SlopeBound> {
    let zero = Rational::from_integer(0.into());
    let precondition = |msg: String| Err(Error::PreconditionViolation(msg));
    if *log_r >= zero || *log_rho >= zero {
        return precondition("logR and logρ must be negative".into());
    }
    if p.domain != Interval::bounded(log_rho.clone(), zero.clone())? {
        return precondition(format!("domain {} is not (logρ, 0)", p.domain));
    }
    let Some(n0) = single_slope(p) else {
        return precondition("θ has more than one slope".into());
    };
    if p.value(&zero) != zero {
        return precondition("θ(0-) is not 0".into());
    }
    if p.value(log_rho) < *log_r {
        return precondition("θ dips below logR".into());
    }
    let n = Rational::from_integer(n0.into());
    let two = Rational::from_integer(2.into());
    Ok(SlopeBound {
        n0,
        holds: n <= log_r / log_rho,
        half_annulus: n0 <= 0 || &n * log_rho / &two >= log_r / &two,
    })
}

/// One piece of the subdivision: on `interval`,
/// `diam f(η_{0,β^r}) = β^{log_coefficient + exponent·r}`. A constant map
/// has a single piece with `log_coefficient = None` (diameter zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub interval: Interval,
    pub log_coefficient: Option<Rational>,
    pub exponent: i64,
}

impl Piece {
    pub fn radius_at(&self, r: &Rational) -> AbsValue {
        match &self.log_coefficient {
            None => AbsValue::Zero,
            Some(a) => AbsValue::Finite(a + Rational::from_integer(self.exponent.into()) * r),
        }
    }
}

pub fn monomial_pieces(f: &Poly, interval: &Interval) -> Result<Vec<Piece>> {
    let zero = Rational::from_integer(0.into());
    if interval.hi.as_ref().is_none_or(|h| *h > zero) {
        return Err(Error::DomainViolation(format!(
            "{interval} leaves the unit disk"
        )));
    }
    if !f.is_zero() {
        let full = from_series(f, interval.clone())?;
        let at_lo = match &interval.lo {
            Some(lo) => Some(full.value(lo)),
            None if f.min_exponent() < Some(0) => {
                return Err(Error::DomainViolation(format!("{f} has a pole at 0")));
            }
            None => f.coefficient(0).and_then(|a| a.abs().logval().cloned()),
        };
        let at_hi = full.value(interval.hi.as_ref().expect("checked"));
        if at_lo.is_some_and(|v| v > zero) || at_hi > zero {
            return Err(Error::DomainViolation(format!(
                "{f} does not map {interval} into the unit disk"
            )));
        }
    }
    let moving: Vec<(i64, Rational)> = f
        .terms()
        .iter()
        .filter(|(n, _)| **n != 0)
        .map(|(n, a)| (*n, a.abs().logval().cloned().expect("nonzero")))
        .collect();
    if moving.is_empty() {
        return Ok(vec![Piece {
            interval: interval.clone(),
            log_coefficient: None,
            exponent: 0,
        }]);
    }
    let p = TropicalPolygon::new(moving, interval.clone())?;
    Ok(segments(&p)
        .into_iter()
        .map(|s| Piece {
            interval: s.interval,
            log_coefficient: Some(s.intercept),
            exponent: s.slope,
        })
        .collect())
}
