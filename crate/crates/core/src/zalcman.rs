//! Gromov's selection lemma on finite samples and Zalcman rescaling of
//! explicit families of maps on the unit disk.
//!
//! Both steps compare magnitudes with real numbers such as `τ/(ε(τ-1)φ(a))`,
//! so they need a numeric `β`: they run over the `p`-adic backend only.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::{AbsValue, Backend, ValuedScalar};
use crate::fsderiv::{compose, fs_derivative, Domain, SeriesMap};
use crate::points::{DiskPoint, Poly};
use crate::rational::{format, Rational};

fn numeric_base(b: Backend) -> Result<u64> {
    b.numeric_base()
        .ok_or_else(|| Error::NonNumericBase(b.to_string()))
}

/// `|x| <= c` for a real rational `c`.
fn within(x: &AbsValue, base: u64, c: &Rational) -> bool {
    x.cmp_real(base, c) != Ordering::Greater
}

/// A positive function on a finite set of rigid points of a disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledFunction {
    points: Vec<ValuedScalar>,
    values: Vec<Rational>,
}

impl SampledFunction {
    pub fn new(points: Vec<ValuedScalar>, values: Vec<Rational>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch(points.len(), values.len()));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("empty sample".into()));
        }
        let backend = points[0].backend();
        numeric_base(backend)?;
        for p in &points {
            backend.check_same(p.backend())?;
        }
        if let Some(v) = values.iter().find(|v| **v <= Rational::from_integer(0.into())) {
            return Err(Error::InvalidInput(format!("φ = {} is not positive", format(v))));
        }
        Ok(SampledFunction { points, values })
    }

    pub fn points(&self) -> &[ValuedScalar] {
        &self.points
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn backend(&self) -> Backend {
        self.points[0].backend()
    }

    pub fn index_of(&self, x: &ValuedScalar) -> Option<usize> {
        self.points.iter().position(|p| p == x)
    }
}

/// Returns the index of a sample point `b` with
/// (i) `|a - b| <= τ/(ε(τ-1)φ(a))`, (ii) `φ(b) >= φ(a)` and (iii)
/// `φ(x) <= τφ(b)` for every sample `x` with `|x - b| <= 1/(εφ(b))`.
///
/// Starting from `a`, while (iii) fails the candidate jumps to the
/// violating sample with the largest value; `φ` grows by a factor `τ` at
/// each jump, so this stops on a finite sample.
pub fn gromov_select(
    s: &SampledFunction,
    a: usize,
    epsilon: &Rational,
    tau: &Rational,
) -> Result<usize> {
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    if *epsilon <= zero || *tau <= one {
        return Err(Error::InvalidInput("need ε > 0 and τ > 1".into()));
    }
    if a >= s.points.len() {
        return Err(Error::InvalidInput(format!("no sample point {a}")));
    }
    let base = numeric_base(s.backend())?;
    let mut b = a;
    loop {
        let radius = (epsilon * &s.values[b]).recip();
        let ceiling = tau * &s.values[b];
        let witness = (0..s.points.len())
            .filter(|x| s.values[*x] > ceiling)
            .filter(|x| within(&(&s.points[*x] - &s.points[b]).abs(), base, &radius))
            .max_by(|x, y| s.values[*x].cmp(&s.values[*y]).then(y.cmp(x)));
        match witness {
            Some(x) => b = x,
            None => return Ok(b),
        }
    }
}

/// Finitely many maps `f_1, …, f_m` on the open unit disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapFamily {
    members: Vec<SeriesMap>,
}

impl MapFamily {
    pub fn new(members: Vec<SeriesMap>) -> Result<Self> {
        if let Some(f) = members.iter().find(|f| *f.domain() != Domain::unit_disk()) {
            return Err(Error::InvalidInput(format!(
                "family member {f} is not on the unit disk"
            )));
        }
        Ok(MapFamily { members })
    }

    /// `f_n = [1 : T/c_n]` with `c_n = p^n`, for `n = 1..=n_max`.
    pub fn inverse_scaling(p: u64, n_max: u32) -> Result<Self> {
        let backend = Backend::Padic(p);
        let members = (1..=n_max)
            .map(|n| {
                let c = backend
                    .element_of_magnitude(&Rational::from_integer((-(n as i64)).into()))
                    .expect("integer exponent");
                let map = SeriesMap::affine(Poly::monomial(c.inv()?, 1))?;
                Ok(map.with_domain(Domain::unit_disk()))
            })
            .collect::<Result<Vec<_>>>()?;
        MapFamily::new(members)
    }

    /// `f_n`, 1-based.
    pub fn member(&self, n: usize) -> Option<&SeriesMap> {
        n.checked_sub(1).and_then(|i| self.members.get(i))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// One rescaled map `g_n(z) = f_n(z_n + ρ_n z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rescaled {
    pub n: u32,
    pub witness: ValuedScalar,
    pub z: ValuedScalar,
    pub rho: ValuedScalar,
    pub g: SeriesMap,
}

fn phi(f: &SeriesMap, x: &ValuedScalar, base: u64) -> Result<Rational> {
    let v = fs_derivative(f, &DiskPoint::rigid(x.clone()))?;
    v.to_rational(base).ok_or_else(|| {
        Error::InvalidInput(format!("|f'({x})| = β^({v}) is not a rational number"))
    })
}

/// Rescales `f_n` around the points selected from the witnesses `a_n`,
/// using `ε = 1/n`, `τ = 1 + 1/n` on the sample `samples[n-1] ∪ {a_n}`.
pub fn zalcman_rescale(
    family: &MapFamily,
    witnesses: &[ValuedScalar],
    samples: &[Vec<ValuedScalar>],
) -> Result<Vec<Rescaled>> {
    if witnesses.len() != samples.len() {
        return Err(Error::LengthMismatch(witnesses.len(), samples.len()));
    }
    if witnesses.len() > family.len() {
        return Err(Error::LengthMismatch(witnesses.len(), family.len()));
    }
    witnesses
        .iter()
        .zip(samples)
        .enumerate()
        .map(|(i, (a, sample))| rescale_one(family, i as u32 + 1, a, sample))
        .collect()
}

fn rescale_one(
    family: &MapFamily,
    n: u32,
    a: &ValuedScalar,
    sample: &[ValuedScalar],
) -> Result<Rescaled> {
    let f = family.member(n as usize).expect("checked length");
    let backend = f.backend();
    let base = numeric_base(backend)?;
    let nq = Rational::from_integer(n.into());
    let cube = &nq * &nq * &nq;
    if phi(f, a, base)? < cube {
        return Err(Error::NoExplosion(n));
    }
    let mut points = vec![a.clone()];
    points.extend(sample.iter().filter(|x| *x != a).cloned());
    let values = points
        .iter()
        .map(|x| phi(f, x, base))
        .collect::<Result<Vec<_>>>()?;
    let s = SampledFunction::new(points, values)?;
    let one = Rational::from_integer(1.into());
    let b = gromov_select(&s, 0, &nq.recip(), &(&one + nq.recip()))?;
    let z = s.points[b].clone();
    let derivative = fs_derivative(f, &DiskPoint::rigid(z.clone()))?;
    let target = derivative.inv()?;
    let log = target.logval().expect("finite").clone();
    let rho = backend.element_of_magnitude(&log).ok_or_else(|| {
        Error::RadiusNotInValueGroup(format!("β^({})", format(&log)))
    })?;
    let inner = SeriesMap::affine(&Poly::constant(z.clone()) + &Poly::monomial(rho.clone(), 1))?
        .with_domain(rescaled_domain(base, n));
    let g = compose(f, &inner)?;
    Ok(Rescaled {
        n,
        witness: a.clone(),
        z,
        rho,
        g,
    })
}

/// `|z| <= n` restricted to the value group `p^Z`.
fn rescaled_domain(base: u64, n: u32) -> Domain {
    let mut k = 0i64;
    while (base as i64).pow(k as u32 + 1) <= n as i64 {
        k += 1;
    }
    Domain::closed_disk(AbsValue::Finite(Rational::from_integer(k.into())))
}

/// Checks `|g_n'| <= max(1, R)^2 (1 + 1/n)` at the Shilov point of
/// `|z| <= R`, where the maximum over the closed disk is attained.
pub fn rescaled_bound_holds(r: &Rescaled, log_radius: &Rational) -> Result<bool> {
    let base = numeric_base(r.g.backend())?;
    let shilov = DiskPoint::new(r.g.backend().zero(), AbsValue::Finite(log_radius.clone()));
    let value = fs_derivative(&r.g, &shilov)?;
    let scale = AbsValue::Finite(log_radius.clone()).max_one().pow(2)?;
    let n = Rational::from_integer(r.n.into());
    let factor = (&n + Rational::from_integer(1.into())) / n;
    Ok(within(&value.div(&scale)?, base, &factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    const P3: Backend = Backend::Padic(3);

    fn pts(xs: &[i64]) -> Vec<ValuedScalar> {
        xs.iter().map(|x| P3.from_int(*x)).collect()
    }

    #[test]
    fn constant_function_stays_put() {
        let s = SampledFunction::new(pts(&[0, 1, 3, 9]), vec![int(2); 4]).unwrap();
        assert_eq!(gromov_select(&s, 2, &int(1), &int(2)).unwrap(), 2);
    }

    #[test]
    fn jumps_to_larger_value() {
        let s = SampledFunction::new(pts(&[0, 3]), vec![int(1), int(10)]).unwrap();
        assert_eq!(gromov_select(&s, 0, &int(1), &int(2)).unwrap(), 1);
    }

    #[test]
    fn tiny_ball_contains_only_a() {
        // |0 - 3^k| = 3^{-k} >= 1/27 while 1/(εφ(a)) = 1/100
        let s = SampledFunction::new(pts(&[0, 3, 9, 27]), vec![int(1), int(50), int(50), int(50)]).unwrap();
        assert_eq!(gromov_select(&s, 0, &int(100), &int(2)).unwrap(), 0);
    }

    #[test]
    fn puiseux_has_no_numeric_base() {
        let s = SampledFunction::new(vec![Backend::Puiseux.zero()], vec![int(1)]);
        assert!(matches!(s, Err(Error::NonNumericBase(_))));
    }

    #[test]
    fn inverse_scaling_family_rescales() {
        let fam = MapFamily::inverse_scaling(3, 6).unwrap();
        let witnesses = vec![P3.zero(); 6];
        let samples: Vec<Vec<ValuedScalar>> = (1..=6).map(|n| pts(&[3, 9, 3i64.pow(n)])).collect();
        let out = zalcman_rescale(&fam, &witnesses, &samples).unwrap();
        for r in &out {
            let g0 = fs_derivative(&r.g, &DiskPoint::rigid(P3.zero())).unwrap();
            assert_eq!(g0, AbsValue::one());
            assert_eq!(r.rho.abs(), AbsValue::Finite(int(-(r.n as i64))));
            let top = if r.n >= 3 { 1 } else { 0 };
            for k in -3..=top {
                assert!(rescaled_bound_holds(r, &int(k)).unwrap());
            }
        }
    }

    #[test]
    fn witness_moves_to_the_maximum() {
        // |f_n'(z)| = 3^n on |z| <= 3^{-n} and 3^{-n}/|z|^2 outside; for
        // n = 10 the witness 3^9 has |f'| = 3^8 >= 1000 and 0 is in its ball
        let fam = MapFamily::inverse_scaling(3, 10).unwrap();
        let mut witnesses = vec![P3.zero(); 9];
        witnesses.push(P3.from_int(3i64.pow(9)));
        let samples = vec![pts(&[0]); 10];
        let out = zalcman_rescale(&fam, &witnesses, &samples).unwrap();
        assert_eq!(out[9].z, P3.zero());
        assert_eq!((&out[9].witness - &out[9].z).abs(), AbsValue::Finite(int(-9)));
        assert!(frac(1, 19683) <= frac(2, 10));
    }

    #[test]
    fn weak_witness_is_rejected() {
        // |f_2'(3)| = 3^{-2}/3^{-2} = 1 < 8
        let fam = MapFamily::inverse_scaling(3, 2).unwrap();
        let r = zalcman_rescale(&fam, &pts(&[0, 3]), &[pts(&[]), pts(&[0])]);
        assert!(matches!(r, Err(Error::NoExplosion(2))));
    }

    #[test]
    fn constant_family_does_not_explode() {
        let c = SeriesMap::affine(Poly::constant(P3.one())).unwrap().with_domain(Domain::unit_disk());
        let fam = MapFamily::new(vec![c]).unwrap();
        assert!(matches!(
            zalcman_rescale(&fam, &pts(&[0]), &[pts(&[1])]),
            Err(Error::NoExplosion(1))
        ));
    }
}
