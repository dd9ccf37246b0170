//! Type I–III points of the Berkovich line, multiplicative seminorms of
//! polynomials at those points, and diameter functions.
//!
//! A point is stored as `η_{a,r}`: the sup-norm over the closed ball of
//! radius `r` around `a`. Two representations denote the same point when
//! the radii agree and the centers are within `r` of each other, which is
//! what `PartialEq` checks.

mod poly;

use std::fmt;

pub use poly::Poly;

use crate::error::Result;
use crate::field::{AbsValue, Backend, ValueGroup, ValuedScalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointType {
    I,
    II,
    III,
}

/// The point `η_{center, radius}` of the affine Berkovich line.
#[derive(Debug, Clone)]
pub struct DiskPoint {
    center: ValuedScalar,
    radius: AbsValue,
}

impl DiskPoint {
    pub fn new(center: ValuedScalar, radius: AbsValue) -> Self {
        DiskPoint { center, radius }
    }

    pub fn rigid(center: ValuedScalar) -> Self {
        DiskPoint::new(center, AbsValue::Zero)
    }

    /// The Gauss point `η_{0,1}`.
    pub fn gauss(backend: Backend) -> Self {
        DiskPoint::new(backend.zero(), AbsValue::one())
    }

    pub fn center(&self) -> &ValuedScalar {
        &self.center
    }

    pub fn radius(&self) -> &AbsValue {
        &self.radius
    }

    pub fn backend(&self) -> Backend {
        self.center.backend()
    }

    pub fn is_rigid(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn classify(&self, value_group: &ValueGroup) -> PointType {
        match &self.radius {
            AbsValue::Zero => PointType::I,
            AbsValue::Finite(q) if value_group.contains(q) => PointType::II,
            AbsValue::Finite(_) => PointType::III,
        }
    }

    /// `|T(x)| = max(|a|, r)`.
    pub fn abs_coordinate(&self) -> AbsValue {
        self.center.abs().max(self.radius.clone())
    }

    /// Whether the ball `B(a, r)` contains `0`.
    pub fn contains_zero(&self) -> bool {
        self.center.abs() <= self.radius
    }

    /// Whether the closed ball of `other` is contained in the ball of `self`.
    pub fn contains(&self, other: &DiskPoint) -> Result<bool> {
        let d = self.center.try_sub(&other.center)?.abs();
        Ok(other.radius <= self.radius && d <= self.radius)
    }
}

impl PartialEq for DiskPoint {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius
            && self
                .center
                .try_sub(&other.center)
                .is_ok_and(|d| d.abs() <= self.radius)
    }
}

impl Eq for DiskPoint {}

impl fmt::Display for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "η({}, {})", self.center, self.radius)
    }
}

/// A point of the projective Berkovich line: a disk point in the affine
/// chart `T`, or in the chart at infinity with coordinate `1/T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjPoint {
    Affine(DiskPoint),
    Infinity(DiskPoint),
}

impl ProjPoint {
    pub fn infinity(backend: Backend) -> Self {
        ProjPoint::Infinity(DiskPoint::rigid(backend.zero()))
    }

    /// Builds a point from its coordinate in the chart at infinity, moving
    /// it to the affine chart whenever that can be done exactly.
    pub fn from_infinity_chart(p: DiskPoint) -> Self {
        if p.contains_zero() {
            return match p.radius.inv() {
                Ok(r) => ProjPoint::Affine(DiskPoint::new(p.backend().zero(), r)),
                Err(_) => ProjPoint::Infinity(p),
            };
        }
        let ca = p.center.abs();
        match p.center.inv() {
            Ok(c) => {
                let r = p
                    .radius
                    .div(&ca.pow(2).expect("finite"))
                    .expect("nonzero center");
                ProjPoint::Affine(DiskPoint::new(c, r))
            }
            // Only a rigid point needs the exact inverse.
            Err(_) if !p.is_rigid() => {
                let r = p
                    .radius
                    .div(&ca.pow(2).expect("finite"))
                    .expect("nonzero center");
                match p.center.inverse_to_precision(&r) {
                    Ok(c) => ProjPoint::Affine(DiskPoint::new(c, r)),
                    Err(_) => ProjPoint::Infinity(p),
                }
            }
            Err(_) => ProjPoint::Infinity(p),
        }
    }

    /// Image under `T ↦ 1/T`.
    pub fn invert(&self) -> Self {
        match self {
            ProjPoint::Affine(p) => ProjPoint::from_infinity_chart(p.clone()),
            ProjPoint::Infinity(p) => ProjPoint::Affine(p.clone()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity(p) if p.is_rigid() && p.center.is_zero())
    }

    pub fn backend(&self) -> Backend {
        match self {
            ProjPoint::Affine(p) | ProjPoint::Infinity(p) => p.backend(),
        }
    }

    pub fn is_rigid(&self) -> bool {
        match self {
            ProjPoint::Affine(p) | ProjPoint::Infinity(p) => p.is_rigid(),
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Affine(p) => write!(f, "{p}"),
            ProjPoint::Infinity(p) => write!(f, "1/T: {p}"),
        }
    }
}

/// `|P(x)|` at `x = η_{a,r}`: the maximum of `|b_i| r^i` over the Taylor
/// coefficients of `P` at `a`.
///
/// Laurent polynomials are evaluated on the punctured line, so only the
/// rigid point `0` is a pole.
pub fn eval_seminorm(p: &Poly, x: &DiskPoint) -> Result<AbsValue> {
    p.backend().check_same(x.backend())?;
    if p.is_zero() {
        return Ok(AbsValue::Zero);
    }
    if x.is_rigid() {
        return Ok(p.eval(&x.center)?.abs());
    }
    if p.is_plain() {
        return Ok(weighted_max(&p.taylor_shift(&x.center)?, &x.radius));
    }
    if x.contains_zero() {
        // x = η_{0,r} with r > 0; expand at 0 directly.
        return Ok(weighted_max(p, &x.radius));
    }
    // |T| ≡ |a| on a ball avoiding 0, so |T^{-k} Q| = |a|^{-k} |Q|.
    let k = -p.min_exponent().expect("nonzero");
    let plain = p.shift(k);
    let q = weighted_max(&plain.taylor_shift(&x.center)?, &x.radius);
    Ok(q.mul(&x.center.abs().pow(-k)?))
}

/// `max_i |c_i| r^i` over the terms of `p`, for `r > 0`.
pub(crate) fn weighted_max(p: &Poly, r: &AbsValue) -> AbsValue {
    p.terms()
        .iter()
        .filter_map(|(n, c)| r.pow(*n).ok().map(|rn| c.abs().mul(&rn)))
        .max()
        .unwrap_or(AbsValue::Zero)
}

/// Diameter on `A^N`: the largest coordinate radius.
pub fn diam_affine(x: &[DiskPoint]) -> AbsValue {
    x.iter()
        .map(|p| p.radius.clone())
        .max()
        .unwrap_or(AbsValue::Zero)
}

/// Diameter on `P^N` in the chart `[1 : x_1 : … : x_N]`:
/// `diam_A(x) / max(1, |x_i|)^2`.
pub fn diam_proj(x: &[DiskPoint]) -> AbsValue {
    let size = x
        .iter()
        .map(DiskPoint::abs_coordinate)
        .max()
        .unwrap_or(AbsValue::Zero)
        .max_one();
    diam_affine(x)
        .div(&size.pow(2).expect("finite"))
        .expect("size is at least one")
}

/// Diameter of a point of `P^1` in either chart (the chart swap preserves it).
pub fn diam_proj_point(x: &ProjPoint) -> AbsValue {
    match x {
        ProjPoint::Affine(p) | ProjPoint::Infinity(p) => diam_proj(std::slice::from_ref(p)),
    }
}

/// The smallest disk point dominating both arguments, centered at `x`.
pub fn join(x: &DiskPoint, y: &DiskPoint) -> Result<DiskPoint> {
    let d = x.center.try_sub(&y.center)?.abs();
    let r = x.radius.clone().max(y.radius.clone()).max(d);
    Ok(DiskPoint::new(x.center.clone(), r))
}
