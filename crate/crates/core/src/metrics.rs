//! The polydisk distance, the chordal (projective) distance and its
//! extension to the Berkovich projective line, and the Lipschitz bound of a
//! polynomial against its Gauss norm.

use crate::error::{Error, Result};
use crate::field::{AbsValue, Backend, ValuedScalar};
use crate::points::{eval_seminorm, DiskPoint, Poly, ProjPoint};

/// Homogeneous coordinates `[x_0 : … : x_N]` of a rigid point of `P^N`.
#[derive(Debug, Clone)]
pub struct RigidTuple {
    coords: Vec<ValuedScalar>,
}

impl RigidTuple {
    pub fn new(coords: Vec<ValuedScalar>) -> Result<Self> {
        let first = coords.first().ok_or(Error::ZeroTuple)?.backend();
        for c in &coords {
            first.check_same(c.backend())?;
        }
        if coords.iter().all(ValuedScalar::is_zero) {
            return Err(Error::ZeroTuple);
        }
        Ok(RigidTuple { coords })
    }

    /// `[1 : a]`.
    pub fn affine(a: ValuedScalar) -> Self {
        RigidTuple {
            coords: vec![a.backend().one(), a],
        }
    }

    pub fn coords(&self) -> &[ValuedScalar] {
        &self.coords
    }

    pub fn backend(&self) -> Backend {
        self.coords[0].backend()
    }

    fn max_abs(&self) -> AbsValue {
        self.coords.iter().map(ValuedScalar::abs).max().expect("nonempty")
    }

    fn max_minor(&self, other: &RigidTuple) -> Result<AbsValue> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::LengthMismatch(self.coords.len(), other.coords.len()));
        }
        let n = self.coords.len();
        let mut best = AbsValue::Zero;
        for i in 0..n {
            for j in (i + 1)..n {
                let m = self.coords[i]
                    .try_mul(&other.coords[j])?
                    .try_sub(&self.coords[j].try_mul(&other.coords[i])?)?;
                best = best.max(m.abs());
            }
        }
        Ok(best)
    }

    /// Same projective point: every 2×2 minor vanishes.
    pub fn same_point(&self, other: &RigidTuple) -> Result<bool> {
        Ok(self.max_minor(other)?.is_zero())
    }
}

/// `max_i |z_i - w_i|`.
pub fn d_usual(z: &[ValuedScalar], w: &[ValuedScalar]) -> Result<AbsValue> {
    if z.len() != w.len() {
        return Err(Error::LengthMismatch(z.len(), w.len()));
    }
    z.iter().zip(w).try_fold(AbsValue::Zero, |acc, (a, b)| {
        Ok(acc.max(a.try_sub(b)?.abs()))
    })
}

/// `max |x_i y_j - x_j y_i| / (max |x_i| · max |y_j|)`.
pub fn d_proj(x: &RigidTuple, y: &RigidTuple) -> Result<AbsValue> {
    let num = x.max_minor(y)?;
    num.div(&x.max_abs().mul(&y.max_abs()))
}

/// The chordal distance extended to type II/III points of `P^1`:
/// `max(|a - b|, r, s) / (max(1, |x|) · max(1, |y|))` for `x = η_{a,r}`
/// and `y = η_{b,s}`, computed in whichever chart holds both points.
pub fn d_proj_line(x: &ProjPoint, y: &ProjPoint) -> Result<AbsValue> {
    x.backend().check_same(y.backend())?;
    match (x, y) {
        (ProjPoint::Affine(p), ProjPoint::Affine(q))
        | (ProjPoint::Infinity(p), ProjPoint::Infinity(q)) => affine_kernel(p, q),
        (ProjPoint::Affine(p), ProjPoint::Infinity(w))
        | (ProjPoint::Infinity(w), ProjPoint::Affine(p)) => mixed_kernel(p, w),
    }
}

fn affine_kernel(p: &DiskPoint, q: &DiskPoint) -> Result<AbsValue> {
    let spread = p
        .center()
        .try_sub(q.center())?
        .abs()
        .max(p.radius().clone())
        .max(q.radius().clone());
    spread.div(&p.abs_coordinate().max_one().mul(&q.abs_coordinate().max_one()))
}

/// `p` in the coordinate `T`, `w` in the coordinate `1/T`. Points left in
/// the chart at infinity are rigid (normalization moves everything else).
fn mixed_kernel(p: &DiskPoint, w: &DiskPoint) -> Result<AbsValue> {
    if !w.is_rigid() {
        return match ProjPoint::from_infinity_chart(w.clone()) {
            ProjPoint::Affine(q) => affine_kernel(p, &q),
            ProjPoint::Infinity(_) => Err(Error::DomainViolation(format!(
                "{w} cannot be moved to the affine chart"
            ))),
        };
    }
    let c = w.center();
    if p.is_rigid() {
        let x = RigidTuple::affine(p.center().clone());
        let y = RigidTuple::new(vec![c.clone(), c.backend().one()])?;
        return d_proj(&x, &y);
    }
    if c.is_zero() {
        // distance to ∞ is 1 / max(1, |x|)
        return AbsValue::one().div(&p.abs_coordinate().max_one());
    }
    // Replace 1/c by an approximation closer than both r and |1/c|/β; the
    // kernel cannot tell them apart.
    let inv_size = c.abs().inv()?;
    let shrink = inv_size.mul(&AbsValue::Finite(crate::rational::int(-1)));
    let precision = p.radius().clone().min(shrink);
    let b = c.inverse_to_precision(&precision)?;
    affine_kernel(p, &DiskPoint::rigid(b))
}

/// Truth of `|f(z) - f(w)| <= ‖f‖ · |z - w|` for `z, w` in the closed unit
/// disk, where `‖f‖` is the Gauss norm.
pub fn tate_lipschitz_check(f: &Poly, z: &ValuedScalar, w: &ValuedScalar) -> Result<bool> {
    if !f.is_plain() {
        return Err(Error::NotPlainPolynomial);
    }
    for v in [z, w] {
        if v.abs() > AbsValue::one() {
            return Err(Error::DomainViolation(format!("|{v}| > 1")));
        }
    }
    let gauss = eval_seminorm(f, &DiskPoint::gauss(f.backend()))?;
    let lhs = f.eval(z)?.try_sub(&f.eval(w)?)?.abs();
    Ok(lhs <= gauss.mul(&z.try_sub(w)?.abs()))
}
