//! The non-Archimedean Fubini–Study derivative of maps into `P^N`, its
//! behaviour under composition and under `PGL(2, k°)`, and the exact image
//! of a disk point under a polynomial map.
//!
//! A map is stored in homogeneous coordinates `[f_0 : … : f_N]`. The
//! Wronskian minors `f_i' f_j - f_j' f_i` are formed once, symbolically,
//! at construction; evaluating the derivative is then a handful of
//! seminorm evaluations.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{AbsValue, Backend, ValuedScalar};
use crate::points::{eval_seminorm, weighted_max, DiskPoint, Poly, ProjPoint};

/// Where a map is declared to be defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Domain {
    ProjectiveLine,
    AffineLine,
    /// `|T| <= radius` (closed) or `|T| < radius` (open).
    Disk { radius: AbsValue, closed: bool },
    /// `inner < |T| < outer`; `outer = None` is unbounded.
    Annulus {
        inner: AbsValue,
        outer: Option<AbsValue>,
    },
}

impl Domain {
    pub fn unit_disk() -> Self {
        Domain::Disk {
            radius: AbsValue::one(),
            closed: false,
        }
    }

    pub fn closed_disk(radius: AbsValue) -> Self {
        Domain::Disk {
            radius,
            closed: true,
        }
    }

    pub fn contains(&self, z: &ProjPoint) -> bool {
        let p = match (self, z) {
            (Domain::ProjectiveLine, _) => return true,
            (_, ProjPoint::Infinity(_)) => return false,
            (_, ProjPoint::Affine(p)) => p,
        };
        let size = p.abs_coordinate();
        match self {
            Domain::ProjectiveLine | Domain::AffineLine => true,
            Domain::Disk { radius, closed: true } => size <= *radius,
            Domain::Disk { radius, closed: false } => size < *radius,
            Domain::Annulus { inner, outer } => {
                size > *inner && outer.as_ref().is_none_or(|o| size < *o)
            }
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::ProjectiveLine => write!(f, "P^1"),
            Domain::AffineLine => write!(f, "A^1"),
            Domain::Disk { radius, closed } => {
                write!(f, "|T| {} β^({radius})", if *closed { "<=" } else { "<" })
            }
            Domain::Annulus { inner, outer } => match outer {
                Some(o) => write!(f, "β^({inner}) < |T| < β^({o})"),
                None => write!(f, "β^({inner}) < |T|"),
            },
        }
    }
}

/// A map `[f_0 : … : f_N]` from a domain of the line into `P^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMap {
    coords: Vec<Poly>,
    domain: Domain,
    minors: Vec<Poly>,
}

impl SeriesMap {
    /// Builds a map, bringing the coordinates to a reduced representative:
    /// negative powers of `T` are cleared, a common power of `T` is removed
    /// and, over the `p`-adics, the polynomial gcd is divided out.
    pub fn new(coords: Vec<Poly>, domain: Domain) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput(
                "a map into P^N needs at least two coordinates".into(),
            ));
        }
        let backend = coords[0].backend();
        for c in &coords {
            backend.check_same(c.backend())?;
        }
        if coords.iter().all(Poly::is_zero) {
            return Err(Error::ZeroTuple);
        }
        let coords = reduce(coords);
        let minors = wronskian_minors(&coords);
        Ok(SeriesMap {
            coords,
            domain,
            minors,
        })
    }

    /// `[1 : P]` on the whole line.
    pub fn affine(p: Poly) -> Result<Self> {
        let one = Poly::constant(p.backend().one());
        SeriesMap::new(vec![one, p], Domain::ProjectiveLine)
    }

    pub fn identity(backend: Backend) -> Self {
        SeriesMap::affine(Poly::variable(backend)).expect("identity is valid")
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn backend(&self) -> Backend {
        self.coords[0].backend()
    }

    /// `N` for a map into `P^N`.
    pub fn target_dimension(&self) -> usize {
        self.coords.len() - 1
    }

    /// `max_k deg f_k`.
    pub fn degree(&self) -> i64 {
        self.coords.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    fn check_point(&self, z: &DiskPoint) -> Result<()> {
        self.backend().check_same(z.backend())?;
        if !self.domain.contains(&ProjPoint::Affine(z.clone())) {
            return Err(Error::DomainViolation(format!("{z} not in {}", self.domain)));
        }
        Ok(())
    }
}

impl fmt::Display for SeriesMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, " : ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

fn wronskian_minors(coords: &[Poly]) -> Vec<Poly> {
    let derivs: Vec<Poly> = coords.iter().map(Poly::derivative).collect();
    let mut minors = Vec::new();
    for i in 0..coords.len() {
        for j in (i + 1)..coords.len() {
            minors.push(&(&derivs[i] * &coords[j]) - &(&derivs[j] * &coords[i]));
        }
    }
    minors
}

fn reduce(coords: Vec<Poly>) -> Vec<Poly> {
    let low = coords
        .iter()
        .filter_map(Poly::min_exponent)
        .min()
        .expect("some coordinate is nonzero");
    let mut coords: Vec<Poly> = coords.iter().map(|c| c.shift(-low)).collect();
    if let Backend::Padic(_) = coords[0].backend() {
        let g = coords
            .iter()
            .filter(|c| !c.is_zero())
            .fold(None::<Poly>, |acc, c| {
                Some(match acc {
                    None => monic(c),
                    Some(g) => gcd(&g, c),
                })
            })
            .expect("nonzero coordinate");
        if g.degree().unwrap_or(0) > 0 {
            coords = coords.iter().map(|c| divrem(c, &g).0).collect();
        }
    }
    coords
}

fn monic(p: &Poly) -> Poly {
    let lead = p.terms().values().next_back().expect("nonzero");
    p.scale(&lead.inv().expect("field backend"))
}

/// Division with remainder over a field backend.
fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let backend = a.backend();
    let db = b.degree().expect("nonzero divisor");
    let lead_inv = b.terms()[&db].inv().expect("field backend");
    let mut q = Poly::zero(backend);
    let mut r = a.clone();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let c = &r.terms()[&dr] * &lead_inv;
        let t = Poly::monomial(c, dr - db);
        r = &r - &(&t * b);
        q = &q + &t;
    }
    (q, r)
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = divrem(&a, &b).1;
        a = b;
        b = r;
    }
    monic(&a)
}

/// `|f'(z)| = max(1, |z|^2) · max |W_ij(z)| / max |f_i(z)|^2`.
pub fn fs_derivative(f: &SeriesMap, z: &DiskPoint) -> Result<AbsValue> {
    f.check_point(z)?;
    let size = coordinate_size(f, z)?;
    let wronskian = f
        .minors
        .iter()
        .map(|m| eval_seminorm(m, z))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(AbsValue::Zero);
    let scale = z.abs_coordinate().max_one().pow(2)?;
    scale.mul(&wronskian).div(&size.pow(2)?)
}

/// The derivative at a point of `P^1` in either chart; in the chart at
/// infinity it is computed for `f ∘ (T ↦ 1/T)`, which has the same value.
pub fn fs_derivative_at(f: &SeriesMap, z: &ProjPoint) -> Result<AbsValue> {
    match z {
        ProjPoint::Affine(p) => fs_derivative(f, p),
        ProjPoint::Infinity(w) => {
            if !f.domain.contains(z) {
                return Err(Error::DomainViolation(format!("{z} not in {}", f.domain)));
            }
            let flipped = compose(f, &Generator::Invert.as_map(f.backend()))?
                .with_domain(Domain::ProjectiveLine);
            fs_derivative(&flipped, w)
        }
    }
}

fn coordinate_size(f: &SeriesMap, z: &DiskPoint) -> Result<AbsValue> {
    let size = f
        .coords
        .iter()
        .map(|c| eval_seminorm(c, z))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(AbsValue::Zero);
    if size.is_zero() {
        return Err(Error::DomainViolation(format!(
            "all coordinates vanish at {z}"
        )));
    }
    Ok(size)
}

/// `max_i |f_i'(z)| / max_i |f_i(z)|`, an upper bound for the derivative.
pub fn derivative_bound(f: &SeriesMap, z: &DiskPoint) -> Result<AbsValue> {
    f.check_point(z)?;
    let size = coordinate_size(f, z)?;
    let top = f
        .coords
        .iter()
        .map(|c| eval_seminorm(&c.derivative(), z))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(AbsValue::Zero);
    top.div(&size)
}

/// `f ∘ g` for `g` a map into `P^1`: `f_i` is homogenized to degree
/// `d = deg f` and evaluated at `(g_0, g_1)`.
pub fn compose(f: &SeriesMap, g: &SeriesMap) -> Result<SeriesMap> {
    f.backend().check_same(g.backend())?;
    if g.target_dimension() != 1 {
        return Err(Error::InvalidInput("inner map must land in P^1".into()));
    }
    check_image_in_domain(f, g)?;
    let d = f.degree();
    let (g0, g1) = (&g.coords[0], &g.coords[1]);
    let g0_pows: Vec<Poly> = (0..=d).map(|k| g0.pow(k as u32)).collect();
    let g1_pows: Vec<Poly> = (0..=d).map(|k| g1.pow(k as u32)).collect();
    let coords = f
        .coords
        .iter()
        .map(|fi| {
            fi.terms().iter().fold(Poly::zero(f.backend()), |acc, (k, a)| {
                let k = *k as usize;
                let term = (&g1_pows[k] * &g0_pows[d as usize - k]).scale(a);
                &acc + &term
            })
        })
        .collect();
    SeriesMap::new(coords, g.domain.clone())
}

/// Checks `g(domain(g)) ⊆ domain(f)` where this is decidable from the
/// Shilov point of `g`'s domain; other combinations are checked pointwise
/// at evaluation time.
fn check_image_in_domain(f: &SeriesMap, g: &SeriesMap) -> Result<()> {
    if f.domain == Domain::ProjectiveLine {
        return Ok(());
    }
    let Domain::Disk { radius, .. } = &g.domain else {
        return Ok(());
    };
    let shilov = ProjPoint::Affine(DiskPoint::new(g.backend().zero(), radius.clone()));
    let Ok(image) = image_point(g, &shilov) else {
        return Ok(());
    };
    let contained = match (&f.domain, &image) {
        (Domain::Annulus { inner, .. }, ProjPoint::Affine(p)) if p.contains_zero() => {
            if !inner.is_zero() || p.radius() >= inner {
                return Err(Error::PoleHit(format!(
                    "image {image} meets the hole of {}",
                    f.domain
                )));
            }
            f.domain.contains(&image)
        }
        _ => f.domain.contains(&image),
    };
    if contained || matches!(f.domain, Domain::Disk { closed: false, .. }) {
        // an open disk image is strictly inside its Shilov boundary point
        if contained || image_within_open(&f.domain, &image) {
            return Ok(());
        }
    }
    Err(Error::DomainViolation(format!(
        "image {image} of {} leaves {}",
        g.domain, f.domain
    )))
}

fn image_within_open(domain: &Domain, image: &ProjPoint) -> bool {
    match (domain, image) {
        (Domain::Disk { radius, .. }, ProjPoint::Affine(p)) => p.abs_coordinate() <= *radius,
        _ => false,
    }
}

/// A generator of `PGL(2, k°)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `T ↦ aT` with `|a| = 1`.
    Scale(ValuedScalar),
    /// `T ↦ T + b` with `|b| <= 1`.
    Translate(ValuedScalar),
    /// `T ↦ 1/T`.
    Invert,
}

impl Generator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::Scale(a) if a.abs() != AbsValue::one() => Err(Error::InvalidGenerator(
                format!("scaling by {a} needs |a| = 1"),
            )),
            Generator::Translate(b) if b.abs() > AbsValue::one() => Err(
                Error::InvalidGenerator(format!("translation by {b} needs |b| <= 1")),
            ),
            _ => Ok(()),
        }
    }

    pub fn as_map(&self, backend: Backend) -> SeriesMap {
        let t = Poly::variable(backend);
        let one = Poly::constant(backend.one());
        let coords = match self {
            Generator::Scale(a) => vec![one, t.scale(a)],
            Generator::Translate(b) => vec![one, &t + &Poly::constant(b.clone())],
            Generator::Invert => vec![t, one],
        };
        SeriesMap::new(coords, Domain::ProjectiveLine).expect("generator map is valid")
    }

    /// Image of a point of `P^1`.
    pub fn apply(&self, z: &ProjPoint) -> Result<ProjPoint> {
        self.validate()?;
        if let Generator::Invert = self {
            return Ok(z.invert());
        }
        image_point(&self.as_map(z.backend()), z)
    }
}

/// `f ∘ g` for `g = w_1 ∘ w_2 ∘ … ∘ w_k` given as a word in the generators.
pub fn pgl_apply(word: &[Generator], f: &SeriesMap) -> Result<SeriesMap> {
    let mut out = f.clone();
    for w in word {
        w.validate()?;
        out = compose(&out, &w.as_map(f.backend()))?.with_domain(f.domain.clone());
    }
    Ok(out)
}

/// `max_{i != 0} |a_i| r^i`: the radius of the image of `η_{0,r}` under
/// `f = Σ a_i T^i`.
pub fn image_disk_radius(f: &Poly, r: &AbsValue) -> AbsValue {
    if r.is_zero() {
        return AbsValue::Zero;
    }
    let nonconstant = f
        .terms()
        .iter()
        .filter(|(n, _)| **n != 0)
        .map(|(n, c)| (*n, c.clone()));
    let f = Poly::from_terms(f.backend(), nonconstant).expect("same backend");
    weighted_max(&f, r)
}

/// Image of `η_{a,r}` under a single Laurent polynomial `L` with no pole on
/// the ball: `η_{L(a), |L - L(a)|(η_{a,r})}`. When the ball contains `0`
/// the point is `η_{0,r}` and the image is `η_{a_0, max_{i≠0} |a_i| r^i}`.
pub fn image_of_disk(l: &Poly, z: &DiskPoint) -> Result<DiskPoint> {
    l.backend().check_same(z.backend())?;
    if z.is_rigid() {
        return Ok(DiskPoint::rigid(l.eval(z.center())?));
    }
    if !l.is_plain() && z.contains_zero() {
        let a0 = l
            .coefficient(0)
            .cloned()
            .unwrap_or_else(|| l.backend().zero());
        return Ok(DiskPoint::new(a0, image_disk_radius(l, z.radius())));
    }
    let value = l.eval(z.center())?;
    let radius = eval_seminorm(&(l - &Poly::constant(value.clone())), z)?;
    Ok(DiskPoint::new(value, radius))
}

/// The affine form `L = f_i / f_j` when `f_j = c·T^k` is an invertible
/// monomial.
fn quotient_by_monomial(num: &Poly, den: &Poly) -> Option<Poly> {
    if den.terms().len() != 1 {
        return None;
    }
    let (k, c) = den.terms().iter().next()?;
    let c_inv = c.inv().ok()?;
    Some(num.scale(&c_inv).shift(-k))
}

/// Coordinatewise image `(f_1/f_0, …, f_N/f_0)(z)` as a product of disk
/// points; requires `f_0` to be an invertible monomial.
pub fn affine_image(f: &SeriesMap, z: &DiskPoint) -> Result<Vec<DiskPoint>> {
    f.check_point(z)?;
    let den = &f.coords[0];
    f.coords[1..]
        .iter()
        .map(|c| {
            let l = quotient_by_monomial(c, den).ok_or_else(|| {
                Error::UnsupportedImage(format!("f_0 = {den} is not an invertible monomial"))
            })?;
            image_of_disk(&l, z).map_err(|e| match e {
                Error::NotInvertible(s) => Error::UnsupportedImage(s),
                other => other,
            })
        })
        .collect()
}

/// Image of a point of `P^1` under a map into `P^1` having an invertible
/// monomial coordinate (polynomial maps, the generators of `PGL(2, k°)`,
/// Laurent maps on annuli).
pub fn image_point(g: &SeriesMap, z: &ProjPoint) -> Result<ProjPoint> {
    if g.target_dimension() != 1 {
        return Err(Error::InvalidInput("image_point needs a map into P^1".into()));
    }
    let p = match z {
        ProjPoint::Affine(p) => p,
        ProjPoint::Infinity(w) => {
            let flipped = compose(g, &Generator::Invert.as_map(g.backend()))?
                .with_domain(Domain::ProjectiveLine);
            return image_point(&flipped, &ProjPoint::Affine(w.clone()));
        }
    };
    if !g.domain.contains(z) {
        return Err(Error::DomainViolation(format!("{z} not in {}", g.domain)));
    }
    let (g0, g1) = (&g.coords[0], &g.coords[1]);
    let lift = |e: Error| match e {
        Error::NotInvertible(s) => Error::UnsupportedImage(s),
        other => other,
    };
    if let Some(l) = quotient_by_monomial(g1, g0) {
        if !(p.is_rigid() && p.center().is_zero() && !l.is_plain()) {
            return image_of_disk(&l, p).map(ProjPoint::Affine).map_err(lift);
        }
    }
    if let Some(l) = quotient_by_monomial(g0, g1) {
        if !(p.is_rigid() && p.center().is_zero() && !l.is_plain()) {
            return image_of_disk(&l, p)
                .map(ProjPoint::from_infinity_chart)
                .map_err(lift);
        }
    }
    if p.is_rigid() {
        // rigid pole of g_1/g_0 at a: the image is ∞ or 0
        let (v0, v1) = (g0.eval(p.center())?, g1.eval(p.center())?);
        if v0.is_zero() && !v1.is_zero() {
            return Ok(ProjPoint::infinity(g.backend()));
        }
        if v1.is_zero() && !v0.is_zero() {
            return Ok(ProjPoint::Affine(DiskPoint::rigid(g.backend().zero())));
        }
    }
    Err(Error::UnsupportedImage(format!(
        "no coordinate of {g} is an invertible monomial"
    )))
}

/// `f_n = [1 : c_n T^{p^n}]` with `|c_n| = (p^n)^{p^n}`, i.e. `c_n = p^{-n p^n}`.
pub fn char_p_family(p: u64, n: u32) -> SeriesMap {
    let backend = Backend::Padic(p);
    let pn = p.pow(n);
    let c = backend
        .element_of_magnitude(&crate::rational::int((n as u64 * pn) as i64))
        .expect("integer exponent");
    SeriesMap::affine(Poly::monomial(c, pn as i64)).expect("valid map")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{d_proj, RigidTuple};
    use crate::points::{diam_proj, diam_proj_point};
    use crate::rational::{frac, int};

    const PU: Backend = Backend::Puiseux;
    const P3: Backend = Backend::Padic(3);

    fn eta(b: Backend, c: ValuedScalar, logr: Option<crate::rational::Rational>) -> DiskPoint {
        let _ = b;
        DiskPoint::new(c, logr.map_or(AbsValue::Zero, AbsValue::Finite))
    }

    fn poly(b: Backend, coeffs: &[i64]) -> Poly {
        Poly::from_coefficients(b, coeffs.iter().map(|&c| b.from_int(c)).collect()).unwrap()
    }

    #[test]
    fn identity_has_unit_derivative() {
        for r in [-3i64, -1, 0] {
            let z = eta(PU, PU.zero(), Some(int(r)));
            assert_eq!(fs_derivative(&SeriesMap::identity(PU), &z).unwrap(), AbsValue::one());
        }
    }

    #[test]
    fn square_map_minor_oracle() {
        // [1 : T^2]: minor -2T, |2| = 1 in residue characteristic 0
        let f = SeriesMap::affine(poly(PU, &[0, 0, 1])).unwrap();
        assert_eq!(f.minors, vec![poly(PU, &[0, -2])]);
        for r in [-2i64, -1, 0] {
            let z = eta(PU, PU.zero(), Some(int(r)));
            assert_eq!(fs_derivative(&f, &z).unwrap(), AbsValue::Finite(int(r)));
        }
    }

    #[test]
    fn char_p_closed_form_small_case() {
        // p = 2, n = 1: f = [1 : 2^{-2} T^2], |c| = 4; at ε = 2^{-3}
        let f = char_p_family(2, 1);
        let z = eta(Backend::Padic(2), Backend::Padic(2).zero(), Some(int(-3)));
        // |c| ε^{p^n-1} / (p^n max(1, |c| ε^{p^n})^2) = 4·2^{-3}/2 = 2^{-2}
        assert_eq!(fs_derivative(&f, &z).unwrap(), AbsValue::Finite(int(-2)));
        // (p^n ε)^{p^n - 1} = (2·2^{-3})^1
        assert_eq!(AbsValue::Finite(int(-2)), AbsValue::Finite(int(1 - 3)));
    }

    #[test]
    fn domain_is_enforced() {
        let f = SeriesMap::identity(PU).with_domain(Domain::unit_disk());
        let z = eta(PU, PU.zero(), Some(int(0)));
        assert!(matches!(fs_derivative(&f, &z), Err(Error::DomainViolation(_))));
        let inside = eta(PU, PU.zero(), Some(int(-1)));
        assert!(fs_derivative(&f, &inside).is_ok());
    }

    #[test]
    fn reduction_removes_common_factors() {
        // [T : T^2] = [1 : T]
        let t = Poly::variable(PU);
        let f = SeriesMap::new(vec![t.clone(), &t * &t], Domain::ProjectiveLine).unwrap();
        assert_eq!(f, SeriesMap::identity(PU));
        // padic: [(T-1) : (T-1)(T+2)] = [1 : T+2]
        let a = poly(P3, &[-1, 1]);
        let b = poly(P3, &[2, 1]);
        let f = SeriesMap::new(vec![a.clone(), &a * &b], Domain::ProjectiveLine).unwrap();
        assert_eq!(f.coords(), &[poly(P3, &[1]), b]);
        let z = DiskPoint::rigid(P3.one());
        assert_eq!(fs_derivative(&f, &z).unwrap(), AbsValue::one());
        assert!(matches!(
            SeriesMap::new(vec![Poly::zero(PU), Poly::zero(PU)], Domain::ProjectiveLine),
            Err(Error::ZeroTuple)
        ));
    }

    #[test]
    fn composition_examples() {
        let g = SeriesMap::affine(poly(PU, &[1, 2, 0, 5])).unwrap();
        assert_eq!(compose(&SeriesMap::identity(PU), &g).unwrap(), g);
        let f = SeriesMap::affine(poly(PU, &[0, 0, 1])).unwrap();
        let g = SeriesMap::affine(poly(PU, &[0, 0, 0, 1])).unwrap();
        let h = compose(&f, &g).unwrap();
        assert_eq!(h, SeriesMap::affine(Poly::monomial(PU.one(), 6)).unwrap());
    }

    #[test]
    fn chain_rule_on_sample_points() {
        let f = SeriesMap::affine(poly(P3, &[1, 3, 0, 1])).unwrap();
        let g = SeriesMap::affine(poly(P3, &[2, 0, 9])).unwrap();
        let fg = compose(&f, &g).unwrap();
        for (c, r) in [(0i64, Some(0i64)), (1, Some(-1)), (5, None), (2, Some(-2)), (0, Some(2))] {
            let z = eta(P3, P3.from_int(c), r.map(int));
            let lhs = fs_derivative(&fg, &z).unwrap();
            let gz = image_point(&g, &ProjPoint::Affine(z.clone())).unwrap();
            let rhs = fs_derivative_at(&f, &gz)
                .unwrap()
                .mul(&fs_derivative(&g, &z).unwrap());
            assert_eq!(lhs, rhs, "at {z}");
        }
    }

    #[test]
    fn generators_have_unit_derivative() {
        let b = PU;
        let a = ValuedScalar::puiseux([(int(0), int(2)), (frac(1, 2), int(1))]);
        let gens = [
            Generator::Scale(a.clone()),
            Generator::Translate(ValuedScalar::puiseux([(int(1), int(1))])),
            Generator::Invert,
        ];
        for g in gens {
            for r in [-2i64, 0, 3] {
                let z = eta(b, a.clone(), Some(int(r)));
                assert_eq!(fs_derivative(&g.as_map(b), &z).unwrap(), AbsValue::one());
            }
        }
        assert!(matches!(
            Generator::Scale(ValuedScalar::puiseux([(int(1), int(1))])).validate(),
            Err(Error::InvalidGenerator(_))
        ));
        assert!(matches!(
            Generator::Translate(ValuedScalar::puiseux([(int(-1), int(1))])).validate(),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn pgl_translate_example() {
        let b = PU.from_int(3);
        let f = pgl_apply(&[Generator::Translate(b.clone())], &SeriesMap::identity(PU)).unwrap();
        assert_eq!(f, SeriesMap::affine(poly(PU, &[3, 1])).unwrap());
    }

    #[test]
    fn image_radius_examples() {
        assert_eq!(image_disk_radius(&poly(PU, &[7]), &AbsValue::one()), AbsValue::Zero);
        let r = AbsValue::Finite(frac(-2, 3));
        assert_eq!(
            image_disk_radius(&poly(PU, &[0, 0, 1]), &r),
            AbsValue::Finite(frac(-4, 3))
        );
        assert_eq!(
            image_disk_radius(&poly(P3, &[0, 3]), &AbsValue::one()),
            AbsValue::Finite(int(-1))
        );
    }

    #[test]
    fn diameter_transport_single_case() {
        // residue characteristic 0: diam(f(z)) = diam(z)·|f'(z)|
        let f = SeriesMap::affine(poly(PU, &[1, 1, 0, 4])).unwrap();
        let c = ValuedScalar::puiseux([(int(1), int(2)), (int(2), int(1))]);
        let z = DiskPoint::new(c, AbsValue::Finite(frac(-1, 2)));
        let fz = image_point(&f, &ProjPoint::Affine(z.clone())).unwrap();
        assert_eq!(
            diam_proj_point(&fz),
            diam_proj(std::slice::from_ref(&z)).mul(&fs_derivative(&f, &z).unwrap())
        );
    }

    #[test]
    fn laurent_image_on_annulus() {
        // L = 3T + T^{-1} at η_{0, 3^{-1/2}}... use a type II radius 3^{-1}
        let l = Poly::from_terms(P3, [(1, P3.from_int(3)), (-1, P3.one())]).unwrap();
        let z = DiskPoint::new(P3.zero(), AbsValue::Finite(int(-1)));
        let img = image_of_disk(&l, &z).unwrap();
        // max(3^{-1}·3^{-1}, 3^{1}) = 3
        assert_eq!(img, DiskPoint::new(P3.zero(), AbsValue::Finite(int(1))));
        let f = SeriesMap::new(vec![Poly::constant(P3.one()), l], Domain::Annulus {
            inner: AbsValue::Zero,
            outer: None,
        })
        .unwrap();
        assert_eq!(f.coords()[0], Poly::variable(P3));
        let via_map = image_point(&f, &ProjPoint::Affine(z)).unwrap();
        assert_eq!(via_map, ProjPoint::Affine(img));
    }

    #[test]
    fn lipschitz_ratio_converges_to_derivative() {
        // |f'(x)| is the limit of d_P(f(x), f(y)) / |x - y| as y -> x
        let f = SeriesMap::affine(poly(P3, &[1, 3, 0, 1])).unwrap();
        let to_tuple = |m: &SeriesMap, x: &ValuedScalar| {
            RigidTuple::new(m.coords().iter().map(|c| c.eval(x).unwrap()).collect()).unwrap()
        };
        for x in [P3.zero(), P3.one(), P3.from_rational(frac(2, 5))] {
            let deriv = fs_derivative(&f, &DiskPoint::rigid(x.clone())).unwrap();
            for k in 3..8 {
                let y = &x + &P3.from_int(3i64.pow(k));
                let ratio = d_proj(&to_tuple(&f, &x), &to_tuple(&f, &y))
                    .unwrap()
                    .div(&(&x - &y).abs())
                    .unwrap();
                assert_eq!(ratio, deriv, "x = {x}, k = {k}");
            }
        }
    }
}
