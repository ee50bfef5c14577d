//! Ambient metric spaces, their symmetry groups and geodesics.
//!
//! Three models are supported: the unit sphere `S^2` with `SO(3)` acting by
//! rotations, the flat torus `T^m = (R / 2 pi Z)^m` with itself acting by
//! translations, and the circle, which is `T^1` with dedicated exact
//! algorithms elsewhere in the crate.
//!
//! Torus coordinates are stored wrapped to `[0, 2 pi)`; coordinate
//! differences are wrapped to `(-pi, pi]`, so an exact half-turn difference
//! is always represented as `+pi`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::rotation::{self, Quaternion, Vec3};
use crate::scalar::Scalar;

/// Largest deviation from unit norm that sphere inputs may have before being
/// rejected. Smaller deviations are renormalized.
pub const SPHERE_INPUT_TOLERANCE: f64 = 1e-6;

/// Ambient space together with its symmetry group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AmbientSpace {
    /// Unit sphere with great-circle distance, acted on by `SO(3)`.
    Sphere2,
    /// Flat torus of dimension `m >= 1`, acted on by translations.
    Torus { m: usize },
    /// Phase circle `T^1`, acted on by rotations.
    Circle,
}

impl AmbientSpace {
    pub fn torus(m: usize) -> Result<Self> {
        if m == 0 {
            return invalid("torus dimension must be at least 1");
        }
        Ok(AmbientSpace::Torus { m })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AmbientSpace::Torus { m: 0 } => invalid("torus dimension must be at least 1"),
            _ => Ok(()),
        }
    }

    /// Number of stored coordinates per point.
    pub fn coordinate_count(&self) -> usize {
        match self {
            AmbientSpace::Sphere2 => 3,
            AmbientSpace::Torus { m } => *m,
            AmbientSpace::Circle => 1,
        }
    }

    /// Number of angular coordinates of a translation group element, or
    /// `None` for the rotation group.
    pub fn angle_count(&self) -> Option<usize> {
        match self {
            AmbientSpace::Sphere2 => None,
            AmbientSpace::Torus { m } => Some(*m),
            AmbientSpace::Circle => Some(1),
        }
    }

    /// True for `Circle` and for `Torus { m: 1 }`.
    pub fn is_one_dimensional_phase(&self) -> bool {
        matches!(self, AmbientSpace::Circle | AmbientSpace::Torus { m: 1 })
    }

    /// Diameter of the space: `pi` for the sphere and circle, `pi sqrt(m)`
    /// for the torus.
    pub fn diameter<S: Scalar>(&self) -> S {
        match self {
            AmbientSpace::Sphere2 | AmbientSpace::Circle => S::PI(),
            AmbientSpace::Torus { m } => S::PI() * S::lit(*m as f64).sqrt(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AmbientSpace::Sphere2 => "sphere2".to_string(),
            AmbientSpace::Torus { m } => format!("torus{m}"),
            AmbientSpace::Circle => "circle".to_string(),
        }
    }
}

/// A point of an ambient space.
#[derive(Debug, Clone, PartialEq)]
pub enum Point<S> {
    /// Unit 3-vector.
    Sphere(Vec3<S>),
    /// Angles in `[0, 2 pi)`; one angle for the circle, `m` for `T^m`.
    Angles(Vec<S>),
}

impl<S: Scalar> Point<S> {
    /// Validated sphere point. Inputs within [`SPHERE_INPUT_TOLERANCE`] of
    /// unit norm are renormalized; vectors already unit to machine precision
    /// are kept bit-for-bit.
    pub fn sphere(v: Vec3<S>) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) {
            return invalid("sphere point has non-finite coordinate");
        }
        let n2 = rotation::dot(&v, &v);
        let n = n2.sqrt();
        if (n - S::one()).abs() > S::lit(SPHERE_INPUT_TOLERANCE) {
            return invalid(format!("sphere point norm {n} is not within 1e-6 of 1"));
        }
        if (n2 - S::one()).abs() <= S::lit(4.0) * S::epsilon() {
            Ok(Point::Sphere(v))
        } else {
            Ok(Point::Sphere(rotation::scale(&v, S::one() / n)))
        }
    }

    /// Point with angular coordinates, wrapped into `[0, 2 pi)`.
    pub fn angles(coords: Vec<S>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("angular point needs at least one coordinate");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return invalid("angular point has non-finite coordinate");
        }
        Ok(Point::Angles(coords.into_iter().map(wrap_angle).collect()))
    }

    pub fn angle(theta: S) -> Result<Self> {
        Self::angles(vec![theta])
    }

    /// Validated point of `space` from raw coordinates.
    pub fn from_coordinates(space: &AmbientSpace, coords: &[S]) -> Result<Self> {
        space.validate()?;
        if coords.len() != space.coordinate_count() {
            return invalid(format!(
                "expected {} coordinates for {}, got {}",
                space.coordinate_count(),
                space.name(),
                coords.len()
            ));
        }
        match space {
            AmbientSpace::Sphere2 => Self::sphere([coords[0], coords[1], coords[2]]),
            _ => Self::angles(coords.to_vec()),
        }
    }

    pub fn coordinates(&self) -> Vec<S> {
        match self {
            Point::Sphere(v) => v.to_vec(),
            Point::Angles(a) => a.clone(),
        }
    }

    pub fn as_sphere(&self) -> Option<&Vec3<S>> {
        match self {
            Point::Sphere(v) => Some(v),
            Point::Angles(_) => None,
        }
    }

    pub fn as_angles(&self) -> Option<&[S]> {
        match self {
            Point::Angles(a) => Some(a),
            Point::Sphere(_) => None,
        }
    }

    /// Checks that the point belongs to `space` and satisfies its invariants.
    pub fn check(&self, space: &AmbientSpace) -> Result<()> {
        match (space, self) {
            (AmbientSpace::Sphere2, Point::Sphere(v)) => {
                let n = rotation::norm(v);
                if (n - S::one()).abs() > S::lit(1e-9) {
                    return invalid("sphere point is not unit length");
                }
                Ok(())
            }
            (AmbientSpace::Sphere2, Point::Angles(_)) => {
                invalid("angular point used in the sphere model")
            }
            (_, Point::Sphere(_)) => invalid("sphere point used in an angular model"),
            (_, Point::Angles(a)) => {
                if a.len() != space.coordinate_count() {
                    return invalid(format!(
                        "point has {} angles but {} expects {}",
                        a.len(),
                        space.name(),
                        space.coordinate_count()
                    ));
                }
                if a.iter().any(|t| !(*t >= S::zero() && *t < S::TAU())) {
                    return invalid("angle outside [0, 2 pi)");
                }
                Ok(())
            }
        }
    }
}

/// Element of the symmetry group of an ambient space.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement<S> {
    Rotation(Quaternion<S>),
    /// Translation vector in `[0, 2 pi)^m`.
    Translation(Vec<S>),
}

impl<S: Scalar> GroupElement<S> {
    pub fn identity(space: &AmbientSpace) -> Self {
        match space.angle_count() {
            None => GroupElement::Rotation(Quaternion::identity()),
            Some(m) => GroupElement::Translation(vec![S::zero(); m]),
        }
    }

    pub fn translation(g: Vec<S>) -> Self {
        GroupElement::Translation(g.into_iter().map(wrap_angle).collect())
    }

    pub fn check(&self, space: &AmbientSpace) -> Result<()> {
        match (space.angle_count(), self) {
            (None, GroupElement::Rotation(q)) => {
                if (q.norm() - S::one()).abs() > S::lit(1e-9) {
                    return invalid("rotation quaternion is not unit norm");
                }
                Ok(())
            }
            (Some(m), GroupElement::Translation(g)) if g.len() == m => Ok(()),
            (Some(m), GroupElement::Translation(g)) => invalid(format!(
                "translation has {} components, space needs {m}",
                g.len()
            )),
            _ => invalid("group element does not act on this space"),
        }
    }

    /// Group inverse.
    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::Rotation(q) => GroupElement::Rotation(q.conjugate()),
            GroupElement::Translation(g) => {
                GroupElement::Translation(g.iter().map(|t| wrap_angle(-*t)).collect())
            }
        }
    }

    /// Group product: `self` after `rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        match (self, rhs) {
            (GroupElement::Rotation(a), GroupElement::Rotation(b)) => {
                Ok(GroupElement::Rotation(a.compose(b)))
            }
            (GroupElement::Translation(a), GroupElement::Translation(b)) if a.len() == b.len() => {
                Ok(GroupElement::Translation(
                    a.iter().zip(b).map(|(s, t)| wrap_angle(*s + *t)).collect(),
                ))
            }
            _ => invalid("cannot compose group elements of different groups"),
        }
    }
}

/// Wraps an angle into `[0, 2 pi)`. Values already in range are returned
/// unchanged.
#[inline]
pub fn wrap_angle<S: Scalar>(theta: S) -> S {
    let tau = S::TAU();
    if theta >= S::zero() && theta < tau {
        return theta;
    }
    let mut r = theta % tau;
    if r < S::zero() {
        r = r + tau;
    }
    if r >= tau {
        r = S::zero();
    }
    r
}

/// Wraps the difference `a - b` of two canonical angles into `(-pi, pi]`.
#[inline]
pub fn wrapped_difference<S: Scalar>(a: S, b: S) -> S {
    let d = a - b;
    wrap_signed(d)
}

/// Wraps an arbitrary real into `(-pi, pi]`.
#[inline]
pub fn wrap_signed<S: Scalar>(d: S) -> S {
    let pi = S::PI();
    let tau = S::TAU();
    if d > -pi && d <= pi {
        return d;
    }
    if d > pi && d <= pi + tau {
        return d - tau;
    }
    if d <= -pi && d > -pi - tau {
        return d + tau;
    }
    let w = wrap_angle(d);
    if w > pi {
        w - tau
    } else {
        w
    }
}

#[inline]
pub(crate) fn sphere_distance<S: Scalar>(u: &Vec3<S>, v: &Vec3<S>) -> S {
    // atan2 form of arccos(<u, v>): same value on unit vectors, accurate
    // near 0 and pi, range [0, pi].
    let c = rotation::dot(u, v).max(-S::one()).min(S::one());
    let s = rotation::norm(&rotation::cross(u, v));
    s.atan2(c)
}

#[inline]
pub(crate) fn torus_distance<S: Scalar>(a: &[S], b: &[S]) -> S {
    if a.len() == 1 {
        return wrapped_difference(a[0], b[0]).abs();
    }
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        let d = wrapped_difference(*x, *y);
        acc = acc + d * d;
    }
    acc.sqrt()
}

/// Geodesic distance between two points of `space`.
pub fn point_distance<S: Scalar>(space: &AmbientSpace, a: &Point<S>, b: &Point<S>) -> Result<S> {
    match (space, a, b) {
        (AmbientSpace::Sphere2, Point::Sphere(u), Point::Sphere(v)) => Ok(sphere_distance(u, v)),
        (AmbientSpace::Sphere2, _, _) => invalid("sphere distance needs sphere points"),
        (_, Point::Angles(x), Point::Angles(y)) => {
            let m = space.coordinate_count();
            if x.len() != m || y.len() != m {
                return invalid(format!("points must have {m} angles"));
            }
            Ok(torus_distance(x, y))
        }
        _ => invalid("angular distance needs angular points"),
    }
}

/// Distance for points already validated against the same space.
#[inline]
pub(crate) fn distance_unchecked<S: Scalar>(a: &Point<S>, b: &Point<S>) -> S {
    match (a, b) {
        (Point::Sphere(u), Point::Sphere(v)) => sphere_distance(u, v),
        (Point::Angles(x), Point::Angles(y)) => torus_distance(x, y),
        _ => S::nan(),
    }
}

/// Applies `g` to `p`, returning the result in canonical form.
pub fn apply_group<S: Scalar>(
    space: &AmbientSpace,
    g: &GroupElement<S>,
    p: &Point<S>,
) -> Result<Point<S>> {
    g.check(space)?;
    p.check(space)?;
    Ok(apply_unchecked(g, p))
}

#[inline]
pub(crate) fn apply_unchecked<S: Scalar>(g: &GroupElement<S>, p: &Point<S>) -> Point<S> {
    match (g, p) {
        (GroupElement::Rotation(q), Point::Sphere(v)) => {
            let r = q.rotate(v);
            Point::Sphere(rotation::normalize(&r).unwrap_or(r))
        }
        (GroupElement::Translation(t), Point::Angles(a)) => {
            Point::Angles(a.iter().zip(t).map(|(x, s)| wrap_angle(*x + *s)).collect())
        }
        _ => p.clone(),
    }
}

/// How geodesics handle endpoints on each other's cut locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutLocus {
    /// Return [`Error::DegenerateGeodesic`].
    #[default]
    Reject,
    /// Use the deterministic tie-break: rotate antipodal sphere pairs
    /// through a fixed reference axis and take the `+pi` representative of
    /// half-turn torus differences.
    Resolve,
}

/// Threshold on `pi - d(a, b)` below which a sphere pair counts as antipodal.
const ANTIPODAL_TOLERANCE: f64 = 1e-12;

/// Point at parameter `t` on the constant-speed minimizing geodesic from `a`
/// to `b`.
pub fn geodesic_point<S: Scalar>(
    space: &AmbientSpace,
    a: &Point<S>,
    b: &Point<S>,
    t: S,
    cut: CutLocus,
) -> Result<Point<S>> {
    a.check(space)?;
    b.check(space)?;
    if !(t >= S::zero() && t <= S::one()) {
        return invalid("geodesic parameter must lie in [0, 1]");
    }
    if t == S::zero() {
        return Ok(a.clone());
    }
    if t == S::one() {
        return Ok(b.clone());
    }
    match (a, b) {
        (Point::Sphere(u), Point::Sphere(v)) => {
            let d = sphere_distance(u, v);
            if d <= S::epsilon() {
                return Ok(a.clone());
            }
            let w = if S::PI() - d <= S::lit(ANTIPODAL_TOLERANCE) {
                if cut == CutLocus::Reject {
                    return Err(Error::DegenerateGeodesic {
                        reason: "antipodal sphere points".into(),
                        tie_break: "rotate through the reference axis least aligned with the start"
                            .into(),
                    });
                }
                reference_perpendicular(u)
            } else {
                let c = rotation::dot(u, v);
                let w = rotation::sub(v, &rotation::scale(u, c));
                rotation::normalize(&w).unwrap_or_else(|| reference_perpendicular(u))
            };
            let angle = t * d;
            let p = rotation::add(
                &rotation::scale(u, angle.cos()),
                &rotation::scale(&w, angle.sin()),
            );
            Ok(Point::Sphere(rotation::normalize(&p).unwrap_or(p)))
        }
        (Point::Angles(x), Point::Angles(y)) => {
            let mut out = Vec::with_capacity(x.len());
            for (xa, yb) in x.iter().zip(y) {
                let d = wrapped_difference(*yb, *xa);
                if d == S::PI() && cut == CutLocus::Reject {
                    return Err(Error::DegenerateGeodesic {
                        reason: "coordinate difference of exactly pi".into(),
                        tie_break: "take the +pi representative".into(),
                    });
                }
                out.push(wrap_angle(*xa + t * d));
            }
            Ok(Point::Angles(out))
        }
        _ => invalid("mismatched point kinds"),
    }
}

/// Unit vector perpendicular to `u`, built from the coordinate axis least
/// aligned with it.
fn reference_perpendicular<S: Scalar>(u: &Vec3<S>) -> Vec3<S> {
    let mut axis = [S::zero(); 3];
    let mut best = 0;
    for k in 1..3 {
        if u[k].abs() < u[best].abs() {
            best = k;
        }
    }
    axis[best] = S::one();
    let w = rotation::sub(&axis, &rotation::scale(u, rotation::dot(&axis, u)));
    rotation::normalize(&w).unwrap_or(axis)
}

/// What [`sample`] draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Point,
    Group,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sample<S> {
    Point(Point<S>),
    Group(GroupElement<S>),
}

/// Uniform point w.r.t. the invariant measure of `space`.
pub fn sample_point<S: Scalar, R: Rng + ?Sized>(space: &AmbientSpace, rng: &mut R) -> Point<S> {
    match space {
        AmbientSpace::Sphere2 => loop {
            let v: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-9 {
                let u = [S::lit(v[0] / n), S::lit(v[1] / n), S::lit(v[2] / n)];
                let u = rotation::normalize(&u).unwrap_or(u);
                return Point::Sphere(u);
            }
        },
        _ => Point::Angles(
            (0..space.coordinate_count())
                .map(|_| wrap_angle(S::lit(rng.random_range(0.0..std::f64::consts::TAU))))
                .collect(),
        ),
    }
}

/// Haar-uniform group element.
pub fn sample_group<S: Scalar, R: Rng + ?Sized>(
    space: &AmbientSpace,
    rng: &mut R,
) -> GroupElement<S> {
    match space.angle_count() {
        None => loop {
            let c: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            if let Some(q) =
                Quaternion::from_components(S::lit(c[0]), S::lit(c[1]), S::lit(c[2]), S::lit(c[3]))
            {
                return GroupElement::Rotation(q);
            }
        },
        Some(m) => GroupElement::Translation(
            (0..m)
                .map(|_| wrap_angle(S::lit(rng.random_range(0.0..std::f64::consts::TAU))))
                .collect(),
        ),
    }
}

/// Deterministic seeded draw.
pub fn sample<S: Scalar>(space: &AmbientSpace, seed: u64, what: SampleKind) -> Sample<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match what {
        SampleKind::Point => Sample::Point(sample_point(space, &mut rng)),
        SampleKind::Group => Sample::Group(sample_group(space, &mut rng)),
    }
}
