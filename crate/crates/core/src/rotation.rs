//! Minimal 3-vector and unit quaternion arithmetic for the sphere model.

use crate::scalar::Scalar;

pub type Vec3<S> = [S; 3];

#[inline]
pub fn dot<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm<S: Scalar>(a: &Vec3<S>) -> S {
    dot(a, a).sqrt()
}

#[inline]
pub fn scale<S: Scalar>(a: &Vec3<S>, s: S) -> Vec3<S> {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn add<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Returns `None` for (numerically) zero vectors.
pub fn normalize<S: Scalar>(a: &Vec3<S>) -> Option<Vec3<S>> {
    let n = norm(a);
    if n <= S::epsilon() {
        None
    } else {
        Some(scale(a, S::one() / n))
    }
}

/// Determinant of the 3x3 matrix with columns `a`, `b`, `c`.
#[inline]
pub fn det3<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>, c: &Vec3<S>) -> S {
    dot(a, &cross(b, c))
}

/// Unit quaternion `w + xi + yj + zk` representing a rotation of R^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion<S> {
    pub w: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Quaternion<S> {
    pub fn identity() -> Self {
        Self {
            w: S::one(),
            x: S::zero(),
            y: S::zero(),
            z: S::zero(),
        }
    }

    /// Builds a quaternion from raw components and renormalizes it.
    /// Returns `None` for the zero quaternion.
    pub fn from_components(w: S, x: S, y: S, z: S) -> Option<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n > S::epsilon()) || !n.is_finite() {
            return None;
        }
        Some(Self {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
        })
    }

    pub fn norm(&self) -> S {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn renormalized(self) -> Self {
        Self::from_components(self.w, self.x, self.y, self.z).unwrap_or_else(Self::identity)
    }

    /// Rotation by `|v|` radians about the axis `v / |v|`.
    pub fn from_rotation_vector(v: &Vec3<S>) -> Self {
        let angle = norm(v);
        if angle <= S::epsilon() {
            return Self::identity();
        }
        let half = angle / S::two();
        let s = half.sin() / angle;
        Self {
            w: half.cos(),
            x: v[0] * s,
            y: v[1] * s,
            z: v[2] * s,
        }
        .renormalized()
    }

    pub fn conjugate(&self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Hamilton product `self * rhs`: apply `rhs` first, then `self`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let (a, b) = (self, rhs);
        Self {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
        .renormalized()
    }

    pub fn rotate(&self, v: &Vec3<S>) -> Vec3<S> {
        let u = [self.x, self.y, self.z];
        let t = scale(&cross(&u, v), S::two());
        add(&add(v, &scale(&t, self.w)), &cross(&u, &t))
    }

    /// Rotation matrix with rows as arrays.
    pub fn to_matrix(&self) -> [[S; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let one = S::one();
        let two = S::two();
        [
            [
                one - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                one - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                one - two * (x * x + y * y),
            ],
        ]
    }

    /// Quaternion of a proper rotation matrix (rows as arrays).
    pub fn from_matrix(m: &[[S; 3]; 3]) -> Self {
        let one = S::one();
        let quarter = S::lit(0.25);
        let trace = m[0][0] + m[1][1] + m[2][2];
        let q = if trace > S::zero() {
            let s = (trace + one).sqrt() * S::two();
            Self {
                w: quarter * s,
                x: (m[2][1] - m[1][2]) / s,
                y: (m[0][2] - m[2][0]) / s,
                z: (m[1][0] - m[0][1]) / s,
            }
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = (one + m[0][0] - m[1][1] - m[2][2]).sqrt() * S::two();
            Self {
                w: (m[2][1] - m[1][2]) / s,
                x: quarter * s,
                y: (m[0][1] + m[1][0]) / s,
                z: (m[0][2] + m[2][0]) / s,
            }
        } else if m[1][1] > m[2][2] {
            let s = (one + m[1][1] - m[0][0] - m[2][2]).sqrt() * S::two();
            Self {
                w: (m[0][2] - m[2][0]) / s,
                x: (m[0][1] + m[1][0]) / s,
                y: quarter * s,
                z: (m[1][2] + m[2][1]) / s,
            }
        } else {
            let s = (one + m[2][2] - m[0][0] - m[1][1]).sqrt() * S::two();
            Self {
                w: (m[1][0] - m[0][1]) / s,
                x: (m[0][2] + m[2][0]) / s,
                y: (m[1][2] + m[2][1]) / s,
                z: quarter * s,
            }
        };
        q.renormalized()
    }

    /// Rotation taking the orthonormal frame `from` (columns e1,e2,e3) onto `to`.
    pub fn between_frames(from: &[Vec3<S>; 3], to: &[Vec3<S>; 3]) -> Self {
        // R = T * F^T, with frames stored as columns.
        let mut m = [[S::zero(); 3]; 3];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                let mut acc = S::zero();
                for k in 0..3 {
                    acc = acc + to[k][r] * from[k][c];
                }
                *entry = acc;
            }
        }
        Self::from_matrix(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_vector_quarter_turn() {
        let q = Quaternion::from_rotation_vector(&[0.0, 0.0, std::f64::consts::FRAC_PI_2]);
        let v = q.rotate(&[1.0, 0.0, 0.0]);
        assert!((v[0]).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_round_trip() {
        let q = Quaternion::from_components(0.3f64, -0.5, 0.7, 0.2).unwrap();
        let back = Quaternion::from_matrix(&q.to_matrix());
        let same = (back.w - q.w).abs() < 1e-12 && (back.x - q.x).abs() < 1e-12;
        let neg = (back.w + q.w).abs() < 1e-12 && (back.x + q.x).abs() < 1e-12;
        assert!(same || neg);
    }

    #[test]
    fn composition_matches_sequential_rotation() {
        let a = Quaternion::from_rotation_vector(&[0.1f64, 0.4, -0.3]);
        let b = Quaternion::from_rotation_vector(&[-0.7, 0.2, 0.5]);
        let v = [0.2, 0.3, 0.9];
        let lhs = a.compose(&b).rotate(&v);
        let rhs = a.rotate(&b.rotate(&v));
        for k in 0..3 {
            assert!((lhs[k] - rhs[k]).abs() < 1e-14);
        }
        assert!((a.compose(&b).norm() - 1.0).abs() < 1e-12);
    }
}
