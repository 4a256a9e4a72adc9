//! Planar vectors and 2x2 matrices, plus the closed-form eigensystem and
//! matrix exponential that the rest of the crate is built on.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Column vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x1: f64,
    pub x2: f64,
}

impl Vec2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    /// Polar angle measured from the positive x1-axis, in (-pi, pi].
    pub fn angle(self) -> f64 {
        self.x2.atan2(self.x1)
    }

    /// Rescaled to unit length; `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0).then(|| Vec2::new(self.x1 / n, self.x2 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub fn is_nonnegative(self) -> bool {
        self.x1 >= 0.0 && self.x2 >= 0.0
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x1 + rhs.x1, self.x2 + rhs.x2)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x1 - rhs.x1, self.x2 - rhs.x2)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x1 * s, self.x2 * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x1, -self.x2)
    }
}

/// Dense 2x2 real matrix, row-major fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

/// Eigensystem of a Metzler matrix, ordered so `lambda1` is the dominant
/// eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct SpectralPair {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Unit eigenvector for `lambda1`; both entries strictly positive.
    pub u: Vec2,
    /// Unit eigenvector for `lambda2`; entries have opposite signs.
    pub v: Vec2,
}

impl Mat2 {
    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0)
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a21.is_finite() && self.a22.is_finite()
    }

    /// Both off-diagonal entries strictly positive (cooperative coupling).
    pub fn is_metzler(&self) -> bool {
        self.is_finite() && self.a12 > 0.0 && self.a21 > 0.0
    }

    /// All four entries strictly positive.
    pub fn is_positive(&self) -> bool {
        self.a11 > 0.0 && self.a12 > 0.0 && self.a21 > 0.0 && self.a22 > 0.0
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det.is_nan() || det.abs() <= 1e-300 {
            return Err(Error::SingularMatrix { det });
        }
        Ok(Mat2::new(
            self.a22 / det,
            -self.a12 / det,
            -self.a21 / det,
            self.a11 / det,
        ))
    }

    /// Largest real eigenvalue, or `None` when the spectrum is a complex pair
    /// (negative discriminant). Unlike [`Mat2::spectral`] this does not insist
    /// on strictly positive coupling, so it also applies to matrices like the
    /// identity.
    pub fn dominant_eigenvalue(&self) -> Option<f64> {
        let disc = (self.a11 - self.a22).powi(2) + 4.0 * self.a12 * self.a21;
        (disc >= 0.0).then(|| (self.trace() + disc.sqrt()) / 2.0)
    }

    /// Closed-form eigensystem of a Metzler matrix.
    ///
    /// The discriminant (a11 - a22)^2 + 4 a12 a21 is strictly positive, so the
    /// eigenvalues are real and distinct and the dominant one strictly exceeds
    /// both diagonal entries. The eigenvector formulas branch on the sign of
    /// a11 - a22 so that each denominator is the larger of the two spectral
    /// gaps lambda1 - a11, lambda1 - a22.
    pub fn spectral(&self) -> Result<SpectralPair> {
        if !self.is_metzler() {
            return Err(Error::NotMetzler);
        }
        let disc = ((self.a11 - self.a22).powi(2) + 4.0 * self.a12 * self.a21).sqrt();
        let lambda1 = (self.a11 + self.a22 + disc) / 2.0;
        let lambda2 = self.trace() - lambda1;
        let (u, v) = if self.a11 >= self.a22 {
            (
                Vec2::new(1.0, self.a21 / (lambda1 - self.a22)),
                Vec2::new(self.a12, lambda2 - self.a11),
            )
        } else {
            (
                Vec2::new(self.a12 / (lambda1 - self.a11), 1.0),
                Vec2::new(lambda2 - self.a22, self.a21),
            )
        };
        // Each selected denominator is at least disc/2 > 0, so both
        // normalizations are safe.
        Ok(SpectralPair {
            lambda1,
            lambda2,
            u: u.normalized().expect("dominant eigenvector is nonzero"),
            v: v.normalized().expect("secondary eigenvector is nonzero"),
        })
    }

    /// Matrix exponential exp(t * self), via the split m = alpha I + B with
    /// alpha = trace/2 and B traceless. Then B^2 = omega^2 I with
    /// omega^2 = ((a11 - a22)/2)^2 + a12 a21, and the series collapses to a
    /// cosh/sinh pair (omega^2 > 0), a cos/sin pair (omega^2 < 0), or -- when
    /// omega^2 is negligible against the matrix scale -- the linear polynomial
    /// I + tB with a second-order correction.
    pub fn expm(&self, t: f64) -> Mat2 {
        let half_gap = (self.a11 - self.a22) / 2.0;
        let omega_sq = half_gap * half_gap + self.a12 * self.a21;
        let scale = ((self.a11 + self.a22) / 2.0 * t).exp();
        let norm_sq = self.a11 * self.a11
            + self.a12 * self.a12
            + self.a21 * self.a21
            + self.a22 * self.a22;
        let (f0, f1) = if omega_sq.abs() > 1e-12 * norm_sq {
            if omega_sq > 0.0 {
                let w = omega_sq.sqrt();
                ((w * t).cosh(), (w * t).sinh() / w)
            } else {
                let w = (-omega_sq).sqrt();
                ((w * t).cos(), (w * t).sin() / w)
            }
        } else {
            // Nearly defective: exp(tB) = (1 + t^2 omega^2 / 2) I + t B
            // up to O((t^2 omega^2)^2).
            (1.0 + t * t * omega_sq / 2.0, t)
        };
        Mat2::new(
            scale * (f0 + f1 * half_gap),
            scale * f1 * self.a12,
            scale * f1 * self.a21,
            scale * (f0 - f1 * half_gap),
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.a11 * v.x1 + self.a12 * v.x2,
            self.a21 * v.x1 + self.a22 * v.x2,
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self * -1.0
    }
}
