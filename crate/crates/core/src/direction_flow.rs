//! Dynamics of solution directions on the unit circle.
//!
//! For x' = Ax, the normalized state y = x/‖x‖ obeys y' = G(y) with
//! G(y) = (A − (Ay·y)I)y. For a Metzler A the closed positive quadrant of
//! the circle is invariant and carries exactly one equilibrium — the
//! principal eigendirection — so every direction question reduces to
//! one-dimensional reasoning in the angle θ.

use crate::error::{require, require_positive, Error, Result};
use crate::mat2::{Mat2, Vec2};
use crate::propagation::{validate_step, Trajectory};
use crate::solve::bisect;

/// How far ‖y‖ may deviate from 1 before a direction argument is rejected.
pub const UNIT_TOLERANCE: f64 = 1e-10;

/// |σ| at or below this classifies a direction as fixed rather than rotating.
pub const ROTATION_DEADBAND: f64 = 1e-12;

/// Sense of motion of a direction under the circle flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationSign {
    Clockwise,
    Counterclockwise,
    Fixed,
}

/// An open angular interval inside [0, π/2]. When `empty` is set, `lo` and
/// `hi` are NaN so a serialized report cannot mistake them for angles.
#[derive(Debug, Clone, Copy)]
pub struct AngleInterval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

/// The circle vector field G(y) = (A − (Ay·y)I)y; perpendicular to y.
pub fn direction_field(a: Mat2, y: Vec2) -> Result<Vec2> {
    check_unit(y)?;
    Ok(field_raw(a, y))
}

/// The quadratic form Ay·y — for unit y, the instantaneous growth rate of
/// ‖x‖ along the solution pointing in direction y.
pub fn quadratic_form(a: Mat2, y: Vec2) -> f64 {
    (a * y).dot(y)
}

/// Signed rotation rate σ = G(y)·Dy with D the quarter-turn [[0,1],[−1,0]]:
/// positive means the direction moves clockwise (toward smaller angle).
pub fn rotation_rate(a: Mat2, y: Vec2) -> Result<f64> {
    require(a.is_metzler(), "a", "rotation analysis needs a Metzler matrix")
        .map_err(|_| Error::NotMetzler)?;
    check_unit(y)?;
    check_quadrant(y)?;
    Ok(sigma_raw(a, y))
}

/// Classification of `rotation_rate` against the fixed-direction deadband.
pub fn rotation_sign(a: Mat2, y: Vec2) -> Result<RotationSign> {
    let sigma = rotation_rate(a, y)?;
    Ok(if sigma > ROTATION_DEADBAND {
        RotationSign::Clockwise
    } else if sigma < -ROTATION_DEADBAND {
        RotationSign::Counterclockwise
    } else {
        RotationSign::Fixed
    })
}

/// Coupling strength below which no direction grows: the cone of growing
/// directions for the canonical phase matrices is empty iff c ≤ 1 + √3/2.
pub fn growth_cone_threshold() -> f64 {
    1.0 + 3.0f64.sqrt() / 2.0
}

/// Directions θ along which the canonical phase matrix expands the norm:
/// the set where −1 + ½(c + 1/(4c))·sin(2θ) > 0. Empty up to the coupling
/// threshold, afterwards an open interval symmetric about π/4.
pub fn growth_cone(c: f64) -> Result<AngleInterval> {
    require_positive(c, "c")?;
    if c <= growth_cone_threshold() {
        return Ok(AngleInterval {
            lo: f64::NAN,
            hi: f64::NAN,
            empty: true,
        });
    }
    // sin(2θ) at the cone edge; the min() guards the θ-solve against a
    // rounding excursion above 1 just past the threshold.
    let edge = (8.0 * c / (4.0 * c * c + 1.0)).min(1.0);
    let lo = edge.asin() / 2.0;
    Ok(AngleInterval {
        lo,
        hi: std::f64::consts::FRAC_PI_2 - lo,
        empty: false,
    })
}

/// The unique angle θ₀ in (0, π/2) where the rotation rate changes sign —
/// the principal eigendirection — located by bisection to 1e-12.
pub fn sign_change_angle(a: Mat2) -> Result<f64> {
    if !a.is_metzler() {
        return Err(Error::NotMetzler);
    }
    // σ(0) = −a21 < 0 and σ(π/2) = a12 > 0, so the bracket always works.
    let f = |theta: f64| sigma_raw(a, Vec2::new(theta.cos(), theta.sin()));
    let (theta0, _) = bisect(f, 0.0, std::f64::consts::FRAC_PI_2, 1e-12)?;
    Ok(theta0)
}

/// RK4 integration of y' = G(y) with renormalization to the unit circle
/// after every step. Samples land on the dt-grid with the last step
/// shortened to end exactly at T.
pub fn integrate_direction(a: Mat2, y0: Vec2, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !a.is_metzler() {
        return Err(Error::NotMetzler);
    }
    check_unit(y0)?;
    check_quadrant(y0)?;
    validate_step(dt)?;
    require(
        t_end.is_finite() && t_end > 0.0,
        "t_end",
        format!("horizon must be positive, got {t_end}"),
    )?;
    let n = (t_end / dt).ceil().max(1.0) as u64;
    let mut tr = Trajectory {
        times: Vec::with_capacity(n as usize + 1),
        states: Vec::with_capacity(n as usize + 1),
        norms: Vec::with_capacity(n as usize + 1),
        angles: Vec::with_capacity(n as usize + 1),
    };
    let mut y = y0;
    let mut t = 0.0;
    tr.times.push(t);
    tr.states.push(y);
    tr.norms.push(y.norm());
    tr.angles.push(y.angle());
    for i in 0..n {
        let end = if i + 1 == n {
            t_end
        } else {
            ((i + 1) as f64 * dt).min(t_end)
        };
        let h = end - t;
        if h > 0.0 {
            let k1 = field_raw(a, y);
            let k2 = field_raw(a, y + k1 * (h / 2.0));
            let k3 = field_raw(a, y + k2 * (h / 2.0));
            let k4 = field_raw(a, y + k3 * h);
            y = y + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
            y = y
                .normalized()
                .ok_or(Error::DegenerateTrajectory { t: end })?;
        }
        t = end;
        tr.times.push(t);
        tr.states.push(y);
        tr.norms.push(y.norm());
        tr.angles.push(y.angle());
    }
    Ok(tr)
}

fn field_raw(a: Mat2, y: Vec2) -> Vec2 {
    let ay = a * y;
    ay - y * ay.dot(y)
}

fn sigma_raw(a: Mat2, y: Vec2) -> f64 {
    let g = field_raw(a, y);
    g.x1 * y.x2 - g.x2 * y.x1
}

fn check_unit(y: Vec2) -> Result<()> {
    if (y.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnit { x1: y.x1, x2: y.x2 });
    }
    Ok(())
}

fn check_quadrant(y: Vec2) -> Result<()> {
    if !y.is_nonnegative() {
        return Err(Error::NotUnit { x1: y.x1, x2: y.x2 });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::canonical_pair;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn unit(theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }

    #[test]
    fn field_on_axes_is_exact() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        let gx = direction_field(a1, Vec2::new(1.0, 0.0)).unwrap();
        assert_eq!((gx.x1, gx.x2), (0.0, a1.a21));
        let gy = direction_field(a1, Vec2::new(0.0, 1.0)).unwrap();
        assert_eq!((gy.x1, gy.x2), (a1.a12, 0.0));
    }

    #[test]
    fn field_vanishes_on_principal_eigendirection() {
        for c in [0.5, 3.0, 10.0] {
            let (a1, a2) = canonical_pair(c).unwrap();
            for a in [a1, a2] {
                let u = a.spectral().unwrap().u;
                assert!(direction_field(a, u).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn field_is_perpendicular_to_its_argument() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        for i in 0..100 {
            let y = unit(FRAC_PI_2 * i as f64 / 99.0);
            let g = direction_field(a1, y).unwrap();
            assert!(g.dot(y).abs() < 1e-12);
        }
    }

    #[test]
    fn field_rejects_non_unit_input() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        assert!(matches!(
            direction_field(a1, Vec2::new(1.0, 1.0)),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn rotation_sense_on_the_axes() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        // Both axes rotate toward the interior equilibrium: the first axis
        // counterclockwise (angle up), the second clockwise (angle down).
        assert_eq!(
            rotation_sign(a1, Vec2::new(1.0, 0.0)).unwrap(),
            RotationSign::Counterclockwise
        );
        assert_eq!(
            rotation_sign(a1, Vec2::new(0.0, 1.0)).unwrap(),
            RotationSign::Clockwise
        );
        let u = a1.spectral().unwrap().u;
        assert_eq!(rotation_sign(a1, u).unwrap(), RotationSign::Fixed);
    }

    #[test]
    fn rotation_rate_validates_arguments() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        assert!(matches!(
            rotation_rate(Mat2::identity(), Vec2::new(1.0, 0.0)),
            Err(Error::NotMetzler)
        ));
        assert!(matches!(
            rotation_rate(a1, Vec2::new(0.6, 0.7)),
            Err(Error::NotUnit { .. })
        ));
        // Unit but outside the nonnegative quadrant.
        assert!(rotation_rate(a1, unit(-0.3)).is_err());
    }

    #[test]
    fn rotation_rate_changes_sign_exactly_once() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        let theta0 = sign_change_angle(a1).unwrap();
        let n = 10_000;
        let mut flips = 0;
        let mut prev = rotation_rate(a1, unit(0.0)).unwrap();
        assert!(prev < 0.0);
        for i in 1..=n {
            let sigma = rotation_rate(a1, unit(FRAC_PI_2 * i as f64 / n as f64)).unwrap();
            if sigma.signum() != prev.signum() {
                flips += 1;
                let left = FRAC_PI_2 * (i - 1) as f64 / n as f64;
                let right = FRAC_PI_2 * i as f64 / n as f64;
                assert!(left <= theta0 && theta0 <= right);
            }
            prev = sigma;
        }
        assert_eq!(flips, 1);
        assert!(rotation_rate(a1, unit(FRAC_PI_2)).unwrap() > 0.0);
    }

    #[test]
    fn sign_change_angle_closed_forms() {
        for c in [0.5, 3.0, 10.0] {
            let (a1, a2) = canonical_pair(c).unwrap();
            let t1 = sign_change_angle(a1).unwrap();
            assert!(
                (t1 - (1.0 / (2.0 * c)).atan()).abs() < 1e-10,
                "first phase angle off at c = {c}"
            );
            let t2 = sign_change_angle(a2).unwrap();
            assert!((t2 - (2.0 * c).atan()).abs() < 1e-10);
            // The zero of sigma is the principal eigendirection.
            let u = a1.spectral().unwrap().u;
            assert!((unit(t1) - u).norm() < 1e-10);
        }
        let exchange = Mat2::new(0.0, 1.0, 1.0, 0.0);
        assert!((sign_change_angle(exchange).unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert!(sign_change_angle(Mat2::identity()).is_err());
    }

    #[test]
    fn quadratic_form_matches_angle_formula() {
        let c = 3.0;
        let (a1, a2) = canonical_pair(c).unwrap();
        for i in 0..=200 {
            let theta = FRAC_PI_2 * i as f64 / 200.0;
            let y = unit(theta);
            let want = -1.0 + 0.5 * (c + 0.25 / c) * (2.0 * theta).sin();
            assert!((quadratic_form(a1, y) - want).abs() < 1e-14);
            // The form only sees the symmetric part, so the transposed
            // phase agrees at every direction.
            assert!((quadratic_form(a2, y) - quadratic_form(a1, y)).abs() < 1e-14);
        }
        let u = a1.spectral().unwrap().u;
        assert!((quadratic_form(a1, u) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_negative_for_negative_definite_matrix() {
        let m = Mat2::new(-2.0, 1.0, 1.0, -2.0); // eigenvalues -1, -3
        for i in 0..=360 {
            let y = unit(2.0 * std::f64::consts::PI * i as f64 / 360.0);
            assert!(quadratic_form(m, y) < 0.0);
        }
    }

    #[test]
    fn growth_cone_opens_past_the_threshold() {
        let c_star = growth_cone_threshold();
        assert!((c_star - 1.866025403784).abs() < 1e-10);
        for c in [0.5, 1.0, c_star] {
            let cone = growth_cone(c).unwrap();
            assert!(cone.empty);
            assert!(cone.lo.is_nan() && cone.hi.is_nan());
        }
        for c in [c_star + 1e-6, 3.0, 10.0] {
            let cone = growth_cone(c).unwrap();
            assert!(!cone.empty);
            assert!(0.0 < cone.lo && cone.lo < cone.hi && cone.hi < FRAC_PI_2);
            // Symmetric about the diagonal direction.
            assert!((cone.lo + cone.hi - FRAC_PI_2).abs() < 1e-12);
        }
        assert!(growth_cone(0.0).is_err());
    }

    #[test]
    fn growth_cone_edges_match_sign_changes_of_the_form() {
        // Oracle: bisect the angle formula itself on [tiny, pi/4]; the cone
        // edge is where the radial growth rate crosses zero.
        let (a1, _) = canonical_pair(3.0).unwrap();
        let cone = growth_cone(3.0).unwrap();
        let f = |theta: f64| quadratic_form(a1, unit(theta));
        let (lo, _) = crate::solve::bisect(f, 1e-9, FRAC_PI_4, 1e-12).unwrap();
        assert!((lo - cone.lo).abs() < 1e-9);
        // Interior grows, exterior shrinks.
        assert!(f((cone.lo + cone.hi) / 2.0) > 0.0);
        assert!(f(cone.lo / 2.0) < 0.0);
        assert!(f(cone.hi + 0.9 * (FRAC_PI_2 - cone.hi)) < 0.0);
    }

    #[test]
    fn directions_converge_to_the_eigendirection() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        let u = a1.spectral().unwrap().u;
        let from_x = integrate_direction(a1, Vec2::new(1.0, 0.0), 50.0, 1e-3).unwrap();
        assert!((*from_x.states.last().unwrap() - u).norm() < 1e-8);
        // Approach from below is counterclockwise: angles never decrease.
        for w in from_x.angles.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        let from_y = integrate_direction(a1, Vec2::new(0.0, 1.0), 50.0, 1e-3).unwrap();
        assert!((*from_y.states.last().unwrap() - u).norm() < 1e-8);
        for w in from_y.angles.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        for tr in [&from_x, &from_y] {
            for &n in &tr.norms {
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigendirection_is_stationary() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        let u = a1.spectral().unwrap().u;
        let tr = integrate_direction(a1, u, 5.0, 1e-3).unwrap();
        for y in &tr.states {
            assert!((*y - u).norm() < 1e-12);
        }
    }

    #[test]
    fn direction_path_shadows_the_linear_flow() {
        // The circle flow is the projection of x' = Ax: normalizing the
        // linear solution must reproduce the integrated directions.
        let (a1, _) = canonical_pair(3.0).unwrap();
        let y0 = Vec2::new(1.0, 0.0);
        let dir = integrate_direction(a1, y0, 5.0, 1e-3).unwrap();
        for k in 0..=10 {
            let t = 0.5 * k as f64;
            let x = a1.expm(t) * y0;
            let idx = (t / 1e-3).round() as usize;
            assert!((dir.times[idx] - t).abs() < 1e-12);
            let gap = (x.normalized().unwrap() - dir.states[idx]).norm();
            assert!(gap < 1e-6, "direction drift {gap} at t = {t}");
        }
    }

    #[test]
    fn integrate_direction_validates_inputs() {
        let (a1, _) = canonical_pair(3.0).unwrap();
        let e1 = Vec2::new(1.0, 0.0);
        assert!(integrate_direction(Mat2::identity(), e1, 1.0, 1e-3).is_err());
        assert!(integrate_direction(a1, Vec2::new(0.5, 0.5), 1.0, 1e-3).is_err());
        assert!(integrate_direction(a1, unit(-0.4), 1.0, 1e-3).is_err());
        assert!(matches!(
            integrate_direction(a1, e1, 1.0, 0.02),
            Err(Error::StepTooLarge { .. })
        ));
        assert!(integrate_direction(a1, e1, 0.0, 1e-3).is_err());
    }
}
