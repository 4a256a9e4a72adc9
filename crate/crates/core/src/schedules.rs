//! Time-dependent coefficient schedules t -> A(t): the two-phase periodic
//! system, its eigenvalue-pinned smoothing, and scalar-drift perturbations.

use crate::error::{require, require_positive, Error, Result};
use crate::mat2::Mat2;

/// The two phase matrices of the canonical system: A1 = [[-1, c], [1/(4c), -1]]
/// and its transpose. Both have eigenvalues -1/2 and -3/2 for every c > 0.
pub fn canonical_pair(c: f64) -> Result<(Mat2, Mat2)> {
    require_positive(c, "c")?;
    let a1 = Mat2::new(-1.0, c, 1.0 / (4.0 * c), -1.0);
    Ok((a1, a1.transpose()))
}

/// The canonical period-2 schedule: A1 on [0, 1), its transpose on [1, 2).
pub fn canonical_schedule(c: f64) -> Result<PiecewiseConstantSchedule> {
    let (a1, a2) = canonical_pair(c)?;
    PiecewiseConstantSchedule::new(vec![(1.0, a1), (1.0, a2)])
}

/// Pinned ramp matrix between the two phases: the straight-line interpolation
/// of the off-diagonal entries, diagonally shifted so the dominant eigenvalue
/// stays exactly -1/2 along the whole ramp. s = 0 gives the first phase,
/// s = 1 the second, s = 1/2 the symmetric midpoint.
pub fn interpolant(c: f64, s: f64) -> Result<Mat2> {
    require_positive(c, "c")?;
    require(
        (0.0..=1.0).contains(&s),
        "s",
        format!("ramp coordinate must lie in [0, 1], got {s}"),
    )?;
    Ok(ramp(c, s))
}

fn ramp(c: f64, s: f64) -> Mat2 {
    let s = s.clamp(0.0, 1.0);
    let off12 = (1.0 - s) * c + s / (4.0 * c);
    let off21 = s * c + (1.0 - s) / (4.0 * c);
    // Dominant eigenvalue of [[-1, off12], [off21, -1]] is -1 + sqrt(off12 off21);
    // subtracting (lambda + 1/2) I pins it to -1/2.
    let lambda = -1.0 + (off12 * off21).sqrt();
    let d = -1.0 - (lambda + 0.5);
    Mat2::new(d, off12, off21, d)
}

/// Periodic schedule that holds a fixed matrix on each segment.
#[derive(Debug, Clone)]
pub struct PiecewiseConstantSchedule {
    segments: Vec<(f64, Mat2)>,
    /// Cumulative boundaries: starts at 0, ends at the period.
    boundaries: Vec<f64>,
}

impl PiecewiseConstantSchedule {
    /// `segments` are (duration, matrix) pairs traversed in order and then
    /// repeated with period equal to the total duration. Every matrix must be
    /// Metzler and every duration strictly positive.
    pub fn new(segments: Vec<(f64, Mat2)>) -> Result<Self> {
        require(
            !segments.is_empty(),
            "segments",
            "at least one segment is required",
        )?;
        let mut boundaries = vec![0.0];
        for (i, (duration, m)) in segments.iter().enumerate() {
            require(
                duration.is_finite() && *duration > 0.0,
                "segments",
                format!("segment {i} must have a positive duration, got {duration}"),
            )?;
            if !m.is_metzler() {
                return Err(Error::NotMetzler);
            }
            boundaries.push(boundaries[boundaries.len() - 1] + duration);
        }
        Ok(Self {
            segments,
            boundaries,
        })
    }

    pub fn period(&self) -> f64 {
        self.boundaries[self.boundaries.len() - 1]
    }

    pub fn segments(&self) -> &[(f64, Mat2)] {
        &self.segments
    }

    fn phase(&self, t: f64) -> f64 {
        let p = self.period();
        let ph = t.rem_euclid(p);
        if ph >= p {
            0.0
        } else {
            ph
        }
    }

    /// Matrix in force at time `t`. Right-continuous at segment boundaries,
    /// with evaluate(period) = evaluate(0).
    pub fn evaluate(&self, t: f64) -> Mat2 {
        let ph = self.phase(t);
        let idx = self
            .boundaries
            .partition_point(|&b| b <= ph)
            .min(self.segments.len())
            - 1;
        self.segments[idx].1
    }

    /// Matrix governing the approach to `t` from below (left limit).
    pub(crate) fn evaluate_left(&self, t: f64) -> Mat2 {
        let ph = self.phase(t);
        let ph = if ph == 0.0 { self.period() } else { ph };
        let idx = self
            .boundaries
            .partition_point(|&b| b < ph)
            .min(self.segments.len())
            - 1;
        self.segments[idx].1
    }

    fn kinks(&self) -> Vec<f64> {
        self.boundaries[..self.boundaries.len() - 1].to_vec()
    }
}

/// Continuous replacement of the two-phase schedule: each switch becomes a
/// ramp of width 2*epsilon through the pinned interpolants, so the dominant
/// eigenvalue equals -1/2 at every instant. Period 2; epsilon in (0, 1/4).
#[derive(Debug, Clone)]
pub struct SmoothedSchedule {
    c: f64,
    epsilon: f64,
    a1: Mat2,
    a2: Mat2,
}

impl SmoothedSchedule {
    pub fn new(c: f64, epsilon: f64) -> Result<Self> {
        let (a1, a2) = canonical_pair(c)?;
        require(
            epsilon.is_finite() && epsilon > 0.0 && epsilon < 0.25,
            "epsilon",
            format!("ramp width must lie in (0, 1/4), got {epsilon}"),
        )?;
        Ok(Self { c, epsilon, a1, a2 })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub const fn period(&self) -> f64 {
        2.0
    }

    pub fn evaluate(&self, t: f64) -> Mat2 {
        let e = self.epsilon;
        let ph = t.rem_euclid(2.0);
        let ph = if ph >= 2.0 { 0.0 } else { ph };
        if ph <= e {
            // tail of the wrap-around ramp: s runs 1/2 -> 0 as ph runs 0 -> e
            ramp(self.c, 0.5 - ph / (2.0 * e))
        } else if ph <= 1.0 - e {
            self.a1
        } else if ph <= 1.0 + e {
            ramp(self.c, (ph - 1.0) / (2.0 * e) + 0.5)
        } else if ph <= 2.0 - e {
            self.a2
        } else {
            ramp(self.c, (2.0 - ph) / (2.0 * e) + 0.5)
        }
    }

    fn kinks(&self) -> Vec<f64> {
        let e = self.epsilon;
        vec![0.0, e, 1.0 - e, 1.0 + e, 2.0 - e]
    }
}

/// Scalar drift a(t) added to the diagonal of a base schedule: A(t) + a(t) I.
#[derive(Debug, Clone)]
pub enum Drift {
    /// (2 + sin t + sin(sqrt(2) t)) / 16. Quasi-periodic; the two frequencies
    /// are incommensurate, so the value stays strictly inside (0, 1/4).
    QuasiPeriodic,
    /// Piecewise-linear interpolation through (t, a) samples, clamped to the
    /// end values outside the sampled range.
    Tabulated(Vec<(f64, f64)>),
}

/// The drift used by the slow-destabilization experiment.
pub fn default_drift() -> Drift {
    Drift::QuasiPeriodic
}

impl Drift {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Drift::QuasiPeriodic => {
                (2.0 + t.sin() + (std::f64::consts::SQRT_2 * t).sin()) / 16.0
            }
            Drift::Tabulated(samples) => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let idx = samples.partition_point(|&(ti, _)| ti <= t) - 1;
                let (t0, a0) = samples[idx];
                let (t1, a1) = samples[idx + 1];
                a0 + (a1 - a0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let Drift::Tabulated(samples) = self {
            require(!samples.is_empty(), "drift", "needs at least one sample")?;
            for w in samples.windows(2) {
                require(
                    w[0].0 < w[1].0,
                    "drift",
                    "sample times must be strictly increasing",
                )?;
            }
            for &(t, a) in samples {
                require(
                    t.is_finite() && a.is_finite() && (0.0..0.25).contains(&a),
                    "drift",
                    format!("sample ({t}, {a}) outside the admissible band [0, 1/4)"),
                )?;
            }
        }
        Ok(())
    }
}

/// A base schedule with a scalar drift added to its diagonal.
#[derive(Debug, Clone)]
pub struct PerturbedSchedule {
    base: Box<Schedule>,
    drift: Drift,
}

impl PerturbedSchedule {
    pub fn new(base: Schedule, drift: Drift) -> Result<Self> {
        require(
            !matches!(base, Schedule::Perturbed(_)),
            "base",
            "perturbations cannot be nested",
        )?;
        drift.validate()?;
        Ok(Self {
            base: Box::new(base),
            drift,
        })
    }

    pub fn base(&self) -> &Schedule {
        &self.base
    }

    pub fn drift(&self) -> &Drift {
        &self.drift
    }

    pub fn evaluate(&self, t: f64) -> Mat2 {
        self.base.evaluate(t) + Mat2::identity() * self.drift.value(t)
    }

    pub(crate) fn evaluate_left(&self, t: f64) -> Mat2 {
        self.base.evaluate_left(t) + Mat2::identity() * self.drift.value(t)
    }
}

/// Any of the three schedule flavors, for code that propagates along whatever
/// it is handed.
#[derive(Debug, Clone)]
pub enum Schedule {
    Piecewise(PiecewiseConstantSchedule),
    Smoothed(SmoothedSchedule),
    Perturbed(PerturbedSchedule),
}

impl Schedule {
    pub fn evaluate(&self, t: f64) -> Mat2 {
        match self {
            Schedule::Piecewise(s) => s.evaluate(t),
            Schedule::Smoothed(s) => s.evaluate(t),
            Schedule::Perturbed(s) => s.evaluate(t),
        }
    }

    /// Left limit of the coefficient map at `t`; differs from `evaluate` only
    /// at the jump times of a piecewise schedule.
    pub(crate) fn evaluate_left(&self, t: f64) -> Mat2 {
        match self {
            Schedule::Piecewise(s) => s.evaluate_left(t),
            Schedule::Smoothed(s) => s.evaluate(t),
            Schedule::Perturbed(s) => s.evaluate_left(t),
        }
    }

    /// Period of the coefficient map; `None` for drift-perturbed schedules,
    /// whose drift never repeats.
    pub fn period(&self) -> Option<f64> {
        match self {
            Schedule::Piecewise(s) => Some(s.period()),
            Schedule::Smoothed(s) => Some(s.period()),
            Schedule::Perturbed(_) => None,
        }
    }

    /// Times within one repeating pattern where the map may lose smoothness,
    /// plus the pattern length. For perturbed schedules these come from the
    /// base (the drift itself is smooth).
    pub(crate) fn kink_pattern(&self) -> (Vec<f64>, f64) {
        match self {
            Schedule::Piecewise(s) => (s.kinks(), s.period()),
            Schedule::Smoothed(s) => (s.kinks(), s.period()),
            Schedule::Perturbed(s) => s.base.kink_pattern(),
        }
    }
}

/// All absolute kink times strictly inside (t0, t1), sorted.
pub(crate) fn kink_times_between(s: &Schedule, t0: f64, t1: f64) -> Vec<f64> {
    let (kinks, pattern) = s.kink_pattern();
    let mut out = Vec::new();
    let m0 = (t0 / pattern).floor() as i64 - 1;
    let m1 = (t1 / pattern).ceil() as i64 + 1;
    for m in m0..=m1 {
        let base = m as f64 * pattern;
        for &k in &kinks {
            let t = base + k;
            if t > t0 && t < t1 {
                out.push(t);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Conservative supremum of ||A(t)||_F over one period: the maximum over a
/// 1e-3-spaced grid (plus every kink time), inflated by 1%. Only defined for
/// periodic schedules.
pub fn schedule_norm_bound(s: &Schedule) -> Result<f64> {
    let period = s.period().ok_or(Error::InvalidParameter {
        field: "schedule",
        reason: "norm bound requires a periodic schedule".to_string(),
    })?;
    let n = (period / 1e-3).ceil() as usize;
    let mut sup: f64 = 0.0;
    for i in 0..=n {
        let t = (i as f64 * 1e-3).min(period);
        sup = sup.max(s.evaluate(t).frobenius_norm());
    }
    for t in kink_times_between(s, 0.0, period) {
        sup = sup.max(s.evaluate(t).frobenius_norm());
    }
    Ok(sup * 1.01)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_pair_is_transposed_phase() {
        let (a1, a2) = canonical_pair(3.0).unwrap();
        assert_eq!(a1, Mat2::new(-1.0, 3.0, 1.0 / 12.0, -1.0));
        assert_eq!(a2, a1.transpose());
        assert!(canonical_pair(0.0).is_err());
        assert!(canonical_pair(-2.0).is_err());
    }

    #[test]
    fn canonical_schedule_alternates_phases() {
        let s = canonical_schedule(3.0).unwrap();
        let (a1, a2) = canonical_pair(3.0).unwrap();
        assert_eq!(s.period(), 2.0);
        assert_eq!(s.evaluate(0.5), a1);
        assert_eq!(s.evaluate(1.5), a2);
        assert_eq!(s.evaluate(2.5), a1); // periodic extension
        assert_eq!(s.evaluate(2.0), s.evaluate(0.0));
        assert_eq!(s.evaluate(-0.5), a2); // t = -0.5 has phase 1.5
        assert_eq!(s.evaluate(1.0), a2); // right-continuous at the switch
        assert_eq!(s.evaluate_left(1.0), a1);
        assert_eq!(s.evaluate_left(2.0), a2);
    }

    #[test]
    fn interpolant_endpoints_recover_phases() {
        let (a1, a2) = canonical_pair(3.0).unwrap();
        let tol = 1e-14;
        assert!((interpolant(3.0, 0.0).unwrap() - a1).frobenius_norm() < tol);
        assert!((interpolant(3.0, 1.0).unwrap() - a2).frobenius_norm() < tol);
        assert!(interpolant(3.0, -0.1).is_err());
        assert!(interpolant(3.0, 1.1).is_err());
    }

    #[test]
    fn interpolant_pins_dominant_eigenvalue() {
        for c in [0.5, 3.0, 10.0] {
            for i in 0..=1000 {
                let s = i as f64 / 1000.0;
                let sp = interpolant(c, s).unwrap().spectral().unwrap();
                assert!(
                    (sp.lambda1 + 0.5).abs() < 1e-13,
                    "eigenvalue drifted to {} at c={c}, s={s}",
                    sp.lambda1
                );
            }
        }
    }

    #[test]
    fn interpolant_midpoint_is_symmetric() {
        let c = 3.0;
        let mid = interpolant(c, 0.5).unwrap();
        assert_eq!(mid.a12, mid.a21);
        let off = c / 2.0 + 1.0 / (8.0 * c);
        assert!((mid.a12 - off).abs() < 1e-15);
        // Unshifted midpoint eigenvalue is -1 + off; the shift moves it to -1/2.
        assert!((mid.spectral().unwrap().lambda1 + 0.5).abs() < 1e-14);
    }

    #[test]
    fn smoothed_schedule_flat_sections_match_phases() {
        let s = SmoothedSchedule::new(3.0, 0.1).unwrap();
        let (a1, a2) = canonical_pair(3.0).unwrap();
        assert_eq!(s.evaluate(0.5), a1);
        assert_eq!(s.evaluate(0.1), a1); // ramp endpoint hands over exactly
        assert_eq!(s.evaluate(1.5), a2);
        let mid = interpolant(3.0, 0.5).unwrap();
        assert!((s.evaluate(1.0) - mid).frobenius_norm() < 1e-15);
        assert!((s.evaluate(2.0) - mid).frobenius_norm() < 1e-15);
        assert!((s.evaluate(0.0) - s.evaluate(2.0)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn smoothed_schedule_is_continuous() {
        // One Lipschitz constant has to work across all grid spacings.
        // The steepest spot is a ramp end, where the eigenvalue-pinning
        // diagonal moves at (c - 1/(4c))^2 per unit s; for c = 3, eps = 0.1
        // the slope in t comes to ~64.
        let s = SmoothedSchedule::new(3.0, 0.1).unwrap();
        for dt in [1e-2f64, 1e-3, 1e-4] {
            let n = (2.2 / dt).round() as usize;
            let mut max_jump: f64 = 0.0;
            for i in 0..n {
                let (a, b) = (-0.05 + i as f64 * dt, -0.05 + (i + 1) as f64 * dt);
                max_jump = max_jump.max((s.evaluate(b) - s.evaluate(a)).frobenius_norm());
            }
            assert!(
                max_jump < 100.0 * dt,
                "jump {max_jump:e} too large for spacing {dt:e}"
            );
        }
    }

    #[test]
    fn smoothed_schedule_rejects_bad_ramp_width() {
        assert!(SmoothedSchedule::new(3.0, 0.0).is_err());
        assert!(SmoothedSchedule::new(3.0, 0.25).is_err());
        assert!(SmoothedSchedule::new(3.0, -0.1).is_err());
        assert!(SmoothedSchedule::new(-1.0, 0.1).is_err());
    }

    #[test]
    fn quasi_periodic_drift_stays_in_band() {
        let d = default_drift();
        let mut t = 0.0;
        while t <= 200.0 {
            let a = d.value(t);
            assert!(a > 0.0 && a < 0.25, "drift {a} escaped (0, 1/4) at t = {t}");
            t += 0.01;
        }
    }

    #[test]
    fn perturbed_schedule_shifts_dominant_eigenvalue_by_drift() {
        let base = Schedule::Piecewise(canonical_schedule(3.0).unwrap());
        let p = PerturbedSchedule::new(base, default_drift()).unwrap();
        for i in 0..500 {
            let t = i as f64 * 0.1;
            let sp = p.evaluate(t).spectral().unwrap();
            let want = -0.5 + p.drift().value(t);
            assert!((sp.lambda1 - want).abs() < 1e-12);
        }
    }

    #[test]
    fn tabulated_drift_interpolates_and_clamps() {
        let d = Drift::Tabulated(vec![(0.0, 0.1), (1.0, 0.2), (3.0, 0.05)]);
        assert_eq!(d.value(-1.0), 0.1);
        assert_eq!(d.value(5.0), 0.05);
        assert!((d.value(0.5) - 0.15).abs() < 1e-15);
        assert!((d.value(2.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn perturbed_schedule_validates_inputs() {
        let base = || Schedule::Piecewise(canonical_schedule(3.0).unwrap());
        // Drift samples outside [0, 1/4) are rejected.
        let too_big = Drift::Tabulated(vec![(0.0, 0.3)]);
        assert!(PerturbedSchedule::new(base(), too_big).is_err());
        let negative = Drift::Tabulated(vec![(0.0, -0.01)]);
        assert!(PerturbedSchedule::new(base(), negative).is_err());
        let unsorted = Drift::Tabulated(vec![(1.0, 0.1), (0.0, 0.1)]);
        assert!(PerturbedSchedule::new(base(), unsorted).is_err());
        // No nesting.
        let inner = PerturbedSchedule::new(base(), default_drift()).unwrap();
        assert!(PerturbedSchedule::new(Schedule::Perturbed(inner), default_drift()).is_err());
    }

    #[test]
    fn zero_drift_reproduces_base_exactly() {
        let base = canonical_schedule(3.0).unwrap();
        let zero = Drift::Tabulated(vec![(0.0, 0.0), (100.0, 0.0)]);
        let p = PerturbedSchedule::new(Schedule::Piecewise(base.clone()), zero).unwrap();
        for i in 0..200 {
            let t = i as f64 * 0.13;
            assert_eq!(p.evaluate(t), base.evaluate(t));
        }
    }

    #[test]
    fn norm_bound_of_canonical_schedule() {
        for c in [0.5, 3.0] {
            let s = Schedule::Piecewise(canonical_schedule(c).unwrap());
            let want = (2.0 + c * c + 1.0 / (16.0 * c * c)).sqrt() * 1.01;
            let got = schedule_norm_bound(&s).unwrap();
            assert!((got - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn norm_bound_of_smoothed_exceeds_piecewise() {
        let c = 3.0;
        let pw = schedule_norm_bound(&Schedule::Piecewise(canonical_schedule(c).unwrap())).unwrap();
        let sm =
            schedule_norm_bound(&Schedule::Smoothed(SmoothedSchedule::new(c, 0.1).unwrap()))
                .unwrap();
        assert!(sm >= pw, "smoothed bound {sm} below piecewise bound {pw}");
    }

    #[test]
    fn norm_bound_rejects_non_periodic_schedule() {
        let base = Schedule::Piecewise(canonical_schedule(3.0).unwrap());
        let p = Schedule::Perturbed(PerturbedSchedule::new(base, default_drift()).unwrap());
        assert!(matches!(
            schedule_norm_bound(&p),
            Err(Error::InvalidParameter { field: "schedule", .. })
        ));
    }

    #[test]
    fn kink_enumeration_covers_requested_window() {
        let s = Schedule::Piecewise(canonical_schedule(3.0).unwrap());
        assert_eq!(kink_times_between(&s, 0.0, 2.0), vec![1.0]);
        assert_eq!(kink_times_between(&s, 0.0, 4.5), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(kink_times_between(&s, -1.5, 0.5), vec![-1.0, 0.0]);
        assert!(kink_times_between(&s, 0.2, 0.9).is_empty());
    }
}
