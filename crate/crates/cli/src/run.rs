//! The experiment implementations behind each subcommand.
//!
//! Everything here is a thin, deterministic translation layer: validate the
//! resolved settings, call into the library, and lay the results out in the
//! fixed column order for that command. No numerics live in this crate.

use std::fs::File;
use std::io::{BufWriter, Write};

use coopode::analysis::{
    gronwall_audit, nonperiodic_experiment, threshold_diag_bound, threshold_mu, threshold_pb,
    COMPARISON_DT,
};
use coopode::direction_flow::{growth_cone, integrate_direction, rotation_rate};
use coopode::peano_baker::{pb_tail_bound, pb_terms, MAX_SERIES_ORDER};
use coopode::propagation::{floquet, poincare_closed_form, trajectory, IntegratorSettings};
use coopode::schedules::{canonical_pair, canonical_schedule, Schedule};
use coopode::{Mat2, Vec2};

use crate::config::{resolve, Command, Format, Settings};
use crate::report::{Cell, Report};

/// What went wrong, split by exit code contract: validation problems exit
/// with 2, violated mathematical guarantees with 3, anything else with 1.
#[derive(Debug)]
pub enum Failure {
    Core(coopode::Error),
    Io(String),
}

impl From<coopode::Error> for Failure {
    fn from(e: coopode::Error) -> Self {
        Failure::Core(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Core(e) => match e {
                coopode::Error::NotMetzler
                | coopode::Error::NotUnit { .. }
                | coopode::Error::InvalidParameter { .. }
                | coopode::Error::StepTooLarge { .. }
                | coopode::Error::DegreeOverflow { .. } => 2,
                coopode::Error::BoundViolated { .. } => 3,
                coopode::Error::SingularMatrix { .. }
                | coopode::Error::DegenerateTrajectory { .. }
                | coopode::Error::BracketFailure { .. } => 1,
            },
        }
    }
}

pub(crate) fn invalid(field: &'static str, reason: String) -> Failure {
    Failure::Core(coopode::Error::InvalidParameter { field, reason })
}

fn require(cond: bool, field: &'static str, reason: String) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(invalid(field, reason))
    }
}

pub fn run(command: &Command) -> Result<(), Failure> {
    let settings = resolve(command)?;
    let report = match command {
        Command::Analyze(_) => analyze(&settings)?,
        Command::Thresholds(_) => thresholds(&settings)?,
        Command::Sweep(_) => sweep(&settings)?,
        Command::Trajectory(_) => run_trajectory(&settings)?,
        Command::Directions(_) => directions(&settings)?,
        Command::PeanoBaker(_) => peano_baker(&settings)?,
        Command::Smooth(_) => smooth(&settings)?,
        Command::Nonperiodic(_) => nonperiodic(&settings)?,
    };
    emit(&report, &settings)
}

fn emit(report: &Report, settings: &Settings) -> Result<(), Failure> {
    fn write_to<W: Write>(report: &Report, format: Format, w: &mut W) -> std::io::Result<()> {
        match format {
            Format::Csv => report.write_csv(w)?,
            Format::Json => report.write_json(w)?,
        }
        w.flush()
    }
    match &settings.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))?;
            write_to(report, settings.format, &mut BufWriter::new(file))
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => write_to(report, settings.format, &mut std::io::stdout().lock())
            .map_err(|e| Failure::Io(format!("cannot write report: {e}"))),
    }
}

fn analyze(s: &Settings) -> Result<Report, Failure> {
    let sched = Schedule::Piecewise(canonical_schedule(s.c)?);
    let fd = floquet(&sched, &IntegratorSettings::default())?;
    let p = fd.poincare;
    Ok(Report {
        columns: &[
            "c",
            "mu1",
            "mu2",
            "principal_exponent",
            "p11",
            "p12",
            "p21",
            "p22",
        ],
        rows: vec![vec![
            Cell::F(s.c),
            Cell::F(fd.mu1),
            Cell::F(fd.mu2),
            Cell::F(fd.principal_exponent),
            Cell::F(p.a11),
            Cell::F(p.a12),
            Cell::F(p.a21),
            Cell::F(p.a22),
        ]],
    })
}

fn thresholds(s: &Settings) -> Result<Report, Failure> {
    let reports = [
        threshold_mu(s.precision)?,
        threshold_diag_bound(s.precision)?,
        threshold_pb(s.precision)?,
    ];
    Ok(Report {
        columns: &["name", "c_star", "residual"],
        rows: reports
            .iter()
            .map(|r| vec![Cell::S(r.name), Cell::F(r.c_star), Cell::F(r.residual)])
            .collect(),
    })
}

fn sweep(s: &Settings) -> Result<Report, Failure> {
    require(
        s.c_min.is_finite() && s.c_min > 0.0,
        "c_min",
        format!("grid start must be positive, got {}", s.c_min),
    )?;
    require(
        s.c_max.is_finite() && s.c_max > s.c_min,
        "c_max",
        format!("grid end must exceed c_min = {}, got {}", s.c_min, s.c_max),
    )?;
    require(
        s.points >= 2,
        "points",
        format!("grid needs at least 2 points, got {}", s.points),
    )?;
    let mut rows = Vec::with_capacity(s.points as usize);
    for i in 0..s.points {
        // Hit the stated endpoints exactly rather than through rounding.
        let c = if i + 1 == s.points {
            s.c_max
        } else {
            s.c_min + i as f64 * (s.c_max - s.c_min) / (s.points - 1) as f64
        };
        let mu1 = poincare_closed_form(c)?.spectral()?.lambda1;
        let cone = growth_cone(c)?;
        let pb_lower = 1.0 + c + 0.25 / c;
        rows.push(vec![
            Cell::F(c),
            Cell::F(mu1),
            Cell::F(cone.lo),
            Cell::F(cone.hi),
            Cell::F(pb_lower),
        ]);
    }
    Ok(Report {
        columns: &["c", "mu1", "cone_lo", "cone_hi", "pb_lower_bound"],
        rows,
    })
}

fn run_trajectory(s: &Settings) -> Result<Report, Failure> {
    require(
        s.x1.is_finite(),
        "x1",
        format!("start component must be finite, got {}", s.x1),
    )?;
    require(
        s.x2.is_finite(),
        "x2",
        format!("start component must be finite, got {}", s.x2),
    )?;
    require(
        s.horizon.is_finite() && s.horizon > 0.0,
        "horizon",
        format!("horizon must be positive, got {}", s.horizon),
    )?;
    let sched = Schedule::Piecewise(canonical_schedule(s.c)?);
    let x0 = Vec2::new(s.x1, s.x2);
    let tr = trajectory(&sched, x0, 0.0, s.horizon, COMPARISON_DT)?;
    let rows = tr
        .times
        .iter()
        .zip(&tr.states)
        .zip(tr.norms.iter().zip(&tr.angles))
        .map(|((&t, &x), (&norm, &angle))| {
            // d/dt ln||x|| along the solution; NaN sentinel on the zero orbit.
            let ax = sched.evaluate(t) * x;
            let radial_rate = ax.dot(x) / x.dot(x);
            vec![
                Cell::F(t),
                Cell::F(x.x1),
                Cell::F(x.x2),
                Cell::F(norm),
                Cell::F(angle),
                Cell::F(radial_rate),
            ]
        })
        .collect();
    Ok(Report {
        columns: &["t", "x1", "x2", "norm", "angle", "radial_rate"],
        rows,
    })
}

fn directions(s: &Settings) -> Result<Report, Failure> {
    require(
        (0.0..=std::f64::consts::FRAC_PI_2).contains(&s.theta0),
        "theta0",
        format!("starting angle must lie in [0, pi/2], got {}", s.theta0),
    )?;
    require(
        s.horizon.is_finite() && s.horizon > 0.0,
        "horizon",
        format!("horizon must be positive, got {}", s.horizon),
    )?;
    let (a, _) = canonical_pair(s.c)?;
    let y0 = Vec2::new(s.theta0.cos(), s.theta0.sin());
    let tr = integrate_direction(a, y0, s.horizon, s.step)?;
    let mut rows = Vec::with_capacity(tr.times.len());
    for ((&t, &y), &theta) in tr.times.iter().zip(&tr.states).zip(&tr.angles) {
        rows.push(vec![
            Cell::F(t),
            Cell::F(theta),
            Cell::F(rotation_rate(a, y)?),
        ]);
    }
    Ok(Report {
        columns: &["t", "theta", "sigma"],
        rows,
    })
}

fn peano_baker(s: &Settings) -> Result<Report, Failure> {
    require(
        (s.terms as usize) <= MAX_SERIES_ORDER,
        "terms",
        format!(
            "series order must be at most {MAX_SERIES_ORDER}, got {}",
            s.terms
        ),
    )?;
    let terms = pb_terms(s.c, 2.0, s.terms as usize)?;
    let mut rows = Vec::with_capacity(terms.len());
    let mut sum = Mat2::zero();
    for (k, term) in terms.iter().enumerate() {
        sum = sum + term.evaluate(2.0)?;
        let lambda1 = sum.dominant_eigenvalue().unwrap_or(f64::NAN);
        rows.push(vec![
            Cell::I(k as i64),
            Cell::F(sum.a11),
            Cell::F(sum.a12),
            Cell::F(sum.a21),
            Cell::F(sum.a22),
            Cell::F(lambda1),
            Cell::F(pb_tail_bound(s.c, k)?),
        ]);
    }
    Ok(Report {
        columns: &["K", "s11", "s12", "s21", "s22", "lambda1", "tail_bound"],
        rows,
    })
}

fn smooth(s: &Settings) -> Result<Report, Failure> {
    let study = gronwall_audit(s.c, &s.epsilons, s.step)?;
    let rows = study
        .epsilons
        .iter()
        .zip(&study.errors)
        .zip(study.bounds.iter().zip(&study.mus))
        .map(|((&epsilon, &error), (&bound, &mu))| {
            vec![
                Cell::F(epsilon),
                Cell::F(error),
                Cell::F(bound),
                Cell::F(mu),
            ]
        })
        .collect();
    Ok(Report {
        columns: &["epsilon", "error", "bound", "mu_eps"],
        rows,
    })
}

fn nonperiodic(s: &Settings) -> Result<Report, Failure> {
    require(
        s.horizon.is_finite() && s.horizon > 0.0 && s.horizon.fract() == 0.0
            && s.horizon <= u32::MAX as f64,
        "horizon",
        format!("horizon must be a whole number of periods, got {}", s.horizon),
    )?;
    let rep = nonperiodic_experiment(s.c, s.horizon as u32, s.step)?;
    let mut rows = Vec::with_capacity(rep.times.len());
    for (i, &t) in rep.times.iter().enumerate() {
        let (w, v) = (rep.reference[i], rep.perturbed[i]);
        rows.push(vec![
            Cell::F(t),
            Cell::F(w.x1),
            Cell::F(w.x2),
            Cell::F(v.x1),
            Cell::F(v.x2),
            Cell::F(rep.reference_norms[i]),
            Cell::F(rep.perturbed_norms[i]),
        ]);
    }
    Ok(Report {
        columns: &["t", "w1", "w2", "v1", "v2", "norm_w", "norm_v"],
        rows,
    })
}
