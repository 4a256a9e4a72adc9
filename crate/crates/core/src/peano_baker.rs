//! Iterated-integral expansion of the transition matrix for the shifted
//! system B(t) = A(t) + I over the canonical switching schedule.
//!
//! Because B(t) is piecewise constant, every term
//! J_{k+1}(t) = ∫₀ᵗ B(τ) J_k(τ) dτ is a piecewise matrix polynomial and can
//! be carried exactly: integration raises each piece's degree by one and the
//! constant term is fixed by continuity at the breakpoints. No quadrature is
//! involved anywhere, which keeps the partial sums honestly monotone — the
//! foundation of the series-based instability test.

use crate::error::{require, require_positive, Error, Result};
use crate::mat2::Mat2;

/// Largest admissible truncation order. Beyond this the factorial scaling
/// drives every new coefficient far below resolvable magnitude.
pub const MAX_SERIES_ORDER: usize = 60;

/// Coefficient matrices with Frobenius norm below this are snapped to zero —
/// pure denormal hygiene, invisible at the tolerances we assert.
const COEFF_FLUSH: f64 = 1e-300;

/// Number of terms summed when estimating a series tail.
const TAIL_TERMS: usize = 200;

/// A matrix-valued piecewise polynomial: on piece i the value is
/// Σ_j C_j (t − b_i)^j with the C_j stored in ascending order.
#[derive(Debug, Clone)]
pub struct PiecewisePolyMatrix {
    breakpoints: Vec<f64>,
    pieces: Vec<Vec<Mat2>>,
}

impl PiecewisePolyMatrix {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Largest polynomial degree over all pieces.
    pub fn degree(&self) -> usize {
        self.pieces.iter().map(|p| p.len() - 1).max().unwrap_or(0)
    }

    /// Horner evaluation at `t`, which must lie inside the covered interval.
    pub fn evaluate(&self, t: f64) -> Result<Mat2> {
        let (lo, hi) = (self.breakpoints[0], *self.breakpoints.last().unwrap());
        require(
            t.is_finite() && t >= lo && t <= hi,
            "t",
            format!("evaluation point {t} outside [{lo}, {hi}]"),
        )?;
        let idx = self
            .breakpoints
            .partition_point(|&b| b <= t)
            .min(self.pieces.len())
            - 1;
        Ok(horner(&self.pieces[idx], t - self.breakpoints[idx]))
    }
}

fn horner(coeffs: &[Mat2], u: f64) -> Mat2 {
    coeffs
        .iter()
        .rev()
        .fold(Mat2::zero(), |acc, &c| acc * u + c)
}

/// The two constant values of B(t) = A(t) + I: B⁽¹⁾ = [[0, c],[1/(4c), 0]]
/// on the first phase and its transpose B⁽²⁾ on the second. Both square to
/// I/4, which is what makes the closed-form exponentials work out.
pub fn shifted_matrices(c: f64) -> Result<(Mat2, Mat2)> {
    require_positive(c, "c")?;
    let b1 = Mat2::new(0.0, c, 0.25 / c, 0.0);
    Ok((b1, b1.transpose()))
}

/// The terms J₀, …, J_K as exact piecewise polynomials on [0, t_end].
///
/// J₀ ≡ I. Each integration step maps a piece with coefficients C_j to one
/// with coefficients B·C_j/(j+1) shifted up one degree; the new constant term
/// is zero on the first piece and the left-limit value on later pieces.
pub fn pb_terms(c: f64, t_end: f64, k_max: usize) -> Result<Vec<PiecewisePolyMatrix>> {
    let (b1, b2) = shifted_matrices(c)?;
    require(
        t_end.is_finite() && t_end > 0.0 && t_end <= 2.0,
        "t_end",
        format!("series horizon must lie in (0, 2], got {t_end}"),
    )?;
    if k_max > MAX_SERIES_ORDER {
        return Err(Error::DegreeOverflow {
            requested: k_max,
            max: MAX_SERIES_ORDER,
        });
    }
    let (breakpoints, matrices) = if t_end > 1.0 {
        (vec![0.0, 1.0, t_end], vec![b1, b2])
    } else {
        (vec![0.0, t_end], vec![b1])
    };
    let mut terms = Vec::with_capacity(k_max + 1);
    terms.push(PiecewisePolyMatrix {
        breakpoints: breakpoints.clone(),
        pieces: vec![vec![Mat2::identity()]; matrices.len()],
    });
    for _ in 0..k_max {
        let prev = terms.last().unwrap();
        let mut pieces = Vec::with_capacity(prev.pieces.len());
        // Value of the integral at the running left endpoint; ∫₀⁰ = 0.
        let mut carry = Mat2::zero();
        for (i, coeffs) in prev.pieces.iter().enumerate() {
            let b = matrices[i];
            let mut d = Vec::with_capacity(coeffs.len() + 1);
            d.push(carry);
            for (j, &cj) in coeffs.iter().enumerate() {
                let mut m = b * cj * (1.0 / (j + 1) as f64);
                if m.frobenius_norm() < COEFF_FLUSH {
                    m = Mat2::zero();
                }
                d.push(m);
            }
            carry = horner(&d, breakpoints[i + 1] - breakpoints[i]);
            pieces.push(d);
        }
        terms.push(PiecewisePolyMatrix {
            breakpoints: breakpoints.clone(),
            pieces,
        });
    }
    Ok(terms)
}

/// Σ_{k ≤ K} J_k(2; 0): an entrywise-nondecreasing lower approximation of
/// the shifted transition matrix e²·P.
pub fn pb_partial_sum(c: f64, k_max: usize) -> Result<Mat2> {
    let terms = pb_terms(c, 2.0, k_max)?;
    let mut s = Mat2::zero();
    for term in &terms {
        s = s + term.evaluate(2.0)?;
    }
    Ok(s)
}

/// Upper bound Σ_{k > K} (2·M_B)^k / k! on the Frobenius norm of the
/// truncation error at t = 2, where M_B caps the norm of both phase
/// matrices. The sum is truncated at 200 terms, far past the point where
/// factorial decay has taken over for any c this crate deals in.
pub fn pb_tail_bound(c: f64, k_max: usize) -> Result<f64> {
    let (b1, b2) = shifted_matrices(c)?;
    let x = 2.0 * b1.frobenius_norm().max(b2.frobenius_norm());
    // First neglected term x^(K+1)/(K+1)!, built as a running product so
    // large K never overflows an intermediate power.
    let mut term = 1.0;
    for j in 1..=(k_max + 1) {
        term *= x / j as f64;
    }
    let mut sum = 0.0;
    for i in 0..TAIL_TERMS {
        sum += term;
        term *= x / (k_max + 2 + i) as f64;
    }
    Ok(sum)
}

/// The coupling strength above which the first partial sum alone certifies
/// instability: the larger root of 1 + c + 1/(4c) = e², namely
/// (e² − 1)/2 + √(e⁴ − 2e²)/2 ≈ 6.3497.
pub fn pb_instability_threshold() -> f64 {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    (e2 - 1.0) / 2.0 + (e2 * e2 - 2.0 * e2).sqrt() / 2.0
}
