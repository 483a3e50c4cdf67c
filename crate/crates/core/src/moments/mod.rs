//! The headline computations: smoothed first moments of L'_d(E, 1) against
//! the main terms alpha Y log Y + beta Y, the off-diagonal error-term
//! diagnostics, twisted partial sums, and Neron-Tate height sums.

mod error_term;
mod heights;
mod twisted;

pub use error_term::{
    decomposition_identity, error_direct, error_direct_with_majorant, error_split, ErrorSplit,
};
pub use heights::{height_sum, HeightSumReport};
pub use twisted::{
    abel_summation_check, twisted_partial_sum, twisted_suite, TwistedConfig, TwistedSum,
    RECORDED_TWISTED_MAX_RATIO, TWISTED_SUITE_SEED,
};

use crate::afe::{d_sum, SumPart};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::heegner::{unit_u, HeegnerDiscriminant};
use crate::kahan::KahanSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use crate::special::EULER_GAMMA;

/// A number carrying its numerical error bar. Every constant emitted in a
/// report uses this; no bare floats in JSON summaries.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ValErr {
    pub value: f64,
    pub error: f64,
}

/// Smooth compactly supported bump F(t) = exp(-1/((t - t0)(t1 - t))) on
/// (t0, t1), zero outside, with its integrals I0 = int F and
/// I1 = int F log t precomputed to ~1e-12.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BumpFunction {
    pub t0: f64,
    pub t1: f64,
    pub i0: f64,
    pub i1: f64,
    /// overall scale (1 by default; the linearity of alpha, beta in F is
    /// tested through it)
    pub scale: f64,
}

impl BumpFunction {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0 > 0.0 && t1 > t0) {
            return Err(Error::Config(format!(
                "bump support [{t0}, {t1}] must satisfy 0 < t0 < t1"
            )));
        }
        let raw = move |t: f64| {
            if t <= t0 || t >= t1 {
                0.0
            } else {
                (-1.0 / ((t - t0) * (t1 - t))).exp()
            }
        };
        let i0 = integrate_to_tolerance(&raw, t0, t1, 1e-13);
        let i1 = integrate_to_tolerance(&|t: f64| raw(t) * t.ln(), t0, t1, 1e-13);
        Ok(BumpFunction {
            t0,
            t1,
            i0,
            i1,
            scale: 1.0,
        })
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.t0 || t >= self.t1 {
            0.0
        } else {
            self.scale * (-1.0 / ((t - self.t0) * (self.t1 - t))).exp()
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        BumpFunction {
            scale: self.scale * factor,
            i0: self.i0 * factor,
            i1: self.i1 * factor,
            ..*self
        }
    }
}

/// Composite Simpson with interval doubling; the integrands here are smooth
/// and flat at the endpoints, so convergence is fast.
fn integrate_to_tolerance(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let simpson = |n: usize| {
        let h = (b - a) / n as f64;
        let mut acc = KahanSum::new();
        acc.add(f(a) + f(b));
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc.add(w * f(a + h * i as f64));
        }
        acc.value() * h / 3.0
    };
    let mut n = 64;
    let mut prev = simpson(n);
    for _ in 0..14 {
        n *= 2;
        let next = simpson(n);
        if (next - prev).abs() <= tol * next.abs().max(1.0) {
            return next;
        }
        prev = next;
    }
    prev
}

/// The main-term constants of the smoothed first moment.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MainTermConstants {
    pub alpha: ValErr,
    pub beta: ValErr,
    pub c_n: f64,
    pub l1: ValErr,
    pub l1_prime: ValErr,
}

/// alpha = c_N L(1) I0,
/// beta  = c_N [ (L'(1) + L(1)(log(N / 4 pi^2) - 2 gamma)) I0 + L(1) I1 ].
pub fn main_term_constants(ctx: &Context, bump: &BumpFunction) -> Result<MainTermConstants> {
    let c_n = ctx.density_constant();
    let (l1, l1p) = ctx.l_values()?;
    let log_term = (ctx.curve.conductor as f64 / (4.0 * PI * PI)).ln() - 2.0 * EULER_GAMMA;
    let alpha = c_n * l1.value * bump.i0;
    let alpha_err = c_n * l1.error * bump.i0.abs();
    let beta = c_n * ((l1p.value + l1.value * log_term) * bump.i0 + l1.value * bump.i1);
    let beta_err =
        c_n * ((l1p.error + l1.error * log_term.abs()) * bump.i0.abs() + l1.error * bump.i1.abs());
    Ok(MainTermConstants {
        alpha: ValErr {
            value: alpha,
            error: alpha_err,
        },
        beta: ValErr {
            value: beta,
            error: beta_err,
        },
        c_n,
        l1: ValErr {
            value: l1.value,
            error: l1.error,
        },
        l1_prime: ValErr {
            value: l1p.value,
            error: l1p.error,
        },
    })
}

/// One row of per-discriminant output.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerDRow {
    pub d: i64,
    pub l_prime: f64,
    /// Neron-Tate height via Gross-Zagier: h = u^2 sqrt|d| L'_d / (2 Omega).
    pub height: f64,
    pub weight: f64,
}

/// Empirical moment against the predicted main term.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentReport {
    pub y: f64,
    pub empirical: f64,
    pub alpha: f64,
    pub beta: f64,
    pub main_term: f64,
    pub residual: f64,
    pub n_discriminants: usize,
}

impl MomentReport {
    /// The invariant: main_term is exactly alpha y ln y + beta y.
    pub fn recompute_main(&self) -> f64 {
        self.alpha * self.y * self.y.ln() + self.beta * self.y
    }
}

/// All discriminants of the set with a nonzero bump weight, each with its
/// L'_d evaluated in parallel; the reduction is sequential in ascending
/// |d| with compensated summation, so results do not depend on threading.
fn weighted_sum_over_d(
    ctx: &Context,
    bump: &BumpFunction,
    y: f64,
    part: SumPart,
) -> Result<(f64, Vec<PerDRow>)> {
    let y_hi = (bump.t1 * y).floor() as u64;
    if y_hi > ctx.max_abs_d {
        return Err(Error::Config(format!(
            "requested |d| up to {y_hi} but context sized for {}",
            ctx.max_abs_d
        )));
    }
    let set = ctx.enumerate(y_hi)?;
    let members: Vec<&HeegnerDiscriminant> = set
        .discriminants
        .iter()
        .filter(|h| bump.eval(h.d.unsigned_abs() as f64 / y) != 0.0)
        .collect();
    let inputs = ctx.sum_inputs();
    let values: Vec<f64> = members
        .par_iter()
        .map(|h| d_sum(&inputs, h.d, part, crate::afe::Kernel::V))
        .collect::<Result<Vec<f64>>>()?;
    let two_omega = 2.0 * ctx.periods.volume_omega;
    let mut acc = KahanSum::new();
    let mut rows = Vec::with_capacity(members.len());
    for (h, &v) in members.iter().zip(values.iter()) {
        let abs_d = h.d.unsigned_abs() as f64;
        let weight = bump.eval(abs_d / y);
        acc.add(v * weight);
        let u = unit_u(h.d) as f64;
        rows.push(PerDRow {
            d: h.d,
            l_prime: v,
            height: u * u * abs_d.sqrt() * v / two_omega,
            weight,
        });
    }
    Ok((acc.value(), rows))
}

/// The bare weighted sum sum_d L'_d(E,1) F(|d|/Y) with its per-d rows,
/// for callers that do not need the main-term comparison.
pub fn moment_sum(ctx: &Context, bump: &BumpFunction, y: f64) -> Result<(f64, Vec<PerDRow>)> {
    weighted_sum_over_d(ctx, bump, y, SumPart::Full)
}

/// The smoothed first moment sum_{d} L'_d(E,1) F(|d|/Y) with its report.
pub fn empirical_moment(
    ctx: &Context,
    bump: &BumpFunction,
    constants: &MainTermConstants,
    y: f64,
) -> Result<(MomentReport, Vec<PerDRow>)> {
    let (empirical, rows) = weighted_sum_over_d(ctx, bump, y, SumPart::Full)?;
    let main_term = constants.alpha.value * y * y.ln() + constants.beta.value * y;
    Ok((
        MomentReport {
            y,
            empirical,
            alpha: constants.alpha.value,
            beta: constants.beta.value,
            main_term,
            residual: empirical - main_term,
            n_discriminants: rows.len(),
        },
        rows,
    ))
}

/// The diagonal (v = 0) part of the moment sum.
pub fn diagonal_moment(ctx: &Context, bump: &BumpFunction, y: f64) -> Result<f64> {
    Ok(weighted_sum_over_d(ctx, bump, y, SumPart::Diagonal)?.0)
}

/// The u = 0 boundary correction: the ideal-count split
/// r_d = diag + r'_d - (1/2) #{u = 0 solutions} makes
/// empirical = diagonal + error_direct - u0_boundary an exact identity.
pub fn u0_boundary(ctx: &Context, bump: &BumpFunction, y: f64) -> Result<f64> {
    Ok(weighted_sum_over_d(ctx, bump, y, SumPart::UZeroBoundary)?.0)
}

/// Least-squares slope of log|residual| against log Y, with the residuals
/// floored at 1e-3 sqrt(Y) to keep near-zero cancellation flukes from
/// dominating the fit.
pub fn residual_slope(reports: &[MomentReport]) -> f64 {
    assert!(reports.len() >= 2);
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| {
            let floor = 1e-3 * r.y.sqrt();
            (r.y.ln(), r.residual.abs().max(floor).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
