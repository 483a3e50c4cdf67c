//! Period lattice of E(C) by the arithmetic-geometric mean.
//!
//! Working with Y^2 = 4x^3 + b2 x^2 + 2 b4 x + b6 (Y = 2y + a1 x + a3), the
//! real period and the imaginary part of the second lattice generator come
//! from complete elliptic integrals over the real roots, each reduced to an
//! AGM (Cohen, *A Course in Computational Algebraic Number Theory*,
//! Algorithm 7.4.7):
//!
//! * three real roots e1 > e2 > e3 (rectangular lattice):
//!   omega1 = pi / AGM(sqrt(e1-e3), sqrt(e1-e2)),
//!   Im(omega2) = pi / AGM(sqrt(e1-e3), sqrt(e2-e3));
//! * one real root e1, complex pair mu +/- i nu, rho = |e1 - mu - i nu|:
//!   omega1 = pi / AGM(sqrt(rho), sqrt((rho + e1 - mu)/2)),
//!   Im(omega2) = pi / (2 AGM(sqrt(rho), sqrt((rho - e1 + mu)/2))).
//!
//! The complex volume is twice the area of a fundamental parallelogram,
//! i.e. 2 * omega1 * Im(omega2) in both cases.

use super::CurveData;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Real period data and the doubled lattice area.
#[derive(Debug, Clone, Copy)]
pub struct PeriodData {
    /// Real period (least positive real period of the Neron differential).
    pub omega1: f64,
    /// Imaginary part of the second lattice generator.
    pub omega2_im: f64,
    /// True when the lattice is rectangular (three real 2-division points);
    /// otherwise the second generator is omega1/2 + i omega2_im.
    pub rectangular: bool,
    /// Twice the area of a fundamental parallelogram.
    pub volume_omega: f64,
}

const AGM_MAX_ITER: usize = 80;

fn agm(mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    assert!(a > 0.0 && b > 0.0);
    let target = tol.max(4.0 * f64::EPSILON);
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= target * a.abs() {
            return Ok(0.5 * (a + b));
        }
        let (na, nb) = (0.5 * (a + b), (a * b).sqrt());
        a = na;
        b = nb;
    }
    Err(Error::NonConvergence(format!(
        "AGM stalled at a={a}, b={b}"
    )))
}

/// Compute the period data for a curve. `tol` is the AGM stopping tolerance
/// (>= 1e-14; the iteration converges quadratically, so the result is
/// essentially at machine precision).
pub fn periods(curve: &CurveData, tol: f64) -> Result<PeriodData> {
    assert!(tol >= 1e-14, "tolerance below achievable precision");
    let (b2, b4, b6, _) = curve.b_invariants();
    let (b2, b4, b6) = (b2 as f64, b4 as f64, b6 as f64);
    // monic cubic x^3 + c2 x^2 + c1 x + c0 = (4x^3 + b2 x^2 + 2 b4 x + b6)/4
    let c2 = b2 / 4.0;
    let c1 = b4 / 2.0;
    let c0 = b6 / 4.0;
    let roots = cubic_roots(c2, c1, c0);
    let (omega1, omega2_im, rectangular) = match roots {
        CubicRoots::ThreeReal(e1, e2, e3) => {
            let a = (e1 - e3).sqrt();
            let b = (e1 - e2).sqrt();
            let c = (e2 - e3).sqrt();
            let omega1 = PI / agm(a, b, tol)?;
            let omega2_im = PI / agm(a, c, tol)?;
            (omega1, omega2_im, true)
        }
        CubicRoots::OneReal(e1, mu, nu) => {
            let rho = ((e1 - mu) * (e1 - mu) + nu * nu).sqrt();
            let a = rho.sqrt();
            let b = ((rho + (e1 - mu)) / 2.0).sqrt();
            let c = ((rho - (e1 - mu)) / 2.0).sqrt();
            let omega1 = PI / agm(a, b, tol)?;
            let omega2_im = PI / (2.0 * agm(a, c, tol)?);
            (omega1, omega2_im, false)
        }
    };
    let volume_omega = 2.0 * omega1 * omega2_im;
    // also rejects NaN from a degenerate root configuration
    if volume_omega.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Numerical(format!(
            "nonpositive complex volume {volume_omega} for {}",
            curve.label
        )));
    }
    Ok(PeriodData {
        omega1,
        omega2_im,
        rectangular,
        volume_omega,
    })
}

enum CubicRoots {
    /// e1 > e2 > e3
    ThreeReal(f64, f64, f64),
    /// real root, real part and positive imaginary part of the complex pair
    OneReal(f64, f64, f64),
}

/// Roots of x^3 + c2 x^2 + c1 x + c0, polished by Newton iterations.
fn cubic_roots(c2: f64, c1: f64, c0: f64) -> CubicRoots {
    // depressed cubic t^3 + p t + q, x = t - c2/3
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = -4.0 * p * p * p - 27.0 * q * q; // positive iff three real roots
    let f = |x: f64| ((x + c2) * x + c1) * x + c0;
    let fp = |x: f64| (3.0 * x + 2.0 * c2) * x + c1;
    let polish = |mut x: f64| {
        for _ in 0..50 {
            let fx = f(x);
            let d = fp(x);
            if d == 0.0 {
                break;
            }
            let step = fx / d;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        x
    };
    if disc > 0.0 {
        // trigonometric form
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).acos() / 3.0;
        let mut roots = [
            m * theta.cos() - shift,
            m * (theta - 2.0 * PI / 3.0).cos() - shift,
            m * (theta - 4.0 * PI / 3.0).cos() - shift,
        ];
        for r in roots.iter_mut() {
            *r = polish(*r);
        }
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        CubicRoots::ThreeReal(roots[0], roots[1], roots[2])
    } else {
        // Cardano for the single real root
        let half_q = q / 2.0;
        let inner = (half_q * half_q + p * p * p / 27.0).sqrt();
        let u = (-half_q + inner).cbrt();
        let v = (-half_q - inner).cbrt();
        let e1 = polish(u + v - shift);
        // remaining quadratic x^2 + (c2 + e1) x + (c1 + (c2 + e1) e1)
        let qb = c2 + e1;
        let qc = c1 + qb * e1;
        let mu = -qb / 2.0;
        let nu = (qc - mu * mu).max(0.0).sqrt();
        CubicRoots::OneReal(e1, mu, nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // --- independent quadrature oracle -----------------------------------
    //
    // omega1 = 2 * int_{e1}^{inf} dx / sqrt(4x^3 + b2 x^2 + 2 b4 x + b6)
    // (the component of E(R) through infinity), and Im(omega2) is the
    // period over the complementary cycle:
    //   three real roots: 2 * int_{e2}^{e1} dx / sqrt(-cubic),
    //   one real root:        int_{-inf}^{e1} dx / sqrt(-cubic).
    // Evaluated by double-exponential quadrature on the root-factored
    // integrand, with distances to the singular endpoints carried
    // analytically so no cancellation enters near the roots.

    /// Exp-sinh quadrature of g(s) over s in (0, inf), s = exp(pi sinh t);
    /// g receives s directly, so endpoint distances stay exact.
    fn quad_exp_sinh(g: impl Fn(f64) -> f64) -> f64 {
        refine_trapezoid(|t: f64| {
            let s = (std::f64::consts::PI * t.sinh()).exp();
            let w = std::f64::consts::PI * t.cosh() * s;
            let v = g(s) * w;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        })
    }

    /// Tanh-sinh quadrature over (a, b): the integrand is called with the
    /// endpoint distances (x - a, b - x), both formed without cancellation.
    fn quad_tanh_sinh(g: impl Fn(f64, f64) -> f64, a: f64, b: f64) -> f64 {
        let r = 0.5 * (b - a);
        refine_trapezoid(|t: f64| {
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            // 1 -/+ tanh(u) without cancellation
            let from_a = r * 2.0 / ((-2.0 * u).exp() + 1.0);
            let from_b = r * 2.0 / ((2.0 * u).exp() + 1.0);
            let w = r * std::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
            let v = g(from_a, from_b) * w;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        })
    }

    /// Trapezoid on t in [-4.2, 4.2] with step halving until stable.
    fn refine_trapezoid(g: impl Fn(f64) -> f64) -> f64 {
        let (lo, hi) = (-4.2f64, 4.2f64);
        let eval = |h: f64| {
            let n = ((hi - lo) / h).round() as i64;
            let mut acc = crate::kahan::KahanSum::new();
            for i in 0..=n {
                let t = lo + h * i as f64;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc.add(w * g(t));
            }
            acc.value() * h
        };
        let mut h = 0.5f64;
        let mut prev = eval(h);
        for _ in 0..8 {
            h *= 0.5;
            let next = eval(h);
            if (next - prev).abs() <= 1e-14 * next.abs().max(1.0) {
                return next;
            }
            prev = next;
        }
        prev
    }

    fn oracle_periods(curve: &CurveData) -> (f64, f64) {
        let (b2, b4, b6, _) = curve.b_invariants();
        let (b2, b4, b6) = (b2 as f64, b4 as f64, b6 as f64);
        let roots = cubic_roots(b2 / 4.0, b4 / 2.0, b6 / 4.0);
        match roots {
            CubicRoots::ThreeReal(e1, e2, e3) => {
                // root residuals must be tiny for the factored form to be honest
                for e in [e1, e2, e3] {
                    let res = ((4.0 * e + b2) * e + 2.0 * b4) * e + b6;
                    assert!(res.abs() < 1e-9 * (1.0 + e.abs().powi(3)));
                }
                let (e12, e13, e23) = (e1 - e2, e1 - e3, e2 - e3);
                // x = e1 + s: cubic = 4 s (s + e12)(s + e13)
                let omega1 =
                    2.0 * quad_exp_sinh(|s| 1.0 / (4.0 * s * (s + e12) * (s + e13)).sqrt());
                // x in (e2, e1): -cubic = 4 (e1 - x)(x - e2)(x - e3)
                let omega2_im = 2.0
                    * quad_tanh_sinh(
                        |from_e2, from_e1| 1.0 / (4.0 * from_e1 * from_e2 * (from_e2 + e23)).sqrt(),
                        e2,
                        e1,
                    );
                (omega1, omega2_im)
            }
            CubicRoots::OneReal(e1, mu, nu) => {
                // quadratic factor (x - mu)^2 + nu^2, positive everywhere
                let q = move |x: f64| (x - mu) * (x - mu) + nu * nu;
                let omega1 = 2.0 * quad_exp_sinh(|s| 1.0 / (4.0 * s * q(e1 + s)).sqrt());
                // x = e1 - s: -cubic = 4 s q(e1 - s)
                let omega2_im = quad_exp_sinh(|s| 1.0 / (4.0 * s * q(e1 - s)).sqrt());
                (omega1, omega2_im)
            }
        }
    }

    #[test]
    fn agm_matches_quadrature_oracle_on_all_builtins() {
        for label in CurveData::builtin_labels() {
            let curve = CurveData::builtin(label).unwrap();
            let p = periods(&curve, 1e-14).unwrap();
            let (o1, o2) = oracle_periods(&curve);
            assert!(
                (p.omega1 - o1).abs() < 1e-10 * o1.max(1.0),
                "{label}: omega1 agm={} oracle={o1}",
                p.omega1
            );
            assert!(
                (p.omega2_im - o2).abs() < 1e-10 * o2.max(1.0),
                "{label}: omega2_im agm={} oracle={o2}",
                p.omega2_im
            );
            let vol_oracle = 2.0 * o1 * o2;
            assert!(
                (p.volume_omega - vol_oracle).abs() < 1e-10 * vol_oracle,
                "{label}: volume agm={} oracle={vol_oracle}",
                p.volume_omega
            );
        }
    }

    #[test]
    fn omega1_known_values() {
        // real periods from the standard tables
        let p = periods(&CurveData::builtin("11a1").unwrap(), 1e-14).unwrap();
        assert!((p.omega1 - 1.269_209_304_3).abs() < 1e-7, "{}", p.omega1);
        assert!(!p.rectangular); // disc(11a1) < 0
        let p = periods(&CurveData::builtin("37a1").unwrap(), 1e-14).unwrap();
        assert!((p.omega1 - 2.993_458_646_5).abs() < 1e-6, "{}", p.omega1);
        assert!(p.rectangular); // disc(37a1) = 37 > 0
    }

    #[test]
    fn volume_positive_for_all_builtins() {
        for label in CurveData::builtin_labels() {
            let p = periods(&CurveData::builtin(label).unwrap(), 1e-14).unwrap();
            assert!(p.volume_omega > 0.0, "{label}");
        }
    }

    #[test]
    fn lattice_scaling() {
        // (x, y) -> (u^2 x, u^3 y) scales omega1 by 1/u and the area by 1/u^2
        let u = 2f64;
        let base = CurveData::builtin("11a1").unwrap();
        let scaled = CurveData::new([0, -4, 8, -160, -1280], 11, None, "11a1-u2").unwrap();
        let p0 = periods(&base, 1e-14).unwrap();
        let p1 = periods(&scaled, 1e-14).unwrap();
        assert!((p1.omega1 - p0.omega1 / u).abs() < 1e-12);
        assert!((p1.volume_omega - p0.volume_omega / (u * u)).abs() < 1e-12);
    }
}
