//! Symmetric-square L-values and the composite Euler product
//! L(s) = L(Sym^2 E, 2s) * zeta^(N)(4s-2)/zeta^(N)(2s) * prod (1 - p^-(4s-2)/(p+1)).
//!
//! The good local factor of Sym^2 at p is
//! [(1 - alpha^2 p^-s)(1 - p p^-s)(1 - beta^2 p^-s)]^-1 with
//! alpha + beta = a_p, alpha beta = p, so the coefficient recurrence at p is
//! driven by the elementary symmetric functions
//!   e1 = a_p^2 - p,  e2 = p a_p^2 - p^2,  e3 = p^3.
//! At p | N (squarefree conductor, multiplicative reduction) the factor is
//! (1 - p^-s)^-1, which is what the relation sum_j a_{p^j}^2 p^-js forces
//! when a_{p^j}^2 = 1; the alternative (1 - p^{1-s})^-1 stays available as a
//! toggle and the s = 2 volume identity arbitrates empirically.
//!
//! At the edge s = 2 the Dirichlet series only converges conditionally, so
//! values are computed as exponentially damped sums sum c_n n^-s e^{-n/X}
//! extrapolated in 1/X over X in {X0, 2X0, 4X0} (the damped sum has an
//! expansion L + A/X + B/X^2 + ..., so two Richardson stages cancel the
//! leading terms). The extrapolation spread is reported as the error bar.

use super::{CoefficientTable, CurveData};
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::numtheory::PrimeSieve;
use crate::special::zeta;
use serde::{Deserialize, Serialize};

/// Local factor convention at primes dividing the conductor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BadFactor {
    /// (1 - p^-s)^-1: c_{p^k} = 1.
    Standard,
    /// (1 - p^{1-s})^-1: c_{p^k} = p^k.
    Alternative,
}

/// Multiplicative coefficient table of L(Sym^2 E, s).
pub struct Sym2Table {
    conductor: u64,
    bad_factor: BadFactor,
    c: Vec<i64>, // c[n], 0 unused
}

impl Sym2Table {
    pub fn build(
        curve: &CurveData,
        sieve: &PrimeSieve,
        coeffs: &CoefficientTable,
        n_cut: u64,
        bad_factor: BadFactor,
    ) -> Result<Self> {
        coeffs.require(n_cut)?;
        let n_cut = n_cut as usize;
        let mut c = vec![0i64; n_cut + 1];
        if n_cut >= 1 {
            c[1] = 1;
        }
        let overflow = |n: usize| Error::Overflow(format!("sym2 coefficient at n={n}"));
        for n in 2..=n_cut {
            let p = sieve.least_prime_factor(n as u64) as usize;
            // split n = q * m with q the full p-power part
            let mut q = p;
            let mut m = n / p;
            while m.is_multiple_of(p) {
                q *= p;
                m /= p;
            }
            let value = if m > 1 {
                c[q].checked_mul(c[m]).ok_or_else(|| overflow(n))?
            } else if curve.conductor.is_multiple_of(p as u64) {
                match bad_factor {
                    BadFactor::Standard => 1,
                    BadFactor::Alternative => (n / p) as i64 * p as i64,
                }
            } else {
                // prime power p^k, k >= 1: three-term recurrence from the
                // inverse local factor 1 - e1 x + e2 x^2 - e3 x^3
                let ap = coeffs.a(p as u64);
                let pi = p as i64;
                let e1 = ap * ap - pi;
                let e2 = pi * ap * ap - pi * pi;
                let e3 = pi * pi * pi;
                let k1 = c[n / p];
                let k2 = if (n / p).is_multiple_of(p) {
                    c[n / (p * p)]
                } else {
                    0
                };
                let k3 = if n / (p * p) >= 1 && n % (p * p * p) == 0 {
                    c[n / (p * p * p)]
                } else {
                    0
                };
                let t = (e1 as i128) * (k1 as i128) - (e2 as i128) * (k2 as i128)
                    + (e3 as i128) * (k3 as i128);
                i64::try_from(t).map_err(|_| overflow(n))?
            };
            c[n] = value;
        }
        Ok(Sym2Table {
            conductor: curve.conductor,
            bad_factor,
            c,
        })
    }

    #[inline]
    pub fn coefficient(&self, n: u64) -> i64 {
        self.c[n as usize]
    }

    pub fn n_cut(&self) -> u64 {
        self.c.len() as u64 - 1
    }

    pub fn bad_factor(&self) -> BadFactor {
        self.bad_factor
    }

    /// Truncated Euler product over p <= p_bound. Only meaningful in the
    /// region of absolute convergence (s > 2); used as the oracle at s = 3.
    pub fn euler_product(
        &self,
        coeffs: &CoefficientTable,
        sieve: &PrimeSieve,
        s: f64,
        p_bound: u64,
    ) -> f64 {
        let mut log_acc = KahanSum::new();
        for &p in sieve.primes() {
            let p = p as u64;
            if p > p_bound {
                break;
            }
            let x = (p as f64).powf(-s);
            let factor = if self.conductor.is_multiple_of(p) {
                match self.bad_factor {
                    BadFactor::Standard => 1.0 - x,
                    BadFactor::Alternative => 1.0 - (p as f64) * x,
                }
            } else {
                let ap = coeffs.a(p) as f64;
                let pf = p as f64;
                let e1 = ap * ap - pf;
                let e2 = pf * ap * ap - pf * pf;
                let e3 = pf * pf * pf;
                ((1.0 - e1 * x) + e2 * x * x) - e3 * x * x * x
            };
            log_acc.add(-factor.ln());
        }
        log_acc.value().exp()
    }
}

/// Smoothing/extrapolation controls for the damped-series evaluation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Sym2Params {
    /// Base damping length X0; the extrapolation uses {X0, 2X0, 4X0}.
    pub x0: f64,
    /// Prime cutoff for Euler products (correction factors, s = 3 oracle).
    pub euler_prime_bound: u64,
}

impl Default for Sym2Params {
    fn default() -> Self {
        Sym2Params {
            x0: 1.0e4,
            euler_prime_bound: 100_000,
        }
    }
}

/// A value together with its numerical error estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Sym2Value {
    pub value: f64,
    pub error: f64,
}

/// L(Sym^2 E, s) for s in [1.5, 3] by damped summation + Richardson.
pub fn sym2_value(table: &Sym2Table, s: f64, params: &Sym2Params) -> Result<Sym2Value> {
    if !(1.49..=3.01).contains(&s) {
        return Err(Error::Range(format!("sym2_value: s={s} outside [1.5, 3]")));
    }
    let x0 = params.x0;
    let needed = (30.0 * 4.0 * x0) as u64;
    if table.n_cut() < needed.min(25 * 4 * x0 as u64) {
        return Err(Error::CoefficientShortfall {
            needed,
            have: table.n_cut(),
        });
    }
    let n_stop = needed.min(table.n_cut());
    let mut s0 = KahanSum::new();
    let mut s1 = KahanSum::new();
    let mut s2 = KahanSum::new();
    for n in 1..=n_stop {
        let c = table.coefficient(n);
        if c == 0 {
            continue;
        }
        let nf = n as f64;
        let base = c as f64 * (-s * nf.ln()).exp();
        let t = (-nf / x0).exp();
        let t2 = t.sqrt(); // e^{-n/(2 X0)}
        let t4 = t2.sqrt(); // e^{-n/(4 X0)}
        s0.add(base * t);
        s1.add(base * t2);
        s2.add(base * t4);
    }
    let (s0, s1, s2) = (s0.value(), s1.value(), s2.value());
    // two Richardson stages in 1/X
    let t0 = 2.0 * s1 - s0;
    let t1 = 2.0 * s2 - s1;
    let value = (4.0 * t1 - t0) / 3.0;
    let error = (value - t1).abs().max((t1 - t0).abs() / 3.0);
    Ok(Sym2Value { value, error })
}

/// The composite product L(s) of the main-term constants, with L(1) and
/// L'(1) accessors. The zeta ratio is exactly 1 at s = 1 and is enforced
/// analytically there rather than evaluated.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LProductValue {
    pub value: f64,
    pub error: f64,
}

pub fn l_product(
    table: &Sym2Table,
    sieve: &PrimeSieve,
    conductor: u64,
    s: f64,
    params: &Sym2Params,
) -> Result<LProductValue> {
    if (s - 1.0).abs() > 0.1 {
        return Err(Error::Range(format!(
            "l_product: |s - 1| = {} > 0.1",
            (s - 1.0).abs()
        )));
    }
    let sym2 = sym2_value(table, 2.0 * s, params)?;
    let zr = zeta_ratio(conductor, s);
    let corr = correction_product(sieve, conductor, s, params.euler_prime_bound);
    Ok(LProductValue {
        value: sym2.value * zr * corr,
        error: sym2.error * zr.abs() * corr.abs(),
    })
}

/// zeta^(N)(4s-2) / zeta^(N)(2s); exactly 1 at s = 1 by construction.
pub fn zeta_ratio(conductor: u64, s: f64) -> f64 {
    if s == 1.0 {
        return 1.0;
    }
    let num = zeta_n(conductor, 4.0 * s - 2.0);
    let den = zeta_n(conductor, 2.0 * s);
    num / den
}

/// zeta(x) with the Euler factors at p | N removed.
fn zeta_n(conductor: u64, x: f64) -> f64 {
    let mut v = zeta(x);
    let mut n = conductor;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            v *= 1.0 - (p as f64).powf(-x);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        v *= 1.0 - (n as f64).powf(-x);
    }
    v
}

/// prod_{p <= bound, (p, 2N) = 1} (1 - p^-(4s-2) / (p + 1)).
pub fn correction_product(sieve: &PrimeSieve, conductor: u64, s: f64, bound: u64) -> f64 {
    let expo = 4.0 * s - 2.0;
    let mut log_acc = KahanSum::new();
    for &p in sieve.primes() {
        let p = p as u64;
        if p > bound {
            break;
        }
        if p == 2 || conductor.is_multiple_of(p) {
            continue;
        }
        let term = 1.0 - (p as f64).powf(-expo) / (p as f64 + 1.0);
        log_acc.add(term.ln());
    }
    log_acc.value().exp()
}

/// L'(1) by central differences with Richardson extrapolation over step
/// halving. Returns the value and a self-consistency error estimate.
pub fn l_product_derivative(
    table: &Sym2Table,
    sieve: &PrimeSieve,
    conductor: u64,
    params: &Sym2Params,
) -> Result<LProductValue> {
    let h = 1.0e-4;
    let diff = |h: f64| -> Result<f64> {
        let up = l_product(table, sieve, conductor, 1.0 + h, params)?.value;
        let dn = l_product(table, sieve, conductor, 1.0 - h, params)?.value;
        Ok((up - dn) / (2.0 * h))
    };
    let d1 = diff(h)?;
    let d2 = diff(h / 2.0)?;
    let value = (4.0 * d2 - d1) / 3.0;
    let error = (d2 - d1).abs() / 3.0 + 1e-12 * value.abs();
    Ok(LProductValue { value, error })
}
