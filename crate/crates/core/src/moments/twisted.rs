//! Twisted partial sums of Fourier coefficients in arithmetic progressions:
//! S(x) = sum_{n <= x} a_n eta(n), where eta is supported on
//! n = u^2 (mod a^2 v^2) and twists by chi_d(m) [d in D'] at
//! d = (u^2 - n)/(a^2 v^2). The normalised ratio |S(x)|/(sqrt(q) x log x)
//! with q = 4 N m a^2 v^2 probes the square-root cancellation the
//! error-term analysis rests on.

use crate::context::Context;
use crate::error::Result;
use crate::heegner::chi_d;
use crate::kahan::KahanSum;
use crate::numtheory::gcd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One progression/twist configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwistedConfig {
    pub m: u64,
    pub a: u64,
    pub v: u64,
    pub u: u64,
}

impl TwistedConfig {
    /// Period of eta: q = 4 N m a^2 v^2.
    pub fn period(&self, conductor: u64) -> u64 {
        4 * conductor * self.m * self.a * self.a * self.v * self.v
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwistedSum {
    pub config: TwistedConfig,
    pub q: u64,
    pub x: u64,
    pub s: f64,
    /// |S(x)| / (sqrt(q) x log x)
    pub ratio: f64,
    /// sum of |a_n eta(n)|: the cancellation-free majorant
    pub abs_majorant: f64,
}

/// eta(n) for a config: chi_d(m) [d in D'] at d = (u^2 - n)/(a^2 v^2) when
/// the divisibility holds and d < 0, else 0.
fn eta(ctx: &Context, cfg: &TwistedConfig, n: u64) -> f64 {
    let a2v2 = cfg.a * cfg.a * cfg.v * cfg.v;
    let u2 = cfg.u * cfg.u;
    // n = u^2 (mod a^2 v^2)
    if (n % a2v2) != (u2 % a2v2) {
        return 0.0;
    }
    let dd_num = u2 as i64 - n as i64;
    if dd_num >= 0 {
        return 0.0; // d must be negative
    }
    let d = dd_num / a2v2 as i64;
    if !ctx.residues.contains(d) {
        return 0.0;
    }
    chi_d(d, cfg.m) as f64
}

/// S(x) with its normalised ratio and absolute majorant.
pub fn twisted_partial_sum(ctx: &Context, cfg: &TwistedConfig, x: u64) -> Result<TwistedSum> {
    ctx.coeffs.require(x)?;
    let a2v2 = cfg.a * cfg.a * cfg.v * cfg.v;
    let u2 = cfg.u * cfg.u;
    let mut acc = KahanSum::new();
    let mut majorant = KahanSum::new();
    // walk only the supported progression n = u^2 (mod a^2 v^2)
    let mut n = u2 % a2v2;
    if n == 0 {
        n = a2v2;
    }
    while n <= x {
        let e = eta(ctx, cfg, n);
        if e != 0.0 {
            let t = ctx.coeffs.a(n) as f64 * e;
            acc.add(t);
            majorant.add(t.abs());
        }
        n += a2v2;
    }
    let q = cfg.period(ctx.curve.conductor);
    let s = acc.value();
    Ok(TwistedSum {
        config: *cfg,
        q,
        x,
        s,
        ratio: s.abs() / ((q as f64).sqrt() * x as f64 * (x as f64).ln()),
        abs_majorant: majorant.value(),
    })
}

/// Direct-vs-Abel-summation identity for sum a_n eta(n) G(n); algebraically
/// exact, so agreement is at rounding level. Returns (direct, via_abel).
pub fn abel_summation_check(
    ctx: &Context,
    cfg: &TwistedConfig,
    x: u64,
    g: impl Fn(u64) -> f64,
) -> Result<(f64, f64)> {
    ctx.coeffs.require(x)?;
    let mut direct = KahanSum::new();
    let mut abel = KahanSum::new();
    let mut partial = 0.0f64; // S(n)
    for n in 1..=x {
        let e = eta(ctx, cfg, n);
        let t = if e != 0.0 {
            ctx.coeffs.a(n) as f64 * e
        } else {
            0.0
        };
        direct.add(t * g(n));
        partial += t;
        // sum t_n g(n) = S(x) g(x) - sum_{n < x} S(n) (g(n+1) - g(n))
        if n < x {
            abel.add(-partial * (g(n + 1) - g(n)));
        } else {
            abel.add(partial * g(x));
        }
    }
    Ok((direct.value(), abel.value()))
}

/// Deterministically sample `count` configurations with q <= q_max from a
/// seeded generator, then evaluate the partial sums at x.
pub fn twisted_suite(
    ctx: &Context,
    seed: u64,
    count: usize,
    q_max: u64,
    x: u64,
) -> Result<Vec<TwistedSum>> {
    let n_cond = ctx.curve.conductor;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut guard = 0usize;
    while out.len() < count {
        guard += 1;
        assert!(guard < 100_000, "configuration sampling stalled");
        let budget = q_max / (4 * n_cond);
        if budget == 0 {
            panic!("q_max too small for conductor {n_cond}");
        }
        let a = 1 + rng.gen_range(0..4) as u64;
        let v = 1 + rng.gen_range(0..4) as u64;
        let m = 1 + rng.gen_range(0..budget.min(64));
        if m * a * a * v * v > budget {
            continue;
        }
        if gcd(m, n_cond) != 1 || gcd(a, 4 * n_cond) != 1 || ctx.sieve.mobius(a)? == 0 {
            continue;
        }
        let a2v2 = a * a * v * v;
        let u = rng.gen_range(0..a2v2.max(1));
        let cfg = TwistedConfig { m, a, v, u };
        out.push(twisted_partial_sum(ctx, &cfg, x)?);
    }
    Ok(out)
}

/// Maximum normalised ratio over the fixed 100-configuration suite
/// (seed 0x7215_7ed5, q <= 10^4, x = 10^5, curve 11a1), recorded on the
/// first run; later runs assert the max never exceeds it.
pub const RECORDED_TWISTED_MAX_RATIO: f64 = 0.000_655_437_722_509_011;

/// The seed of the fixed suite.
pub const TWISTED_SUITE_SEED: u64 = 0x7215_7ed5;

#[cfg(test)]
mod tests {
    use super::super::tests::CTX;
    use super::*;

    #[test]
    fn empty_progression_gives_zero() {
        let ctx = &*CTX;
        // a = 3, v = 1, u = 0: support n = 9j with d = -j; the first
        // j with -j in D' (mod 44 classes {1,5,9,25,37}) is j = 7, so the
        // first supported n is 63 and S(50) is exactly the empty sum.
        let cfg = TwistedConfig {
            m: 2,
            a: 3,
            v: 1,
            u: 0,
        };
        assert_eq!(eta(ctx, &cfg, 9 * 7), chi_d(-7, 2) as f64);
        let s = twisted_partial_sum(ctx, &cfg, 50).unwrap();
        assert_eq!(s.s, 0.0);
        assert_eq!(s.abs_majorant, 0.0);
        // off-progression and non-fundamental-shaped d both vanish
        assert_eq!(eta(ctx, &cfg, 10), 0.0);
        assert_eq!(eta(ctx, &cfg, 9 * 2), 0.0); // d = -2, never in D'
    }

    #[test]
    fn ratio_bounded_over_sampled_configs() {
        let ctx = &*CTX;
        let suite = twisted_suite(ctx, TWISTED_SUITE_SEED, 30, 10_000, 50_000).unwrap();
        for s in &suite {
            assert!(s.q <= 10_000);
            assert!(s.ratio <= 1.0, "ratio {} at q={}", s.ratio, s.q);
        }
    }

    #[test]
    fn abel_summation_identity() {
        let ctx = &*CTX;
        let cfg = TwistedConfig {
            m: 2,
            a: 1,
            v: 1,
            u: 1,
        };
        let (direct, abel) = abel_summation_check(ctx, &cfg, 20_000, |n| 1.0 / n as f64).unwrap();
        assert!(
            (direct - abel).abs() <= 1e-10 * direct.abs().max(1.0),
            "direct={direct} abel={abel}"
        );
    }

    #[test]
    fn suite_is_deterministic() {
        let ctx = &*CTX;
        let a = twisted_suite(ctx, 42, 10, 10_000, 10_000).unwrap();
        let b = twisted_suite(ctx, 42, 10, 10_000, 10_000).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.s.to_bits(), y.s.to_bits());
            assert_eq!(x.config.m, y.config.m);
        }
    }
}
