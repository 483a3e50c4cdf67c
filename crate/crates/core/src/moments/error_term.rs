//! Off-diagonal error-term diagnostics: the direct error sum over the
//! quadruples (d, n, u, v) with v != 0, its Mobius-weighted decomposition
//! over square divisors a^2 | d (with d running through the congruence-only
//! set D'), and the exact decomposition identity against the full moment.

use super::BumpFunction;
use crate::afe::{d_sum, d_sum_with_majorant, Kernel, SumPart};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::numtheory::gcd;
use rayon::prelude::*;
use serde::Serialize;

/// Error = 2 sum_{d in D} sum_{(m,N)=1} sum_n a_n chi_d(m) r'_d(n)/(mn)
///             V(4 pi^2 n m^2/(N|d|)) F(|d|/Y).
pub fn error_direct(ctx: &Context, bump: &BumpFunction, y: f64) -> Result<f64> {
    Ok(error_direct_with_majorant(ctx, bump, y)?.0)
}

/// The signed error sum together with its absolute-value majorant (same
/// loop, absolute values): |Error| <= majorant always; the gap is the
/// cancellation the analysis exploits.
pub fn error_direct_with_majorant(
    ctx: &Context,
    bump: &BumpFunction,
    y: f64,
) -> Result<(f64, f64)> {
    let y_hi = (bump.t1 * y).floor() as u64;
    let set = ctx.enumerate(y_hi)?;
    let inputs = ctx.sum_inputs();
    let pairs: Vec<(f64, (f64, f64))> = set
        .discriminants
        .par_iter()
        .filter_map(|h| {
            let w = bump.eval(h.d.unsigned_abs() as f64 / y);
            if w == 0.0 {
                return None;
            }
            Some(
                d_sum_with_majorant(&inputs, h.d, SumPart::OffDiagonal, Kernel::V)
                    .map(|sm| (w, sm)),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut signed = KahanSum::new();
    let mut majorant = KahanSum::new();
    for (w, (s, m)) in pairs {
        signed.add(w * s);
        majorant.add(w * m);
    }
    Ok((signed.value(), majorant.value()))
}

/// Result of the exact split empirical = diagonal + error - u0_boundary.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecompositionCheck {
    pub empirical: f64,
    pub diagonal: f64,
    pub error: f64,
    pub u0_boundary: f64,
    pub relative_gap: f64,
}

/// Verify the decomposition identity at tolerance reporting level; the
/// u = 0 boundary term carries the convention difference between the
/// halved-lattice ideal count and r'_d.
pub fn decomposition_identity(
    ctx: &Context,
    bump: &BumpFunction,
    y: f64,
    empirical: f64,
) -> Result<DecompositionCheck> {
    let diagonal = super::diagonal_moment(ctx, bump, y)?;
    let error = error_direct(ctx, bump, y)?;
    let u0 = super::u0_boundary(ctx, bump, y)?;
    let reconstructed = diagonal + error - u0;
    let scale = empirical.abs().max(1.0);
    Ok(DecompositionCheck {
        empirical,
        diagonal,
        error,
        u0_boundary: u0,
        relative_gap: (empirical - reconstructed).abs() / scale,
    })
}

/// The a-indexed split of the error term.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorSplit {
    /// threshold A = ceil(Y^{1/6} N^{-7/12}), at least 1
    pub a_threshold: u64,
    /// sum of |Error(a)| over a <= A
    pub e1: f64,
    /// sum of |Error(a)| over a > A
    pub e2: f64,
    /// Mobius reassembly sum_a mu(a) Error(a); equals the direct error
    pub reassembled: f64,
    /// the direct error sum for comparison
    pub error_direct: f64,
    /// relative gap of the reassembly
    pub reassembly_gap: f64,
    /// per-a values (a, Error(a)) for a with mu(a) != 0, gcd(a, 4N) = 1
    pub per_a: Vec<(u64, f64)>,
}

/// Error(a) = 2 sum_{d in D', a^2 | d} (off-diagonal sum) F(|d|/Y); the
/// squarefree condition on d is dropped and restored by Mobius weights.
pub fn error_split(ctx: &Context, bump: &BumpFunction, y: f64) -> Result<ErrorSplit> {
    let n_cond = ctx.curve.conductor;
    let y_hi = (bump.t1 * y).floor() as u64;
    if y_hi > ctx.max_abs_d {
        return Err(Error::Config(format!(
            "error_split: |d| up to {y_hi} exceeds context bound {}",
            ctx.max_abs_d
        )));
    }
    let a_threshold = (y.powf(1.0 / 6.0) * (n_cond as f64).powf(-7.0 / 12.0))
        .ceil()
        .max(1.0) as u64;
    let a_max = (y_hi as f64).sqrt().floor() as u64;
    let inputs = ctx.sum_inputs();

    let mut per_a = Vec::new();
    for a in 1..=a_max {
        if ctx.sieve.mobius(a)? == 0 {
            continue;
        }
        if gcd(a, 4 * n_cond) != 1 {
            // Error(a) = 0: d in D' is coprime to 4N, so a^2 | d is empty
            continue;
        }
        // discriminants d in D' with a^2 | d and F-weight nonzero
        let a2 = a * a;
        let mut members = Vec::new();
        let mut abs_d = 3u64;
        while abs_d <= y_hi {
            if abs_d.is_multiple_of(a2) {
                let d = -(abs_d as i64);
                if ctx.residues.contains(d) && bump.eval(abs_d as f64 / y) != 0.0 {
                    members.push(d);
                }
            }
            abs_d += 4;
        }
        let values: Vec<f64> = members
            .par_iter()
            .map(|&d| d_sum(&inputs, d, SumPart::OffDiagonal, Kernel::V))
            .collect::<Result<Vec<f64>>>()?;
        let mut acc = KahanSum::new();
        for (&d, &v) in members.iter().zip(values.iter()) {
            acc.add(v * bump.eval(d.unsigned_abs() as f64 / y));
        }
        per_a.push((a, acc.value()));
    }

    let mut e1 = KahanSum::new();
    let mut e2 = KahanSum::new();
    let mut reassembled = KahanSum::new();
    for &(a, err_a) in &per_a {
        if a <= a_threshold {
            e1.add(err_a.abs());
        } else {
            e2.add(err_a.abs());
        }
        reassembled.add(ctx.sieve.mobius(a)? as f64 * err_a);
    }
    let direct = error_direct(ctx, bump, y)?;
    let reassembled = reassembled.value();
    Ok(ErrorSplit {
        a_threshold,
        e1: e1.value(),
        e2: e2.value(),
        reassembled,
        error_direct: direct,
        reassembly_gap: (reassembled - direct).abs() / direct.abs().max(1.0),
        per_a,
    })
}
