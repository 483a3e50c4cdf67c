//! Shared immutable per-run state: curve tables, periods, residue sets,
//! cutoff caches, and the symmetric-square machinery with its bad-factor
//! decision. Built once, then shared read-only across worker threads.

use crate::afe::{self, CutoffSpec, DSumInputs, QuadratureParams};
use crate::curve::{
    l_product, l_product_derivative, periods, sym2_value, BadFactor, CoefficientTable, CurveData,
    LProductValue, PeriodData, Sym2Params, Sym2Table,
};
use crate::error::{Error, Result};
use crate::heegner::{density_constant, enumerate_d, HeegnerSet, ResidueSet};
use crate::numtheory::PrimeSieve;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Options controlling a context build.
#[derive(Debug, Clone, Copy)]
pub struct ContextOptions {
    pub sym2_params: Sym2Params,
    /// Skip the symmetric-square table (and the main-term constants) for
    /// subcommands that never touch L(1); the coefficient table then only
    /// needs to cover the discriminant range.
    pub build_sym2: bool,
    /// Extra floor on the coefficient-table length (for consumers that
    /// outrun the N0-based sizing, like the scaled W-kernel sums).
    pub min_table_len: u64,
    pub quadrature: QuadratureParams,
    pub agm_tol: f64,
}

impl Default for ContextOptions {
    fn default() -> Self {
        ContextOptions {
            sym2_params: Sym2Params::default(),
            build_sym2: true,
            min_table_len: 0,
            quadrature: QuadratureParams::default(),
            agm_tol: 1e-14,
        }
    }
}

/// Outcome of the bad-factor arbitration for L(Sym^2 E, .) at p | N.
///
/// The standard factor (1 - p^-s)^-1 is adopted unless the s = 2 volume
/// identity L(Sym^2 E, 2) = pi Omega deg(Phi) / N rejects it by more than
/// 1%, in which case the alternative (1 - p^{1-s})^-1 is tried; whichever
/// passes is kept and both residuals are reported.
#[derive(Debug, Clone, Serialize)]
pub struct BadFactorDecision {
    pub chosen: BadFactor,
    /// |L(Sym^2,2)/(pi Omega deg / N) - 1| under the standard factor.
    pub standard_residual: Option<f64>,
    /// Same under the alternative factor (only computed when consulted).
    pub alternative_residual: Option<f64>,
    /// False when no modular degree was supplied and the check was skipped.
    pub identity_checked: bool,
}

pub struct Context {
    pub curve: CurveData,
    pub sieve: PrimeSieve,
    pub coeffs: CoefficientTable,
    pub periods: PeriodData,
    pub residues: ResidueSet,
    pub sym2_table: Option<Sym2Table>,
    pub sym2_params: Sym2Params,
    pub cutoff: CutoffSpec,
    pub bad_factor: Option<BadFactorDecision>,
    /// largest |d| this context is sized for
    pub max_abs_d: u64,
    /// run-level N0 = (N max|d|)^{1+eps}
    pub n0: f64,
    l_values: OnceLock<(LProductValue, LProductValue)>,
}

impl Context {
    pub fn build(curve: CurveData, max_abs_d: u64, opts: ContextOptions) -> Result<Self> {
        let n_cond = curve.conductor;
        if max_abs_d < 4 * n_cond {
            return Err(Error::Config(format!(
                "max |d| = {max_abs_d} below 4N = {}",
                4 * n_cond
            )));
        }
        let n0 = afe::n0_for(n_cond, max_abs_d);
        let sym2_len = if opts.build_sym2 {
            (120.0 * opts.sym2_params.x0).ceil() as u64
        } else {
            0
        };
        let table_len = afe::required_table_len(n_cond, max_abs_d)
            .max(sym2_len)
            .max(opts.min_table_len)
            .max(4 * n_cond);
        // sieve covers the tail-bound windows (2x the table) and the Euler
        // product prime cutoff
        let sieve_bound = (2 * table_len + 16)
            .max(if opts.build_sym2 {
                opts.sym2_params.euler_prime_bound
            } else {
                0
            })
            .max(4 * n_cond);
        let sieve = PrimeSieve::new(sieve_bound);
        let coeffs = CoefficientTable::build(&curve, &sieve, table_len)?;
        let periods = periods(&curve, opts.agm_tol)?;
        let residues = ResidueSet::new(n_cond);

        let (sym2_table, bad_factor) = if opts.build_sym2 {
            let (t, d) = arbitrate_bad_factor(&curve, &sieve, &coeffs, &periods, sym2_len, &opts)?;
            (Some(t), Some(d))
        } else {
            (None, None)
        };

        let cutoff = CutoffSpec::new(opts.quadrature);
        Ok(Context {
            curve,
            sieve,
            coeffs,
            periods,
            residues,
            sym2_table,
            sym2_params: opts.sym2_params,
            cutoff,
            bad_factor,
            max_abs_d,
            n0,
            l_values: OnceLock::new(),
        })
    }

    fn sym2(&self) -> Result<&Sym2Table> {
        self.sym2_table
            .as_ref()
            .ok_or_else(|| Error::Config("context built without the sym2 table".into()))
    }

    /// Inputs for the per-discriminant double sums, with the run-level cap.
    pub fn sum_inputs(&self) -> DSumInputs<'_> {
        DSumInputs {
            coeffs: &self.coeffs,
            cutoff: &self.cutoff,
            conductor: self.curve.conductor,
            x_scale: 1.0,
            n0_cap: Some(self.n0),
            direct_kernel: false,
        }
    }

    pub fn l_prime(&self, d: i64) -> Result<f64> {
        afe::l_prime_central(&self.sum_inputs(), d)
    }

    pub fn enumerate(&self, y: u64) -> Result<HeegnerSet> {
        enumerate_d(&self.residues, &self.sieve, y)
    }

    pub fn density_constant(&self) -> f64 {
        density_constant(&self.residues)
    }

    /// (L(1), L'(1)) of the composite main-term product, cached.
    pub fn l_values(&self) -> Result<(LProductValue, LProductValue)> {
        if let Some(v) = self.l_values.get() {
            return Ok(*v);
        }
        let table = self.sym2()?;
        let l1 = l_product(
            table,
            &self.sieve,
            self.curve.conductor,
            1.0,
            &self.sym2_params,
        )?;
        let l1p =
            l_product_derivative(table, &self.sieve, self.curve.conductor, &self.sym2_params)?;
        Ok(*self.l_values.get_or_init(|| (l1, l1p)))
    }

    pub fn sym2_at_2(&self) -> Result<crate::curve::Sym2Value> {
        sym2_value(self.sym2()?, 2.0, &self.sym2_params)
    }
}

/// The bad-factor arbitration via the s = 2 volume identity.
fn arbitrate_bad_factor(
    curve: &CurveData,
    sieve: &PrimeSieve,
    coeffs: &CoefficientTable,
    periods: &PeriodData,
    sym2_len: u64,
    opts: &ContextOptions,
) -> Result<(Sym2Table, BadFactorDecision)> {
    let build_table = |bf: BadFactor| Sym2Table::build(curve, sieve, coeffs, sym2_len, bf);
    let identity_target = curve
        .modular_degree
        .map(|deg| PI * periods.volume_omega * deg as f64 / curve.conductor as f64);
    let standard = build_table(BadFactor::Standard)?;
    match identity_target {
        None => Ok((
            standard,
            BadFactorDecision {
                chosen: BadFactor::Standard,
                standard_residual: None,
                alternative_residual: None,
                identity_checked: false,
            },
        )),
        Some(target) => {
            let res_std =
                (sym2_value(&standard, 2.0, &opts.sym2_params)?.value / target - 1.0).abs();
            if res_std <= 0.01 {
                Ok((
                    standard,
                    BadFactorDecision {
                        chosen: BadFactor::Standard,
                        standard_residual: Some(res_std),
                        alternative_residual: None,
                        identity_checked: true,
                    },
                ))
            } else {
                let alternative = build_table(BadFactor::Alternative)?;
                let res_alt =
                    (sym2_value(&alternative, 2.0, &opts.sym2_params)?.value / target - 1.0).abs();
                let decision = BadFactorDecision {
                    chosen: if res_alt < res_std {
                        BadFactor::Alternative
                    } else {
                        BadFactor::Standard
                    },
                    standard_residual: Some(res_std),
                    alternative_residual: Some(res_alt),
                    identity_checked: true,
                };
                let table = if res_alt < res_std {
                    alternative
                } else {
                    standard
                };
                Ok((table, decision))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_small_context() {
        let curve = CurveData::builtin("11a1").unwrap();
        let opts = ContextOptions {
            sym2_params: Sym2Params {
                x0: 400.0,
                euler_prime_bound: 20_000,
            },
            ..ContextOptions::default()
        };
        let ctx = Context::build(curve, 500, opts).unwrap();
        assert!(ctx.coeffs.n_max() >= 48_000); // sym2 length dominates here
        assert!(ctx.n0 > 0.0);
        assert!(ctx.bad_factor.as_ref().unwrap().identity_checked);
        let lp = ctx.l_prime(-7).unwrap();
        assert!(lp > 0.0);
        let (l1, l1p) = ctx.l_values().unwrap();
        assert!(l1.value > 0.0);
        assert!(l1p.value.is_finite());
    }

    #[test]
    fn rejects_tiny_range() {
        let curve = CurveData::builtin("11a1").unwrap();
        assert!(Context::build(curve, 10, ContextOptions::default()).is_err());
    }
}
