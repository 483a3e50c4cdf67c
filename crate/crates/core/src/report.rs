//! Run reports and flat-file emission. Every computed constant carries its
//! error bar; CSV schemas are versioned in a leading comment line and
//! contain nothing time-dependent, so identical runs produce identical
//! bytes. Wall-clock metadata goes to a separate file.

use crate::context::{BadFactorDecision, Context};
use crate::error::Result;
use crate::moments::{MomentReport, PerDRow, ValErr};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// One named invariant check with its outcome.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// The constants block of a run report.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub c_n: ValErr,
    pub volume_omega: ValErr,
    pub l1: Option<ValErr>,
    pub l1_prime: Option<ValErr>,
    pub sym2_at_2: Option<ValErr>,
    pub decay_constant_v: ValErr,
}

pub fn constants_report(ctx: &Context) -> Result<ConstantsReport> {
    let (l1, l1p, sym2) = if ctx.sym2_table.is_some() {
        let (l1, l1p) = ctx.l_values()?;
        let s2 = ctx.sym2_at_2()?;
        (
            Some(ValErr {
                value: l1.value,
                error: l1.error,
            }),
            Some(ValErr {
                value: l1p.value,
                error: l1p.error,
            }),
            Some(ValErr {
                value: s2.value,
                error: s2.error,
            }),
        )
    } else {
        (None, None, None)
    };
    Ok(ConstantsReport {
        c_n: ValErr {
            value: ctx.density_constant(),
            error: 0.0,
        },
        volume_omega: ValErr {
            value: ctx.periods.volume_omega,
            error: 1e-13 * ctx.periods.volume_omega,
        },
        l1,
        l1_prime: l1p,
        sym2_at_2: sym2,
        decay_constant_v: ValErr {
            value: ctx.cutoff.decay_constant(),
            error: 0.01 * ctx.cutoff.decay_constant(),
        },
    })
}

/// Top-level deterministic run report (run.json).
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub subcommand: String,
    pub curve_label: String,
    pub conductor: u64,
    pub seed: u64,
    pub config: serde_json::Value,
    pub constants: ConstantsReport,
    pub decisions: Decisions,
    pub results: serde_json::Value,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decisions {
    pub sym2_bad_factor: Option<BadFactorDecision>,
    pub truncation_epsilon: f64,
}

impl RunReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failing_checks(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Wall-clock metadata, kept out of the deterministic outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub timestamp_unix_ms: u128,
    pub runtime_ms: u128,
    pub threads: usize,
    pub version: &'static str,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// per_d.csv: one row per discriminant.
pub fn per_d_csv(rows: &[PerDRow]) -> String {
    let mut out = String::from("# per_d v1\nd,lprime,height,weight\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.d, r.l_prime, r.height, r.weight);
    }
    out
}

/// summary.csv: one row per Y.
pub fn summary_csv(reports: &[MomentReport]) -> String {
    let mut out = String::from("# summary v1\ny,empirical,alpha,beta,main,residual\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.y, r.empirical, r.alpha, r.beta, r.main_term, r.residual
        );
    }
    out
}

/// plotdata_residual.csv: the trend columns.
pub fn plotdata_residual_csv(reports: &[MomentReport]) -> String {
    let mut out = String::from("# plotdata_residual v1\ny,residual,main,ratio\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.y,
            r.residual,
            r.main_term,
            r.empirical / r.main_term
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_schemas_are_versioned_and_stable() {
        let rows = vec![PerDRow {
            d: -7,
            l_prime: 1.5,
            height: 0.25,
            weight: 1.0,
        }];
        let csv = per_d_csv(&rows);
        assert!(csv.starts_with("# per_d v1\nd,lprime,height,weight\n"));
        assert!(csv.contains("-7,1.5,0.25,1"));
        let reports = vec![MomentReport {
            y: 2000.0,
            empirical: 10.0,
            alpha: 0.001,
            beta: -0.003,
            main_term: 9.0,
            residual: 1.0,
            n_discriminants: 5,
        }];
        assert!(summary_csv(&reports).contains("2000,10,0.001,-0.003,9,1"));
        let plot = plotdata_residual_csv(&reports);
        assert!(plot.contains("2000,1,9,"));
    }
}
