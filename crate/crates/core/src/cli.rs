//! Batch command-line front end: subcommands over a shared immutable
//! context, deterministic CSV/JSON emission, and per-run invariant checks.
//!
//! Exit status: 0 when every invariant check passes; 3 when a numerical
//! invariant fails (the failing checks are printed as JSON); 1 for I/O
//! errors and 2 for configuration errors.

use crate::afe::{self, Kernel, QuadratureParams};
use crate::context::{Context, ContextOptions};
use crate::curve::{CurveData, Sym2Params};
use crate::error::{Error, Result};
use crate::heegner::HeegnerSet;
use crate::moments::{
    self, abel_summation_check, decomposition_identity, error_direct_with_majorant, error_split,
    height_sum, main_term_constants, residual_slope, twisted_suite, BumpFunction, MomentReport,
    TwistedConfig, RECORDED_TWISTED_MAX_RATIO, TWISTED_SUITE_SEED,
};
use crate::report::{
    self, constants_report, per_d_csv, plotdata_residual_csv, summary_csv, write_json, CheckResult,
    Decisions, RunMetadata, RunReport,
};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "heegner-moments",
    about = "Moments of L'_d(E,1) over Heegner discriminants, height sums, and error-term diagnostics",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Curve: a built-in label (11a1, 14a1, 15a1, 17a1, 37a1) or a path to
    /// a curve JSON file {"label", "a_invariants", "conductor",
    /// "modular_degree"?}.
    #[arg(long, global = true, default_value = "11a1")]
    pub curve: String,

    /// Expected conductor; consistency-checked against the curve file.
    #[arg(long, global = true)]
    pub conductor: Option<u64>,

    /// Lower edge of the bump support.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub t0: f64,

    /// Upper edge of the bump support.
    #[arg(long, global = true, default_value_t = 2.0)]
    pub t1: f64,

    /// Contour abscissa of the cutoff quadrature.
    #[arg(long = "contour-c", global = true, default_value_t = 0.7)]
    pub contour_c: f64,

    /// Seed for the randomized diagnostic suites; recorded in every output.
    #[arg(long, global = true, default_value_t = TWISTED_SUITE_SEED)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Damping length X0 of the symmetric-square smoothing.
    #[arg(long = "sym2-x0", global = true, default_value_t = 10_000.0)]
    pub sym2_x0: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate the Heegner discriminant set and report its density.
    Density {
        #[arg(long)]
        ymax: u64,
    },
    /// Evaluate L'_d(E,1) for one discriminant, with all self-checks.
    Lprime {
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
    },
    /// Smoothed first moments over a list of Y values.
    Moment {
        #[arg(long, value_delimiter = ',')]
        ylist: Vec<u64>,
    },
    /// Off-diagonal error term: direct sum, a-split, twisted-sum suite.
    Error {
        #[arg(long)]
        y: u64,
    },
    /// Neron-Tate height sums over a list of Y values.
    Heights {
        #[arg(long, value_delimiter = ',')]
        ylist: Vec<u64>,
    },
    /// All run constants with error bars.
    Constants,
}

/// Outcome handed to main: the report determines the exit status.
pub struct RunOutcome {
    pub report: RunReport,
}

pub fn run(cli: &Cli) -> Result<RunOutcome> {
    let started = std::time::Instant::now();
    if let Some(n) = cli.threads {
        // ignore the error if a pool already exists (tests call run twice)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let curve = resolve_curve(&cli.curve)?;
    if let Some(expected) = cli.conductor {
        if expected != curve.conductor {
            return Err(Error::Config(format!(
                "--conductor {expected} disagrees with curve conductor {}",
                curve.conductor
            )));
        }
    }
    if !(cli.t0 > 0.0 && cli.t1 > cli.t0) {
        return Err(Error::Config(format!(
            "bump support [{}, {}] must satisfy 0 < t0 < t1",
            cli.t0, cli.t1
        )));
    }
    std::fs::create_dir_all(&cli.out)?;

    let report = match &cli.command {
        Command::Density { ymax } => run_density(cli, curve, *ymax)?,
        Command::Lprime { d } => run_lprime(cli, curve, *d)?,
        Command::Moment { ylist } => run_moment(cli, curve, ylist)?,
        Command::Error { y } => run_error(cli, curve, *y)?,
        Command::Heights { ylist } => run_heights(cli, curve, ylist)?,
        Command::Constants => run_constants(cli, curve)?,
    };

    write_json(&cli.out.join("run.json"), &report)?;
    let meta = RunMetadata {
        timestamp_unix_ms: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        runtime_ms: started.elapsed().as_millis(),
        threads: rayon::current_num_threads(),
        version: env!("CARGO_PKG_VERSION"),
    };
    write_json(&cli.out.join("run_meta.json"), &meta)?;
    Ok(RunOutcome { report })
}

fn resolve_curve(arg: &str) -> Result<CurveData> {
    if let Some(curve) = CurveData::builtin(arg) {
        return Ok(curve);
    }
    let path = Path::new(arg);
    if path.exists() {
        return CurveData::from_json_path(path);
    }
    Err(Error::Config(format!(
        "--curve {arg}: not a built-in label and no such file"
    )))
}

fn options(cli: &Cli, build_sym2: bool) -> ContextOptions {
    ContextOptions {
        sym2_params: Sym2Params {
            x0: cli.sym2_x0,
            euler_prime_bound: 100_000,
        },
        build_sym2,
        min_table_len: 0,
        quadrature: QuadratureParams {
            contour_c: cli.contour_c,
            ..QuadratureParams::default()
        },
        agm_tol: 1e-14,
    }
}

fn base_report(cli: &Cli, ctx: &Context, subcommand: &str) -> Result<RunReport> {
    Ok(RunReport {
        schema: "run v1",
        subcommand: subcommand.to_string(),
        curve_label: ctx.curve.label.clone(),
        conductor: ctx.curve.conductor,
        seed: cli.seed,
        config: json!({
            "curve": cli.curve,
            "t0": cli.t0,
            "t1": cli.t1,
            "contour_c": cli.contour_c,
            "sym2_x0": cli.sym2_x0,
            "seed": cli.seed,
        }),
        constants: constants_report(ctx)?,
        decisions: Decisions {
            sym2_bad_factor: ctx.bad_factor.clone(),
            truncation_epsilon: afe::TRUNCATION_EPSILON,
        },
        results: json!({}),
        checks: Vec::new(),
    })
}

fn heegner_set_csv(set: &HeegnerSet, seed: u64) -> String {
    let mut out = format!("# heegner_set v1 seed={seed}\nd,witness_nu\n");
    for h in &set.discriminants {
        let _ = writeln!(out, "{},{}", h.d, h.witness_nu);
    }
    out
}

fn run_density(cli: &Cli, curve: CurveData, ymax: u64) -> Result<RunReport> {
    use crate::heegner::{density_constant, enumerate_d, ResidueSet};
    use crate::numtheory::PrimeSieve;
    let residues = ResidueSet::new(curve.conductor);
    let sieve = PrimeSieve::new(ymax.max(4 * curve.conductor));
    let set = enumerate_d(&residues, &sieve, ymax)?;
    let c_n = density_constant(&residues);
    let ratio = set.discriminants.len() as f64 / ymax as f64;
    // The enumeration oracle fixes the distinct-discriminant density at
    // c_N/2; the closed-formula limit 2 c_N counts four times that (see
    // the density report fields). The runtime invariant uses the oracle.
    let vs_oracle = ratio / (c_n / 2.0);
    let vs_printed = ratio / (2.0 * c_n);
    std::fs::write(
        cli.out.join("heegner_set.csv"),
        heegner_set_csv(&set, cli.seed),
    )?;
    // density needs no curve tables; report constants without sym2
    let zero = moments::ValErr {
        value: 0.0,
        error: 0.0,
    };
    Ok(RunReport {
        schema: "run v1",
        subcommand: "density".into(),
        curve_label: curve.label.clone(),
        conductor: curve.conductor,
        seed: cli.seed,
        config: json!({"curve": cli.curve, "ymax": ymax, "seed": cli.seed}),
        constants: report::ConstantsReport {
            c_n: moments::ValErr {
                value: c_n,
                error: 0.0,
            },
            // the density path never builds curve tables
            volume_omega: zero,
            l1: None,
            l1_prime: None,
            sym2_at_2: None,
            decay_constant_v: zero,
        },
        decisions: Decisions {
            sym2_bad_factor: None,
            truncation_epsilon: afe::TRUNCATION_EPSILON,
        },
        results: json!({
            "ymax": ymax,
            "count": set.discriminants.len(),
            "ratio": ratio,
            "c_n": c_n,
            "ratio_vs_half_c_n": vs_oracle,
            "ratio_vs_printed_2c_n": vs_printed,
        }),
        checks: vec![CheckResult::new(
            "density_vs_enumeration_oracle",
            (vs_oracle - 1.0).abs() <= 0.02,
            format!("count/Y = {ratio:.6}, c_N/2 = {:.6}", c_n / 2.0),
        )],
    })
}

fn run_lprime(cli: &Cli, curve: CurveData, d: i64) -> Result<RunReport> {
    if d >= 0 || d.rem_euclid(4) != 1 {
        return Err(Error::Config(format!(
            "--d {d} is not a negative discriminant = 1 mod 4"
        )));
    }
    // the W-kernel consistency check at X = 1/2 reaches twice its decay
    // range, so the table must cover 2 * x_cut * N |d| / (4 pi^2)
    let n_cond = curve.conductor;
    let w_need = (2.0 * Kernel::W.x_cut() * (n_cond * d.unsigned_abs()) as f64
        / (4.0 * std::f64::consts::PI * std::f64::consts::PI))
        .ceil() as u64;
    let ctx = Context::build(
        curve,
        d.unsigned_abs().max(4 * n_cond),
        ContextOptions {
            min_table_len: w_need + 16,
            ..options(cli, false)
        },
    )?;
    if !ctx.residues.contains(d) || !ctx.sieve.is_squarefree(d.unsigned_abs())? {
        return Err(Error::Config(format!(
            "d = {d} is not a Heegner discriminant for N = {}",
            ctx.curve.conductor
        )));
    }
    let lp = ctx.l_prime(d)?;
    // self-checks: contour stability, functional-equation consistency,
    // truncation tail
    let other = crate::afe::CutoffSpec::new(QuadratureParams {
        contour_c: if cli.contour_c < 1.0 { 1.2 } else { 0.7 },
        ..QuadratureParams::default()
    });
    let moved = afe::l_prime_central(
        &afe::DSumInputs {
            cutoff: &other,
            ..ctx.sum_inputs()
        },
        d,
    )?;
    let s2 = afe::s_value(&ctx.coeffs, &ctx.cutoff, ctx.curve.conductor, d, 2.0)?;
    let s_half = afe::s_value(&ctx.coeffs, &ctx.cutoff, ctx.curve.conductor, d, 0.5)?;
    let tail = afe::truncation_tail_bound(&ctx.sum_inputs(), &ctx.sieve, d)?;
    let contour_gap = (lp - moved).abs() / lp.abs().max(1.0);
    let s_gap = (s2 - s_half).abs() / s2.abs().max(s_half.abs()).max(1.0);

    let mut report = base_report(cli, &ctx, "lprime")?;
    report.config =
        json!({"curve": cli.curve, "d": d, "contour_c": cli.contour_c, "seed": cli.seed});
    report.results = json!({
        "d": d,
        "lprime": lp,
        "lprime_other_contour": moved,
        "s_at_2": s2,
        "s_at_half": s_half,
        "tail_bound": tail,
    });
    report.checks = vec![
        CheckResult::new(
            "gross_zagier_positivity",
            lp >= -1e-6,
            format!("L'_d = {lp}"),
        ),
        CheckResult::new(
            "contour_stability_1e-8",
            contour_gap <= 1e-8,
            format!("relative gap {contour_gap:.3e}"),
        ),
        CheckResult::new(
            "functional_equation_consistency_1e-8",
            s_gap <= 1e-8,
            format!("S(2) = {s2}, S(1/2) = {s_half}, gap {s_gap:.3e}"),
        ),
        CheckResult::new(
            "truncation_tail_below_1e-8",
            tail < 1e-8,
            format!("bound {tail:.3e}"),
        ),
    ];
    Ok(report)
}

fn validate_ylist(ylist: &[u64]) -> Result<()> {
    if ylist.is_empty() {
        return Err(Error::Config("--ylist must be nonempty".into()));
    }
    if !ylist.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("--ylist must be strictly increasing".into()));
    }
    Ok(())
}

fn run_moment(cli: &Cli, curve: CurveData, ylist: &[u64]) -> Result<RunReport> {
    validate_ylist(ylist)?;
    let y_max = *ylist.last().unwrap();
    let max_abs_d = (cli.t1 * y_max as f64).ceil() as u64;
    let ctx = Context::build(curve, max_abs_d.max(4 * 37), options(cli, true))?;
    let bump = BumpFunction::new(cli.t0, cli.t1)?;
    let constants = main_term_constants(&ctx, &bump)?;
    let mut reports: Vec<MomentReport> = Vec::new();
    let mut largest_rows = Vec::new();
    for &y in ylist {
        let (rep, rows) = moments::empirical_moment(&ctx, &bump, &constants, y as f64)?;
        if y == y_max {
            largest_rows = rows;
        }
        reports.push(rep);
    }
    let mut checks = Vec::new();
    for rep in &reports {
        checks.push(CheckResult::new(
            &format!("main_term_recomputable_y{}", rep.y),
            rep.main_term == rep.recompute_main(),
            String::new(),
        ));
    }
    let negatives = largest_rows.iter().filter(|r| r.l_prime < -1e-6).count();
    checks.push(CheckResult::new(
        "gross_zagier_positivity_all_d",
        negatives == 0,
        format!("{negatives} violations at Y = {y_max}"),
    ));
    // decomposition identity at the smallest Y (cheap, exact split)
    let y0 = ylist[0] as f64;
    let first_emp = reports[0].empirical;
    let split = decomposition_identity(&ctx, &bump, y0, first_emp)?;
    checks.push(CheckResult::new(
        "decomposition_identity_1e-6",
        split.relative_gap <= 1e-6,
        format!("gap {:.3e} at Y = {y0}", split.relative_gap),
    ));
    let slope = if reports.len() >= 2 {
        let s = residual_slope(&reports);
        if reports.len() >= 4 {
            checks.push(CheckResult::new(
                "residual_slope_below_0.97",
                s <= 0.97,
                format!("slope {s:.4}"),
            ));
        }
        Some(s)
    } else {
        None
    };

    std::fs::write(cli.out.join("per_d.csv"), per_d_csv(&largest_rows))?;
    std::fs::write(cli.out.join("summary.csv"), summary_csv(&reports))?;
    std::fs::write(
        cli.out.join("plotdata_residual.csv"),
        plotdata_residual_csv(&reports),
    )?;

    let mut report = base_report(cli, &ctx, "moment")?;
    report.config = json!({
        "curve": cli.curve, "ylist": ylist, "t0": cli.t0, "t1": cli.t1,
        "contour_c": cli.contour_c, "sym2_x0": cli.sym2_x0, "seed": cli.seed,
    });
    report.results = json!({
        "alpha": constants.alpha,
        "beta": constants.beta,
        "moments": reports,
        "residual_slope": slope,
        "decomposition": split,
    });
    report.checks = checks;
    Ok(report)
}

fn run_error(cli: &Cli, curve: CurveData, y: u64) -> Result<RunReport> {
    let max_abs_d = (cli.t1 * y as f64).ceil() as u64;
    let ctx = Context::build(curve, max_abs_d, options(cli, false))?;
    let bump = BumpFunction::new(cli.t0, cli.t1)?;
    let yf = y as f64;
    let (signed, majorant) = error_direct_with_majorant(&ctx, &bump, yf)?;
    let split = error_split(&ctx, &bump, yf)?;
    let (empirical, _) = moments::moment_sum(&ctx, &bump, yf)?;
    let identity = decomposition_identity(&ctx, &bump, yf, empirical)?;

    // twisted-sum suite at the fixed parameters
    let x = 100_000u64.min(ctx.coeffs.n_max());
    let suite = twisted_suite(&ctx, cli.seed, 100, 10_000, x)?;
    let max_ratio = suite.iter().map(|s| s.ratio).fold(0.0f64, f64::max);
    let cancelling = suite
        .iter()
        .filter(|s| s.s.abs() <= 0.1 * s.abs_majorant)
        .count();
    let is_reference_suite = ctx.curve.label == "11a1"
        && cli.seed == TWISTED_SUITE_SEED
        && x == 100_000
        && ctx.curve.conductor == 11;
    let abel_cfg = TwistedConfig {
        m: 2,
        a: 1,
        v: 1,
        u: 1,
    };
    let (abel_direct, abel_via) =
        abel_summation_check(&ctx, &abel_cfg, 20_000.min(x), |n| 1.0 / n as f64)?;

    let mut checks = vec![
        CheckResult::new(
            "error_bounded_by_majorant",
            signed.abs() <= majorant * (1.0 + 1e-12),
            format!("|error| = {:.6e}, majorant = {majorant:.6e}", signed.abs()),
        ),
        CheckResult::new(
            "mobius_reassembly_1e-6",
            split.reassembly_gap <= 1e-6,
            format!("gap {:.3e}", split.reassembly_gap),
        ),
        CheckResult::new(
            "decomposition_identity_1e-6",
            identity.relative_gap <= 1e-6,
            format!("gap {:.3e}", identity.relative_gap),
        ),
        CheckResult::new(
            "abel_summation_identity_1e-10",
            (abel_direct - abel_via).abs() <= 1e-10 * abel_direct.abs().max(1.0),
            format!("direct {abel_direct}, abel {abel_via}"),
        ),
    ];
    if is_reference_suite {
        checks.push(CheckResult::new(
            "twisted_max_ratio_not_above_recorded",
            max_ratio <= RECORDED_TWISTED_MAX_RATIO * (1.0 + 1e-9),
            format!("max ratio {max_ratio:.6e}, recorded {RECORDED_TWISTED_MAX_RATIO:.6e}"),
        ));
        checks.push(CheckResult::new(
            "twisted_cancellation_90_of_100",
            cancelling >= 90,
            format!("{cancelling}/100 configs below 0.1x majorant"),
        ));
    }

    let mut per_a_csv = format!("# error_split v1 seed={}\na,error_a,mobius\n", cli.seed);
    for &(a, e) in &split.per_a {
        let _ = writeln!(per_a_csv, "{a},{e},{}", ctx.sieve.mobius(a)?);
    }
    std::fs::write(cli.out.join("error_split.csv"), per_a_csv)?;

    let mut report = base_report(cli, &ctx, "error")?;
    report.config = json!({
        "curve": cli.curve, "y": y, "t0": cli.t0, "t1": cli.t1,
        "seed": cli.seed, "twisted_x": x,
    });
    // shape constants against the reference bounds E1 << N^{9/4} Y^{1/2} A^2
    // and E2 << N^{1/2} Y / A: recorded, not regression-tested (too few
    // squarefree conductors at this scale for N-aspect fits)
    let nf = ctx.curve.conductor as f64;
    let af = split.a_threshold as f64;
    let e1_shape = split.e1 / (nf.powf(2.25) * yf.sqrt() * af * af);
    let e2_shape = split.e2 / (nf.sqrt() * yf / af);
    report.results = json!({
        "error_direct": signed,
        "error_majorant": majorant,
        "cancellation_factor": majorant / signed.abs().max(1e-300),
        "split": {
            "a_threshold": split.a_threshold,
            "e1": split.e1,
            "e2": split.e2,
            "e1_shape_constant": e1_shape,
            "e2_shape_constant": e2_shape,
            "reassembled": split.reassembled,
            "reassembly_gap": split.reassembly_gap,
        },
        "decomposition": identity,
        "twisted": {
            "max_ratio": max_ratio,
            "cancelling_configs": cancelling,
            "suite_size": suite.len(),
            "reference_suite": is_reference_suite,
        },
    });
    report.checks = checks;
    Ok(report)
}

fn run_heights(cli: &Cli, curve: CurveData, ylist: &[u64]) -> Result<RunReport> {
    validate_ylist(ylist)?;
    let y_max = *ylist.last().unwrap();
    let ctx = Context::build(curve, y_max, options(cli, true))?;
    let mut rows_largest = Vec::new();
    let mut table = Vec::new();
    let mut checks = Vec::new();
    for &y in ylist {
        let (rep, rows) = height_sum(&ctx, y as f64)?;
        let negatives = rows.iter().filter(|r| r.height < -1e-6).count();
        checks.push(CheckResult::new(
            &format!("heights_nonnegative_y{y}"),
            negatives == 0,
            format!("{negatives} violations"),
        ));
        if y == y_max {
            rows_largest = rows;
        }
        table.push(rep);
    }
    let mut csv = format!(
        "# heights v1 seed={}\ny,empirical,predicted_theorem,predicted_printed,ratio_theorem,ratio_printed\n",
        cli.seed
    );
    for r in &table {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.y,
            r.empirical,
            r.predicted_theorem,
            r.predicted_printed,
            r.ratio_theorem,
            r.ratio_printed
        );
    }
    std::fs::write(cli.out.join("heights.csv"), csv)?;
    std::fs::write(cli.out.join("per_d.csv"), per_d_csv(&rows_largest))?;

    let mut report = base_report(cli, &ctx, "heights")?;
    report.config = json!({
        "curve": cli.curve, "ylist": ylist, "sym2_x0": cli.sym2_x0, "seed": cli.seed,
    });
    report.results = json!({ "heights": table });
    report.checks = checks;
    Ok(report)
}

fn run_constants(cli: &Cli, curve: CurveData) -> Result<RunReport> {
    let ctx = Context::build(curve, 4 * 4000, options(cli, true))?;
    let bump = BumpFunction::new(cli.t0, cli.t1)?;
    let constants = main_term_constants(&ctx, &bump)?;
    let (l1, l1p) = ctx.l_values()?;
    let omega = ctx.periods.volume_omega;
    let c_n = ctx.density_constant();
    let log_term = (ctx.curve.conductor as f64 / (4.0 * std::f64::consts::PI.powi(2))).ln()
        - 2.0 / 3.0
        - 2.0 * crate::special::EULER_GAMMA;
    let c_p_theorem = moments::ValErr {
        value: c_n * l1.value / (3.0 * omega),
        error: c_n * l1.error / (3.0 * omega),
    };
    let c_p_prime_theorem = moments::ValErr {
        value: c_p_theorem.value * log_term + c_n * l1p.value / (3.0 * omega),
        error: c_p_theorem.error * log_term.abs() + c_n * l1p.error / (3.0 * omega),
    };
    let corr = crate::curve::correction_product(
        &ctx.sieve,
        ctx.curve.conductor,
        1.0,
        ctx.sym2_params.euler_prime_bound,
    );
    let sym2 = ctx.sym2_at_2()?;
    let c_p_printed = moments::ValErr {
        value: c_n / 3.0 * sym2.value / (corr * omega),
        error: c_n / 3.0 * sym2.error / (corr * omega),
    };

    let mut checks = vec![CheckResult::new(
        "lprime_derivative_self_consistent_1e-5",
        l1p.error <= 1e-5 * l1p.value.abs().max(1e-3),
        format!("L'(1) = {} +- {:.2e}", l1p.value, l1p.error),
    )];
    if let Some(dec) = &ctx.bad_factor {
        if dec.identity_checked {
            let res = [dec.standard_residual, dec.alternative_residual]
                .into_iter()
                .flatten()
                .fold(f64::INFINITY, f64::min);
            checks.push(CheckResult::new(
                "sym2_volume_identity_1e-2",
                res <= 0.01,
                format!("best residual {res:.3e} with {:?}", dec.chosen),
            ));
        }
    }

    let mut report = base_report(cli, &ctx, "constants")?;
    report.results = json!({
        "alpha": constants.alpha,
        "beta": constants.beta,
        "c_p_theorem": c_p_theorem,
        "c_p_prime_theorem": c_p_prime_theorem,
        "c_p_printed": c_p_printed,
        "printed_over_theorem": c_p_printed.value / c_p_theorem.value,
        "correction_product": corr,
        "bump": { "t0": bump.t0, "t1": bump.t1, "i0": bump.i0, "i1": bump.i1 },
    });
    report.checks = checks;
    Ok(report)
}
