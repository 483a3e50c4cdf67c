use clap::Parser;
use heegner_moments::cli::{run, Cli};
use heegner_moments::Error;

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let report = outcome.report;
            for check in &report.checks {
                eprintln!(
                    "check {:.<46} {} {}",
                    check.name,
                    if check.passed { "ok" } else { "FAIL" },
                    check.detail
                );
            }
            if report.all_checks_pass() {
                std::process::exit(0);
            }
            // machine-readable failure list on stdout
            let failures: Vec<_> = report.failing_checks();
            println!(
                "{}",
                serde_json::to_string(&serde_json::json!({ "failed_checks": failures }))
                    .unwrap_or_default()
            );
            std::process::exit(3);
        }
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Io(_) => 1,
                Error::Config(_) | Error::Json(_) | Error::Range(_) => 2,
                _ => 4,
            };
            std::process::exit(code);
        }
    }
}
