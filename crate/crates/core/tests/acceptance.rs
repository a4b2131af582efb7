//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs under `cargo test`; `cargo test --test acceptance` alone
//! runs just this target.

use std::process::ExitCode;
use std::time::Instant;

use levy_localtime::verify::{self, CheckReport, VerifyOptions};

fn combine(name: &'static str, parts: Vec<CheckReport>) -> CheckReport {
    let passed = parts.iter().all(|p| p.passed);
    let detail = parts
        .iter()
        .map(|p| {
            format!(
                "[{} {} {:.3e}/{:.1e}: {}]",
                if p.passed { "ok" } else { "FAILED" },
                p.name,
                p.measured,
                p.threshold,
                p.detail
            )
        })
        .collect::<Vec<_>>()
        .join(" ");
    CheckReport {
        name,
        passed,
        measured: parts.iter().filter(|p| !p.passed).count() as f64,
        threshold: 0.0,
        detail,
    }
}

fn main() -> ExitCode {
    let o = VerifyOptions::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> CheckReport>)> = vec![
        (
            "closed-form agreement of the stable density",
            Box::new(move || verify::closed_form_agreement(&o)),
        ),
        (
            "recurrence probability",
            Box::new(move || verify::recurrence(&o)),
        ),
        (
            "resolvent triple agreement",
            Box::new(move || verify::resolvent_triple(&o)),
        ),
        (
            "integrated resolvent = 1/E",
            Box::new(move || verify::integrated_resolvent(&o)),
        ),
        (
            "delta-atom mass bookkeeping",
            Box::new(move || verify::atom_mass(&o)),
        ),
        (
            "distribution normalization",
            Box::new(move || verify::distribution_normalization(&o)),
        ),
        (
            "Gaussian moment-distribution consistency",
            Box::new(move || verify::gaussian_moment_consistency(&o)),
        ),
        (
            "dual-route first moments",
            Box::new(move || verify::first_moment_routes(&o)),
        ),
        (
            "sum rule of the free-endpoint mean",
            Box::new(move || verify::mean_sum_rule(&o)),
        ),
        (
            "Monte Carlo vs analytic",
            Box::new(move || combine("monte_carlo_vs_analytic", verify::mc_suite(&o))),
        ),
        (
            "flattening as lambda -> 1",
            Box::new(move || verify::flattening(&o)),
        ),
        (
            "tail-constant audit",
            Box::new(move || verify::tail_constant_audit(&o)),
        ),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = check();
        if !r.passed {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {title}: {} measured {:.3e} threshold {:.1e} ({:.1}s) {}",
            if r.passed { "PASS" } else { "FAIL" },
            i + 1,
            r.name,
            r.measured,
            r.threshold,
            start.elapsed().as_secs_f64(),
            r.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
