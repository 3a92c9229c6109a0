// Monte Carlo estimates of the estimation-error and interference variances
// checked against their closed forms within three standard errors.

use superpilot::cli::{run_validate, Suite, ValidationReport};

pub fn run_example() -> superpilot::Result<ValidationReport> {
    let report = run_validate(Suite::Variances, 2000, 7)?;
    for c in &report.checks {
        println!(
            "{} {:<20} observed {:>12.6} expected {:>12.6} band {:.2e}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.observed,
            c.expected,
            c.band
        );
    }
    Ok(report)
}

fn main() -> superpilot::Result<()> {
    run_example()?;
    Ok(())
}
