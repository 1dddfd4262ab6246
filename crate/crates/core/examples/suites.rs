//! Run property suites and merge their reports, as the qlab binary does.

use quasinorm_lab::gauges::Gauge;
use quasinorm_lab::report::{merge_reports, to_json_string, RunConfig};
use quasinorm_lab::suites::{run_suite, Suite, SuiteParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig { trials: 100, ..RunConfig::default() };
    let mut reports = Vec::new();
    for suite in [Suite::Counterexample, Suite::Leveling, Suite::Mii] {
        let r = run_suite(suite, &config, &SuiteParams::default())?;
        println!("{:<16} {}", r.suite, if r.passed { "pass" } else { "FAIL" });
        for c in r.checks.iter().take(4) {
            println!("    {:<40} {:.6e} vs {:.6e}", c.name, c.value, c.threshold);
        }
        reports.push(r);
    }
    println!("{}", reports[0].to_csv()?);

    // a violation comes with a witness
    let swapped = SuiteParams { a: Some(Gauge::lp(1.0)), b: Some(Gauge::lp(2.0)), ..SuiteParams::default() };
    let r = run_suite(Suite::Mii, &config, &swapped)?;
    println!("swapped mii passed: {}, witness present: {}", r.passed, r.witness.is_some());

    let merged = merge_reports(reports)?;
    let json = to_json_string(&merged)?;
    println!("merged report: {} bytes, passed {}", json.len(), merged.passed);
    Ok(())
}
