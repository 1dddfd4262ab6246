//! Modulus of concavity and the matching Aoki-Rolewicz exponent.

use quasinorm_lab::convexity::aoki_exponent;
use quasinorm_lab::gauges::{concavity_modulus_probe, Gauge};
use quasinorm_lab::measure::MeasureSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [1.0, 0.5, 1.0 / 3.0, 0.25] {
        let kappa = 2f64.powf(1.0 / p - 1.0);
        println!("p = {p:.6}: kappa = {kappa}, recovered p = {:.15}", aoki_exponent(kappa)?);
    }

    let space = MeasureSpace::counting(4);
    for (name, g) in [("L_1/2", Gauge::lp(0.5)), ("weak L_1", Gauge::weak_l1()), ("loglog", Gauge::loglog())]
    {
        let r = concavity_modulus_probe(&g, &space, 10_000, 1)?;
        let p = aoki_exponent(r.value.max(1.0))?;
        println!(
            "{name:>8}: sampled kappa >= {:.9}, so no p-norm with p > {p:.6} is equivalent with constant 1",
            r.value
        );
    }
    Ok(())
}
