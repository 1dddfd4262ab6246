//! Conditional expectations are contractions for L_p, p >= 1, and blow up
//! for L_1/2 on a spike.

use quasinorm_lab::convexity::leveling_constant_probe;
use quasinorm_lab::gauges::Gauge;
use quasinorm_lab::measure::{conditional_expectation, MeasureSpace, Partition, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = MeasureSpace::uniform(8);
    for (name, g) in [
        ("L_1", Gauge::lp(1.0)),
        ("L_2", Gauge::lp(2.0)),
        ("L_1/2", Gauge::lp(0.5)),
        ("weak L_1", Gauge::weak_l1()),
    ] {
        let r = leveling_constant_probe(&g, &space, 2000, 3)?;
        println!("{name:>8}: leveling constant >= {:.9}", r.value);
    }

    let spike = ScalarField::indicator(8, &[0]);
    let flat = conditional_expectation(&space, &Partition::trivial(8), &spike)?;
    let g = Gauge::lp(0.5);
    println!("spike {:?}\n  -> {:?}", spike.values, flat.values);
    println!("  L_1/2: {} -> {}", g.value(&space, &spike)?, g.value(&space, &flat)?);
    Ok(())
}
