//! Lattice 1-concavity of Orlicz gauges whose phi is concave, and the limit
//! condition on phi(t)/t.

use quasinorm_lab::convexity::{lattice_constant_probe, LatticeMode};
use quasinorm_lab::gauges::{Gauge, OrliczFunction};
use quasinorm_lab::measure::MeasureSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spaces = [MeasureSpace::counting(7), MeasureSpace::new(vec![0.1, 0.4, 2.0, 0.05, 1.0, 0.3])?];
    let phis = [OrliczFunction::loglog(), OrliczFunction::rational(), OrliczFunction::power(0.5)?];
    for phi in phis {
        let lc = phi.limit_condition();
        println!("{}: limit condition {:?}", phi.name(), lc);
        let g = Gauge::orlicz(phi);
        for (k, space) in spaces.iter().enumerate() {
            let r = lattice_constant_probe(&g, LatticeMode::Concave, 1.0, space, 1000, 7)?;
            println!("  space {k}: largest sampled concavity ratio {:.15}", r.value);
        }
    }

    // L_2 is not 1-concave in the lattice sense: disjoint blocks break it
    let r = lattice_constant_probe(&Gauge::lp(2.0), LatticeMode::Concave, 1.0, &spaces[0], 1000, 7)?;
    println!("L_2 for comparison: {:.6}", r.value);
    Ok(())
}
