//! Upper bounds on the p-norm envelope of a gauge, with the decomposition
//! that attains them.

use quasinorm_lab::bound::Witness;
use quasinorm_lab::convexity::{p_envelope, p_envelope_with, EnvelopeConfig};
use quasinorm_lab::gauges::Gauge;
use quasinorm_lab::measure::{MeasureSpace, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = MeasureSpace::counting(3);
    let f = ScalarField::new(vec![1.0, 2.0, 3.0]);

    // The 1-envelope of l_1/2 is l_1: split f into its coordinates.
    let r = p_envelope(&Gauge::lp(0.5), 1.0, &space, &f, 32)?;
    println!("1-envelope of L_1/2 at {:?}: {:.9} {}", f.values, r.value, r.kind);
    if let Some(Witness::Family { parts }) = &r.witness {
        for p in parts {
            println!("  part {p:?}");
        }
    }
    println!("  l_1 value: {}", Gauge::lp(1.0).value(&space, &f)?);

    // L_1/2 is already a 1/2-norm, so the analytic shortcut applies ...
    let exact = p_envelope(&Gauge::lp(0.5), 0.5, &space, &f, 8)?;
    // ... and the generic search reaches it too.
    let cfg = EnvelopeConfig { budget: 64, analytic_shortcut: false, ..EnvelopeConfig::default() };
    let searched = p_envelope_with(&Gauge::lp(0.5), 0.5, &space, &f, &cfg)?;
    println!(
        "1/2-envelope of L_1/2: shortcut {} {}, search {} {}",
        exact.value, exact.kind, searched.value, searched.kind
    );

    let weak = p_envelope(
        &Gauge::weak_l1(),
        0.5,
        &MeasureSpace::counting(6),
        &ScalarField::new(vec![6.0, 3.0, 2.0, 1.5, 1.2, 1.0]),
        32,
    )?;
    println!("1/2-envelope of weak L_1 at the harmonic sequence: {:.9} {}", weak.value, weak.kind);
    Ok(())
}
