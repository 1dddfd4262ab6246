//! Evaluate the built-in function quasi-norms on a small weighted space.
//!
//! cargo run --example gauges

use quasinorm_lab::gauges::{convexify, dual_gauge, intersect_eval, Gauge};
use quasinorm_lab::measure::{MeasureSpace, ScalarField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = MeasureSpace::new(vec![2.0, 1.0, 1.0])?;
    let f = ScalarField::new(vec![4.0, 1.0, 0.0]);

    let gauges = [
        ("L_1", Gauge::lp(1.0)),
        ("L_2", Gauge::lp(2.0)),
        ("L_1/2", Gauge::lp(0.5)),
        ("weak L_1", Gauge::weak_l1()),
        ("loglog Orlicz", Gauge::loglog()),
        ("rational Orlicz", Gauge::rational()),
        ("L_1/2 convexified by 2", convexify(&Gauge::lp(0.5), 2.0)?),
    ];
    for (name, g) in &gauges {
        let r = g.eval(&space, &f)?;
        println!("{name:>24}: {:.12} {} (kappa {:?})", r.value, r.kind, g.known_kappa());
    }

    let meet = intersect_eval(&Gauge::lp(1.0), &Gauge::lp(2.0), &space, &f, 16)?;
    println!("{:>24}: {:.12} {}", "L_1 ∩ L_2", meet.value, meet.kind);

    // Hölder: the associate of L_2 is L_2
    let d = dual_gauge(&Gauge::lp(2.0), &space, &f, 8)?;
    println!("{:>24}: {:.12} {}", "associate of L_2", d.value, d.kind);
    let d = dual_gauge(&Gauge::weak_l1(), &space, &f, 8)?;
    println!("{:>24}: {:.12} {}", "associate of weak L_1", d.value, d.kind);
    Ok(())
}
