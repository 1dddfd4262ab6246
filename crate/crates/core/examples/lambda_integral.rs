//! The integral on simple functions and on tensors, representation
//! independence, and the Rolewicz blow-up in L_p for p < 1.

use quasinorm_lab::galb_tensor::{TensorRep, Term};
use quasinorm_lab::gauges::{Gauge, QuasiNormedSpace};
use quasinorm_lab::integration::{
    integrate_series, integrate_simple, representation_independence_check, rolewicz_counterexample, Piece,
    SimpleFunction,
};
use quasinorm_lab::measure::MeasureSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = MeasureSpace::new(vec![0.25, 0.25, 0.5])?;
    let x = QuasiNormedSpace::lq(2, 0.5)?;
    let s = SimpleFunction {
        pieces: vec![
            Piece { atoms: vec![0, 1], x: vec![1.0, 2.0] },
            Piece { atoms: vec![2], x: vec![4.0, 0.0] },
        ],
    };
    println!("integral of simple function: {:?}", integrate_simple(&s, &space, &x)?);

    let rep = s.to_tensor(Gauge::lp(1.0), x.clone(), space.len())?;
    let series = integrate_series(&rep, &space, 1e6)?;
    println!("as a tensor: {:?} (certificate {:.6})", series.value, series.certificate.value);

    // the same tensor written differently
    let mut terms = rep.terms.clone();
    terms.push(Term { x: vec![1.0, 1.0], f: vec![0.0, 1.0, 1.0] });
    terms.push(Term { x: vec![-1.0, -1.0], f: vec![0.0, 1.0, 1.0] });
    let other = TensorRep::new(rep.lambda.clone(), x, terms)?;
    let check = representation_independence_check(&rep, &other, &space, 1e-9)?;
    println!("{check:?}");

    println!("p     n      sup part     Riemann sum  ratio");
    for n in [1, 4, 16, 64, 256, 1024] {
        let r = rolewicz_counterexample(0.5, n)?;
        println!(
            "{:<5} {:<6} {:<12.6e} {:<12.6} {}",
            r.p, r.n, r.sup_part_norm, r.riemann_sum_norm, r.blowup_ratio
        );
    }
    Ok(())
}
