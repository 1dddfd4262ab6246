//! Tensor quasi-norms X (x)_lambda L_lambda: the representation search and
//! the canonical maps J and I.

use quasinorm_lab::galb_tensor::{i_map, j_map, tensor_norm_estimate, witness_terms, TensorRep, Term};
use quasinorm_lab::gauges::{Gauge, QuasiNormedSpace};
use quasinorm_lab::measure::MeasureSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = MeasureSpace::new(vec![0.5, 1.0, 2.0])?;
    let x = QuasiNormedSpace::lq(2, 2.0)?;
    // a deliberately wasteful representation: two of the terms cancel
    let terms = vec![
        Term { x: vec![1.0, 0.0], f: vec![1.0, 2.0, 0.0] },
        Term { x: vec![0.0, 1.0], f: vec![0.0, 1.0, 1.0] },
        Term { x: vec![3.0, 3.0], f: vec![1.0, 0.0, 1.0] },
        Term { x: vec![-3.0, -3.0], f: vec![1.0, 0.0, 1.0] },
    ];
    let rep = TensorRep::new(Gauge::lp(1.0), x.clone(), terms)?;

    let j = j_map(&rep, &space)?;
    println!("J(rep) = {:?}", j.vectors().collect::<Vec<_>>());
    println!("I(rep) = {:?}", i_map(&rep, &space)?);
    println!("cost of the given representation: {}", rep.profile_gauge(&space)?.value);

    let est = tensor_norm_estimate(&rep, &space, 10_000, 0)?;
    // for lambda = L_1 and Banach X the tensor norm is the Bochner norm of J
    let bochner = Gauge::lp(1.0).eval_vector(&space, &x, &j)?;
    println!("estimate {:.12} {}, Bochner norm of J {:.12}", est.value, est.kind, bochner.value);
    if let Some(terms) = est.witness.as_ref().and_then(witness_terms) {
        println!("best representation has {} terms", terms.len());
    }

    // quasi-Banach: lambda = L_1/2 over X = l_1/2
    let rep = TensorRep::new(Gauge::lp(0.5), QuasiNormedSpace::lq(2, 0.5)?, rep.terms.clone())?;
    let est = tensor_norm_estimate(&rep, &space, 10_000, 0)?;
    println!("L_1/2 (x) l_1/2: {:.12} {}", est.value, est.kind);
    Ok(())
}
