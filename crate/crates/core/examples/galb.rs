//! Lower bounds on the galb gauge of l_q spaces, with verified witnesses.

use quasinorm_lab::bound::Witness;
use quasinorm_lab::galb_tensor::{galb_gauge_estimate, galb_gauge_estimate_with, galbs_check, GalbConfig};
use quasinorm_lab::gauges::{Gauge, QuasiNormedSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = [1.0, 4.0, 9.0];
    for q in [2.0, 1.0, 0.5] {
        let x = QuasiNormedSpace::lq(4, q)?;
        let r = galb_gauge_estimate(&x, &a, 10_000, 0)?;
        println!("l_{q}^4, a = {a:?}: {:.12} {}", r.value, r.kind);
    }

    // force the search to find the ell_1/2 value without the closed form
    let x = QuasiNormedSpace::lq(4, 0.5)?;
    let cfg = GalbConfig { closed_forms: false, ..GalbConfig::new(10_000, 0) };
    let r = galb_gauge_estimate_with(&x, &a, &cfg)?;
    println!("searched: {:.12} {}", r.value, r.kind);
    if let Some(Witness::Galb(w)) = &r.witness {
        println!("  witness recomputes to {:.12}", w.verify(&x)?);
        for v in &w.vectors {
            println!("  {v:?}");
        }
    }

    let weak = QuasiNormedSpace::weak_l1(6)?;
    let r = galb_gauge_estimate(&weak, &[1.0; 6], 10_000, 0)?;
    println!("weak l_1^6 at (1,...,1): >= {:.9}", r.value);

    // lambda_X(a) / lambda(a) over sampled sequences; bounded means lambda galbs X
    let r = galbs_check(&Gauge::lp(0.5), &x, 200, 0)?;
    println!("sup lambda_X / L_1/2 on l_1/2^4: >= {:.9} {}", r.value, r.kind);
    Ok(())
}
