//! Iterated-gauge inequality on product spaces.

use quasinorm_lab::bound::Witness;
use quasinorm_lab::convexity::{mii_check, mii_sweep};
use quasinorm_lab::gauges::Gauge;
use quasinorm_lab::measure::MeasureSpace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (l1, l2) = (Gauge::lp(1.0), Gauge::lp(2.0));

    let r = mii_sweep(&l2, &l1, &[2, 4, 8, 16, 32], 1000, 0)?;
    println!("L_2 outer, L_1 inner: max ratio {:.15} {}", r.value, r.kind);

    for n in [4, 16] {
        let id: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        let c = MeasureSpace::counting(n);
        let rep = mii_check(&l1, &c, &l2, &c, &id)?;
        println!("swapped roles, {n}x{n} identity: ratio {} (sqrt n = {})", rep.ratio, (n as f64).sqrt());
    }

    let (wl, ll) = (Gauge::weak_l1(), Gauge::loglog());
    let small = mii_sweep(&wl, &ll, &[8], 300, 5)?;
    let large = mii_sweep(&wl, &ll, &[32], 300, 5)?;
    println!("weak L_1 over loglog: 8x8 {:.6}, 32x32 {:.6}", small.value, large.value);
    if let Some(Witness::Matrix { rows }) = &large.witness {
        println!("  32x32 witness row 0: {:?}", &rows[0][..4]);
    }
    Ok(())
}
