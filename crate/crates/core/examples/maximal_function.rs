//! Cube averages, the Lebesgue differentiation report and the
//! Hardy-Littlewood maximal function on a dyadic grid of [0, 1]^d.

use quasinorm_lab::ftc::{
    differentiation_report, hl_maximal, hl_maximal_with, vector_maximal, weak11_constant, CubeFamily,
    GridSpace,
};
use quasinorm_lab::gauges::QuasiNormedSpace;
use quasinorm_lab::measure::{ScalarField, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpace::new(1, 256)?;
    let x = QuasiNormedSpace::lq(2, 2.0)?;
    let half: Vec<f64> = (0..grid.len()).map(|c| if grid.center(c)[0] < 0.5 { 1.0 } else { 0.0 }).collect();
    let field = VectorField::rank_one(&[3.0, 4.0], &half);
    let samples: Vec<Vec<f64>> = (0..10).map(|k| vec![(2 * k + 1) as f64 / 21.0]).collect();
    let schedule = [0.5, 0.25, 0.125, 0.0625, 1.0 / 64.0, 1.0 / 256.0];
    println!("{:>10} {:>10}", "scale", "error");
    for row in differentiation_report(&grid, &field, &x, &samples, &schedule)? {
        println!("{:>10.6} {:>10.6}", row.halfwidth, row.max_error);
    }

    let big = GridSpace::new(1, 4096)?;
    let mut spike = vec![0.0; big.len()];
    spike[2048] = big.len() as f64;
    let spike = ScalarField::new(spike);
    for family in [CubeFamily::Containing, CubeFamily::Centered] {
        let c = weak11_constant(&big, &spike, &big.dyadic_scales(), family)?;
        println!("weak (1,1) ratio of a point mass, {family:?} cubes: {c:.6}");
    }

    let g2 = GridSpace::new(2, 32)?;
    let f = ScalarField::indicator(g2.len(), &[0]);
    let m = hl_maximal(&g2, &f, &g2.all_scales())?;
    let c = hl_maximal_with(&g2, &f, &g2.all_scales(), CubeFamily::Centered)?;
    println!(
        "2-D corner indicator: Mf at the corner {}, at the far corner {:.6} / {:.6}",
        m.values[0],
        m.values[g2.len() - 1],
        c.values[g2.len() - 1]
    );

    let vf = VectorField::rank_one(&[1.0, -1.0], &half);
    let vm = vector_maximal(&grid, &vf, &QuasiNormedSpace::lq(2, 0.5)?, &grid.dyadic_scales())?;
    println!(
        "vector maximal function in l_1/2 at cells 0, 128, 255: {:.6} {:.6} {:.6}",
        vm.values[0], vm.values[128], vm.values[255]
    );
    Ok(())
}
