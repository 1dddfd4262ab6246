//! Lattice convexity/concavity, L-convexity and leveling probes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{BoundResult, Witness};
use crate::error::{Error, Result};
use crate::gauges::Gauge;
use crate::measure::{conditional_expectation, MeasureSpace, Partition, ScalarField};
use crate::sampling::{self, par_argmax, FieldShape, ProbeRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeMode {
    /// `rho((sum f_j^p)^{1/p}) <= C (sum rho(f_j)^p)^{1/p}`.
    Convex,
    /// `(sum rho(f_j)^p)^{1/p} <= C rho((sum f_j^p)^{1/p})`.
    Concave,
}

/// A sampled family `f_1, ..., f_m` over `n` atoms.
fn lattice_family(rng: &mut ProbeRng, n: usize, trial: usize) -> Vec<Vec<f64>> {
    let m = rng.gen_range(2..=6usize);
    match trial % 5 {
        // identical members: the equality case for L_p
        0 => {
            let shape = FieldShape::ALL[rng.gen_range(0..5)];
            vec![sampling::random_field(rng, n, shape); m]
        }
        // disjoint supports
        1 => {
            let scale = sampling::magnitude(rng);
            let mut fam = vec![vec![0.0; n]; m];
            #[allow(clippy::needless_range_loop)]
            for a in 0..n {
                fam[rng.gen_range(0..m)][a] = scale * rng.gen::<f64>();
            }
            fam
        }
        // single spikes, possibly colliding
        2 => (0..m).map(|_| sampling::random_field(rng, n, FieldShape::Spike)).collect(),
        // near-equal members
        3 => (0..m).map(|_| sampling::random_field(rng, n, FieldShape::NearEqual)).collect(),
        _ => (0..m)
            .map(|_| {
                let shape = FieldShape::ALL[rng.gen_range(0..5)];
                sampling::random_field(rng, n, shape)
            })
            .collect(),
    }
}

/// Lower bound on the lattice `p`-convexity (or `p`-concavity) constant of `g`.
pub fn lattice_constant_probe(
    g: &Gauge,
    mode: LatticeMode,
    p: f64,
    space: &MeasureSpace,
    trials: usize,
    seed: u64,
) -> Result<BoundResult> {
    g.validate()?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Input(format!("lattice exponent must be > 0, got {p}")));
    }
    let w = space.weights();
    let n = space.len();
    let best = par_argmax(trials.max(1), |t| {
        let mut rng = sampling::trial_rng(seed, t);
        let fam = lattice_family(&mut rng, n, t);
        let combined: Vec<f64> =
            (0..n).map(|a| fam.iter().map(|f| f[a].powf(p)).sum::<f64>().powf(1.0 / p)).collect();
        let big_g = g.value_raw(w, &combined);
        let big_h = fam.iter().map(|f| g.value_raw(w, f).powf(p)).sum::<f64>().powf(1.0 / p);
        let (num, den) = match mode {
            LatticeMode::Convex => (big_g, big_h),
            LatticeMode::Concave => (big_h, big_g),
        };
        (den > 0.0).then(|| (num / den, fam))
    });
    Ok(match best {
        Some((_, v, fam)) => BoundResult::lower(v).with_witness(Witness::Family { parts: fam }),
        None => BoundResult::lower(1.0),
    })
}

/// A family `f_j <= f` whose average dominates `(1 - eps) f` while every
/// member is small: `max_j rho(f_j) < eps rho(f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LConvexityWitness {
    pub f: Vec<f64>,
    pub family: Vec<Vec<f64>>,
    /// `max_j rho(f_j) / rho(f)`.
    pub ratio: f64,
}

fn l_family(rng: &mut ProbeRng, f: &[f64], trial: usize) -> Vec<Vec<f64>> {
    let n = f.len();
    let m = rng.gen_range(2..=n.clamp(2, 64));
    let blocks: Vec<usize> = (0..n).map(|a| a % m).collect();
    match trial % 4 {
        // disjoint pieces of f
        0 => (0..m).map(|j| (0..n).map(|a| if blocks[a] == j { f[a] } else { 0.0 }).collect()).collect(),
        // f minus disjoint bites
        1 => (0..m).map(|j| (0..n).map(|a| if blocks[a] == j { 0.0 } else { f[a] }).collect()).collect(),
        // scalar multiples
        2 => (0..m)
            .map(|_| {
                let c: f64 = rng.gen();
                f.iter().map(|v| c * v).collect()
            })
            .collect(),
        _ => (0..m).map(|_| f.iter().map(|v| rng.gen::<f64>() * v).collect()).collect(),
    }
}

/// Searches for a violation of the L-convexity condition at level `epsilon`;
/// returns the first witness in trial order, or `None`.
pub fn l_convexity_probe(
    g: &Gauge,
    epsilon: f64,
    space: &MeasureSpace,
    trials: usize,
    seed: u64,
) -> Result<Option<LConvexityWitness>> {
    g.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Input(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let w = space.weights();
    let n = space.len();
    // scores are negated trial indices so the reduction picks the first hit
    let hit = par_argmax(trials, |t| {
        let mut rng = sampling::trial_rng(seed, t);
        let f = sampling::random_field(&mut rng, n, FieldShape::ALL[(t / 4) % 5]);
        let rho = g.value_raw(w, &f);
        if rho <= 0.0 {
            return None;
        }
        let fam = l_family(&mut rng, &f, t);
        let m = fam.len() as f64;
        let admissible = (0..n).all(|a| {
            let avg = fam.iter().map(|h| h[a]).sum::<f64>() / m;
            fam.iter().all(|h| h[a] <= f[a]) && avg >= (1.0 - epsilon) * f[a]
        });
        if !admissible {
            return None;
        }
        let top = fam.iter().map(|h| g.value_raw(w, h)).fold(0.0, f64::max);
        (top < epsilon * rho).then(|| (-(t as f64), LConvexityWitness { f, family: fam, ratio: top / rho }))
    });
    Ok(hit.map(|(_, _, wit)| wit))
}

/// Lower bound on the leveling constant `sup rho(E(f | P)) / rho(f)`.
pub fn leveling_constant_probe(
    g: &Gauge,
    space: &MeasureSpace,
    trials: usize,
    seed: u64,
) -> Result<BoundResult> {
    g.validate()?;
    let w = space.weights();
    let n = space.len();
    let best = par_argmax(trials.max(1), |t| {
        let mut rng = sampling::trial_rng(seed, t);
        let (f, blocks) = match t % 4 {
            // a spike averaged over everything
            0 => {
                let mut f = vec![0.0; n];
                f[t / 4 % n] = sampling::magnitude(&mut rng);
                (f, vec![(0..n).collect::<Vec<_>>()])
            }
            1 => {
                let f = sampling::random_field(&mut rng, n, FieldShape::Spike);
                (f, sampling::random_partition(&mut rng, n))
            }
            _ => {
                let shape = FieldShape::ALL[rng.gen_range(0..5)];
                let f = sampling::random_field(&mut rng, n, shape);
                (f, sampling::random_partition(&mut rng, n))
            }
        };
        let rho = g.value_raw(w, &f);
        if rho <= 0.0 {
            return None;
        }
        let partition = Partition { blocks };
        let e = conditional_expectation(space, &partition, &ScalarField::new(f.clone())).ok()?;
        Some((g.value_raw(w, &e.values) / rho, (f, partition.blocks)))
    });
    Ok(match best {
        Some((_, v, (f, blocks))) => BoundResult::lower(v).with_witness(Witness::Leveling { f, blocks }),
        None => BoundResult::lower(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_is_p_convex_and_p_concave_with_constant_one() {
        let s = MeasureSpace::new(vec![0.5, 1.0, 2.0, 0.25]).unwrap();
        for p in [0.5, 1.0, 2.0] {
            for mode in [LatticeMode::Convex, LatticeMode::Concave] {
                let r = lattice_constant_probe(&Gauge::lp(p), mode, p, &s, 500, 1).unwrap();
                assert!((r.value - 1.0).abs() < 1e-12, "p={p} {mode:?}: {}", r.value);
            }
        }
    }

    #[test]
    fn loglog_is_lattice_one_concave() {
        let s = MeasureSpace::counting(6);
        let r = lattice_constant_probe(&Gauge::loglog(), LatticeMode::Concave, 1.0, &s, 1000, 2).unwrap();
        assert!(r.value <= 1.0 + 1e-9, "{}", r.value);
    }

    #[test]
    fn l_convexity_examples() {
        let s = MeasureSpace::counting(8);
        assert!(l_convexity_probe(&Gauge::lp(1.0), 0.4, &s, 10_000, 5).unwrap().is_none());
        let wit = l_convexity_probe(&Gauge::lp(1.0), 0.99, &s, 1000, 5).unwrap().unwrap();
        assert!(wit.ratio < 0.99);
        for h in &wit.family {
            assert!(h.iter().zip(&wit.f).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn leveling_examples() {
        let s = MeasureSpace::uniform(8);
        let r = leveling_constant_probe(&Gauge::lp(0.5), &s, 100, 1).unwrap();
        assert!(r.value >= 8.0 - 1e-6, "{}", r.value);
        for p in [1.0, 2.0, 3.0] {
            let r = leveling_constant_probe(&Gauge::lp(p), &s, 2000, 1).unwrap();
            assert!(r.value <= 1.0 + 1e-9, "p={p}: {}", r.value);
        }
    }

    #[test]
    fn leveling_witness_reproduces_value() {
        let s = MeasureSpace::new(vec![1.0, 0.5, 3.0, 0.2, 1.0]).unwrap();
        let g = Gauge::weak_l1();
        let r = leveling_constant_probe(&g, &s, 300, 4).unwrap();
        let Some(Witness::Leveling { f, blocks }) = r.witness else { panic!() };
        let f = ScalarField::new(f);
        let e = conditional_expectation(&s, &Partition::new(blocks, 5).unwrap(), &f).unwrap();
        let ratio = g.value(&s, &e).unwrap() / g.value(&s, &f).unwrap();
        assert_eq!(ratio, r.value);
    }
}
