//! Search-based gauge quantities: intersections (upper bounds), associated
//! gauges of non-convex balls (lower bounds) and modulus-of-concavity probes.

use rand::Rng;

use super::Gauge;
use crate::bound::{BoundResult, Witness};
use crate::error::Result;
use crate::measure::{MeasureSpace, ScalarField};
use crate::sampling::{self, par_argmax, par_argmin, FieldShape};

/// Restarts used when an intersection is evaluated through [`Gauge::eval`].
pub const INTERSECT_DEFAULT_BUDGET: usize = 8;
pub(crate) const INTERSECT_SEED: u64 = 0x1A7E_5EC7;
const DUAL_SEED: u64 = 0xD0A1;
const MAX_SWEEPS: usize = 60;

fn split_objective(g1: &Gauge, g2: &Gauge, w: &[f64], f: &[f64], alpha: &[f64]) -> f64 {
    let a: Vec<f64> = f.iter().zip(alpha).map(|(v, t)| v * t).collect();
    let b: Vec<f64> = f.iter().zip(alpha).map(|(v, t)| v * (1.0 - t)).collect();
    g1.value_raw(w, &a) + g2.value_raw(w, &b)
}

/// Coordinate descent over per-atom shares `alpha_w in [0, 1]`.
fn descend_split(g1: &Gauge, g2: &Gauge, w: &[f64], f: &[f64], alpha: &mut [f64]) -> f64 {
    let mut best = split_objective(g1, g2, w, f, alpha);
    for _ in 0..MAX_SWEEPS {
        let before = best;
        for atom in 0..alpha.len() {
            if f[atom] == 0.0 {
                continue;
            }
            let keep = alpha[atom];
            let mut arg = keep;
            let eval = |t: f64, alpha: &mut [f64]| {
                alpha[atom] = t;
                split_objective(g1, g2, w, f, alpha)
            };
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                let v = eval(t, alpha);
                if v < best {
                    best = v;
                    arg = t;
                }
            }
            // golden-section refinement around the grid winner
            let (mut lo, mut hi) = ((arg - 0.05).max(0.0), (arg + 0.05).min(1.0));
            let r = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..30 {
                let m1 = hi - r * (hi - lo);
                let m2 = lo + r * (hi - lo);
                let (v1, v2) = (eval(m1, alpha), eval(m2, alpha));
                if v1 < best {
                    best = v1;
                    arg = m1;
                }
                if v2 < best {
                    best = v2;
                    arg = m2;
                }
                if v1 < v2 {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            alpha[atom] = arg;
        }
        if best >= before * (1.0 - 1e-15) {
            break;
        }
    }
    best
}

pub(crate) fn intersect_raw(
    g1: &Gauge,
    g2: &Gauge,
    w: &[f64],
    f: &[f64],
    budget: usize,
    seed: u64,
) -> BoundResult {
    let n = f.len();
    let r1 = g1.value_raw(w, f);
    let r2 = g2.value_raw(w, f);
    let (mut best, mut alpha) = if r1 <= r2 { (r1, vec![1.0; n]) } else { (r2, vec![0.0; n]) };
    if budget > 0 && f.iter().any(|&v| v > 0.0) {
        let found = par_argmin(budget, |restart| {
            let mut a: Vec<f64> = match restart {
                0 => vec![1.0; n],
                1 => vec![0.0; n],
                2 => vec![0.5; n],
                _ => {
                    let mut rng = sampling::trial_rng(seed, restart);
                    (0..n).map(|_| rng.gen::<f64>()).collect()
                }
            };
            let v = descend_split(g1, g2, w, f, &mut a);
            Some((v, a))
        });
        if let Some((_, v, a)) = found {
            if v < best {
                best = v;
                alpha = a;
            }
        }
    }
    BoundResult::upper(best).with_witness(Witness::Split { alpha })
}

/// Upper bound on `(rho_1 ∩ rho_2)(f) = inf{ rho_1(g) + rho_2(h) : f = g + h }`
/// from `budget` restarts of a per-atom split search. Never exceeds
/// `min(rho_1(f), rho_2(f))`.
pub fn intersect_eval(
    g1: &Gauge,
    g2: &Gauge,
    space: &MeasureSpace,
    f: &ScalarField,
    budget: usize,
) -> Result<BoundResult> {
    g1.validate()?;
    g2.validate()?;
    f.check_over(space)?;
    f.check_nonnegative()?;
    Ok(intersect_raw(g1, g2, space.weights(), &f.values, budget, INTERSECT_SEED))
}

fn pairing(w: &[f64], f: &[f64], g: &[f64]) -> f64 {
    w.iter().zip(f).zip(g).map(|((w, f), g)| w * f * g).sum()
}

/// Associated gauge `rho'(f) = sup{ int f g : rho(g) <= 1 }`.
///
/// Exact for `L_p` with `p >= 1` (Hölder conjugate); otherwise a lower bound
/// from coordinate ascent on `<f, g> / rho(g)` with `budget` restarts. The
/// witness is the maximiser normalised to `rho(g) = 1`.
pub fn dual_gauge(g: &Gauge, space: &MeasureSpace, f: &ScalarField, budget: usize) -> Result<BoundResult> {
    g.validate()?;
    f.check_over(space)?;
    f.check_nonnegative()?;
    let w = space.weights();
    let n = f.len();
    if f.is_zero() {
        return Ok(BoundResult::exact(0.0));
    }
    if let Gauge::Lp { p } = g {
        let p = *p;
        if p == 1.0 {
            let (atom, top) =
                f.values
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, f64::MIN), |a, (i, v)| if v > a.1 { (i, v) } else { a });
            let mut witness = vec![0.0; n];
            witness[atom] = 1.0 / w[atom];
            return Ok(BoundResult::exact(top).with_witness(Witness::Field { values: witness }));
        }
        if p > 1.0 {
            let q = p / (p - 1.0);
            let norm = super::lp_raw(w, &f.values, q);
            let witness: Vec<f64> = f.values.iter().map(|v| (v / norm).powf(q - 1.0)).collect();
            return Ok(BoundResult::exact(norm).with_witness(Witness::Field { values: witness }));
        }
    }

    let ratio = |gv: &[f64]| {
        let r = g.eval_raw(w, gv).value;
        if r > 0.0 && r.is_finite() {
            pairing(w, &f.values, gv) / r
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut seeds: Vec<Vec<f64>> = (0..n)
        .filter(|&a| f.values[a] > 0.0)
        .map(|a| {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            e
        })
        .collect();
    seeds.push(f.values.clone());
    seeds.push(f.values.iter().map(|v| v * v).collect());
    seeds.push(f.values.iter().map(|v| v.sqrt()).collect());
    seeds.push(vec![1.0; n]);

    let restarts = seeds.len() + budget;
    let best = par_argmax(restarts, |k| {
        let mut cur = if k < seeds.len() {
            seeds[k].clone()
        } else {
            let mut rng = sampling::trial_rng(DUAL_SEED, k);
            sampling::random_field(&mut rng, n, FieldShape::ALL[k % FieldShape::ALL.len()])
        };
        let mut val = ratio(&cur);
        for _ in 0..MAX_SWEEPS {
            let before = val;
            for atom in 0..n {
                let keep = cur[atom];
                let scale = if keep > 0.0 { keep } else { cur.iter().copied().fold(0.0, f64::max) };
                for factor in [0.0, 0.25, 0.5, 0.8, 0.95, 1.05, 1.25, 2.0, 4.0, 16.0] {
                    let t = if keep > 0.0 { keep * factor } else { scale * factor };
                    cur[atom] = t;
                    let v = ratio(&cur);
                    if v > val {
                        val = v;
                        break;
                    }
                    cur[atom] = keep;
                }
            }
            if val <= before * (1.0 + 1e-14) {
                break;
            }
        }
        Some((val, cur))
    });
    let (_, value, gv) = best.expect("at least one restart");
    let r = g.eval_raw(w, &gv).value;
    let witness: Vec<f64> = gv.iter().map(|v| v / r).collect();
    Ok(BoundResult::lower(value).with_witness(Witness::Field { values: witness }))
}

/// Lower bound on the modulus of concavity: the largest sampled
/// `rho(f + g) / (rho(f) + rho(g))`.
pub fn concavity_modulus_probe(
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
        let (f, h) = concavity_pair(&mut rng, n, t);
        let denom = g.value_raw(w, &f) + g.value_raw(w, &h);
        let sum: Vec<f64> = f.iter().zip(&h).map(|(a, b)| a + b).collect();
        (denom > 0.0).then(|| (g.value_raw(w, &sum) / denom, (f, h)))
    });
    Ok(match best {
        Some((_, v, (f, h))) => BoundResult::lower(v).with_witness(Witness::Pair { f, g: h }),
        None => BoundResult::lower(1.0),
    })
}

fn concavity_pair(rng: &mut sampling::ProbeRng, n: usize, trial: usize) -> (Vec<f64>, Vec<f64>) {
    match trial % 4 {
        // disjoint supports with comparable mass
        0 => {
            let scale = sampling::magnitude(rng);
            let mut f = vec![0.0; n];
            let mut h = vec![0.0; n];
            for a in 0..n {
                let v = scale * (0.5 + rng.gen::<f64>());
                if rng.gen_bool(0.5) {
                    f[a] = v;
                } else {
                    h[a] = v;
                }
            }
            (f, h)
        }
        // a decreasing profile against its reversal
        1 => {
            let scale = sampling::magnitude(rng);
            let f: Vec<f64> = (0..n).map(|k| scale / (k + 1) as f64).collect();
            let h: Vec<f64> = f.iter().rev().copied().collect();
            (f, h)
        }
        2 => {
            let s1 = FieldShape::ALL[rng.gen_range(0..FieldShape::ALL.len())];
            let s2 = FieldShape::ALL[rng.gen_range(0..FieldShape::ALL.len())];
            (sampling::random_field(rng, n, s1), sampling::random_field(rng, n, s2))
        }
        _ => {
            let f = sampling::random_field(rng, n, FieldShape::NearEqual);
            let mut h = f.clone();
            sampling::shuffle(rng, &mut h);
            (f, h)
        }
    }
}
