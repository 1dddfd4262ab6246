//! Iterated gauges on product spaces.
//!
//! `mii_check(A, B, f)` compares `A(a -> B(f(a, .)))` with
//! `B(b -> A(f(., b)))`: the inner gauge is applied along the other factor
//! first. This is the orientation in which the pair `(lambda, L_{1,inf})`
//! enters the maximal-function argument.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{BoundResult, Witness};
use crate::error::{check_len, Error, Result};
use crate::gauges::Gauge;
use crate::measure::MeasureSpace;
use crate::sampling::{self, par_argmax, ProbeRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiiReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; zero when both sides vanish.
    pub ratio: f64,
    pub rows: usize,
    pub cols: usize,
}

fn iterated(
    outer: &Gauge,
    inner: &Gauge,
    outer_w: &[f64],
    inner_w: &[f64],
    lines: impl Iterator<Item = Vec<f64>>,
) -> f64 {
    let mut profile: Vec<f64> = lines
        .map(|mut line| {
            canonical_order(inner_w, &mut line);
            inner.value_raw(inner_w, &line)
        })
        .collect();
    canonical_order(outer_w, &mut profile);
    outer.value_raw(outer_w, &profile)
}

/// Under equal weights the gauges are symmetric, so sorting loses nothing and
/// makes the result independent of the order of rows and columns bit for bit.
fn canonical_order(w: &[f64], values: &mut [f64]) {
    if w.windows(2).all(|p| p[0] == p[1]) {
        values.sort_unstable_by(|a, b| b.total_cmp(a));
    }
}

fn mii_raw(a: &Gauge, b: &Gauge, wa: &[f64], wb: &[f64], rows: &[Vec<f64>]) -> MiiReport {
    let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
    let lhs = iterated(a, b, wa, wb, rows.iter().cloned());
    let rhs = iterated(b, a, wb, wa, (0..c).map(|j| rows.iter().map(|row| row[j]).collect()));
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    MiiReport { lhs, rhs, ratio, rows: r, cols: c }
}

/// `f` is given as rows indexed by the atoms of `space_a`, each row a field
/// over `space_b`.
pub fn mii_check(
    a: &Gauge,
    space_a: &MeasureSpace,
    b: &Gauge,
    space_b: &MeasureSpace,
    f: &[Vec<f64>],
) -> Result<MiiReport> {
    a.validate()?;
    b.validate()?;
    check_len(space_a.len(), f.len())?;
    for row in f {
        check_len(space_b.len(), row.len())?;
        if row.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::Input("matrix entries must be finite and nonnegative".into()));
        }
    }
    Ok(mii_raw(a, b, space_a.weights(), space_b.weights(), f))
}

fn sample_matrix(rng: &mut ProbeRng, r: usize, c: usize, trial: usize) -> Vec<Vec<f64>> {
    let scale = sampling::magnitude(rng);
    match trial % 6 {
        0 => (0..r).map(|i| (0..c).map(|j| if i % c == j { scale } else { 0.0 }).collect()).collect(),
        1 => {
            let mut perm: Vec<usize> = (0..c).collect();
            sampling::shuffle(rng, &mut perm);
            (0..r).map(|i| (0..c).map(|j| if perm[i % c] == j { scale } else { 0.0 }).collect()).collect()
        }
        // rank one: equality case of the integral Minkowski inequality
        2 => {
            let u: Vec<f64> = (0..r).map(|_| rng.gen::<f64>()).collect();
            let v: Vec<f64> = (0..c).map(|_| rng.gen::<f64>()).collect();
            u.iter().map(|x| v.iter().map(|y| scale * x * y).collect()).collect()
        }
        // a single nonzero row or column
        3 => {
            let pick = rng.gen_range(0..r.max(c));
            let by_row = rng.gen_bool(0.5);
            (0..r)
                .map(|i| {
                    (0..c)
                        .map(|j| {
                            let on = if by_row { i == pick % r } else { j == pick % c };
                            if on {
                                scale * rng.gen::<f64>()
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect()
        }
        4 => (0..r)
            .map(|_| (0..c).map(|_| if rng.gen_bool(0.2) { scale * rng.gen::<f64>() } else { 0.0 }).collect())
            .collect(),
        _ => (0..r).map(|_| (0..c).map(|_| scale * rng.gen::<f64>()).collect()).collect(),
    }
}

/// Largest `mii_check` ratio over seeded nonnegative `n x n` matrices, one
/// size from `dims` per trial in rotation, on the uniform probability measure
/// of each factor. The witness is the maximising matrix.
pub fn mii_sweep(a: &Gauge, b: &Gauge, dims: &[usize], trials: usize, seed: u64) -> Result<BoundResult> {
    a.validate()?;
    b.validate()?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Input("mii sweep needs nonempty positive sizes".into()));
    }
    let best = par_argmax(trials.max(1), |t| {
        let n = dims[t % dims.len()];
        let w = MeasureSpace::uniform(n);
        let mut rng = sampling::trial_rng(seed, t);
        let m = sample_matrix(&mut rng, n, n, t / dims.len());
        let rep = mii_raw(a, b, w.weights(), w.weights(), &m);
        (rep.rhs > 0.0).then_some((rep.ratio, m))
    });
    Ok(match best {
        Some((_, v, rows)) => BoundResult::lower(v).with_witness(Witness::Matrix { rows }),
        None => BoundResult::lower(0.0),
    })
}
