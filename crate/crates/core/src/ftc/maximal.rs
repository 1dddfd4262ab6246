//! Maximal functions over cube families on a grid.
//!
//! A family of cubes is described per axis: a list of windows `[lo, hi)` of
//! cell indices (one per anchor) and, for every output cell, the inclusive
//! range of anchors whose cubes are admitted at that cell. Both the window
//! sums and the max over admitted anchors separate across axes, so the 2-D
//! case is two passes of the 1-D one. Window sums come from prefix sums kept
//! in double-double so that, for instance, a constant field averages back to
//! itself.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{GridSpace, FACE_SNAP};
use crate::bound::BoundResult;
use crate::error::{check_len, input, Result};
use crate::galb_tensor::{j_map, TensorRep};
use crate::gauges::{Gauge, QuasiNormedSpace};
use crate::measure::{ScalarField, VectorField};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubeFamily {
    /// Every grid-aligned cube of side `round(2hN)` cells that contains the
    /// cell of `y`, for each scale `h`.
    #[default]
    Containing,
    /// Cubes of halfwidth `h` centered at the cell of `y` or at one of its
    /// neighbours, clipped to the domain.
    Centered,
}

struct AxisFamily {
    windows: Vec<(usize, usize)>,
    cover: Vec<(usize, usize)>,
}

impl AxisFamily {
    fn containing(n: usize, side: usize) -> Self {
        let windows = (0..=n - side).map(|a| (a, a + side)).collect();
        let cover = (0..n).map(|y| ((y + 1).saturating_sub(side), y.min(n - side))).collect();
        Self { windows, cover }
    }

    fn centered(n: usize, radius: usize) -> Self {
        let windows = (0..n).map(|j| (j.saturating_sub(radius), (j + radius + 1).min(n))).collect();
        let cover = (0..n).map(|y| (y.saturating_sub(1), (y + 1).min(n - 1))).collect();
        Self { windows, cover }
    }
}

/// Distinct per-axis shapes selected by the scales.
fn axis_families(grid: &GridSpace, scales: &[f64], family: CubeFamily) -> Result<Vec<AxisFamily>> {
    if scales.is_empty() {
        return input("need at least one scale");
    }
    if let Some(h) = scales.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return input(format!("scales must be positive halfwidths, got {h}"));
    }
    let n = grid.cells;
    let nf = n as f64;
    let mut sizes: Vec<usize> = scales
        .iter()
        .map(|h| match family {
            CubeFamily::Containing => ((2.0 * h * nf).round() as usize).clamp(1, n),
            CubeFamily::Centered => ((h * nf - FACE_SNAP).ceil() as usize).saturating_sub(1).min(n),
        })
        .collect();
    sizes.sort_unstable();
    sizes.dedup();
    Ok(sizes
        .into_iter()
        .map(|s| match family {
            CubeFamily::Containing => AxisFamily::containing(n, s),
            CubeFamily::Centered => AxisFamily::centered(n, s),
        })
        .collect())
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Prefix sums in double-double.
struct Prefix {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl Prefix {
    fn new(values: impl Iterator<Item = f64>) -> Self {
        let (mut hi, mut lo) = (vec![0.0], vec![0.0]);
        let (mut h, mut l) = (0.0, 0.0);
        for v in values {
            let (s, e) = two_sum(h, v);
            h = s;
            l += e;
            hi.push(h);
            lo.push(l);
        }
        Self { hi, lo }
    }

    fn sum(&self, a: usize, b: usize) -> f64 {
        let (d, e) = two_sum(self.hi[b], -self.hi[a]);
        d + (e + (self.lo[b] - self.lo[a]))
    }
}

/// Means of one component over every window of the family, indexed by anchor
/// (row-major over anchors in 2-D). Values are shifted by the first entry
/// before summing, as in the weighted means elsewhere.
fn window_means(grid: &GridSpace, fam: &AxisFamily, raw: &[f64]) -> Vec<f64> {
    let r = raw[0];
    let shifted: Vec<f64> = raw.iter().map(|v| v - r).collect();
    let sums = window_sums(grid, fam, &shifted);
    sums.iter().zip(window_counts(grid, fam)).map(|(s, c)| r + s / c).collect()
}

fn window_sums(grid: &GridSpace, fam: &AxisFamily, values: &[f64]) -> Vec<f64> {
    let n = grid.cells;
    if grid.d == 1 {
        let p = Prefix::new(values.iter().copied());
        return fam.windows.iter().map(|&(a, b)| p.sum(a, b)).collect();
    }
    let na = fam.windows.len();
    let mut rows = vec![0.0; n * na];
    for i in 0..n {
        let p = Prefix::new(values[i * n..(i + 1) * n].iter().copied());
        for (a, &(lo, hi)) in fam.windows.iter().enumerate() {
            rows[i * na + a] = p.sum(lo, hi);
        }
    }
    let mut out = vec![0.0; na * na];
    for a1 in 0..na {
        let p = Prefix::new((0..n).map(|i| rows[i * na + a1]));
        for (a0, &(lo, hi)) in fam.windows.iter().enumerate() {
            out[a0 * na + a1] = p.sum(lo, hi);
        }
    }
    out
}

/// Number of cells in each window, same indexing as [`window_sums`].
fn window_counts(grid: &GridSpace, fam: &AxisFamily) -> Vec<f64> {
    let sides: Vec<f64> = fam.windows.iter().map(|&(a, b)| (b - a) as f64).collect();
    if grid.d == 1 {
        return sides;
    }
    sides.iter().flat_map(|s0| sides.iter().map(move |s1| s0 * s1)).collect()
}

/// `out[y] = max values[cover[y].0 ..= cover[y].1]` with both ends of the
/// cover non-decreasing in `y`.
fn range_max(values: &[f64], cover: &[(usize, usize)]) -> Vec<f64> {
    let mut out = Vec::with_capacity(cover.len());
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for &(lo, hi) in cover {
        while next <= hi {
            while deque.back().is_some_and(|&b| values[b] <= values[next]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        while deque.front().is_some_and(|&f| f < lo) {
            deque.pop_front();
        }
        out.push(values[*deque.front().expect("cover ranges are nonempty")]);
    }
    out
}

/// Max over admitted anchors for every cell.
fn cover_max(grid: &GridSpace, fam: &AxisFamily, window_values: &[f64]) -> Vec<f64> {
    if grid.d == 1 {
        return range_max(window_values, &fam.cover);
    }
    let n = grid.cells;
    let na = fam.windows.len();
    let mut partial = vec![0.0; na * n];
    for a0 in 0..na {
        let row = range_max(&window_values[a0 * na..(a0 + 1) * na], &fam.cover);
        partial[a0 * n..(a0 + 1) * n].copy_from_slice(&row);
    }
    let mut out = vec![0.0; n * n];
    for y1 in 0..n {
        let column: Vec<f64> = (0..na).map(|a0| partial[a0 * n + y1]).collect();
        for (y0, v) in range_max(&column, &fam.cover).into_iter().enumerate() {
            out[y0 * n + y1] = v;
        }
    }
    out
}

/// Pointwise max over all shapes of a per-window score.
fn maximal_over<F>(grid: &GridSpace, fams: &[AxisFamily], score: F) -> Vec<f64>
where
    F: Fn(&AxisFamily) -> Vec<f64> + Sync,
{
    fams.par_iter().map(|fam| cover_max(grid, fam, &score(fam))).reduce(
        || vec![0.0; grid.len()],
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x = x.max(y);
            }
            a
        },
    )
}

pub fn hl_maximal(grid: &GridSpace, f: &ScalarField, scales: &[f64]) -> Result<ScalarField> {
    hl_maximal_with(grid, f, scales, CubeFamily::default())
}

/// `Mf(y) = max_Q (1/|Q|) int_Q |f|` over the cubes of `family` admitted at `y`.
pub fn hl_maximal_with(
    grid: &GridSpace,
    f: &ScalarField,
    scales: &[f64],
    family: CubeFamily,
) -> Result<ScalarField> {
    grid.check_field(f.len())?;
    let fams = axis_families(grid, scales, family)?;
    let abs: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
    let out = maximal_over(grid, &fams, |fam| window_means(grid, fam, &abs));
    Ok(ScalarField::new(out))
}

pub fn vector_maximal(
    grid: &GridSpace,
    field: &VectorField,
    x: &QuasiNormedSpace,
    scales: &[f64],
) -> Result<ScalarField> {
    vector_maximal_with(grid, field, x, scales, CubeFamily::default())
}

/// `M[X](F)(y) = max_Q ||(1/|Q|) int_Q F||_X` over the same cubes as
/// [`hl_maximal_with`].
pub fn vector_maximal_with(
    grid: &GridSpace,
    field: &VectorField,
    x: &QuasiNormedSpace,
    scales: &[f64],
    family: CubeFamily,
) -> Result<ScalarField> {
    grid.check_field(field.len())?;
    check_len(x.dim(), field.dim())?;
    let fams = axis_families(grid, scales, family)?;
    let components: Vec<Vec<f64>> =
        (0..field.dim()).map(|k| field.vectors().map(|v| v[k]).collect()).collect();
    let out = maximal_over(grid, &fams, |fam| {
        let means: Vec<Vec<f64>> = components.iter().map(|c| window_means(grid, fam, c)).collect();
        let mut avg = vec![0.0; components.len()];
        (0..means[0].len())
            .map(|a| {
                for (k, m) in means.iter().enumerate() {
                    avg[k] = m[a];
                }
                x.norm(&avg)
            })
            .collect()
    });
    Ok(ScalarField::new(out))
}

/// `||Mf||_{L_{1,inf}} / ||f||_{L_1}` on the grid measure.
pub fn weak11_constant(grid: &GridSpace, f: &ScalarField, scales: &[f64], family: CubeFamily) -> Result<f64> {
    grid.check_field(f.len())?;
    let space = grid.measure();
    let l1 = Gauge::lp(1.0).value(&space, &f.abs())?;
    if l1 == 0.0 {
        return input("weak-(1,1) ratio needs a nonzero field");
    }
    let m = hl_maximal_with(grid, f, scales, family)?;
    Ok(Gauge::weak_l1().value(&space, &m)? / l1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weak11Report {
    pub constant: f64,
    pub weak_norm: f64,
    /// `lambda((||x_j|| ||f_j||_1)_j)` of the representation.
    pub certificate: BoundResult,
}

/// Vector form: the maximal function of `J(rep)` measured in weak-`L_1`,
/// divided by the `L_1^lambda` certificate of the representation.
pub fn weak11_constant_vector(
    grid: &GridSpace,
    rep: &TensorRep,
    scales: &[f64],
    family: CubeFamily,
) -> Result<Weak11Report> {
    let space = grid.measure();
    let field = j_map(rep, &space)?;
    let certificate = rep.profile_gauge(&space)?;
    if certificate.value == 0.0 {
        return input("weak-(1,1) ratio needs a nonzero representation");
    }
    let m = vector_maximal_with(grid, &field, &rep.x_space, scales, family)?;
    let weak_norm = Gauge::weak_l1().value(&space, &m)?;
    Ok(Weak11Report { constant: weak_norm / certificate.value, weak_norm, certificate })
}
