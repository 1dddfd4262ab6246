//! Uniform grids on `[0,1]^d`, cube averages, maximal functions and the
//! differentiation check for piecewise-constant vector fields.
//!
//! Cells are indexed row-major: in two dimensions cell `i * N + j` has center
//! `((i + 1/2)/N, (j + 1/2)/N)`. Every cell has mass `N^{-d}`.

mod maximal;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, input, Error, Result};
use crate::gauges::QuasiNormedSpace;
use crate::measure::{shifted_mean, MeasureSpace, VectorField};

pub use maximal::{
    hl_maximal, hl_maximal_with, vector_maximal, vector_maximal_with, weak11_constant,
    weak11_constant_vector, CubeFamily, Weak11Report,
};

/// Cells within this many index units of a cube face count as on the face
/// and are excluded (cubes are open).
const FACE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpace {
    pub d: usize,
    pub cells: usize,
}

impl GridSpace {
    pub fn new(d: usize, cells: usize) -> Result<Self> {
        let g = Self { d, cells };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.d) {
            return input(format!("grid dimension must be 1 or 2, got {}", self.d));
        }
        if self.cells < 2 {
            return input(format!("grid needs at least 2 cells per axis, got {}", self.cells));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cells.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_mass(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn measure(&self) -> MeasureSpace {
        MeasureSpace::uniform(self.len())
    }

    /// Per-axis indices of a flat cell index.
    pub fn coords(&self, cell: usize) -> Vec<usize> {
        match self.d {
            1 => vec![cell],
            _ => vec![cell / self.cells, cell % self.cells],
        }
    }

    pub fn center(&self, cell: usize) -> Vec<f64> {
        let n = self.cells as f64;
        self.coords(cell).into_iter().map(|i| (i as f64 + 0.5) / n).collect()
    }

    /// The cell containing the point `y` (points on the right boundary go to
    /// the last cell).
    pub fn cell_of(&self, y: &[f64]) -> Result<usize> {
        check_len(self.d, y.len())?;
        let mut cell = 0;
        for &t in y {
            if !(0.0..=1.0).contains(&t) {
                return input(format!("point coordinate {t} outside [0, 1]"));
            }
            let i = ((t * self.cells as f64).floor() as usize).min(self.cells - 1);
            cell = cell * self.cells + i;
        }
        Ok(cell)
    }

    /// Halfwidths `k / (2N)` for `k = 1..=N`: with the containing family these
    /// give every window length from one cell to the whole axis.
    pub fn all_scales(&self) -> Vec<f64> {
        let n = self.cells as f64;
        (1..=self.cells).map(|k| k as f64 / (2.0 * n)).collect()
    }

    /// Halfwidths `2^{-k}` down to half a cell.
    pub fn dyadic_scales(&self) -> Vec<f64> {
        let floor = 0.5 / self.cells as f64;
        std::iter::successors(Some(0.5), |h| Some(h / 2.0)).take_while(|&h| h >= floor).collect()
    }

    fn check_field(&self, len: usize) -> Result<()> {
        self.validate()?;
        check_len(self.len(), len)
    }
}

/// Axis-aligned open cube `prod_i (c_i - h, c_i + h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeSpec {
    pub center: Vec<f64>,
    pub halfwidth: f64,
}

impl CubeSpec {
    pub fn new(center: Vec<f64>, halfwidth: f64) -> Self {
        Self { center, halfwidth }
    }

    pub fn validate(&self, grid: &GridSpace) -> Result<()> {
        check_len(grid.d, self.center.len())?;
        if !(self.halfwidth > 0.0 && self.halfwidth.is_finite()) {
            return input(format!("cube halfwidth must be > 0, got {}", self.halfwidth));
        }
        if self.center.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return input("cube center must lie in [0, 1]^d");
        }
        Ok(())
    }

    /// Cell index range `[lo, hi)` along one axis whose centers lie inside.
    fn axis_range(&self, axis: usize, cells: usize) -> (usize, usize) {
        let n = cells as f64;
        let c = self.center[axis] * n - 0.5;
        let r = self.halfwidth * n - FACE_SNAP;
        let lo = (c - r).ceil().max(0.0);
        let hi = ((c + r).floor() + 1.0).min(n);
        if hi <= lo {
            (0, 0)
        } else {
            (lo as usize, hi as usize)
        }
    }

    /// Flat indices of the cells whose centers lie in the cube.
    pub fn cells(&self, grid: &GridSpace) -> Vec<usize> {
        let (a0, a1) = self.axis_range(0, grid.cells);
        if grid.d == 1 {
            return (a0..a1).collect();
        }
        let (b0, b1) = self.axis_range(1, grid.cells);
        (a0..a1).flat_map(|i| (b0..b1).map(move |j| i * grid.cells + j)).collect()
    }
}

/// Mean of `F` over the cells of `Q`, together with their total mass `|Q|`.
pub fn cube_average_with_mass(
    grid: &GridSpace,
    field: &VectorField,
    q: &CubeSpec,
) -> Result<(Vec<f64>, f64)> {
    grid.check_field(field.len())?;
    q.validate(grid)?;
    let cells = q.cells(grid);
    if cells.is_empty() {
        return Err(Error::DegenerateCube(format!(
            "cube at {:?} with halfwidth {} contains no cell center",
            q.center, q.halfwidth
        )));
    }
    let w = grid.cell_mass();
    let avg =
        (0..field.dim()).map(|k| shifted_mean(cells.iter().map(|&c| (w, field.vector(c)[k]))).0).collect();
    Ok((avg, w * cells.len() as f64))
}

pub fn cube_average(grid: &GridSpace, field: &VectorField, q: &CubeSpec) -> Result<Vec<f64>> {
    Ok(cube_average_with_mass(grid, field, q)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferentiationRow {
    pub halfwidth: f64,
    pub max_error: f64,
}

/// For each halfwidth `h`, `max_y ||avg_{Q(y,h)} F - F(y)||_X` over the sample
/// points.
pub fn differentiation_report(
    grid: &GridSpace,
    field: &VectorField,
    x: &QuasiNormedSpace,
    samples: &[Vec<f64>],
    schedule: &[f64],
) -> Result<Vec<DifferentiationRow>> {
    grid.check_field(field.len())?;
    check_len(x.dim(), field.dim())?;
    let cells: Vec<usize> = samples.iter().map(|y| grid.cell_of(y)).collect::<Result<_>>()?;
    schedule
        .iter()
        .map(|&h| {
            let mut max_error: f64 = 0.0;
            for (y, &cell) in samples.iter().zip(&cells) {
                let avg = cube_average(grid, field, &CubeSpec::new(y.clone(), h))?;
                let diff: Vec<f64> = avg.iter().zip(field.vector(cell)).map(|(a, b)| a - b).collect();
                max_error = max_error.max(x.norm(&diff));
            }
            Ok(DifferentiationRow { halfwidth: h, max_error })
        })
        .collect()
}

impl DifferentiationRow {
    pub const CSV_HEADER: [&'static str; 2] = ["scale", "error"];
}
