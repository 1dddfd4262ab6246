//! The `lambda`-integral at finite scale, and the counterexample showing the
//! Riemann-sum integral cannot be continuous on a non-locally-convex target.

use serde::{Deserialize, Serialize};

use crate::bound::BoundResult;
use crate::error::{check_len, Error, Result};
use crate::galb_tensor::{i_map, i_map_term_by_term, j_map, TensorRep, Term};
use crate::gauges::{Gauge, QuasiNormedSpace};
use crate::measure::{MeasureSpace, ScalarField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub atoms: Vec<usize>,
    pub x: Vec<f64>,
}

/// `sum_k x_k chi_{E_k}` with disjoint `E_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleFunction {
    pub pieces: Vec<Piece>,
}

impl SimpleFunction {
    pub fn validate(&self, space: &MeasureSpace, x: &QuasiNormedSpace) -> Result<()> {
        let mut seen = vec![false; space.len()];
        for piece in &self.pieces {
            check_len(x.dim(), piece.x.len())?;
            for &a in &piece.atoms {
                if a >= space.len() {
                    return Err(Error::Input(format!("atom {a} out of range")));
                }
                if std::mem::replace(&mut seen[a], true) {
                    return Err(Error::Input(format!("pieces overlap at atom {a}")));
                }
            }
        }
        Ok(())
    }

    /// The same function as a tensor `sum_k x_k (x) chi_{E_k}`.
    pub fn to_tensor(&self, lambda: Gauge, x: QuasiNormedSpace, atoms: usize) -> Result<TensorRep> {
        let terms = self
            .pieces
            .iter()
            .map(|p| Term { x: p.x.clone(), f: ScalarField::indicator(atoms, &p.atoms).values })
            .collect();
        TensorRep::new(lambda, x, terms)
    }

    /// Disjoint union of the pieces of two simple functions.
    pub fn union(&self, other: &SimpleFunction) -> SimpleFunction {
        SimpleFunction { pieces: self.pieces.iter().chain(&other.pieces).cloned().collect() }
    }
}

/// `sum_k mu(E_k) x_k`.
pub fn integrate_simple(s: &SimpleFunction, space: &MeasureSpace, x: &QuasiNormedSpace) -> Result<Vec<f64>> {
    s.validate(space, x)?;
    let mut out = vec![0.0; x.dim()];
    for piece in &s.pieces {
        let m = space.mass_of(&piece.atoms);
        for (o, v) in out.iter_mut().zip(&piece.x) {
            *o += m * v;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesIntegral {
    pub value: Vec<f64>,
    /// `lambda((||x_j|| ||f_j||_1)_j)`: certifies membership of the
    /// representation in `X (x)_lambda L_1(mu)`. Depends on the representation.
    pub certificate: BoundResult,
    /// Set when the certificate exceeds the configured cap.
    pub exceeds_cap: bool,
}

/// Integral of a (truncated) series representation, with its certificate.
pub fn integrate_series(rep: &TensorRep, space: &MeasureSpace, cap: f64) -> Result<SeriesIntegral> {
    let value = i_map(rep, space)?;
    let certificate = rep.profile_gauge(space)?;
    let exceeds_cap = certificate.value > cap;
    Ok(SeriesIntegral { value, certificate, exceeds_cap })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub passed: bool,
    /// `max_omega ||J(rep1)(omega) - J(rep2)(omega)||_X`.
    pub j_discrepancy: f64,
    /// `||I(rep1) - I(rep2)||_X`.
    pub i_discrepancy: f64,
    /// `|I through atoms - I term by term|`, maximum over both representations
    /// and all coordinates.
    pub route_discrepancy: f64,
}

/// When two representations have the same `J` up to `tol`, their integrals
/// must agree up to `tol * mu(Omega)`.
pub fn representation_independence_check(
    rep1: &TensorRep,
    rep2: &TensorRep,
    space: &MeasureSpace,
    tol: f64,
) -> Result<IndependenceReport> {
    if rep1.dim() != rep2.dim() || rep1.lambda != rep2.lambda {
        return Err(Error::Input("representations live in different tensor products".into()));
    }
    let x = &rep1.x_space;
    let (j1, j2) = (j_map(rep1, space)?, j_map(rep2, space)?);
    let j_discrepancy = j1
        .vectors()
        .zip(j2.vectors())
        .map(|(a, b)| x.norm(&a.iter().zip(b).map(|(u, v)| u - v).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let (i1, i2) = (i_map(rep1, space)?, i_map(rep2, space)?);
    let diff: Vec<f64> = i1.iter().zip(&i2).map(|(a, b)| a - b).collect();
    let i_discrepancy = x.norm(&diff);
    let mut route_discrepancy: f64 = 0.0;
    for (rep, via_atoms) in [(rep1, &i1), (rep2, &i2)] {
        let direct = i_map_term_by_term(rep, space)?;
        for (a, b) in via_atoms.iter().zip(&direct) {
            route_discrepancy = route_discrepancy.max((a - b).abs());
        }
    }
    let passed = j_discrepancy > tol || i_discrepancy <= tol * space.total_mass();
    Ok(IndependenceReport { passed, j_discrepancy, i_discrepancy, route_discrepancy })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub p: f64,
    pub n: usize,
    /// `max_m ||x_{m,n}||_p` with `x_{m,n} = n chi_{A_m}`.
    pub sup_part_norm: f64,
    /// `||sum_m mu(A_m) x_{m,n}||_p`.
    pub riemann_sum_norm: f64,
    pub blowup_ratio: f64,
}

impl CounterexampleReport {
    pub const CSV_HEADER: [&'static str; 5] = ["p", "n", "sup_part_norm", "riemann_sum_norm", "ratio"];
}

/// `n` atoms of mass `1/n` in `L_p`: every part `n chi_{A_m}` has norm
/// `n^{1-1/p}`, while their Riemann sum is `chi_Omega` of norm 1. All three
/// numbers come from [`Gauge::eval`] and are then compared with the closed
/// forms to 1e-12.
pub fn rolewicz_counterexample(p: f64, n: usize) -> Result<CounterexampleReport> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Input(format!("construction needs p in (0, 1], got {p}")));
    }
    if n == 0 {
        return Err(Error::Input("need at least one atom".into()));
    }
    let space = MeasureSpace::uniform(n);
    let g = Gauge::lp(p);
    let mut sup_part_norm: f64 = 0.0;
    let mut riemann = vec![0.0; n];
    for m in 0..n {
        let part = ScalarField::indicator(n, &[m]).scaled(n as f64);
        sup_part_norm = sup_part_norm.max(g.value(&space, &part)?);
        for (r, v) in riemann.iter_mut().zip(&part.values) {
            *r += space.weight(m) * v;
        }
    }
    let riemann_sum_norm = g.value(&space, &ScalarField::new(riemann))?;
    let blowup_ratio = riemann_sum_norm / sup_part_norm;
    let nf = n as f64;
    for (got, want) in [
        (sup_part_norm, nf.powf(1.0 - 1.0 / p)),
        (riemann_sum_norm, 1.0),
        (blowup_ratio, nf.powf(1.0 / p - 1.0)),
    ] {
        if (got - want).abs() > 1e-12 * want {
            return Err(Error::Input(format!("closed form mismatch: {got} vs {want}")));
        }
    }
    Ok(CounterexampleReport { p, n, sup_part_norm, riemann_sum_norm, blowup_ratio })
}
