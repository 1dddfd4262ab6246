//! Finite tensors `sum_j x_j (x) f_j` in `X (x)_lambda L_1(mu)`.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{BoundResult, Witness};
use crate::error::{check_len, Error, Result};
use crate::gauges::{Gauge, QuasiNormedSpace};
use crate::measure::{MeasureSpace, VectorField};
use crate::sampling::{self, par_argmin};

const PASSES_PER_RESTART: usize = 20;
const COLINEAR_TOL: f64 = 1e-12;
/// Allowed drift of `J`, relative to its largest entry.
const J_DRIFT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorRep {
    pub lambda: Gauge,
    #[serde(rename = "X")]
    pub x_space: QuasiNormedSpace,
    pub terms: Vec<Term>,
}

impl TensorRep {
    pub fn new(lambda: Gauge, x_space: QuasiNormedSpace, terms: Vec<Term>) -> Result<Self> {
        let rep = Self { lambda, x_space, terms };
        rep.validate()?;
        Ok(rep)
    }

    pub fn validate(&self) -> Result<()> {
        self.lambda.validate()?;
        let atoms = self.terms.first().map(|t| t.f.len());
        for t in &self.terms {
            check_len(self.x_space.dim(), t.x.len())?;
            check_len(atoms.unwrap_or(0), t.f.len())?;
            if t.x.iter().chain(&t.f).any(|v| !v.is_finite()) {
                return Err(Error::Input("tensor terms must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.x_space.dim()
    }

    fn check_space(&self, space: &MeasureSpace) -> Result<()> {
        self.validate()?;
        for t in &self.terms {
            check_len(space.len(), t.f.len())?;
        }
        Ok(())
    }

    /// Same `lambda` and `X`, other terms.
    pub fn with_terms(&self, terms: Vec<Term>) -> Self {
        Self { lambda: self.lambda.clone(), x_space: self.x_space.clone(), terms }
    }

    /// The concatenated representation of `self + other`.
    pub fn concat(&self, other: &TensorRep) -> Self {
        self.with_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    /// `lambda((||x_j||_X ||f_j||_{L_1(mu)})_j)`, the cost of this representation.
    pub fn profile_gauge(&self, space: &MeasureSpace) -> Result<BoundResult> {
        self.check_space(space)?;
        let profile = profile(&self.x_space, space.weights(), &self.terms);
        self.lambda.eval_sequence(&profile)
    }
}

fn l1(w: &[f64], f: &[f64]) -> f64 {
    w.iter().zip(f).map(|(w, v)| w * v.abs()).sum()
}

fn profile(x: &QuasiNormedSpace, w: &[f64], terms: &[Term]) -> Vec<f64> {
    terms.iter().map(|t| x.norm(&t.x) * l1(w, &t.f)).collect()
}

/// `omega -> sum_j f_j(omega) x_j`.
pub fn j_map(rep: &TensorRep, space: &MeasureSpace) -> Result<VectorField> {
    rep.check_space(space)?;
    Ok(j_raw(rep.dim(), space.len(), &rep.terms))
}

fn j_raw(d: usize, n: usize, terms: &[Term]) -> VectorField {
    let mut out = VectorField::zeros(n, d);
    for t in terms {
        for (a, &fv) in t.f.iter().enumerate() {
            if fv != 0.0 {
                for (o, xv) in out.vector_mut(a).iter_mut().zip(&t.x) {
                    *o += fv * xv;
                }
            }
        }
    }
    out
}

/// `sum_omega mu_omega J(omega)`, the integral routed through the atoms.
pub fn i_map(rep: &TensorRep, space: &MeasureSpace) -> Result<Vec<f64>> {
    let j = j_map(rep, space)?;
    let mut out = vec![0.0; rep.dim()];
    for (w, v) in space.weights().iter().zip(j.vectors()) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    Ok(out)
}

/// `sum_j (int f_j dmu) x_j`.
pub fn i_map_term_by_term(rep: &TensorRep, space: &MeasureSpace) -> Result<Vec<f64>> {
    rep.check_space(space)?;
    let mut out = vec![0.0; rep.dim()];
    for t in &rep.terms {
        let m = space.integrate(&t.f);
        for (o, x) in out.iter_mut().zip(&t.x) {
            *o += m * x;
        }
    }
    Ok(out)
}

/// Upper bound on the tensor quasi-norm of `J(rep)`'s preimage class,
/// `inf lambda((||x_j|| ||f_j||_1)_j)` over representations with the same `J`.
/// The witness is the best representation found; every candidate is built by
/// moves that leave `J` unchanged, and the input itself is a candidate.
///
/// `budget` counts search passes summed over the random restarts that follow
/// the structured starts (input, atomic, coordinate and SVD representations).
pub fn tensor_norm_estimate(
    rep: &TensorRep,
    space: &MeasureSpace,
    budget: usize,
    seed: u64,
) -> Result<BoundResult> {
    rep.check_space(space)?;
    let max_terms = rep.terms.len().max(space.len() + rep.dim());
    let j = j_raw(rep.dim(), space.len(), &rep.terms);
    let j_scale = j.as_flat().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let search = Search { rep, w: space.weights(), max_terms, j: &j, j_tol: J_DRIFT_TOL * j_scale };
    let mut seeds = vec![prune(rep.terms.clone()), atomic_rep(&j), row_rep(&j)];
    if let Some(svd) = svd_rep(&j) {
        seeds.push(svd);
    }
    let structured = seeds.len();
    let restarts = structured + budget / PASSES_PER_RESTART;
    let best = par_argmin(restarts, |r| {
        let mut rng = sampling::trial_rng(seed, r);
        let mut terms = seeds[r % structured].clone();
        if r >= structured {
            scramble(&mut terms, &mut rng);
        }
        search.descend(&mut terms);
        Some((search.cost(&terms), terms))
    });
    let (_, value, terms) = best.expect("at least one start");
    let input_cost = search.cost(&rep.terms);
    let (value, terms) = if value <= input_cost { (value, terms) } else { (input_cost, rep.terms.clone()) };
    let witness = Witness::Tensor { terms: terms.into_iter().map(|t| (t.x, t.f)).collect() };
    Ok(BoundResult::upper(value).with_witness(witness))
}

/// The representation carried by a [`Witness::Tensor`].
pub fn witness_terms(w: &Witness) -> Option<Vec<Term>> {
    match w {
        Witness::Tensor { terms } => {
            Some(terms.iter().map(|(x, f)| Term { x: x.clone(), f: f.clone() }).collect())
        }
        _ => None,
    }
}

fn prune(terms: Vec<Term>) -> Vec<Term> {
    let kept: Vec<Term> = terms
        .into_iter()
        .filter(|t| t.x.iter().any(|&v| v != 0.0) && t.f.iter().any(|&v| v != 0.0))
        .collect();
    kept
}

/// One term per atom: `J(omega) (x) chi_omega`.
fn atomic_rep(j: &VectorField) -> Vec<Term> {
    let n = j.len();
    prune(
        (0..n)
            .map(|a| {
                let mut f = vec![0.0; n];
                f[a] = 1.0;
                Term { x: j.vector(a).to_vec(), f }
            })
            .collect(),
    )
}

/// One term per coordinate of `X`: `e_i (x) J_i`.
fn row_rep(j: &VectorField) -> Vec<Term> {
    let d = j.dim();
    prune(
        (0..d)
            .map(|i| {
                let mut x = vec![0.0; d];
                x[i] = 1.0;
                Term { x, f: j.vectors().map(|v| v[i]).collect() }
            })
            .collect(),
    )
}

/// Singular value decomposition of the `atoms x d` matrix of `J`.
fn svd_rep(j: &VectorField) -> Option<Vec<Term>> {
    let (n, d) = (j.len(), j.dim());
    if n == 0 || d == 0 {
        return None;
    }
    let m = DMatrix::from_row_slice(n, d, j.as_flat());
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u?, svd.v_t?);
    let terms = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.0)
        .map(|(k, s)| Term {
            x: vt.row(k).iter().copied().collect(),
            f: u.column(k).iter().map(|v| v * s).collect(),
        })
        .collect();
    Some(prune(terms))
}

/// Random shears; each keeps `J` fixed.
fn scramble(terms: &mut [Term], rng: &mut sampling::ProbeRng) {
    let t = terms.len();
    if t < 2 {
        return;
    }
    for _ in 0..rng.gen_range(1..=2 * t) {
        let i = rng.gen_range(0..t);
        let j = (i + rng.gen_range(1..t)) % t;
        let s: f64 = rng.gen_range(-1.0..1.0);
        shear(terms, i, j, s);
    }
}

/// `x_i += s x_j`, `f_j -= s f_i`.
fn shear(terms: &mut [Term], i: usize, j: usize, s: f64) {
    let xj = terms[j].x.clone();
    for (a, b) in terms[i].x.iter_mut().zip(&xj) {
        *a += s * b;
    }
    let fi = terms[i].f.clone();
    for (a, b) in terms[j].f.iter_mut().zip(&fi) {
        *a -= s * b;
    }
}

/// `u = c v` for some scalar `c`, returned when it exists.
fn colinear(u: &[f64], v: &[f64]) -> Option<f64> {
    let k = v.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?.0;
    if v[k] == 0.0 {
        return None;
    }
    let c = u[k] / v[k];
    let scale = u.iter().chain(v).fold(0.0f64, |m, x| m.max(x.abs()));
    u.iter().zip(v).all(|(a, b)| (a - c * b).abs() <= COLINEAR_TOL * scale).then_some(c)
}

struct Search<'a> {
    rep: &'a TensorRep,
    w: &'a [f64],
    max_terms: usize,
    /// `J` of the input; accepted moves must reproduce it to `j_tol`.
    j: &'a VectorField,
    j_tol: f64,
}

impl Search<'_> {
    fn cost(&self, terms: &[Term]) -> f64 {
        let p = profile(&self.rep.x_space, self.w, terms);
        self.rep.lambda.value_raw(&vec![1.0; p.len()], &p)
    }

    fn descend(&self, terms: &mut Vec<Term>) {
        let mut cost = self.cost(terms);
        for _ in 0..PASSES_PER_RESTART {
            let before = cost;
            cost = self.merge_pass(terms, cost);
            cost = self.split_pass(terms, cost);
            cost = self.shear_pass(terms, cost);
            if cost >= before * (1.0 - 1e-14) {
                break;
            }
        }
    }

    /// Moves keep `J` in exact arithmetic; large shears can lose it to
    /// rounding, so each accepted candidate is checked.
    fn keeps_j(&self, terms: &[Term]) -> bool {
        let j = j_raw(self.j.dim(), self.j.len(), terms);
        j.as_flat().iter().zip(self.j.as_flat()).all(|(a, b)| (a - b).abs() <= self.j_tol)
    }

    fn try_replace(&self, terms: &mut Vec<Term>, cand: Vec<Term>, cost: f64) -> f64 {
        let c = self.cost(&cand);
        if c < cost * (1.0 - 1e-15) && self.keeps_j(&cand) {
            *terms = cand;
            c
        } else {
            cost
        }
    }

    /// Merge terms whose `x` or whose `f` are colinear.
    fn merge_pass(&self, terms: &mut Vec<Term>, mut cost: f64) -> f64 {
        let mut i = 0;
        while i < terms.len() {
            let mut j = i + 1;
            while j < terms.len() {
                let merged = if let Some(c) = colinear(&terms[j].x, &terms[i].x) {
                    let f = terms[i].f.iter().zip(&terms[j].f).map(|(a, b)| a + c * b).collect();
                    Some(Term { x: terms[i].x.clone(), f })
                } else if let Some(c) = colinear(&terms[j].f, &terms[i].f) {
                    let x = terms[i].x.iter().zip(&terms[j].x).map(|(a, b)| a + c * b).collect();
                    Some(Term { x, f: terms[i].f.clone() })
                } else {
                    None
                };
                if let Some(m) = merged {
                    let mut cand = terms.clone();
                    cand[i] = m;
                    cand.remove(j);
                    let cand = prune(cand);
                    let new = self.try_replace(terms, cand, cost);
                    if new < cost {
                        cost = new;
                        continue;
                    }
                }
                j += 1;
            }
            i += 1;
        }
        cost
    }

    /// Split a term along the atoms of its support.
    fn split_pass(&self, terms: &mut Vec<Term>, mut cost: f64) -> f64 {
        for i in 0..terms.len() {
            if i >= terms.len() {
                break;
            }
            let support: Vec<usize> = (0..terms[i].f.len()).filter(|&a| terms[i].f[a] != 0.0).collect();
            if support.len() < 2 || terms.len() + support.len() - 1 > self.max_terms {
                continue;
            }
            let mut cand = terms.clone();
            let t = cand.remove(i);
            for &a in &support {
                let mut f = vec![0.0; t.f.len()];
                f[a] = t.f[a];
                cand.push(Term { x: t.x.clone(), f });
            }
            cost = self.try_replace(terms, cand, cost);
        }
        cost
    }

    /// Line search over shears between every ordered pair of terms.
    fn shear_pass(&self, terms: &mut Vec<Term>, mut cost: f64) -> f64 {
        let t = terms.len();
        for i in 0..t {
            for j in 0..t {
                if i == j || i >= terms.len() || j >= terms.len() {
                    continue;
                }
                let mut cands: Vec<f64> = Vec::new();
                // breakpoints where a coordinate of x_i or an entry of f_j vanishes
                for (a, b) in terms[i].x.iter().zip(&terms[j].x) {
                    if *b != 0.0 {
                        cands.push(-a / b);
                    }
                }
                for (a, b) in terms[j].f.iter().zip(&terms[i].f) {
                    if *b != 0.0 {
                        cands.push(a / b);
                    }
                }
                let base = l1(self.w, &terms[j].f) / l1(self.w, &terms[i].f).max(1e-300);
                for k in [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0] {
                    cands.push(k * base);
                }
                let eval = |s: f64| {
                    let mut c = terms.clone();
                    shear(&mut c, i, j, s);
                    self.cost(&c)
                };
                let mut best = (cost, 0.0);
                for s in cands {
                    if s.is_finite() {
                        let v = eval(s);
                        if v < best.0 {
                            best = (v, s);
                        }
                    }
                }
                // golden refinement around the best candidate
                let width = best.1.abs().max(base).max(1e-12) * 0.1;
                let (mut lo, mut hi) = (best.1 - width, best.1 + width);
                let r = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..30 {
                    let m1 = hi - r * (hi - lo);
                    let m2 = lo + r * (hi - lo);
                    let (v1, v2) = (eval(m1), eval(m2));
                    if v1 < best.0 {
                        best = (v1, m1);
                    }
                    if v2 < best.0 {
                        best = (v2, m2);
                    }
                    if v1 < v2 {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                if best.0 < cost * (1.0 - 1e-15) {
                    let mut cand = terms.clone();
                    shear(&mut cand, i, j, best.1);
                    let cand = prune(cand);
                    if self.keeps_j(&cand) {
                        *terms = cand;
                        cost = self.cost(terms);
                    }
                }
            }
        }
        cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1_target(d: usize) -> QuasiNormedSpace {
        QuasiNormedSpace::lq(d, 1.0).unwrap()
    }

    fn rep(lambda: Gauge, x: QuasiNormedSpace, terms: &[(&[f64], &[f64])]) -> TensorRep {
        let terms = terms.iter().map(|(x, f)| Term { x: x.to_vec(), f: f.to_vec() }).collect();
        TensorRep::new(lambda, x, terms).unwrap()
    }

    #[test]
    fn j_map_examples() {
        let s = MeasureSpace::counting(2);
        let r = rep(Gauge::lp(1.0), l1_target(2), &[(&[1.0, 0.0], &[1.0, 2.0])]);
        let j = j_map(&r, &s).unwrap();
        assert_eq!(j.vectors().collect::<Vec<_>>(), vec![&[1.0, 0.0][..], &[2.0, 0.0][..]]);

        let r = rep(Gauge::lp(1.0), l1_target(2), &[(&[1.0, 2.0], &[1.0, 0.0])]);
        let j = j_map(&r, &s).unwrap();
        assert_eq!(j.vector(0), &[1.0, 2.0]);
        assert_eq!(j.vector(1), &[0.0, 0.0]);

        let r =
            rep(Gauge::lp(1.0), l1_target(2), &[(&[1.0, 3.0], &[0.5, 2.0]), (&[-1.0, -3.0], &[0.5, 2.0])]);
        assert!(j_map(&r, &s).unwrap().as_flat().iter().all(|&v| v == 0.0));
        assert_eq!(i_map(&r, &s).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn i_map_examples() {
        let s = MeasureSpace::new(vec![1.0, 2.0]).unwrap();
        let r = rep(Gauge::lp(1.0), l1_target(2), &[(&[0.0, 1.0], &[3.0, 1.0])]);
        assert_eq!(i_map(&r, &s).unwrap(), vec![0.0, 5.0]);
        assert_eq!(i_map_term_by_term(&r, &s).unwrap(), vec![0.0, 5.0]);
        let s = MeasureSpace::new(vec![0.25, 0.5, 2.0]).unwrap();
        let r = rep(Gauge::lp(1.0), l1_target(2), &[(&[2.0, -1.0], &[1.0, 0.0, 1.0])]);
        assert_eq!(i_map(&r, &s).unwrap(), vec![2.0 * 2.25, -2.25]);
    }

    #[test]
    fn dimension_errors() {
        let s = MeasureSpace::counting(3);
        let r = rep(Gauge::lp(1.0), l1_target(2), &[(&[1.0, 0.0], &[1.0, 2.0])]);
        assert!(matches!(j_map(&r, &s), Err(Error::Dimension { .. })));
        let bad = TensorRep::new(Gauge::lp(1.0), l1_target(2), vec![Term { x: vec![1.0], f: vec![1.0] }]);
        assert!(bad.is_err());
    }

    #[test]
    fn rank_one_l1_estimate_is_product_of_norms() {
        let s = MeasureSpace::new(vec![0.5, 1.5, 1.0]).unwrap();
        let x = QuasiNormedSpace::lq(3, 2.0).unwrap();
        let r = rep(Gauge::lp(1.0), x, &[(&[3.0, 0.0, 4.0], &[1.0, -2.0, 0.5])]);
        let est = tensor_norm_estimate(&r, &s, 8, 1).unwrap();
        let expected = 5.0 * (0.5 + 3.0 + 0.5);
        assert!((est.value - expected).abs() < 1e-12 * expected, "{}", est.value);
    }

    #[test]
    fn scalar_target_never_improves_on_the_merged_term() {
        let s = MeasureSpace::new(vec![1.0, 2.0]).unwrap();
        let x = QuasiNormedSpace::lq(1, 1.0).unwrap();
        for p in [0.25, 0.5, 1.0] {
            let r = rep(Gauge::lp(p), x.clone(), &[(&[-2.0], &[1.0, 3.0])]);
            let est = tensor_norm_estimate(&r, &s, 8, 1).unwrap();
            assert!((est.value - 14.0).abs() < 1e-12, "p={p}: {}", est.value);
        }
    }

    #[test]
    fn estimate_never_exceeds_input_cost() {
        let s = MeasureSpace::counting(2);
        let x = QuasiNormedSpace::lq(2, 1.0).unwrap();
        let r = rep(Gauge::lp(0.5), x, &[(&[0.6, 0.4], &[0.5, 0.5])]);
        let est = tensor_norm_estimate(&r, &s, 8, 1).unwrap();
        assert!(est.value <= 1.0 + 1e-15);
    }

    #[test]
    fn witness_has_the_same_j() {
        let s = MeasureSpace::new(vec![0.3, 1.0, 0.7]).unwrap();
        let x = QuasiNormedSpace::lq(2, 0.5).unwrap();
        let r = rep(
            Gauge::weak_l1(),
            x,
            &[
                (&[1.0, 2.0], &[0.5, -1.0, 0.0]),
                (&[0.0, 1.0], &[1.0, 1.0, 1.0]),
                (&[1.0, 1.0], &[0.0, 0.0, 2.0]),
            ],
        );
        let est = tensor_norm_estimate(&r, &s, 16, 2).unwrap();
        let terms = witness_terms(est.witness.as_ref().unwrap()).unwrap();
        let w = r.with_terms(terms);
        let (a, b) = (j_map(&r, &s).unwrap(), j_map(&w, &s).unwrap());
        for (u, v) in a.as_flat().iter().zip(b.as_flat()) {
            assert!((u - v).abs() < 1e-9);
        }
        assert!((w.profile_gauge(&s).unwrap().value - est.value).abs() < 1e-12 * est.value);
    }

    #[test]
    fn json_shape() {
        let text = r#"{"lambda":{"kind":"lp","p":1.0},"X":{"dim":2,"norm":{"kind":"lq","q":0.5}},"terms":[{"x":[1.0,0.0],"f":[1.0,2.0]}]}"#;
        let r: TensorRep = serde_json::from_str(text).unwrap();
        assert_eq!(r.terms.len(), 1);
        assert_eq!(serde_json::to_string(&r).unwrap(), text);
    }

    #[test]
    fn scrambled_starts_never_undercut_the_l1_norm() {
        // the triangle inequality bounds every representation's L_1 cost
        // below by sum_omega mu_omega ||J(omega)||
        let space = MeasureSpace::new(vec![0.6103754971236622, 0.16680811386979522]).unwrap();
        let x = QuasiNormedSpace::lq(3, 1.5).unwrap();
        let r = rep(
            Gauge::lp(1.0),
            x.clone(),
            &[
                (&[-1.58, 1.14, 1.72], &[0.0, -1.5]),
                (&[-0.88, 1.55, 0.21], &[1.84, 1.24]),
                (&[1.94, 1.19, 0.98], &[1.4, -1.75]),
                (&[0.09, -1.79, 0.78], &[-0.33, -0.8]),
            ],
        );
        let j = j_map(&r, &space).unwrap();
        let exact: f64 = j.vectors().zip(space.weights()).map(|(v, w)| w * x.norm(v)).sum();
        for seed in 0..8 {
            let est = tensor_norm_estimate(&r, &space, 200, seed).unwrap();
            assert!(est.value >= exact - 1e-9, "{} < {exact}", est.value);
            let w = r.with_terms(witness_terms(est.witness.as_ref().unwrap()).unwrap());
            let jw = j_map(&w, &space).unwrap();
            for (a, b) in jw.as_flat().iter().zip(j.as_flat()) {
                assert!((a - b).abs() < 1e-11);
            }
        }
    }
}
