//! Named check suites. Each runs a seeded batch of probes and records one
//! [`Check`] per assertion; the first failing check contributes its witness.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::convexity::{lattice_constant_probe, leveling_constant_probe, mii_sweep, LatticeMode};
use crate::error::{input, Error, Result};
use crate::ftc::{
    differentiation_report, hl_maximal, vector_maximal, weak11_constant, CubeFamily, GridSpace,
};
use crate::galb_tensor::{
    galb_gauge_estimate_with, j_map, tensor_norm_estimate, GalbConfig, TensorRep, Term,
};
use crate::gauges::{Gauge, OrliczFunction, QuasiNormedSpace};
use crate::integration::{representation_independence_check, rolewicz_counterexample, CounterexampleReport};
use crate::measure::{MeasureSpace, ScalarField, VectorField};
use crate::report::{Check, RunConfig, SuiteReport, Table};
use crate::sampling::{self, ProbeRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    OrliczConcavity,
    Mii,
    Galb,
    Leveling,
    TensorOracle,
    Amenability,
    Ftc,
    Counterexample,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::OrliczConcavity,
        Suite::Mii,
        Suite::Galb,
        Suite::Leveling,
        Suite::TensorOracle,
        Suite::Amenability,
        Suite::Ftc,
        Suite::Counterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OrliczConcavity => "orlicz-concavity",
            Suite::Mii => "mii",
            Suite::Galb => "galb",
            Suite::Leveling => "leveling",
            Suite::TensorOracle => "tensor-oracle",
            Suite::Amenability => "amenability",
            Suite::Ftc => "ftc",
            Suite::Counterexample => "counterexample",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown suite {s:?}")))
    }
}

/// Suite-specific knobs; unset fields take the documented defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    /// Outer gauge for `mii` (default `L_2`).
    pub a: Option<Gauge>,
    /// Inner gauge for `mii` (default `L_1`).
    pub b: Option<Gauge>,
    /// Exponent for `counterexample` (default 1/2).
    pub p: Option<f64>,
    /// Largest `n` for `counterexample` (default 1024).
    pub max_n: Option<usize>,
}

pub fn run_suite(suite: Suite, config: &RunConfig, params: &SuiteParams) -> Result<SuiteReport> {
    config.validate()?;
    let mut report = SuiteReport::new(suite.name(), *config);
    match suite {
        Suite::OrliczConcavity => orlicz_concavity(&mut report, config)?,
        Suite::Mii => mii(&mut report, config, params)?,
        Suite::Galb => galb(&mut report, config)?,
        Suite::Leveling => leveling(&mut report, config)?,
        Suite::TensorOracle => tensor_oracle(&mut report, config)?,
        Suite::Amenability => amenability(&mut report, config)?,
        Suite::Ftc => ftc(&mut report, config)?,
        Suite::Counterexample => counterexample(&mut report, params)?,
    }
    Ok(report)
}

fn orlicz_concavity(report: &mut SuiteReport, cfg: &RunConfig) -> Result<()> {
    let spaces = [
        MeasureSpace::counting(2),
        MeasureSpace::counting(7),
        MeasureSpace::new(vec![0.1, 2.0, 0.5, 1.3, 0.05, 3.0]).unwrap(),
    ];
    for (name, g) in [
        ("loglog", Gauge::loglog()),
        ("rational", Gauge::rational()),
        ("power(1/2)", Gauge::orlicz(OrliczFunction::power(0.5)?)),
    ] {
        for (k, space) in spaces.iter().enumerate() {
            let seed = sampling::subseed(cfg.seed, k as u64);
            let r = lattice_constant_probe(&g, LatticeMode::Concave, 1.0, space, cfg.trials, seed)?;
            let check = Check::at_most(format!("{name} n={}", space.len()), r.value, 1.0 + cfg.tol);
            report.push_with_witness(check, &r.witness)?;
        }
    }
    Ok(())
}

fn mii(report: &mut SuiteReport, cfg: &RunConfig, params: &SuiteParams) -> Result<()> {
    let a = params.a.clone().unwrap_or(Gauge::lp(2.0));
    let b = params.b.clone().unwrap_or(Gauge::lp(1.0));
    let r = mii_sweep(&a, &b, &[2, 4, 8, 16, 32], cfg.trials, cfg.seed)?;
    report.push_with_witness(Check::at_most("max ratio", r.value, 1.0 + cfg.tol), &r.witness)
}

/// Random nonnegative coefficients supported on at most `d` entries.
fn coefficients(rng: &mut ProbeRng, d: usize) -> Vec<f64> {
    let n = rng.gen_range(1..=d);
    let shape = sampling::FieldShape::ALL[rng.gen_range(0..sampling::FieldShape::ALL.len())];
    sampling::random_field(rng, n, shape).into_iter().map(f64::abs).collect()
}

fn galb(report: &mut SuiteReport, cfg: &RunConfig) -> Result<()> {
    let d = 6;
    let targets = [("l1", QuasiNormedSpace::lq(d, 1.0)?, 1.0), ("l1/2", QuasiNormedSpace::lq(d, 0.5)?, 0.5)];
    for (name, x, q) in targets {
        let mut worst: f64 = 0.0;
        let mut witness = None;
        for t in 0..20 {
            let mut rng = sampling::trial_rng(cfg.seed, t);
            let a = coefficients(&mut rng, d);
            let exact = a.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q);
            let config = GalbConfig {
                closed_forms: false,
                ..GalbConfig::new(cfg.budget, sampling::subseed(cfg.seed, t as u64))
            };
            let est = galb_gauge_estimate_with(&x, &a, &config)?;
            let err = (est.value - exact).abs() / exact.max(1.0);
            if err > worst {
                worst = err;
                witness = Some((a, est));
            }
        }
        report.push_with_witness(Check::at_most(format!("{name} relative gap"), worst, 1e-6), &witness)?;
    }
    Ok(())
}

fn leveling(report: &mut SuiteReport, cfg: &RunConfig) -> Result<()> {
    let space = MeasureSpace::uniform(8);
    let r = leveling_constant_probe(&Gauge::lp(0.5), &space, cfg.trials, cfg.seed)?;
    report.push_with_witness(Check::at_least("L_1/2 blow-up", r.value, 8.0 - 1e-6), &r.witness)?;
    for p in [1.0, 2.0] {
        let r = leveling_constant_probe(&Gauge::lp(p), &space, cfg.trials, cfg.seed)?;
        report.push_with_witness(
            Check::at_most(format!("L_{p} contraction"), r.value, 1.0 + cfg.tol),
            &r.witness,
        )?;
    }
    Ok(())
}

/// A random representation with `terms` terms over `atoms` atoms.
pub fn random_rep(
    rng: &mut ProbeRng,
    lambda: Gauge,
    x: QuasiNormedSpace,
    atoms: usize,
    terms: usize,
) -> Result<TensorRep> {
    let d = x.dim();
    let terms = (0..terms)
        .map(|_| Term {
            x: (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            f: (0..atoms).map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(-2.0..2.0) }).collect(),
        })
        .collect();
    TensorRep::new(lambda, x, terms)
}

/// A different representation of the same tensor: random shears
/// `x_i += s x_j, f_j -= s f_i`, splits `x (x) f = x (x) tf + x (x) (1-t)f`,
/// a canceling pair, and a shuffle of the terms.
pub fn equal_j_variant(rng: &mut ProbeRng, rep: &TensorRep) -> TensorRep {
    let mut terms = rep.terms.clone();
    let atoms = terms.first().map_or(0, |t| t.f.len());
    for _ in 0..rng.gen_range(0..=3) {
        let k = rng.gen_range(0..terms.len());
        let s: f64 = rng.gen_range(0.1..0.9);
        let t = terms[k].clone();
        terms[k].f.iter_mut().for_each(|v| *v *= s);
        terms.push(Term { x: t.x, f: t.f.iter().map(|v| v * (1.0 - s)).collect() });
    }
    if terms.len() >= 2 {
        for _ in 0..rng.gen_range(1..=4) {
            let i = rng.gen_range(0..terms.len());
            let j = (i + rng.gen_range(1..terms.len())) % terms.len();
            let s: f64 = rng.gen_range(-1.0..1.0);
            let xj = terms[j].x.clone();
            terms[i].x.iter_mut().zip(&xj).for_each(|(a, b)| *a += s * b);
            let fi = terms[i].f.clone();
            terms[j].f.iter_mut().zip(&fi).for_each(|(a, b)| *a -= s * b);
        }
    }
    if rng.gen_bool(0.5) {
        let x: Vec<f64> = (0..rep.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f: Vec<f64> = (0..atoms).map(|_| rng.gen_range(-1.0..1.0)).collect();
        terms.push(Term { x: x.clone(), f: f.clone() });
        terms.push(Term { x: x.iter().map(|v| -v).collect(), f });
    }
    sampling::shuffle(rng, &mut terms);
    rep.with_terms(terms)
}

fn banach_target(rng: &mut ProbeRng, d: usize) -> Result<QuasiNormedSpace> {
    let q = [1.0, 1.5, 2.0, 4.0][rng.gen_range(0..4)];
    QuasiNormedSpace::lq(d, q)
}

fn random_weights(rng: &mut ProbeRng, n: usize) -> Result<MeasureSpace> {
    MeasureSpace::new((0..n).map(|_| rng.gen_range(0.1..3.0)).collect())
}

fn tensor_oracle(report: &mut SuiteReport, cfg: &RunConfig) -> Result<()> {
    let mut below: f64 = 0.0;
    let mut gap: f64 = 0.0;
    let mut witness = None;
    for t in 0..cfg.trials {
        let mut rng = sampling::trial_rng(cfg.seed, t);
        let atoms = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=3);
        let x = banach_target(&mut rng, d)?;
        let space = random_weights(&mut rng, atoms)?;
        let nterms = rng.gen_range(1..=4);
        let rep = random_rep(&mut rng, Gauge::lp(1.0), x.clone(), atoms, nterms)?;
        let j = j_map(&rep, &space)?;
        let exact: f64 = j.vectors().zip(space.weights()).map(|(v, w)| w * x.norm(v)).sum();
        let est = tensor_norm_estimate(&rep, &space, cfg.budget, sampling::subseed(cfg.seed, t as u64))?;
        below = below.max(exact - est.value);
        if est.value - exact > gap {
            gap = est.value - exact;
            witness = Some((rep, est));
        }
    }
    report.push(Check::at_most("exact minus estimate", below, 1e-9));
    report.push_with_witness(Check::at_most("estimate minus exact", gap, 1e-3), &witness)
}

fn amenability(report: &mut SuiteReport, cfg: &RunConfig) -> Result<()> {
    let mut worst_i: f64 = 0.0;
    let mut worst_route: f64 = 0.0;
    let mut all_passed = true;
    let mut witness = None;
    for t in 0..cfg.trials {
        let mut rng = sampling::trial_rng(cfg.seed, t);
        let atoms = rng.gen_range(1..=6);
        let d = rng.gen_range(1..=4);
        let x = match rng.gen_range(0..3) {
            0 => QuasiNormedSpace::lq(d, 0.5)?,
            1 => QuasiNormedSpace::lq(d, 1.0)?,
            _ => QuasiNormedSpace::lq(d, 2.0)?,
        };
        let space = random_weights(&mut rng, atoms)?;
        let nterms = rng.gen_range(1..=4);
        let rep1 = random_rep(&mut rng, Gauge::lp(0.5), x, atoms, nterms)?;
        let rep2 = equal_j_variant(&mut rng, &rep1);
        let r = representation_independence_check(&rep1, &rep2, &space, 1e-9)?;
        all_passed &= r.passed && r.j_discrepancy <= 1e-9;
        worst_route = worst_route.max(r.route_discrepancy);
        if r.i_discrepancy > worst_i {
            worst_i = r.i_discrepancy;
            witness = Some((rep1, rep2));
        }
    }
    report.push_with_witness(Check::at_most("integral discrepancy", worst_i, 1e-9), &witness)?;
    report.push(Check::at_most("atoms vs term-by-term", worst_route, 1e-12));
    report.push(Check::at_least("pairs passing", if all_passed { 1.0 } else { 0.0 }, 1.0));
    Ok(())
}

fn ftc(report: &mut SuiteReport, cfg: &RunConfig) -> Result<()> {
    let grid = GridSpace::new(1, 256)?;
    let x = QuasiNormedSpace::lq(2, 2.0)?;
    let half: Vec<f64> = (0..grid.len()).map(|c| if c < 128 { 1.0 } else { 0.0 }).collect();
    let field = VectorField::rank_one(&[3.0, 4.0], &half);
    // points at least 1/8 from the jump at 1/2, off the cell faces
    let samples: Vec<Vec<f64>> =
        (0..24).map(|k| 0.01 + 0.365 * k as f64 / 23.0).flat_map(|t| [vec![t], vec![1.0 - t]]).collect();
    let schedule: Vec<f64> = vec![0.12, 0.1, 1.0 / 16.0, 0.05, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 200.0];
    let rows = differentiation_report(&grid, &field, &x, &samples, &schedule)?;
    let worst = rows.iter().map(|r| r.max_error).fold(0.0, f64::max);
    report.push_with_witness(Check::at_most("differentiation error below 1/8", worst, 0.0), &rows)?;

    let fine = GridSpace::new(1, 4096)?;
    let mass = ScalarField::indicator(fine.len(), &[2048]).scaled(fine.len() as f64);
    let c = weak11_constant(&fine, &mass, &fine.all_scales(), CubeFamily::Containing)?;
    report.push(Check::within("weak-(1,1) point mass", c, 1.8, 2.2));

    let grid = GridSpace::new(1, 64)?;
    let space = grid.measure();
    let scales = grid.all_scales();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut witness = None;
    for t in 0..cfg.trials.min(100) {
        let mut rng = sampling::trial_rng(cfg.seed, t);
        let (x, lambda) = match t % 3 {
            0 => (QuasiNormedSpace::lq(3, 1.0)?, Gauge::lp(1.0)),
            1 => (QuasiNormedSpace::lq(2, 2.0)?, Gauge::lp(0.5)),
            _ => (QuasiNormedSpace::lq(3, 0.5)?, Gauge::lp(0.5)),
        };
        let nterms = rng.gen_range(1..=4);
        let mut rep = random_rep(&mut rng, lambda.clone(), x.clone(), grid.len(), nterms)?;
        for term in &mut rep.terms {
            if let Some(unit) = x.normalize(&term.x) {
                term.x = unit;
            }
        }
        let v = vector_maximal(&grid, &j_map(&rep, &space)?, &x, &scales)?;
        let ms = rep
            .terms
            .iter()
            .map(|term| hl_maximal(&grid, &ScalarField::new(term.f.clone()), &scales))
            .collect::<Result<Vec<_>>>()?;
        for y in 0..grid.len() {
            let profile: Vec<f64> = ms.iter().map(|m| m.values[y]).collect();
            let excess = v.values[y] - lambda.eval_sequence(&profile)?.value;
            if excess > worst {
                worst = excess;
                witness = Some(rep.clone());
            }
        }
    }
    report.push_with_witness(Check::at_most("series domination excess", worst, 1e-9), &witness)
}

fn counterexample(report: &mut SuiteReport, params: &SuiteParams) -> Result<()> {
    let p = params.p.unwrap_or(0.5);
    let max_n = params.max_n.unwrap_or(1024);
    if max_n == 0 {
        return input("max_n must be at least 1");
    }
    let mut rows = Vec::new();
    let mut n = 1;
    while n <= max_n {
        let r = rolewicz_counterexample(p, n)?;
        let nf = n as f64;
        let sup = nf.powf(1.0 - 1.0 / p);
        let ratio = nf.powf(1.0 / p - 1.0);
        report.push(Check::close(format!("sup part n={n}"), r.sup_part_norm, sup, 1e-12 * sup));
        report.push(Check::close(format!("ratio n={n}"), r.blowup_ratio, ratio, 1e-12 * ratio));
        rows.push(vec![r.p, nf, r.sup_part_norm, r.riemann_sum_norm, r.blowup_ratio]);
        n *= 2;
    }
    report.table = Some(Table {
        columns: CounterexampleReport::CSV_HEADER.iter().map(|s| s.to_string()).collect(),
        rows,
    });
    Ok(())
}
