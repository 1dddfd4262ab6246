//! Independent reference computations for the integration tests. Nothing
//! here calls into the library's gauge, maximal or search code.

#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(sum w |f|^p)^{1/p}`.
pub fn lp(w: &[f64], f: &[f64], p: f64) -> f64 {
    w.iter().zip(f).map(|(w, v)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `(sum |x|^q)^{1/q}` on a coordinate space.
pub fn lq(x: &[f64], q: f64) -> f64 {
    lp(&vec![1.0; x.len()], x, q)
}

/// `sup_s s mu{|f| > s}`, approached as `s` rises to each value of `|f|`.
pub fn weak_l1(w: &[f64], f: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for &s in f {
        let s = s.abs();
        let mass: f64 = w.iter().zip(f).filter(|(_, v)| v.abs() >= s).map(|(w, _)| w).sum();
        best = best.max(s * mass);
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub enum Phi {
    LogLog,
    Rational,
    Power(f64),
}

impl Phi {
    pub fn at(self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Phi::LogLog => t * (std::f64::consts::E + 1.0 / t).ln(),
            Phi::Rational => t / (1.0 + t),
            Phi::Power(p) => t.powf(p),
        }
    }
}

/// `inf{t > 0 : sum w phi(|f|/t) <= 1}` by plain bisection on a bracket that
/// is grown geometrically.
pub fn luxemburg(phi: Phi, w: &[f64], f: &[f64]) -> f64 {
    let modular = |t: f64| w.iter().zip(f).map(|(w, v)| w * phi.at(v.abs() / t)).sum::<f64>();
    if f.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while modular(lo) <= 1.0 {
        lo /= 2.0;
        if lo < 1e-300 {
            return 0.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// Brute-force 1-envelope of `L_{1/2}` on counting measure: every way of
/// splitting each coordinate into `n` parts on the grid `k / steps`.
pub fn l_half_one_envelope_grid(f: &[f64], steps: usize) -> f64 {
    let n = f.len();
    let parts = n;
    // all compositions of `steps` into `parts` nonnegative pieces
    let mut comps: Vec<Vec<usize>> = Vec::new();
    fn compose(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            compose(left - k, slots - 1, cur, out);
            cur.pop();
        }
    }
    compose(steps, parts, &mut Vec::new(), &mut comps);
    let ones = vec![1.0; n];
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; n];
    #[allow(clippy::needless_range_loop)]
    loop {
        let mut cost = 0.0;
        for j in 0..parts {
            let part: Vec<f64> = (0..n).map(|a| f[a] * comps[idx[a]][j] as f64 / steps as f64).collect();
            cost += lp(&ones, &part, 0.5);
        }
        best = best.min(cost);
        // odometer over one composition per atom
        let mut a = 0;
        loop {
            if a == n {
                return best;
            }
            idx[a] += 1;
            if idx[a] < comps.len() {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// `max_{k<=n} ||sum a_k x_k||_q` over unit vectors of `l_q^d` when the
/// optimum is known: `sum a` for `q >= 1` (aligned vectors) and
/// `(sum a^q)^{1/q}` for `q < 1` with enough coordinates (disjoint vectors).
pub fn galb_closed_form(a: &[f64], q: f64) -> f64 {
    if q >= 1.0 {
        a.iter().sum()
    } else {
        a.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `J(sum x_j (x) f_j)(w) = sum f_j(w) x_j`, one vector per atom.
pub fn j_of(terms: &[(Vec<f64>, Vec<f64>)], atoms: usize, d: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; d]; atoms];
    for (x, f) in terms {
        for (w, row) in out.iter_mut().enumerate() {
            for (r, xi) in row.iter_mut().zip(x) {
                *r += f[w] * xi;
            }
        }
    }
    out
}

/// Bochner `L_1(mu, l_q)` norm of a vector field.
pub fn bochner_l1(w: &[f64], field: &[Vec<f64>], q: f64) -> f64 {
    w.iter().zip(field).map(|(w, v)| w * lq(v, q)).sum()
}

/// `max (1/|W|) sum_W |f|` over every window `W` of the 1-D grid that
/// contains the cell, by enumeration.
pub fn brute_maximal_containing(f: &[f64]) -> Vec<f64> {
    let abs: Vec<Vec<f64>> = f.iter().map(|v| vec![v.abs()]).collect();
    brute_vector_maximal_containing(&abs, |v| v[0])
}

/// Largest `X`-norm of a window average of the field over every window
/// containing the cell.
pub fn brute_vector_maximal_containing(field: &[Vec<f64>], norm: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let n = field.len();
    let d = field[0].len();
    (0..n)
        .map(|y| {
            let mut best: f64 = 0.0;
            for s in 1..=n {
                for lo in (y + 1).saturating_sub(s)..=y.min(n - s) {
                    let avg: Vec<f64> = (0..d)
                        .map(|i| field[lo..lo + s].iter().map(|v| v[i]).sum::<f64>() / s as f64)
                        .collect();
                    best = best.max(norm(&avg));
                }
            }
            best
        })
        .collect()
}
