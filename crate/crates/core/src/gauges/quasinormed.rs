//! Finite-dimensional quasi-normed target spaces.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::sampling;

type NormFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum NormKind {
    /// `(sum |x_i|^q)^{1/q}`.
    Lq {
        q: f64,
    },
    /// `max_k k |x|*_k` over the decreasing rearrangement of `|x|` with
    /// counting measure on the coordinates.
    WeakL1,
    Custom {
        name: String,
        kappa: f64,
        f: NormFn,
    },
}

#[derive(Clone)]
pub struct QuasiNormedSpace {
    dim: usize,
    norm: NormKind,
}

impl fmt::Debug for QuasiNormedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.norm {
            NormKind::Lq { q } => write!(f, "l_{q}^{}", self.dim),
            NormKind::WeakL1 => write!(f, "weak_l1^{}", self.dim),
            NormKind::Custom { name, .. } => write!(f, "{name}^{}", self.dim),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NormRepr {
    Lq { q: f64 },
    WeakL1,
    Custom { name: String },
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    dim: usize,
    norm: NormRepr,
}

impl Serialize for QuasiNormedSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let norm = match &self.norm {
            NormKind::Lq { q } => NormRepr::Lq { q: *q },
            NormKind::WeakL1 => NormRepr::WeakL1,
            NormKind::Custom { name, .. } => NormRepr::Custom { name: name.clone() },
        };
        SpaceRepr { dim: self.dim, norm }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuasiNormedSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SpaceRepr::deserialize(d)?;
        match repr.norm {
            NormRepr::Lq { q } => QuasiNormedSpace::lq(repr.dim, q),
            NormRepr::WeakL1 => QuasiNormedSpace::weak_l1(repr.dim),
            NormRepr::Custom { name } => {
                Err(Error::Input(format!("custom norm {name:?} cannot be read from JSON")))
            }
        }
        .map_err(D::Error::custom)
    }
}

impl QuasiNormedSpace {
    pub fn lq(dim: usize, q: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("target dimension must be positive".into()));
        }
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::Input(format!("l_q exponent must be > 0, got {q}")));
        }
        Ok(Self { dim, norm: NormKind::Lq { q } })
    }

    /// Weak-`L_1` quasi-norm on `m` atoms of unit mass.
    pub fn weak_l1(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Input("target dimension must be positive".into()));
        }
        Ok(Self { dim: m, norm: NormKind::WeakL1 })
    }

    /// A caller-supplied quasi-norm, accepted after checking positivity on the
    /// basis and homogeneity on seeded samples.
    pub fn custom(
        dim: usize,
        name: impl Into<String>,
        kappa: f64,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if dim == 0 || !(kappa >= 1.0) {
            return Err(Error::Input("custom norm needs dim > 0 and kappa >= 1".into()));
        }
        let space = Self { dim, norm: NormKind::Custom { name: name.into(), kappa, f: Arc::new(f) } };
        space.validate()?;
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.norm
    }

    /// Modulus of concavity.
    pub fn kappa(&self) -> f64 {
        match &self.norm {
            NormKind::Lq { q } if *q < 1.0 => 2f64.powf(1.0 / q - 1.0),
            NormKind::Lq { .. } => 1.0,
            NormKind::WeakL1 => 2.0,
            NormKind::Custom { kappa, .. } => *kappa,
        }
    }

    /// Locally convex, i.e. the norm satisfies the triangle inequality.
    pub fn is_banach(&self) -> bool {
        match &self.norm {
            NormKind::Lq { q } => *q >= 1.0,
            NormKind::WeakL1 => self.dim == 1,
            NormKind::Custom { kappa, .. } => *kappa == 1.0,
        }
    }

    /// `p` such that the norm is a `p`-norm, when known.
    pub fn p_norm_exponent(&self) -> Option<f64> {
        match &self.norm {
            NormKind::Lq { q } => Some(q.min(1.0)),
            NormKind::WeakL1 if self.dim == 1 => Some(1.0),
            NormKind::Custom { kappa, .. } if *kappa == 1.0 => Some(1.0),
            _ => None,
        }
    }

    #[inline]
    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.norm {
            NormKind::Lq { q } => lq_norm(x, *q),
            NormKind::WeakL1 => weak_l1_counting(x),
            NormKind::Custom { f, .. } => f(x),
        }
    }

    pub fn checked_norm(&self, x: &[f64]) -> Result<f64> {
        check_len(self.dim, x.len())?;
        Ok(self.norm(x))
    }

    pub fn basis(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.dim];
        e[i] = 1.0;
        e
    }

    /// `x / ||x||`, or `None` for the zero vector.
    pub fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = self.norm(x);
        (n > 0.0 && n.is_finite()).then(|| x.iter().map(|v| v / n).collect())
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.dim {
            let n = self.norm(&self.basis(i));
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::Input(format!("norm of basis vector {i} is {n}")));
            }
        }
        let mut rng = sampling::rng(0x5EED);
        for _ in 0..32 {
            use rand::Rng;
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t: f64 = rng.gen_range(-10.0..10.0);
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            let lhs = self.norm(&tx);
            let rhs = t.abs() * self.norm(&x);
            if (lhs - rhs).abs() > 1e-12 * rhs.max(1e-300) {
                return Err(Error::Input(format!("norm is not homogeneous: {lhs} vs {rhs}")));
            }
        }
        Ok(())
    }
}

pub(crate) fn lq_norm(x: &[f64], q: f64) -> f64 {
    if q == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if q == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        x.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

pub(crate) fn weak_l1_counting(x: &[f64]) -> f64 {
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_unstable_by(|p, q| q.total_cmp(p));
    a.iter().enumerate().map(|(k, v)| (k + 1) as f64 * v).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lq_values() {
        let x = QuasiNormedSpace::lq(2, 2.0).unwrap();
        assert_eq!(x.norm(&[3.0, -4.0]), 5.0);
        let half = QuasiNormedSpace::lq(2, 0.5).unwrap();
        assert_eq!(half.norm(&[1.0, 1.0]), 4.0);
        assert_eq!(half.kappa(), 2.0);
        assert!(!half.is_banach());
    }

    #[test]
    fn weak_l1_values() {
        let x = QuasiNormedSpace::weak_l1(3).unwrap();
        assert_eq!(x.norm(&[1.0, 0.5, 1.0 / 3.0]), 1.0);
        assert_eq!(x.norm(&[1.5, -1.5, 0.0]), 3.0);
        x.validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let x: QuasiNormedSpace = serde_json::from_str(r#"{"dim":3,"norm":{"kind":"lq","q":0.5}}"#).unwrap();
        assert_eq!(x.dim(), 3);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"dim":3,"norm":{"kind":"lq","q":0.5}}"#);
        assert!(serde_json::from_str::<QuasiNormedSpace>(r#"{"dim":0,"norm":{"kind":"weak_l1"}}"#).is_err());
    }

    #[test]
    fn custom_norm_is_validated() {
        let sup = QuasiNormedSpace::custom(2, "sup", 1.0, |x: &[f64]| {
            x.iter().map(|v| v.abs()).fold(0.0, f64::max)
        })
        .unwrap();
        assert_eq!(sup.norm(&[1.0, -2.0]), 2.0);
        let bad = QuasiNormedSpace::custom(2, "first", 1.0, |x: &[f64]| x[0].abs());
        assert!(bad.is_err());
        let inhomogeneous = QuasiNormedSpace::custom(2, "sq", 1.0, |x: &[f64]| x.iter().map(|v| v * v).sum());
        assert!(inhomogeneous.is_err());
    }
}
