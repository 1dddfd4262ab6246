//! Numeric results tagged with how much they are worth.
//!
//! Every sup-type constant found by search is a [`BoundKind::Lower`] bound and
//! every inf-type quantity found by search is a [`BoundKind::Upper`] bound. The
//! witness that certifies the bound travels with it.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    Exact,
    Upper,
    Lower,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoundKind::Exact => "EXACT",
            BoundKind::Upper => "UPPER",
            BoundKind::Lower => "LOWER",
        };
        f.write_str(s)
    }
}

/// Certificate attached to a [`BoundResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A single field, e.g. the maximiser `g` of a dual gauge.
    Field { values: Vec<f64> },
    /// A pair `(f, g)` realising a ratio.
    Pair { f: Vec<f64>, g: Vec<f64> },
    /// A finite family of fields: decompositions, lattice families.
    Family { parts: Vec<Vec<f64>> },
    /// Per-atom share `alpha` of a split `f = alpha f + (1 - alpha) f`.
    Split { alpha: Vec<f64> },
    /// A field together with the partition used for conditional expectation.
    Leveling { f: Vec<f64>, blocks: Vec<Vec<usize>> },
    /// Coefficients and unit-ball vectors realising a galb lower bound.
    Galb(crate::galb_tensor::GalbWitness),
    /// A representation `sum x_j (x) f_j` of a tensor.
    Tensor { terms: Vec<(Vec<f64>, Vec<f64>)> },
    /// A nonnegative matrix on a product space.
    Matrix { rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub kind: BoundKind,
    /// Relative width of the bracket for values obtained by bisection; zero otherwise.
    #[serde(default)]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl BoundResult {
    pub fn exact(value: f64) -> Self {
        Self { value, kind: BoundKind::Exact, tolerance: 0.0, witness: None }
    }

    pub fn exact_within(value: f64, tolerance: f64) -> Self {
        Self { value, kind: BoundKind::Exact, tolerance, witness: None }
    }

    pub fn upper(value: f64) -> Self {
        Self { value, kind: BoundKind::Upper, tolerance: 0.0, witness: None }
    }

    pub fn lower(value: f64) -> Self {
        Self { value, kind: BoundKind::Lower, tolerance: 0.0, witness: None }
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    /// Combine the tag of an operand into a derived value: anything derived
    /// from an upper bound by a monotone map stays an upper bound.
    pub(crate) fn inherit(mut self, from: &BoundResult) -> Self {
        if from.kind != BoundKind::Exact {
            self.kind = from.kind;
        }
        self.tolerance = self.tolerance.max(from.tolerance);
        self
    }
}

impl fmt::Display for BoundResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}", self.value, self.kind)
    }
}
