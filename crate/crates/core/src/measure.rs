//! Finite measure spaces, fields over them, and the elementary measure-theoretic
//! operations: distribution functions, decreasing rearrangements, conditional
//! expectations onto finite partitions, products and restrictions.
//!
//! A [`MeasureSpace`] is a finite list of strictly positive atom masses and the
//! sigma-algebra is the full power set, so every subset is measurable and of
//! finite measure.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, input, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpaceRepr")]
pub struct MeasureSpace {
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct MeasureSpaceRepr {
    weights: Vec<f64>,
}

impl TryFrom<MeasureSpaceRepr> for MeasureSpace {
    type Error = Error;

    fn try_from(repr: MeasureSpaceRepr) -> Result<Self> {
        MeasureSpace::new(repr.weights)
    }
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return input("measure space needs at least one atom");
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return input(format!("atom weights must be finite and > 0, found {w}"));
        }
        Ok(Self { weights })
    }

    /// `n` atoms of mass one.
    pub fn counting(n: usize) -> Self {
        assert!(n > 0, "counting measure needs at least one atom");
        Self { weights: vec![1.0; n] }
    }

    /// `n` atoms of mass `1/n`, total mass one.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform measure needs at least one atom");
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mass_of(&self, atoms: &[usize]) -> f64 {
        atoms.iter().map(|&a| self.weights[a]).sum()
    }

    pub fn is_counting(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    /// `sum_w w_i f_i`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Per-atom real values. Gauges only accept nonnegative fields; tensor
/// representations may carry signed ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self { values: vec![0.0; n] }
    }

    pub fn indicator(n: usize, atoms: &[usize]) -> Self {
        let mut values = vec![0.0; n];
        for &a in atoms {
            values[a] = 1.0;
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { values: self.values.iter().map(|v| t * v).collect() }
    }

    pub fn abs(&self) -> Self {
        Self { values: self.values.iter().map(|v| v.abs()).collect() }
    }

    pub fn powf(&self, r: f64) -> Self {
        Self { values: self.values.iter().map(|v| v.powf(r)).collect() }
    }

    pub(crate) fn check_nonnegative(&self) -> Result<()> {
        match self.values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            Some(v) => input(format!("field entries must be finite and nonnegative, found {v}")),
            None => Ok(()),
        }
    }

    pub(crate) fn check_over(&self, space: &MeasureSpace) -> Result<()> {
        check_len(space.len(), self.len())
    }
}

impl From<Vec<f64>> for ScalarField {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Per-atom vectors of a common dimension, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorFieldRepr", into = "VectorFieldRepr")]
pub struct VectorField {
    dim: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct VectorFieldRepr {
    vectors: Vec<Vec<f64>>,
}

impl TryFrom<VectorFieldRepr> for VectorField {
    type Error = Error;

    fn try_from(repr: VectorFieldRepr) -> Result<Self> {
        VectorField::from_vectors(repr.vectors)
    }
}

impl From<VectorField> for VectorFieldRepr {
    fn from(field: VectorField) -> Self {
        VectorFieldRepr { vectors: field.vectors().map(<[f64]>::to_vec).collect() }
    }
}

impl VectorField {
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = match vectors.first() {
            Some(v) => v.len(),
            None => return input("vector field needs at least one atom"),
        };
        if dim == 0 {
            return input("vector field dimension must be positive");
        }
        let mut data = Vec::with_capacity(dim * vectors.len());
        for v in &vectors {
            check_len(dim, v.len())?;
            data.extend_from_slice(v);
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(atoms: usize, dim: usize) -> Self {
        Self { dim, data: vec![0.0; atoms * dim] }
    }

    /// `x f(w)` at every atom.
    pub fn rank_one(x: &[f64], f: &[f64]) -> Self {
        let mut out = Self::zeros(f.len(), x.len());
        for (atom, &fv) in f.iter().enumerate() {
            for (k, &xk) in x.iter().enumerate() {
                out.data[atom * x.len() + k] = fv * xk;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn vector(&self, atom: usize) -> &[f64] {
        &self.data[atom * self.dim..(atom + 1) * self.dim]
    }

    pub fn vector_mut(&mut self, atom: usize) -> &mut [f64] {
        &mut self.data[atom * self.dim..(atom + 1) * self.dim]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn check_over(&self, space: &MeasureSpace) -> Result<()> {
        check_len(space.len(), self.len())
    }
}

/// A finite sub-sigma-algebra, given by its atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, atoms: usize) -> Result<Self> {
        let p = Self { blocks };
        p.validate(atoms)?;
        Ok(p)
    }

    /// The partition with a single block: conditional expectation is the mean.
    pub fn trivial(atoms: usize) -> Self {
        Self { blocks: vec![(0..atoms).collect()] }
    }

    pub fn singletons(atoms: usize) -> Self {
        Self { blocks: (0..atoms).map(|a| vec![a]).collect() }
    }

    /// Blocks nonempty, pairwise disjoint, covering `0..atoms`. Positive block
    /// mass is automatic since every atom has positive weight.
    pub fn validate(&self, atoms: usize) -> Result<()> {
        let mut seen = vec![false; atoms];
        for block in &self.blocks {
            if block.is_empty() {
                return input("partition blocks must be nonempty");
            }
            for &a in block {
                if a >= atoms {
                    return input(format!("partition refers to atom {a} of {atoms}"));
                }
                if std::mem::replace(&mut seen[a], true) {
                    return input(format!("atom {a} appears in two partition blocks"));
                }
            }
        }
        if let Some(a) = seen.iter().position(|s| !s) {
            return input(format!("atom {a} is not covered by the partition"));
        }
        Ok(())
    }
}

/// `mu{ f > s }`.
pub fn distribution_mass(space: &MeasureSpace, f: &ScalarField, s: f64) -> Result<f64> {
    f.check_over(space)?;
    f.check_nonnegative()?;
    if !(s >= 0.0) {
        return input(format!("distribution level must be >= 0, got {s}"));
    }
    Ok(f.values.iter().zip(space.weights()).filter(|(v, _)| **v > s).map(|(_, w)| w).sum())
}

/// `mu{ f >= s }`, the closed variant used by some weak-L1 displays.
pub fn distribution_mass_closed(space: &MeasureSpace, f: &ScalarField, s: f64) -> Result<f64> {
    f.check_over(space)?;
    f.check_nonnegative()?;
    if !(s >= 0.0) {
        return input(format!("distribution level must be >= 0, got {s}"));
    }
    Ok(f.values.iter().zip(space.weights()).filter(|(v, _)| **v >= s).map(|(_, w)| w).sum())
}

/// One step of the decreasing rearrangement: `mass = mu{ f >= value }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub value: f64,
    pub mass: f64,
}

/// Distinct values of `f` in decreasing order with cumulative masses.
///
/// The result determines the distribution function exactly: for
/// `value_{k+1} <= s < value_k` one has `mu{f > s} = mass_k`.
pub fn decreasing_rearrangement(space: &MeasureSpace, f: &ScalarField) -> Result<Vec<Step>> {
    f.check_over(space)?;
    f.check_nonnegative()?;
    Ok(rearrange(space.weights(), &f.values))
}

pub(crate) fn rearrange(weights: &[f64], values: &[f64]) -> Vec<Step> {
    let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    let mut steps: Vec<Step> = Vec::with_capacity(pairs.len());
    let mut mass = 0.0;
    for (value, w) in pairs {
        mass += w;
        match steps.last_mut() {
            Some(last) if last.value == value => last.mass = mass,
            _ => steps.push(Step { value, mass }),
        }
    }
    steps
}

/// Weighted mean written as a shift from the first entry, so that a block of
/// identical values averages to exactly that value.
pub(crate) fn shifted_mean(items: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let mut reference = None;
    let mut mass = 0.0;
    let mut shift = 0.0;
    for (w, v) in items {
        let r = *reference.get_or_insert(v);
        mass += w;
        shift += w * (v - r);
    }
    match reference {
        Some(r) => (r + shift / mass, mass),
        None => (0.0, 0.0),
    }
}

/// Block averages `(1/mu(A)) sum_{w in A} mu_w f(w)` on every block of `partition`.
pub fn conditional_expectation(
    space: &MeasureSpace,
    partition: &Partition,
    f: &ScalarField,
) -> Result<ScalarField> {
    f.check_over(space)?;
    partition.validate(space.len())?;
    let mut out = vec![0.0; f.len()];
    for block in &partition.blocks {
        let (mean, _) = shifted_mean(block.iter().map(|&a| (space.weight(a), f.values[a])));
        for &a in block {
            out[a] = mean;
        }
    }
    Ok(ScalarField::new(out))
}

/// Componentwise block averages of a vector field.
pub fn conditional_expectation_vector(
    space: &MeasureSpace,
    partition: &Partition,
    f: &VectorField,
) -> Result<VectorField> {
    f.check_over(space)?;
    partition.validate(space.len())?;
    let mut out = VectorField::zeros(f.len(), f.dim());
    for block in &partition.blocks {
        for k in 0..f.dim() {
            let (mean, _) = shifted_mean(block.iter().map(|&a| (space.weight(a), f.vector(a)[k])));
            for &a in block {
                out.vector_mut(a)[k] = mean;
            }
        }
    }
    Ok(out)
}

/// `A x B` with atom `(i, j)` stored at flat index `i * cols + j` (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    pub space: MeasureSpace,
    pub rows: usize,
    pub cols: usize,
}

impl ProductSpace {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.cols + j
    }

    pub fn split(&self, flat: usize) -> (usize, usize) {
        (flat / self.cols, flat % self.cols)
    }
}

pub fn product_space(a: &MeasureSpace, b: &MeasureSpace) -> ProductSpace {
    let weights = a.weights().iter().flat_map(|wa| b.weights().iter().map(move |wb| wa * wb)).collect();
    ProductSpace { space: MeasureSpace { weights }, rows: a.len(), cols: b.len() }
}

/// Restriction of `space` and `f` to `atoms`, keeping the original atom order.
pub fn restrict(
    space: &MeasureSpace,
    atoms: &[usize],
    f: &ScalarField,
) -> Result<(MeasureSpace, ScalarField)> {
    f.check_over(space)?;
    if atoms.is_empty() {
        return input("cannot restrict to an empty set of atoms");
    }
    let mut keep = vec![false; space.len()];
    for &a in atoms {
        if a >= space.len() {
            return input(format!("atom {a} out of range for {} atoms", space.len()));
        }
        keep[a] = true;
    }
    let idx: Vec<usize> = (0..space.len()).filter(|&a| keep[a]).collect();
    let weights = idx.iter().map(|&a| space.weight(a)).collect();
    let values = idx.iter().map(|&a| f.values[a]).collect();
    Ok((MeasureSpace { weights }, ScalarField::new(values)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(w: &[f64]) -> MeasureSpace {
        MeasureSpace::new(w.to_vec()).unwrap()
    }

    fn field(v: &[f64]) -> ScalarField {
        ScalarField::new(v.to_vec())
    }

    #[test]
    fn distribution_examples() {
        let s = space(&[1.0, 1.0]);
        assert_eq!(distribution_mass(&s, &field(&[2.0, 1.0]), 1.5).unwrap(), 1.0);
        assert_eq!(distribution_mass(&s, &field(&[2.0, 1.0]), 0.0).unwrap(), 2.0);
        let half = space(&[0.5, 0.5, 0.5]);
        assert_eq!(distribution_mass(&half, &field(&[3.0, 2.0, 1.0]), 1.0).unwrap(), 1.0);
    }

    #[test]
    fn distribution_rejects_negative_level() {
        let s = space(&[1.0]);
        assert!(matches!(distribution_mass(&s, &field(&[1.0]), -0.1), Err(Error::Input(_))));
    }

    #[test]
    fn distribution_is_strict_and_closed_variant_is_not() {
        let s = space(&[1.0, 1.0]);
        let f = field(&[2.0, 1.0]);
        assert_eq!(distribution_mass(&s, &f, 1.0).unwrap(), 1.0);
        assert_eq!(distribution_mass_closed(&s, &f, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn rearrangement_examples() {
        let s = space(&[1.0, 1.0]);
        let r = decreasing_rearrangement(&s, &field(&[1.0, 3.0])).unwrap();
        assert_eq!(r, vec![Step { value: 3.0, mass: 1.0 }, Step { value: 1.0, mass: 2.0 }]);
        let r = decreasing_rearrangement(&s, &field(&[0.0, 0.0])).unwrap();
        assert_eq!(r, vec![Step { value: 0.0, mass: 2.0 }]);
        let s3 = space(&[1.0, 1.0, 1.0]);
        let r = decreasing_rearrangement(&s3, &field(&[2.0, 2.0, 1.0])).unwrap();
        assert_eq!(r, vec![Step { value: 2.0, mass: 2.0 }, Step { value: 1.0, mass: 3.0 }]);
    }

    #[test]
    fn conditional_expectation_examples() {
        let s = space(&[0.5, 0.5]);
        let e = conditional_expectation(&s, &Partition::trivial(2), &field(&[1.0, 3.0])).unwrap();
        assert_eq!(e.values, vec![2.0, 2.0]);

        let f = field(&[0.3, 1.7, 2.9]);
        let s3 = space(&[0.2, 1.1, 3.0]);
        let e = conditional_expectation(&s3, &Partition::singletons(3), &f).unwrap();
        assert_eq!(e, f);

        let s = space(&[1.0, 2.0]);
        let e = conditional_expectation(&s, &Partition::trivial(2), &field(&[3.0, 0.0])).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && e.values[0] == e.values[1]);
    }

    #[test]
    fn vector_conditional_expectation_averages_components() {
        let s = space(&[1.0, 3.0]);
        let f = VectorField::from_vectors(vec![vec![4.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let e = conditional_expectation_vector(&s, &Partition::trivial(2), &f).unwrap();
        assert_eq!(e.vector(0), &[1.0, 3.0]);
        assert_eq!(e.vector(1), &[1.0, 3.0]);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![vec![0], vec![0, 1]], 2).is_err());
        assert!(Partition::new(vec![vec![0]], 2).is_err());
        assert!(Partition::new(vec![vec![0], vec![]], 1).is_err());
        assert!(Partition::new(vec![vec![1], vec![0]], 2).is_ok());
    }

    #[test]
    fn product_examples() {
        let p = product_space(&space(&[1.0]), &space(&[1.0, 1.0]));
        assert_eq!(p.space.weights(), &[1.0, 1.0]);
        let p = product_space(&space(&[2.0, 3.0]), &space(&[5.0]));
        assert_eq!(p.space.weights(), &[10.0, 15.0]);
        let p = product_space(&space(&[1.0, 1.0]), &space(&[1.0, 1.0]));
        assert_eq!(p.space.total_mass(), 4.0);
        assert_eq!(p.index(1, 0), 2);
        assert_eq!(p.split(3), (1, 1));
    }

    #[test]
    fn restrict_examples() {
        let s = space(&[1.0, 2.0]);
        let f = field(&[5.0, 7.0]);
        let (rs, rf) = restrict(&s, &[0, 1], &f).unwrap();
        assert_eq!((rs, rf), (s.clone(), f.clone()));
        let (rs, rf) = restrict(&s, &[0], &f).unwrap();
        assert_eq!(rs.weights(), &[1.0]);
        assert_eq!(rf.values, vec![5.0]);
        let (a, _) = restrict(&s, &[1], &f).unwrap();
        assert_eq!(rs.total_mass() + a.total_mass(), s.total_mass());
        assert!(restrict(&s, &[], &f).is_err());
    }

    #[test]
    fn measure_space_rejects_bad_weights() {
        assert!(MeasureSpace::new(vec![]).is_err());
        assert!(MeasureSpace::new(vec![1.0, 0.0]).is_err());
        assert!(MeasureSpace::new(vec![f64::NAN]).is_err());
        let s: MeasureSpace = serde_json::from_str(r#"{"weights":[1.0,2.0]}"#).unwrap();
        assert_eq!(s.total_mass(), 3.0);
        assert!(serde_json::from_str::<MeasureSpace>(r#"{"weights":[-1.0]}"#).is_err());
    }

    #[test]
    fn json_shapes() {
        let v: VectorField = serde_json::from_str(r#"{"vectors":[[1,2],[3,4]]}"#).unwrap();
        assert_eq!(v.vector(1), &[3.0, 4.0]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"vectors":[[1.0,2.0],[3.0,4.0]]}"#);
        let p: Partition = serde_json::from_str(r#"{"blocks":[[0,1],[2]]}"#).unwrap();
        assert!(p.validate(3).is_ok());
        let f: ScalarField = serde_json::from_str(r#"{"values":[0.5]}"#).unwrap();
        assert_eq!(f.values, vec![0.5]);
    }
}
