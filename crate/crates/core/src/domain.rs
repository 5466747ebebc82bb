//! Finite domains, measurements on them, and the right action of domain
//! bijections on measurements.
//!
//! Every object here is an immutable value. A [`Measurement`] is stored
//! extensionally as one real per point, and a [`DomainMap`] is a permutation
//! of point indices: the image of `x_i` is `x_{perm[i]}`. Composition follows
//! the functional convention, so `s.compose(&t)` is the map `x ↦ s(t(x))` and
//! `φ(st) = (φs)t`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerances shared by every check in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Sup-norm radius under which two measurements are the same member.
    pub delta_mem: f64,
    /// Slack for inequality checks (triangle inequality, Lipschitz bounds).
    pub delta_num: f64,
}

impl Tolerances {
    pub const DEFAULT_DELTA_MEM: f64 = 1e-9;
    pub const DEFAULT_DELTA_NUM: f64 = 1e-12;
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            delta_mem: Self::DEFAULT_DELTA_MEM,
            delta_num: Self::DEFAULT_DELTA_NUM,
        }
    }
}

/// The underlying set `X` as an ordered list of opaque point labels.
#[derive(Clone)]
pub struct FiniteDomain {
    points: Arc<[String]>,
}

impl FiniteDomain {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let points: Vec<String> = labels.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(Error::DuplicatePoint(p.clone()));
            }
        }
        Ok(FiniteDomain {
            points: points.into(),
        })
    }

    /// Domain `{x0, x1, …, x(n-1)}`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub(crate) fn check_point(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                index,
                size: self.len(),
            })
        }
    }
}

impl PartialEq for FiniteDomain {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.points, &other.points) || self.points == other.points
    }
}

impl Eq for FiniteDomain {}

impl fmt::Debug for FiniteDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteDomain")
            .field("len", &self.len())
            .finish()
    }
}

/// A real-valued function on a finite domain, one value per point.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    domain: FiniteDomain,
    values: Vec<f64>,
}

impl Measurement {
    pub fn new(domain: &FiniteDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Measurement {
            domain: domain.clone(),
            values,
        })
    }

    pub fn constant(domain: &FiniteDomain, value: f64) -> Result<Self> {
        Self::new(domain, vec![value; domain.len()])
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, point: usize) -> f64 {
        self.values[point]
    }

    /// Builds a measurement on the same domain without re-validating; the
    /// caller guarantees length and finiteness.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Measurement {
        debug_assert_eq!(values.len(), self.values.len());
        Measurement {
            domain: self.domain.clone(),
            values,
        }
    }

    pub(crate) fn same_domain(&self, other: &Measurement) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }
}

impl Serialize for Measurement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(serializer)
    }
}

/// `max_i |f_i|`.
pub fn uniform_norm(f: &Measurement) -> f64 {
    f.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// `‖f − g‖_∞`.
pub fn uniform_distance(f: &Measurement, g: &Measurement) -> Result<f64> {
    f.same_domain(g)?;
    Ok(sup_gap(&f.values, &g.values))
}

/// Sup-norm gap between equal-length slices.
pub(crate) fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// The right action `(φ, s) ↦ φ∘s`.
pub fn right_action(phi: &Measurement, s: &DomainMap) -> Result<Measurement> {
    if phi.domain != s.domain {
        return Err(Error::DomainMismatch);
    }
    Ok(phi.with_values(permuted(&phi.values, &s.perm)))
}

pub(crate) fn permuted(values: &[f64], perm: &[usize]) -> Vec<f64> {
    perm.iter().map(|&j| values[j]).collect()
}

/// Index of the first member within `delta_mem` of `f` in sup norm.
pub fn space_membership(f: &Measurement, omega: &MeasurementSpace, delta_mem: f64) -> Option<usize> {
    omega.position(f, delta_mem)
}

/// A finite set of measurements on one domain, deduplicated under the
/// membership tolerance it was built with.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSpace {
    label: String,
    domain: FiniteDomain,
    members: Vec<Measurement>,
}

impl MeasurementSpace {
    /// Builds a space, dropping any member within `delta_mem` of an earlier one.
    pub fn new(
        label: impl Into<String>,
        domain: &FiniteDomain,
        members: Vec<Measurement>,
        delta_mem: f64,
    ) -> Result<Self> {
        let mut space = MeasurementSpace {
            label: label.into(),
            domain: domain.clone(),
            members: Vec::with_capacity(members.len()),
        };
        for m in members {
            if m.domain != space.domain {
                return Err(Error::DomainMismatch);
            }
            if space.position(&m, delta_mem).is_none() {
                space.members.push(m);
            }
        }
        Ok(space)
    }

    /// Like [`MeasurementSpace::new`] but rejects near-duplicates instead of
    /// dropping them, so member indices are preserved.
    pub fn distinct(
        label: impl Into<String>,
        domain: &FiniteDomain,
        members: Vec<Measurement>,
        delta_mem: f64,
    ) -> Result<Self> {
        let label = label.into();
        let n = members.len();
        let space = Self::new(label.clone(), domain, members, delta_mem)?;
        if space.len() != n {
            return Err(Error::instance(
                format!("spaces.{label}"),
                format!(
                    "{} member(s) duplicate earlier members within delta_mem",
                    n - space.len()
                ),
            ));
        }
        Ok(space)
    }

    pub fn from_values(
        label: impl Into<String>,
        domain: &FiniteDomain,
        rows: Vec<Vec<f64>>,
        delta_mem: f64,
    ) -> Result<Self> {
        let members = rows
            .into_iter()
            .map(|r| Measurement::new(domain, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(label, domain, members, delta_mem)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn members(&self) -> &[Measurement] {
        &self.members
    }

    pub fn member(&self, index: usize) -> &Measurement {
        &self.members[index]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, f: &Measurement, delta_mem: f64) -> Option<usize> {
        if f.domain != self.domain {
            return None;
        }
        self.members
            .iter()
            .position(|g| sup_gap(&f.values, &g.values) <= delta_mem)
    }

    /// Closest member and its sup-norm gap; first index wins ties.
    pub fn nearest(&self, f: &Measurement) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, g) in self.members.iter().enumerate() {
            let d = sup_gap(&f.values, &g.values);
            if best.map_or(true, |(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best
    }

    pub fn is_subset_of(&self, other: &MeasurementSpace, delta_mem: f64) -> bool {
        self.domain == other.domain
            && self
                .members
                .iter()
                .all(|m| other.position(m, delta_mem).is_some())
    }

    /// The translated space `Φs = {φ∘s : φ ∈ Φ}`, deduplicated.
    pub fn translated(&self, s: &DomainMap, delta_mem: f64) -> Result<MeasurementSpace> {
        let members = self
            .members
            .iter()
            .map(|m| right_action(m, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(format!("{}·s", self.label), &self.domain, members, delta_mem)
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.members.is_empty() {
            Err(Error::EmptySpace(self.label.clone()))
        } else {
            Ok(())
        }
    }
}

/// A bijection of a finite domain stored as a permutation of point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainMap {
    domain: FiniteDomain,
    perm: Vec<usize>,
}

impl DomainMap {
    pub fn new(domain: &FiniteDomain, perm: Vec<usize>) -> Result<Self> {
        let n = domain.len();
        if perm.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "length {} does not match domain size {n}",
                perm.len()
            )));
        }
        let mut seen = vec![false; n];
        for (i, &j) in perm.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidPermutation(format!(
                    "entry {i} = {j} is out of range"
                )));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPermutation(format!(
                    "index {j} appears more than once"
                )));
            }
        }
        Ok(DomainMap {
            domain: domain.clone(),
            perm,
        })
    }

    pub fn identity(domain: &FiniteDomain) -> Self {
        DomainMap {
            domain: domain.clone(),
            perm: (0..domain.len()).collect(),
        }
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Index of `s(x_i)`.
    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &DomainMap) -> Result<DomainMap> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        Ok(DomainMap {
            domain: self.domain.clone(),
            perm: other.perm.iter().map(|&j| self.perm[j]).collect(),
        })
    }

    pub fn inverse(&self) -> DomainMap {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        DomainMap {
            domain: self.domain.clone(),
            perm: inv,
        }
    }
}

/// `(Φ, Φ′, S)`. Admissibility of `S` is checked separately by
/// [`crate::operations::validate_perception_triple`].
#[derive(Clone, Debug, PartialEq)]
pub struct PerceptionTriple {
    phi: Arc<MeasurementSpace>,
    phi_prime: Arc<MeasurementSpace>,
    ops: Vec<DomainMap>,
}

impl PerceptionTriple {
    pub fn new(
        phi: Arc<MeasurementSpace>,
        phi_prime: Arc<MeasurementSpace>,
        ops: Vec<DomainMap>,
    ) -> Result<Self> {
        if phi.domain() != phi_prime.domain() {
            return Err(Error::DomainMismatch);
        }
        if ops.iter().any(|s| s.domain() != phi.domain()) {
            return Err(Error::DomainMismatch);
        }
        Ok(PerceptionTriple {
            phi,
            phi_prime,
            ops,
        })
    }

    pub fn phi(&self) -> &Arc<MeasurementSpace> {
        &self.phi
    }

    pub fn phi_prime(&self) -> &Arc<MeasurementSpace> {
        &self.phi_prime
    }

    pub fn ops(&self) -> &[DomainMap] {
        &self.ops
    }

    pub fn domain(&self) -> &FiniteDomain {
        self.phi.domain()
    }

    /// Position of `s` in the operation list (exact permutation equality).
    pub fn op_index(&self, s: &DomainMap) -> Option<usize> {
        self.ops.iter().position(|t| t == s)
    }
}
