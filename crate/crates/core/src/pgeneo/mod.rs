//! Tabulated P-GEO/P-GENEO triples `(F, F′, T)`, their exhaustive
//! certification, and the constructions that produce new ones.

mod aggregator;
mod construct;

use std::sync::Arc;

use serde::Serialize;

use crate::domain::{permuted, sup_gap, DomainMap, FiniteDomain, Measurement, PerceptionTriple, Tolerances};
use crate::error::{Error, Result};

pub use aggregator::{check_aggregator_nonexpansive, Aggregator, AggregatorKind, AuditConfig, AuditReport};
pub use construct::{combine, compose, convex_combine, Constructed};

/// A map from the members of a finite measurement space (by index) to
/// measurements on a codomain.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedMap {
    codomain: FiniteDomain,
    images: Vec<Measurement>,
}

impl TabulatedMap {
    pub fn new(codomain: &FiniteDomain, images: Vec<Measurement>) -> Result<Self> {
        if images.iter().any(|m| m.domain() != codomain) {
            return Err(Error::DomainMismatch);
        }
        Ok(TabulatedMap {
            codomain: codomain.clone(),
            images,
        })
    }

    pub fn codomain(&self) -> &FiniteDomain {
        &self.codomain
    }

    pub fn images(&self) -> &[Measurement] {
        &self.images
    }

    pub fn image(&self, member: usize) -> &Measurement {
        &self.images[member]
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

/// `T: S → Q`, stored as an index assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformationMap {
    source_ops: Vec<DomainMap>,
    target_ops: Vec<DomainMap>,
    assignment: Vec<usize>,
}

impl TransformationMap {
    pub fn new(source_ops: Vec<DomainMap>, target_ops: Vec<DomainMap>, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source_ops.len() {
            return Err(Error::TransformationMismatch(format!(
                "assignment has {} entries for {} source maps",
                assignment.len(),
                source_ops.len()
            )));
        }
        if let Some((k, &q)) = assignment.iter().enumerate().find(|(_, &q)| q >= target_ops.len()) {
            return Err(Error::TransformationMismatch(format!(
                "source map {k} is assigned to target {q}, but only {} target maps exist",
                target_ops.len()
            )));
        }
        for ops in [&source_ops, &target_ops] {
            if ops.windows(2).any(|w| w[0].domain() != w[1].domain()) {
                return Err(Error::DomainMismatch);
            }
        }
        Ok(TransformationMap {
            source_ops,
            target_ops,
            assignment,
        })
    }

    /// `T = id_S`, with `Q = S`.
    pub fn identity(ops: Vec<DomainMap>) -> Self {
        let assignment = (0..ops.len()).collect();
        TransformationMap {
            source_ops: ops.clone(),
            target_ops: ops,
            assignment,
        }
    }

    pub fn source_ops(&self) -> &[DomainMap] {
        &self.source_ops
    }

    pub fn target_ops(&self) -> &[DomainMap] {
        &self.target_ops
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// `T(s_k)`.
    pub fn image(&self, k: usize) -> &DomainMap {
        &self.target_ops[self.assignment[k]]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TransformationReport {
    /// Pairs `(s, t)` with `st ∈ S` but `T(st) ≠ T(s)T(t)`.
    pub homomorphism_violations: Vec<(usize, usize)>,
    /// Maps `s` with `s⁻¹ ∈ S` but `T(s⁻¹) ≠ T(s)⁻¹`.
    pub inverse_violations: Vec<usize>,
    pub composable_pairs: usize,
    pub invertible_maps: usize,
    /// `Some(T(id) = id)` when the identity belongs to `S`.
    pub identity_preserved: Option<bool>,
}

impl TransformationReport {
    pub fn ok(&self) -> bool {
        self.homomorphism_violations.is_empty() && self.inverse_violations.is_empty()
    }
}

/// Exhaustive scan of the partial homomorphism and inverse conditions.
pub fn check_transformation_map(t: &TransformationMap) -> TransformationReport {
    let s = &t.source_ops;
    let position = |m: &DomainMap| s.iter().position(|x| x == m);
    let mut report = TransformationReport::default();
    for i in 0..s.len() {
        for j in 0..s.len() {
            let Ok(st) = s[i].compose(&s[j]) else { continue };
            let Some(k) = position(&st) else { continue };
            report.composable_pairs += 1;
            let ok = t
                .image(i)
                .compose(t.image(j))
                .map_or(false, |q| &q == t.image(k));
            if !ok {
                report.homomorphism_violations.push((i, j));
            }
        }
        if let Some(k) = position(&s[i].inverse()) {
            report.invertible_maps += 1;
            if t.image(k) != &t.image(i).inverse() {
                report.inverse_violations.push(i);
            }
        }
    }
    report.identity_preserved = s
        .iter()
        .position(DomainMap::is_identity)
        .map(|k| t.image(k).is_identity());
    report
}

/// A candidate P-GENEO from `(Φ, Φ′, S)` to `(Ψ, Ψ′, Q)`.
///
/// Construction only checks shapes; the defining properties are checked by
/// [`certify`].
#[derive(Clone, Debug)]
pub struct OperatorPair {
    source: Arc<PerceptionTriple>,
    target: Arc<PerceptionTriple>,
    f: TabulatedMap,
    f_prime: TabulatedMap,
    t: Arc<TransformationMap>,
}

fn same<T: PartialEq>(a: &Arc<T>, b: &Arc<T>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl OperatorPair {
    pub fn new(
        source: Arc<PerceptionTriple>,
        target: Arc<PerceptionTriple>,
        f: TabulatedMap,
        f_prime: TabulatedMap,
        t: Arc<TransformationMap>,
    ) -> Result<Self> {
        if f.len() < source.phi().len() {
            return Err(Error::UndefinedImage { member: f.len() });
        }
        if f_prime.len() < source.phi_prime().len() {
            return Err(Error::UndefinedImage { member: f_prime.len() });
        }
        if f.len() != source.phi().len() || f_prime.len() != source.phi_prime().len() {
            return Err(Error::TripleMismatch(
                "tabulation has more images than its source space has members".into(),
            ));
        }
        if f.codomain() != target.domain() || f_prime.codomain() != target.domain() {
            return Err(Error::DomainMismatch);
        }
        if t.source_ops() != source.ops() {
            return Err(Error::TransformationMismatch(
                "T is not defined on the source operation list".into(),
            ));
        }
        if t.target_ops() != target.ops() {
            return Err(Error::TransformationMismatch(
                "T does not map into the target operation list".into(),
            ));
        }
        Ok(OperatorPair {
            source,
            target,
            f,
            f_prime,
            t,
        })
    }

    /// `(id, id, id_S)` on a single triple.
    pub fn identity(triple: Arc<PerceptionTriple>) -> Self {
        let domain = triple.domain().clone();
        OperatorPair {
            f: TabulatedMap::new(&domain, triple.phi().members().to_vec()).expect("same domain"),
            f_prime: TabulatedMap::new(&domain, triple.phi_prime().members().to_vec()).expect("same domain"),
            t: Arc::new(TransformationMap::identity(triple.ops().to_vec())),
            source: triple.clone(),
            target: triple,
        }
    }

    pub fn source(&self) -> &Arc<PerceptionTriple> {
        &self.source
    }

    pub fn target(&self) -> &Arc<PerceptionTriple> {
        &self.target
    }

    pub fn f(&self) -> &TabulatedMap {
        &self.f
    }

    pub fn f_prime(&self) -> &TabulatedMap {
        &self.f_prime
    }

    pub fn transformation(&self) -> &Arc<TransformationMap> {
        &self.t
    }

    /// Same source triple, target triple and transformation map.
    pub fn check_same_setting(&self, other: &OperatorPair) -> Result<()> {
        if !same(&self.source, &other.source) {
            return Err(Error::TripleMismatch("source triples differ".into()));
        }
        if !same(&self.target, &other.target) {
            return Err(Error::TripleMismatch("target triples differ".into()));
        }
        if !same(&self.t, &other.t) {
            return Err(Error::TransformationMismatch("transformation maps differ".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    F,
    FPrime,
}

/// An image that has no member of the target space within `delta_mem`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodomainFailure {
    pub side: Side,
    pub member: usize,
    pub nearest: Option<usize>,
    pub gap: f64,
}

/// Machine-checkable verdict on the P-GENEO conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// `max_{φ,s} ‖F′(φs) − F(φ)T(s)‖_∞`; infinite when some `φs` is not in `Φ′`.
    pub equivariance_residual: f64,
    /// `(φ, s)` attaining the residual.
    pub equivariance_witness: Option<(usize, usize)>,
    /// `max_{i,j} ‖F(φ_i) − F(φ_j)‖ − ‖φ_i − φ_j‖`, at least zero.
    pub lipschitz_excess_f: f64,
    pub lipschitz_excess_f_prime: f64,
    pub codomain_ok: bool,
    pub codomain_failures: Vec<CodomainFailure>,
    pub homomorphism_ok: bool,
    pub transformation: TransformationReport,
    /// `(φ, s)` with `φs ∉ Φ′`: the source triple is not a perception triple.
    pub untranslatable: Vec<(usize, usize)>,
    pub certified: bool,
}

fn lipschitz_excess(inputs: &[Measurement], outputs: &TabulatedMap) -> f64 {
    let mut excess = 0.0_f64;
    for i in 0..inputs.len() {
        for j in i + 1..inputs.len() {
            let out = sup_gap(outputs.image(i).values(), outputs.image(j).values());
            let inp = sup_gap(inputs[i].values(), inputs[j].values());
            excess = excess.max(out - inp);
        }
    }
    excess
}

pub(crate) fn codomain_failures(pair: &OperatorPair, delta_mem: f64) -> Vec<CodomainFailure> {
    let mut failures = Vec::new();
    let sides = [
        (Side::F, &pair.f, pair.target.phi()),
        (Side::FPrime, &pair.f_prime, pair.target.phi_prime()),
    ];
    for (side, map, space) in sides {
        for (k, img) in map.images().iter().enumerate() {
            if space.position(img, delta_mem).is_none() {
                let nearest = space.nearest(img);
                failures.push(CodomainFailure {
                    side,
                    member: k,
                    nearest: nearest.map(|(i, _)| i),
                    gap: nearest.map_or(f64::INFINITY, |(_, g)| g),
                });
            }
        }
    }
    failures
}

/// Exhaustively checks equivariance, non-expansiveness of both operators,
/// codomains, and the partial homomorphism conditions on `T`.
pub fn certify(pair: &OperatorPair, tol: &Tolerances) -> Certificate {
    let phi = pair.source.phi();
    let phi_prime = pair.source.phi_prime();

    let mut residual = 0.0_f64;
    let mut witness = None;
    let mut untranslatable = Vec::new();
    for (i, f) in phi.members().iter().enumerate() {
        for (k, s) in pair.source.ops().iter().enumerate() {
            let composed = f.with_values(permuted(f.values(), s.perm()));
            let Some(j) = phi_prime.position(&composed, tol.delta_mem) else {
                untranslatable.push((i, k));
                residual = f64::INFINITY;
                witness.get_or_insert((i, k));
                continue;
            };
            let lhs = pair.f_prime.image(j).values();
            let rhs = permuted(pair.f.image(i).values(), pair.t.image(k).perm());
            let gap = sup_gap(lhs, &rhs);
            if gap > residual {
                residual = gap;
                witness = Some((i, k));
            }
        }
    }

    let lipschitz_excess_f = lipschitz_excess(phi.members(), &pair.f);
    let lipschitz_excess_f_prime = lipschitz_excess(phi_prime.members(), &pair.f_prime);
    let codomain_failures = codomain_failures(pair, tol.delta_mem);
    let transformation = check_transformation_map(&pair.t);

    let codomain_ok = codomain_failures.is_empty();
    let homomorphism_ok = transformation.ok();
    let certified = residual <= tol.delta_num
        && lipschitz_excess_f <= tol.delta_num
        && lipschitz_excess_f_prime <= tol.delta_num
        && codomain_ok
        && homomorphism_ok;
    Certificate {
        equivariance_residual: residual,
        equivariance_witness: witness,
        lipschitz_excess_f,
        lipschitz_excess_f_prime,
        codomain_ok,
        codomain_failures,
        homomorphism_ok,
        transformation,
        untranslatable,
        certified,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RestrictionReport {
    /// `id ∉ S` or `Φ ⊄ Φ′`; `F′` may legitimately differ from `F` on `Φ ∩ Φ′`.
    NotApplicable { reason: String },
    /// `max_{φ∈Φ} ‖F′(φ) − F(φ)‖_∞` and the member attaining it.
    Applicable { max_gap: f64, witness: usize },
}

/// Measures how far `F′` restricted to `Φ` is from `F`, when the identity
/// lies in `S` and `Φ ⊆ Φ′`.
pub fn check_restriction(pair: &OperatorPair, tol: &Tolerances) -> RestrictionReport {
    let phi = pair.source.phi();
    let phi_prime = pair.source.phi_prime();
    if !pair.source.ops().iter().any(DomainMap::is_identity) {
        return RestrictionReport::NotApplicable {
            reason: "identity is not in S".into(),
        };
    }
    let mut max_gap = 0.0_f64;
    let mut witness = 0;
    for (i, f) in phi.members().iter().enumerate() {
        let Some(j) = phi_prime.position(f, tol.delta_mem) else {
            return RestrictionReport::NotApplicable {
                reason: format!("member {i} of Φ is not in Φ′"),
            };
        };
        let gap = sup_gap(pair.f_prime.image(j).values(), pair.f.image(i).values());
        if gap > max_gap {
            max_gap = gap;
            witness = i;
        }
    }
    RestrictionReport::Applicable { max_gap, witness }
}
