//! Admissibility of domain bijections with respect to a pair of measurement
//! spaces, the sets Π and Υ, and exhaustive checks of the non-expansiveness
//! bounds that hold on them.

use serde::Serialize;

use crate::domain::{
    permuted, right_action, sup_gap, DomainMap, FiniteDomain, Measurement, MeasurementSpace,
    PerceptionTriple,
};
use crate::error::{Error, Result};
use crate::metrics::{aut_pseudometric, domain_pseudometric, pi_distance};

/// One measurement `φ` for which `φs` has no match in `Φ′`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityFailure {
    /// Index of the offending map in the triple's list, when checking a triple.
    pub op: Option<usize>,
    pub member: usize,
    pub composed: Measurement,
    pub nearest: Option<usize>,
    /// Sup-norm gap to the nearest member of `Φ′` (infinite when `Φ′` is empty).
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Number of maps examined; zero means the verdict is vacuous.
    pub checked_ops: usize,
    pub failures: Vec<AdmissibilityFailure>,
}

/// Whether `s` is a `(Φ, Φ′)`-operation: `φs ∈ Φ′` for every `φ ∈ Φ`.
pub fn is_operation(
    s: &DomainMap,
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
    delta_mem: f64,
) -> Result<AdmissibilityReport> {
    if s.domain() != phi.domain() || phi.domain() != phi_prime.domain() {
        return Err(Error::DomainMismatch);
    }
    let mut failures = Vec::new();
    for (k, f) in phi.members().iter().enumerate() {
        let composed = right_action(f, s)?;
        if phi_prime.position(&composed, delta_mem).is_some() {
            continue;
        }
        let (nearest, gap) = match phi_prime.nearest(&composed) {
            Some((i, g)) => (Some(i), g),
            None => (None, f64::INFINITY),
        };
        failures.push(AdmissibilityFailure {
            op: None,
            member: k,
            composed,
            nearest,
            gap,
        });
    }
    Ok(AdmissibilityReport {
        admissible: failures.is_empty(),
        checked_ops: 1,
        failures,
    })
}

pub(crate) fn admissible(s: &DomainMap, phi: &MeasurementSpace, phi_prime: &MeasurementSpace, delta_mem: f64) -> Result<bool> {
    if s.domain() != phi.domain() || phi.domain() != phi_prime.domain() {
        return Err(Error::DomainMismatch);
    }
    Ok(phi.members().iter().all(|f| {
        let composed = f.with_values(permuted(f.values(), s.perm()));
        phi_prime.position(&composed, delta_mem).is_some()
    }))
}

/// Checks `S ⊆ Aut_{Φ,Φ′}(X)` and aggregates every failure.
pub fn validate_perception_triple(triple: &PerceptionTriple, delta_mem: f64) -> AdmissibilityReport {
    let mut failures = Vec::new();
    for (i, s) in triple.ops().iter().enumerate() {
        // domains were checked when the triple was built
        let report = is_operation(s, triple.phi(), triple.phi_prime(), delta_mem)
            .expect("perception triple shares one domain");
        failures.extend(report.failures.into_iter().map(|mut f| {
            f.op = Some(i);
            f
        }));
    }
    AdmissibilityReport {
        admissible: failures.is_empty(),
        checked_ops: triple.ops().len(),
        failures,
    }
}

/// Both computations behind the equivalence
/// `st ∈ Aut_{Φ,Φ′}(X) ⇔ t ∈ Aut_{Φs,Φ′}(X)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CompositionCheck {
    /// `st` checked directly against `(Φ, Φ′)`.
    pub direct: bool,
    /// `t` checked against the translated space `(Φs, Φ′)`.
    pub via_translated: bool,
}

impl CompositionCheck {
    pub fn agrees(&self) -> bool {
        self.direct == self.via_translated
    }

    pub fn admissible(&self) -> bool {
        self.direct
    }
}

/// Whether the composite `st` of two admissible maps is again admissible.
pub fn compose_admissible(
    s: &DomainMap,
    t: &DomainMap,
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
    delta_mem: f64,
) -> Result<CompositionCheck> {
    for (name, m) in [("s", s), ("t", t)] {
        if !admissible(m, phi, phi_prime, delta_mem)? {
            return Err(Error::Precondition(format!("{name} is not a (Φ,Φ′)-operation")));
        }
    }
    let st = s.compose(t)?;
    let direct = admissible(&st, phi, phi_prime, delta_mem)?;
    let translated = phi.translated(s, delta_mem)?;
    let via_translated = admissible(t, &translated, phi_prime, delta_mem)?;
    Ok(CompositionCheck {
        direct,
        via_translated,
    })
}

/// Pairs `(s, t)` of candidate indices with `s`, `t` and `st` admissible.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PiSet {
    pub pairs: Vec<(usize, usize)>,
}

/// Candidate indices `s` with both `s` and `s⁻¹` admissible.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct UpsilonSet {
    pub maps: Vec<usize>,
}

fn require_all_admissible(
    candidates: &[DomainMap],
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
    delta_mem: f64,
) -> Result<()> {
    for (i, s) in candidates.iter().enumerate() {
        if !admissible(s, phi, phi_prime, delta_mem)? {
            return Err(Error::Precondition(format!(
                "candidate {i} is not a (Φ,Φ′)-operation"
            )));
        }
    }
    Ok(())
}

/// Enumerates Π over the ordered pairs of `candidates`.
pub fn build_pi(
    candidates: &[DomainMap],
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
    delta_mem: f64,
) -> Result<PiSet> {
    require_all_admissible(candidates, phi, phi_prime, delta_mem)?;
    let mut pairs = Vec::new();
    for (i, s) in candidates.iter().enumerate() {
        for (j, t) in candidates.iter().enumerate() {
            if admissible(&s.compose(t)?, phi, phi_prime, delta_mem)? {
                pairs.push((i, j));
            }
        }
    }
    Ok(PiSet { pairs })
}

/// Enumerates Υ over `candidates`.
pub fn build_upsilon(
    candidates: &[DomainMap],
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
    delta_mem: f64,
) -> Result<UpsilonSet> {
    require_all_admissible(candidates, phi, phi_prime, delta_mem)?;
    let mut maps = Vec::new();
    for (i, s) in candidates.iter().enumerate() {
        if admissible(&s.inverse(), phi, phi_prime, delta_mem)? {
            maps.push(i);
        }
    }
    Ok(UpsilonSet { maps })
}

/// Largest amount by which an inequality `lhs ≤ rhs` is exceeded over an
/// exhaustive scan. Never negative: every scan includes a trivially tight case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub max_violation: f64,
    /// Indices of the worst case; layout is documented on each check.
    pub witness: Vec<usize>,
    pub cases: usize,
}

impl BoundReport {
    fn new() -> Self {
        BoundReport {
            max_violation: 0.0,
            witness: Vec::new(),
            cases: 0,
        }
    }

    fn record(&mut self, excess: f64, witness: impl FnOnce() -> Vec<usize>) {
        self.cases += 1;
        if excess > self.max_violation {
            self.max_violation = excess;
            self.witness = witness();
        }
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.max_violation <= slack
    }
}

/// `D_X^Φ(s(x1), s(x2)) ≤ D_X^{Φ′}(x1, x2)` over all point pairs.
/// Witness: `[x1, x2]`.
///
/// Admissibility of `s` is what makes the bound hold; the check itself runs
/// for any bijection so that non-admissible maps can serve as negative
/// controls.
pub fn check_operation_nonexpansive(
    s: &DomainMap,
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
) -> Result<BoundReport> {
    if s.domain() != phi.domain() || phi.domain() != phi_prime.domain() {
        return Err(Error::DomainMismatch);
    }
    let n = phi.domain().len();
    let mut report = BoundReport::new();
    for x1 in 0..n {
        for x2 in x1..n {
            let lhs = domain_pseudometric(phi, s.apply(x1), s.apply(x2))?.value;
            let rhs = domain_pseudometric(phi_prime, x1, x2)?.value;
            report.record(lhs - rhs, || vec![x1, x2]);
        }
    }
    Ok(report)
}

/// `D_Aut^Φ(s1t1, s2t2) ≤ D_Π((s1,t1),(s2,t2))` over all pairs of Π.
/// Witness: `[s1, t1, s2, t2]` as candidate indices.
pub fn check_pi_continuity(
    pi: &PiSet,
    candidates: &[DomainMap],
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
) -> Result<BoundReport> {
    let composites = pi
        .pairs
        .iter()
        .map(|&(s, t)| candidates[s].compose(&candidates[t]))
        .collect::<Result<Vec<_>>>()?;
    let mut report = BoundReport::new();
    for (a, &(s1, t1)) in pi.pairs.iter().enumerate() {
        for (b, &(s2, t2)) in pi.pairs.iter().enumerate() {
            let lhs = aut_pseudometric(phi, &composites[a], &composites[b])?.value;
            let rhs = pi_distance(
                (&candidates[s1], &candidates[t1]),
                (&candidates[s2], &candidates[t2]),
                phi,
                phi_prime,
            )?;
            report.record(lhs - rhs, || vec![s1, t1, s2, t2]);
        }
    }
    Ok(report)
}

/// `D_Aut^Φ(s1⁻¹, s2⁻¹) ≤ D_Aut^{Φ′}(s1, s2)` over all pairs of Υ.
/// Witness: `[s1, s2]` as candidate indices.
pub fn check_upsilon_continuity(
    upsilon: &UpsilonSet,
    candidates: &[DomainMap],
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
) -> Result<BoundReport> {
    let inverses: Vec<DomainMap> = upsilon.maps.iter().map(|&i| candidates[i].inverse()).collect();
    let mut report = BoundReport::new();
    for (a, &i) in upsilon.maps.iter().enumerate() {
        for (b, &j) in upsilon.maps.iter().enumerate() {
            let lhs = aut_pseudometric(phi, &inverses[a], &inverses[b])?.value;
            let rhs = aut_pseudometric(phi_prime, &candidates[i], &candidates[j])?.value;
            report.record(lhs - rhs, || vec![i, j]);
        }
    }
    Ok(report)
}

/// `‖φt − φ̄s‖_∞ ≤ D_Aut^Φ(t, s) + ‖φ − φ̄‖_∞` over all quadruples.
/// Witness: `[φ, φ̄, t, s]`.
pub fn check_action_continuity(phi: &MeasurementSpace, ops: &[DomainMap]) -> Result<BoundReport> {
    phi.require_nonempty()?;
    if ops.iter().any(|s| s.domain() != phi.domain()) {
        return Err(Error::DomainMismatch);
    }
    let m = phi.len();
    let k = ops.len();
    let mut aut = vec![0.0; k * k];
    for (a, t) in ops.iter().enumerate() {
        for (b, s) in ops.iter().enumerate() {
            aut[a * k + b] = aut_pseudometric(phi, t, s)?.value;
        }
    }
    let acted: Vec<Vec<Vec<f64>>> = phi
        .members()
        .iter()
        .map(|f| ops.iter().map(|s| permuted(f.values(), s.perm())).collect())
        .collect();
    let mut report = BoundReport::new();
    for p in 0..m {
        for q in 0..m {
            let gap = sup_gap(phi.member(p).values(), phi.member(q).values());
            for a in 0..k {
                for b in 0..k {
                    let lhs = sup_gap(&acted[p][a], &acted[q][b]);
                    report.record(lhs - (aut[a * k + b] + gap), || vec![p, q, a, b]);
                }
            }
        }
    }
    Ok(report)
}

/// Every bijection of a domain with at most seven points, in lexicographic
/// order of permutations.
pub fn enumerate_aut(domain: &FiniteDomain) -> Result<Vec<DomainMap>> {
    const MAX_POINTS: usize = 7;
    let n = domain.len();
    if n > MAX_POINTS {
        return Err(Error::Precondition(format!(
            "full Aut(X) enumeration is limited to {MAX_POINTS} points, domain has {n}"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![DomainMap::new(domain, perm.clone())?];
    // next lexicographic permutation
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
        out.push(DomainMap::new(domain, perm.clone())?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    const DM: f64 = 1e-9;

    fn dom(n: usize) -> FiniteDomain {
        FiniteDomain::indexed(n).unwrap()
    }

    fn space(d: &FiniteDomain, rows: &[&[f64]]) -> MeasurementSpace {
        MeasurementSpace::from_values("S", d, rows.iter().map(|r| r.to_vec()).collect(), DM).unwrap()
    }

    fn perm(d: &FiniteDomain, p: &[usize]) -> DomainMap {
        DomainMap::new(d, p.to_vec()).unwrap()
    }

    #[test]
    fn identity_admissible_iff_subset() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 0.0, 0.0]]);
        let phi_p = space(&d, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let id = DomainMap::identity(&d);
        assert!(is_operation(&id, &phi, &phi_p, DM).unwrap().admissible);

        let phi2 = space(&d, &[&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[2.0, 2.0, 2.0]]);
        let r = is_operation(&id, &phi2, &phi_p, DM).unwrap();
        assert!(!r.admissible);
        let named: Vec<usize> = r.failures.iter().map(|f| f.member).collect();
        assert_eq!(named, vec![1, 2]);
        assert!(r.failures.iter().all(|f| f.gap > DM));
    }

    #[test]
    fn three_point_cycle() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 0.0, 0.0]]);
        // (φ∘s)[i] = φ[s(i)]; s(1) = 0 moves the bump to index 1
        let s = perm(&d, &[2, 0, 1]);
        assert_eq!(right_action(phi.member(0), &s).unwrap().values(), &[0.0, 1.0, 0.0]);
        assert!(is_operation(&s, &phi, &space(&d, &[&[0.0, 1.0, 0.0]]), DM).unwrap().admissible);
        let r = is_operation(&s, &phi, &space(&d, &[&[0.0, 0.0, 1.0]]), DM).unwrap();
        assert!(!r.admissible);
        assert_eq!(r.failures[0].nearest, Some(0));
        assert_eq!(r.failures[0].gap, 1.0);
    }

    #[test]
    fn empty_target_space_reports_infinite_gap() {
        let d = dom(2);
        let phi = space(&d, &[&[1.0, 0.0]]);
        let empty = space(&d, &[]);
        let r = is_operation(&DomainMap::identity(&d), &phi, &empty, DM).unwrap();
        assert_eq!(r.failures[0].nearest, None);
        assert!(r.failures[0].gap.is_infinite());
    }

    #[test]
    fn triple_validation() {
        let d = dom(4);
        let phi = Arc::new(space(&d, &[&[1.0, 2.0, 0.0, 0.0]]));
        let phi_p = Arc::new(space(&d, &[&[0.0, 1.0, 2.0, 0.0], &[0.0, 0.0, 1.0, 2.0]]));
        let empty = PerceptionTriple::new(phi.clone(), phi_p.clone(), vec![]).unwrap();
        let r = validate_perception_triple(&empty, DM);
        assert!(r.admissible);
        assert_eq!(r.checked_ops, 0);

        // φs = (0,1,2,0) needs s = [3,0,1,2]; φs = (0,0,1,2) needs [2,3,0,1]
        let s1 = perm(&d, &[3, 0, 1, 2]);
        let s2 = perm(&d, &[2, 3, 0, 1]);
        let good = PerceptionTriple::new(phi.clone(), phi_p.clone(), vec![s1.clone(), s2.clone()]).unwrap();
        assert!(validate_perception_triple(&good, DM).admissible);

        // rogue: flip two entries of a valid permutation
        let rogue = perm(&d, &[3, 1, 0, 2]);
        let bad = PerceptionTriple::new(phi, phi_p, vec![s1, rogue, s2]).unwrap();
        let r = validate_perception_triple(&bad, DM);
        assert!(!r.admissible);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].op, Some(1));
    }

    #[test]
    fn compose_admissible_identity_and_inverse() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 0.0, 0.0]]);
        let s = perm(&d, &[2, 0, 1]);
        let phi_p = space(&d, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let c = compose_admissible(&s, &s.inverse(), &phi, &phi_p, DM).unwrap();
        assert!(c.direct && c.agrees());

        // Φ ⊄ Φ′: identity is not admissible, so s s⁻¹ is not either
        let phi_p2 = space(&d, &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let c = compose_admissible(&s, &s.inverse(), &phi, &phi_p2, DM).unwrap();
        assert!(!c.direct && c.agrees());
    }

    #[test]
    fn compose_admissible_precondition() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 0.0, 0.0]]);
        let phi_p = space(&d, &[&[1.0, 0.0, 0.0]]);
        let s = perm(&d, &[2, 0, 1]);
        let id = DomainMap::identity(&d);
        assert!(matches!(
            compose_admissible(&s, &id, &phi, &phi_p, DM),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn compose_admissible_with_invariant_left_factor() {
        // s ∈ Aut_Φ(X): Φs ⊆ Φ, so st is admissible whenever t is
        let d = dom(4);
        let phi = space(&d, &[&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0]]);
        let s = perm(&d, &[1, 2, 3, 0]);
        assert!(phi.translated(&s, DM).unwrap().is_subset_of(&phi, DM));
        let phi_p = space(
            &d,
            &[&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 1.0], &[1.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 1.0]],
        );
        let t = perm(&d, &[0, 2, 1, 3]);
        assert!(is_operation(&t, &phi, &phi_p, DM).unwrap().admissible);
        let c = compose_admissible(&s, &t, &phi, &phi_p, DM).unwrap();
        assert!(c.direct && c.agrees());
    }

    #[test]
    fn compose_admissible_finds_violating_pair() {
        // exhaustive search over Aut(X) on four points, Φ′ = Φ ∪ ⋃ Φs for a
        // few generators so that some composites escape Φ′
        let d = dom(4);
        let phi = space(&d, &[&[3.0, 1.0, 0.0, 0.0], &[0.0, 2.0, 0.0, 5.0]]);
        let gens = [perm(&d, &[1, 2, 3, 0]), perm(&d, &[1, 0, 2, 3])];
        let mut rows = phi.members().to_vec();
        for g in &gens {
            rows.extend(phi.members().iter().map(|f| right_action(f, g).unwrap()));
        }
        let phi_p = MeasurementSpace::new("P'", &d, rows, DM).unwrap();
        let admissible_maps: Vec<DomainMap> = enumerate_aut(&d)
            .unwrap()
            .into_iter()
            .filter(|s| is_operation(s, &phi, &phi_p, DM).unwrap().admissible)
            .collect();
        let mut found = false;
        for s in &admissible_maps {
            for t in &admissible_maps {
                let c = compose_admissible(s, t, &phi, &phi_p, DM).unwrap();
                assert!(c.agrees());
                found |= !c.direct;
            }
        }
        assert!(found, "no violating pair among admissible maps");
    }

    #[test]
    fn pi_and_upsilon_small_cases() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 0.0, 0.0]]);
        let id = DomainMap::identity(&d);
        let pi = build_pi(&[id.clone()], &phi, &phi, DM).unwrap();
        assert_eq!(pi.pairs, vec![(0, 0)]);
        let ups = build_upsilon(&[id], &phi, &phi, DM).unwrap();
        assert_eq!(ups.maps, vec![0]);

        // an admissible involution lies in Υ
        let phi_p = space(&d, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let swap = perm(&d, &[1, 0, 2]);
        let ups = build_upsilon(&[swap], &phi, &phi_p, DM).unwrap();
        assert_eq!(ups.maps, vec![0]);
    }

    #[test]
    fn upsilon_excludes_asymmetric_maps() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 2.0, 0.0]]);
        // s = [1,2,0]: φs = (2,0,1); s⁻¹ = [2,0,1]: φs⁻¹ = (0,1,2)
        let s = perm(&d, &[1, 2, 0]);
        let phi_p = space(&d, &[&[2.0, 0.0, 1.0]]);
        assert!(is_operation(&s, &phi, &phi_p, DM).unwrap().admissible);
        assert!(!is_operation(&s.inverse(), &phi, &phi_p, DM).unwrap().admissible);
        assert!(build_upsilon(&[s], &phi, &phi_p, DM).unwrap().maps.is_empty());
    }

    #[test]
    fn pi_over_closed_candidates_is_complete() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 2.0, 3.0], &[2.0, 3.0, 1.0], &[3.0, 1.0, 2.0]]);
        let rot: Vec<DomainMap> = (0..3)
            .map(|k| perm(&d, &[k % 3, (k + 1) % 3, (k + 2) % 3]))
            .collect();
        let pi = build_pi(&rot, &phi, &phi, DM).unwrap();
        assert_eq!(pi.pairs.len(), 9);
    }

    #[test]
    fn pi_partial_rotations_strict_subset() {
        // shifts by −1, 0, +1 on a 6-cycle; Φ′ admits only those shifts of Φ
        let n = 6;
        let d = dom(n);
        let shift = |k: isize| perm(&d, &(0..n).map(|i| (i as isize + k).rem_euclid(n as isize) as usize).collect::<Vec<_>>());
        let phi = space(&d, &[&[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]]);
        let cands = vec![shift(-1), shift(0), shift(1)];
        let rows = cands.iter().map(|s| right_action(phi.member(0), s).unwrap()).collect();
        let phi_p = MeasurementSpace::new("P'", &d, rows, DM).unwrap();
        let pi = build_pi(&cands, &phi, &phi_p, DM).unwrap();
        // exhaustive oracle: st is a shift by a+b, admissible iff |a+b| ≤ 1
        let offsets = [-1isize, 0, 1];
        let expected: Vec<(usize, usize)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| (offsets[i] + offsets[j]).abs() <= 1)
            .collect();
        assert_eq!(pi.pairs, expected);
        assert_eq!(pi.pairs.len(), 7);
    }

    #[test]
    fn nonexpansive_operation_and_negative_control() {
        let d = dom(3);
        let phi = space(&d, &[&[1.0, 1.0, 0.0]]);
        let id = DomainMap::identity(&d);
        let r = check_operation_nonexpansive(&id, &phi, &phi).unwrap();
        assert_eq!(r.max_violation, 0.0);

        // s is not admissible for (Φ, Φ′ = Φ): moves the 0 onto point 0
        let s = perm(&d, &[2, 0, 1]);
        assert!(!is_operation(&s, &phi, &phi, DM).unwrap().admissible);
        let r = check_operation_nonexpansive(&s, &phi, &phi).unwrap();
        assert!(r.max_violation > 0.5, "{r:?}");
        assert_eq!(r.witness, vec![0, 1]);
    }

    #[test]
    fn action_continuity_trivial_cases() {
        let d = dom(3);
        let phi = space(&d, &[&[0.0, 1.0, 2.0], &[0.5, 0.5, 3.0]]);
        let ops = vec![DomainMap::identity(&d), perm(&d, &[1, 2, 0])];
        let r = check_action_continuity(&phi, &ops).unwrap();
        assert!(r.holds(1e-12));
        assert_eq!(r.cases, 16);
        // t = s, φ ≠ φ̄: the left side is exactly ‖φ − φ̄‖
        for s in &ops {
            let a = right_action(phi.member(0), s).unwrap();
            let b = right_action(phi.member(1), s).unwrap();
            assert_eq!(
                crate::domain::uniform_distance(&a, &b).unwrap(),
                crate::domain::uniform_distance(phi.member(0), phi.member(1)).unwrap()
            );
        }
    }

    #[test]
    fn aut_enumeration() {
        let d = dom(4);
        let all = enumerate_aut(&d).unwrap();
        assert_eq!(all.len(), 24);
        assert!(all[0].is_identity());
        let mut perms: Vec<Vec<usize>> = all.iter().map(|s| s.perm().to_vec()).collect();
        perms.dedup();
        assert_eq!(perms.len(), 24);
        assert!(enumerate_aut(&dom(8)).is_err());
    }

    /// Steps `φ_a = 1[x < a]` and `φ′_b = 1[x > b]` on `{-3, …, 3}` with the
    /// reflection `x ↦ −x`. With `a > 0` and `b < 0` the reflection is
    /// admissible and `D^{Φ′}(0, 2) = 0` while `|φ_1(0) − φ_1(2)| = 1`. Letting
    /// `b = 0` into `Φ′` makes the same distance 1.
    #[test]
    fn step_functions_are_not_continuous_across_spaces() {
        let xs: Vec<f64> = (-3..=3).map(f64::from).collect();
        let d = FiniteDomain::new(xs.iter().map(|x| format!("{x}"))).unwrap();
        let phi_a = |a: f64| xs.iter().map(|&x| if x >= a { 0.0 } else { 1.0 }).collect::<Vec<_>>();
        let phi_b = |b: f64| xs.iter().map(|&x| if x <= b { 0.0 } else { 1.0 }).collect::<Vec<_>>();
        let phi = MeasurementSpace::from_values("Phi", &d, (1..=3).map(|a| phi_a(a as f64)).collect(), DM).unwrap();
        let strict = MeasurementSpace::from_values("PhiPrime", &d, (1..=3).map(|b| phi_b(-b as f64)).collect(), DM).unwrap();
        let reflect = DomainMap::new(&d, (0..7).rev().collect()).unwrap();
        assert!(is_operation(&reflect, &phi, &strict, DM).unwrap().admissible);

        let (zero, two) = (d.index_of("0").unwrap(), d.index_of("2").unwrap());
        assert_eq!(domain_pseudometric(&strict, zero, two).unwrap().value, 0.0);
        let phi_1 = phi.member(0);
        assert_eq!((phi_1.value(zero) - phi_1.value(two)).abs(), 1.0);
        let r = check_operation_nonexpansive(&reflect, &phi, &strict).unwrap();
        assert_eq!(r.max_violation, 0.0);

        let closed = MeasurementSpace::from_values("PhiPrime", &d, (0..=3).map(|b| phi_b(-b as f64)).collect(), DM).unwrap();
        assert_eq!(domain_pseudometric(&closed, zero, two).unwrap().value, 1.0);
    }
}
