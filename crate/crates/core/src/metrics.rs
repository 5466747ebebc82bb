//! The pseudo-metrics on points, domain bijections, pairs of bijections,
//! operators, and operator pairs. Every supremum is an exact maximum over a
//! finite set.

use serde::Serialize;

use crate::domain::{DomainMap, MeasurementSpace};
use crate::error::{Error, Result};
use crate::pgeneo::{OperatorPair, TabulatedMap};

/// Where a maximum was attained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Member { member: usize },
    MemberPoint { member: usize, point: usize },
}

/// A pseudo-metric value with the first index (member, then point) at which
/// it is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub value: f64,
    pub witness: Witness,
}

/// `D_X^Ω(x1, x2) = max_ω |ω(x1) − ω(x2)|`.
pub fn domain_pseudometric(omega: &MeasurementSpace, x1: usize, x2: usize) -> Result<MetricReport> {
    omega.require_nonempty()?;
    omega.domain().check_point(x1)?;
    omega.domain().check_point(x2)?;
    let mut best = MetricReport {
        value: 0.0,
        witness: Witness::Member { member: 0 },
    };
    for (k, w) in omega.members().iter().enumerate() {
        let d = (w.value(x1) - w.value(x2)).abs();
        if d > best.value {
            best = MetricReport {
                value: d,
                witness: Witness::Member { member: k },
            };
        }
    }
    Ok(best)
}

/// `D_Aut^Ω(s1, s2) = max_ω ‖ωs1 − ωs2‖_∞`.
pub fn aut_pseudometric(omega: &MeasurementSpace, s1: &DomainMap, s2: &DomainMap) -> Result<MetricReport> {
    omega.require_nonempty()?;
    if s1.domain() != omega.domain() || s2.domain() != omega.domain() {
        return Err(Error::DomainMismatch);
    }
    let mut best = MetricReport {
        value: 0.0,
        witness: Witness::MemberPoint { member: 0, point: 0 },
    };
    for (k, w) in omega.members().iter().enumerate() {
        let v = w.values();
        for (x, (&a, &b)) in s1.perm().iter().zip(s2.perm()).enumerate() {
            let d = (v[a] - v[b]).abs();
            if d > best.value {
                best = MetricReport {
                    value: d,
                    witness: Witness::MemberPoint { member: k, point: x },
                };
            }
        }
    }
    Ok(best)
}

/// `D_Π((s1,t1),(s2,t2)) = D_Aut^Φ(s1,s2) + D_Aut^{Φ′}(t1,t2)`.
pub fn pi_distance(
    p1: (&DomainMap, &DomainMap),
    p2: (&DomainMap, &DomainMap),
    phi: &MeasurementSpace,
    phi_prime: &MeasurementSpace,
) -> Result<f64> {
    let first = aut_pseudometric(phi, p1.0, p2.0)?;
    let second = aut_pseudometric(phi_prime, p1.1, p2.1)?;
    Ok(first.value + second.value)
}

/// `D_NE^Ω(F1, F2) = max_ω ‖F1(ω) − F2(ω)‖_∞` over tabulated maps indexed by
/// the members of `omega`.
pub fn operator_distance(omega: &MeasurementSpace, f1: &TabulatedMap, f2: &TabulatedMap) -> Result<MetricReport> {
    omega.require_nonempty()?;
    for f in [f1, f2] {
        if f.len() < omega.len() {
            return Err(Error::UndefinedImage { member: f.len() });
        }
    }
    if f1.codomain() != f2.codomain() {
        return Err(Error::DomainMismatch);
    }
    let mut best = MetricReport {
        value: 0.0,
        witness: Witness::MemberPoint { member: 0, point: 0 },
    };
    for k in 0..omega.len() {
        let a = f1.image(k).values();
        let b = f2.image(k).values();
        for (y, (u, v)) in a.iter().zip(b).enumerate() {
            let d = (u - v).abs();
            if d > best.value {
                best = MetricReport {
                    value: d,
                    witness: Witness::MemberPoint { member: k, point: y },
                };
            }
        }
    }
    Ok(best)
}

/// `max{D_NE^Φ(F1,F2), D_NE^{Φ′}(F1′,F2′)}` for pairs over the same triples
/// and transformation map.
pub fn pgeneo_distance(p1: &OperatorPair, p2: &OperatorPair) -> Result<f64> {
    p1.check_same_setting(p2)?;
    let d = operator_distance(p1.source().phi(), p1.f(), p2.f())?;
    let d_prime = operator_distance(p1.source().phi_prime(), p1.f_prime(), p2.f_prime())?;
    Ok(d.value.max(d_prime.value))
}
