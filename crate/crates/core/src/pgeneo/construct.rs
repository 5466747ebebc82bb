//! Building new operator pairs from certified ones: composition, pointwise
//! aggregation `L*`, and convex combination.

use std::sync::Arc;

use serde::Serialize;

use super::aggregator::{check_aggregator_nonexpansive, Aggregator, AuditConfig};
use super::{certify, codomain_failures, Certificate, OperatorPair, TabulatedMap, TransformationMap};
use crate::domain::{Measurement, Tolerances};
use crate::error::{Error, Result};

/// A constructed pair together with its certificate.
#[derive(Clone, Debug)]
pub struct Constructed {
    pub pair: OperatorPair,
    pub certificate: Certificate,
}

impl Serialize for Constructed {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.certificate.serialize(serializer)
    }
}

fn require_certified(pair: &OperatorPair, what: &str, tol: &Tolerances) -> Result<()> {
    if certify(pair, tol).certified {
        Ok(())
    } else {
        Err(Error::Uncertified(what.to_string()))
    }
}

/// `(F₂∘F₁, F₂′∘F₁′, T₂∘T₁)`.
pub fn compose(first: &OperatorPair, second: &OperatorPair, tol: &Tolerances) -> Result<Constructed> {
    if !(Arc::ptr_eq(first.target(), second.source()) || first.target() == second.source()) {
        return Err(Error::TripleMismatch(
            "target triple of the first pair is not the source of the second".into(),
        ));
    }
    require_certified(first, "first operand", tol)?;
    require_certified(second, "second operand", tol)?;

    let through = |outer: &TabulatedMap, inner: &TabulatedMap, space: &crate::domain::MeasurementSpace| {
        let images = inner
            .images()
            .iter()
            .enumerate()
            .map(|(k, img)| {
                let j = space.position(img, tol.delta_mem).ok_or_else(|| {
                    Error::Uncertified(format!("image of member {k} left the intermediate space"))
                })?;
                Ok(outer.image(j).clone())
            })
            .collect::<Result<Vec<_>>>()?;
        TabulatedMap::new(outer.codomain(), images)
    };
    let f = through(second.f(), first.f(), second.source().phi())?;
    let f_prime = through(second.f_prime(), first.f_prime(), second.source().phi_prime())?;

    let t1 = first.transformation();
    let t2 = second.transformation();
    let assignment = t1.assignment().iter().map(|&q| t2.assignment()[q]).collect();
    let t = TransformationMap::new(t1.source_ops().to_vec(), t2.target_ops().to_vec(), assignment)?;

    let pair = OperatorPair::new(
        first.source().clone(),
        second.target().clone(),
        f,
        f_prime,
        Arc::new(t),
    )?;
    let certificate = certify(&pair, tol);
    if !certificate.certified {
        return Err(Error::Uncertified("composite of certified pairs failed certification".into()));
    }
    Ok(Constructed { pair, certificate })
}

fn check_parts(parts: &[OperatorPair], tol: &Tolerances) -> Result<()> {
    let Some(head) = parts.first() else {
        return Err(Error::Precondition("at least one operator pair is required".into()));
    };
    for p in &parts[1..] {
        head.check_same_setting(p)?;
    }
    for (i, p) in parts.iter().enumerate() {
        require_certified(p, &format!("part {i}"), tol)?;
    }
    Ok(())
}

fn pointwise(
    maps: &[&TabulatedMap],
    mut fuse: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<TabulatedMap> {
    let head = maps[0];
    let mut column = vec![0.0; maps.len()];
    let images = (0..head.len())
        .map(|k| {
            let n = head.image(k).len();
            let mut values = Vec::with_capacity(n);
            for y in 0..n {
                for (c, m) in column.iter_mut().zip(maps) {
                    *c = m.image(k).value(y);
                }
                values.push(fuse(&column)?);
            }
            Measurement::new(head.codomain(), values)
        })
        .collect::<Result<Vec<_>>>()?;
    TabulatedMap::new(head.codomain(), images)
}

fn fuse_parts(parts: &[OperatorPair], fuse: impl Fn(&[f64]) -> Result<f64>) -> Result<OperatorPair> {
    let fs: Vec<&TabulatedMap> = parts.iter().map(OperatorPair::f).collect();
    let fps: Vec<&TabulatedMap> = parts.iter().map(OperatorPair::f_prime).collect();
    let head = &parts[0];
    OperatorPair::new(
        head.source().clone(),
        head.target().clone(),
        pointwise(&fs, &fuse)?,
        pointwise(&fps, &fuse)?,
        head.transformation().clone(),
    )
}

/// `(L*(F₁,…,Fₙ), L*(F₁′,…,Fₙ′))`.
///
/// The result is certified only when its images land in `Ψ` and `Ψ′`; when
/// they do not, it is returned uncertified with the escaping members listed
/// in the certificate.
pub fn combine(
    l: &Aggregator,
    parts: &[OperatorPair],
    tol: &Tolerances,
    audit: AuditConfig,
) -> Result<Constructed> {
    check_parts(parts, tol)?;
    if parts.len() != l.arity() {
        return Err(Error::InvalidAggregator(format!(
            "aggregator takes {} inputs but {} pairs were given",
            l.arity(),
            parts.len()
        )));
    }
    let report = check_aggregator_nonexpansive(l, audit);
    if report.max_excess > tol.delta_num {
        return Err(Error::AuditFailed {
            excess: report.max_excess,
        });
    }
    if l.requires_nonnegative() {
        let negative = parts.iter().any(|p| {
            p.f()
                .images()
                .iter()
                .chain(p.f_prime().images())
                .any(|m| m.values().iter().any(|v| *v < 0.0))
        });
        if negative {
            return Err(Error::InvalidAggregator(
                "power mean needs nonnegative operator outputs".into(),
            ));
        }
    }
    let pair = fuse_parts(parts, |xs| l.apply(xs))?;
    let certificate = certify(&pair, tol);
    Ok(Constructed { pair, certificate })
}

/// `Σ aᵢ(Fᵢ, Fᵢ′)`, required to stay inside `Ψ` and `Ψ′`.
pub fn convex_combine(parts: &[OperatorPair], weights: &[f64], tol: &Tolerances) -> Result<Constructed> {
    let l = Aggregator::convex(weights.to_vec())?;
    check_parts(parts, tol)?;
    if parts.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} pairs",
            weights.len(),
            parts.len()
        )));
    }
    let pair = fuse_parts(parts, |xs| l.apply(xs))?;
    let failures = codomain_failures(&pair, tol.delta_mem);
    if !failures.is_empty() {
        return Err(Error::ConvexityFailure(failures));
    }
    let certificate = certify(&pair, tol);
    Ok(Constructed { pair, certificate })
}
