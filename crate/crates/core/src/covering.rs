//! Farthest-point-first ε-nets over finite pseudo-metric spaces: points of
//! `X` under `D_X^Ω`, domain bijections under `D_Aut^Φ`, and families of
//! operator pairs under `D_P-GENEO`.
//!
//! Every finite pseudo-metric space is complete, so a net is all that is
//! needed to exhibit compactness of the supplied collection. Claims are about
//! the collection handed in, never about every operator between two triples.

use serde::Serialize;

use crate::domain::{sup_gap, DomainMap, MeasurementSpace, Tolerances};
use crate::error::{Error, Result};
use crate::metrics::{aut_pseudometric, domain_pseudometric, pgeneo_distance};
use crate::pgeneo::{certify, OperatorPair};

/// An internal ε-net: centers are members of the covered collection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsilonNet {
    pub epsilon: f64,
    /// Collection indices of the centers, in selection order.
    pub center_indices: Vec<usize>,
    pub covering_radius_achieved: f64,
    /// For each element, the position in `center_indices` of its nearest
    /// center (earliest center on ties).
    pub assignment: Vec<usize>,
}

impl EpsilonNet {
    pub fn len(&self) -> usize {
        self.center_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.center_indices.is_empty()
    }

    /// Number of elements assigned to each center.
    pub fn histogram(&self) -> Vec<usize> {
        let mut counts = vec![0; self.center_indices.len()];
        for &a in &self.assignment {
            counts[a] += 1;
        }
        counts
    }
}

/// Dense symmetric distance matrix, checked to look like a pseudo-metric.
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn build(n: usize, mut metric: impl FnMut(usize, usize) -> Result<f64>) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = metric(i, j)?;
            }
        }
        let m = DistanceMatrix { n, data };
        m.spot_check()?;
        Ok(m)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    fn spot_check(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.get(i, i) != 0.0 {
                return Err(Error::NotPseudoMetric(format!("d({i},{i}) = {}", self.get(i, i))));
            }
            for j in 0..n {
                let d = self.get(i, j);
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::NotPseudoMetric(format!("d({i},{j}) = {d}")));
                }
                if d != self.get(j, i) {
                    return Err(Error::NotPseudoMetric(format!("d({i},{j}) ≠ d({j},{i})")));
                }
            }
        }
        let slack = Tolerances::DEFAULT_DELTA_NUM * (1.0 + self.diameter());
        for k in (0..n).step_by((n / 8).max(1)) {
            for i in 0..n {
                for j in 0..n {
                    if self.get(i, j) > self.get(i, k) + self.get(k, j) + slack {
                        return Err(Error::NotPseudoMetric(format!(
                            "triangle inequality fails at ({i},{k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Greedy farthest-point cover over a precomputed distance matrix.
///
/// Starts from element 0 and repeatedly adds the element farthest from the
/// current centers (lowest index on ties) until every element is within
/// `epsilon` of a center.
pub fn greedy_net_from_matrix(d: &DistanceMatrix, epsilon: f64) -> Result<EpsilonNet> {
    check_epsilon(epsilon)?;
    let n = d.len();
    if n == 0 {
        return Err(Error::EmptyCollection);
    }
    let mut centers = vec![0];
    let mut nearest: Vec<f64> = (0..n).map(|i| d.get(0, i)).collect();
    let mut assignment = vec![0; n];
    loop {
        let (far, radius) = nearest
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bd), (i, &di)| if di > bd { (i, di) } else { (bi, bd) });
        if radius <= epsilon {
            return Ok(EpsilonNet {
                epsilon,
                center_indices: centers,
                covering_radius_achieved: radius,
                assignment,
            });
        }
        let pos = centers.len();
        centers.push(far);
        for i in 0..n {
            let di = d.get(far, i);
            if di < nearest[i] {
                nearest[i] = di;
                assignment[i] = pos;
            }
        }
    }
}

/// Greedy farthest-point cover of `n` elements under a distance oracle.
pub fn greedy_net(n: usize, metric: impl FnMut(usize, usize) -> Result<f64>, epsilon: f64) -> Result<EpsilonNet> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::EmptyCollection);
    }
    greedy_net_from_matrix(&DistanceMatrix::build(n, metric)?, epsilon)
}

/// How much `D_X^Ω` moves when `Ω` is replaced by an internal net of itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub epsilon_prime: f64,
    pub net_size: usize,
    /// `max_{x1,x2} |D_X^Ω(x1,x2) − D_X^{Ω_ε′}(x1,x2)|`.
    pub max_change: f64,
    pub holds: bool,
}

/// Checks that an ε′-net of `Ω` (under the sup norm) reproduces `D_X^Ω` up
/// to `2ε′` on every point pair.
pub fn check_stability_transfer(omega: &MeasurementSpace, epsilon_prime: f64, tol: &Tolerances) -> Result<StabilityReport> {
    omega.require_nonempty()?;
    let members = omega.members();
    let net = greedy_net(
        members.len(),
        |i, j| Ok(sup_gap(members[i].values(), members[j].values())),
        epsilon_prime,
    )?;
    let sub = MeasurementSpace::new(
        format!("{}_net", omega.label()),
        omega.domain(),
        net.center_indices.iter().map(|&i| members[i].clone()).collect(),
        0.0,
    )?;
    let n = omega.domain().len();
    let mut max_change = 0.0_f64;
    for x1 in 0..n {
        for x2 in x1 + 1..n {
            let full = domain_pseudometric(omega, x1, x2)?.value;
            let coarse = domain_pseudometric(&sub, x1, x2)?.value;
            max_change = max_change.max((full - coarse).abs());
        }
    }
    Ok(StabilityReport {
        epsilon_prime,
        net_size: net.len(),
        max_change,
        holds: max_change <= 2.0 * epsilon_prime + tol.delta_num,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainCover {
    pub net: EpsilonNet,
    pub stability: StabilityReport,
}

/// ε-net of the points of `X` under `D_X^Ω`, plus the stability check at
/// `ε′ = ε`.
pub fn cover_domain(omega: &MeasurementSpace, epsilon: f64, tol: &Tolerances) -> Result<DomainCover> {
    omega.require_nonempty()?;
    let net = greedy_net(
        omega.domain().len(),
        |a, b| Ok(domain_pseudometric(omega, a, b)?.value),
        epsilon,
    )?;
    let stability = check_stability_transfer(omega, epsilon, tol)?;
    Ok(DomainCover { net, stability })
}

/// ε-net of a list of bijections under `D_Aut^Φ`. The list is expected to be
/// admissible for the triple it came from.
pub fn cover_operations(ops: &[DomainMap], phi: &MeasurementSpace, epsilon: f64) -> Result<EpsilonNet> {
    greedy_net(
        ops.len(),
        |a, b| Ok(aut_pseudometric(phi, &ops[a], &ops[b])?.value),
        epsilon,
    )
}

/// ε-net of a family of certified pairs sharing triples and `T`, under
/// `D_P-GENEO`.
pub fn cover_operator_family(family: &[OperatorPair], epsilon: f64, tol: &Tolerances) -> Result<EpsilonNet> {
    check_epsilon(epsilon)?;
    let Some(head) = family.first() else {
        return Err(Error::EmptyCollection);
    };
    for (i, p) in family.iter().enumerate() {
        head.check_same_setting(p)?;
        if !certify(p, tol).certified {
            return Err(Error::Uncertified(format!("family member {i}")));
        }
    }
    greedy_net(family.len(), |a, b| pgeneo_distance(&family[a], &family[b]), epsilon)
}

/// Largest pairwise distance of a collection.
pub fn diameter(n: usize, metric: impl FnMut(usize, usize) -> Result<f64>) -> Result<f64> {
    Ok(DistanceMatrix::build(n, metric)?.diameter())
}
