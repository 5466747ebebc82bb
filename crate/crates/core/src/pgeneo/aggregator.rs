use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::Tolerances;
use crate::error::{Error, Result};

/// Pointwise fusion rule `L: Rⁿ → R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AggregatorKind {
    Max,
    Min,
    ConvexCombination { weights: Vec<f64> },
    /// `(Σ wᵢ xᵢᵖ)^(1/p)` on nonnegative inputs.
    PowerMean { p: f64, weights: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregator {
    kind: AggregatorKind,
    arity: usize,
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no weights given".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > Tolerances::DEFAULT_DELTA_NUM {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

impl Aggregator {
    pub fn max(arity: usize) -> Result<Self> {
        Self::with_kind(AggregatorKind::Max, arity)
    }

    pub fn min(arity: usize) -> Result<Self> {
        Self::with_kind(AggregatorKind::Min, arity)
    }

    pub fn convex(weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights)?;
        let arity = weights.len();
        Self::with_kind(AggregatorKind::ConvexCombination { weights }, arity)
    }

    pub fn power_mean(p: f64, weights: Vec<f64>) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidAggregator(format!("power mean needs p ≥ 1, got {p}")));
        }
        validate_weights(&weights)?;
        let arity = weights.len();
        Self::with_kind(AggregatorKind::PowerMean { p, weights }, arity)
    }

    fn with_kind(kind: AggregatorKind, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidAggregator("arity must be positive".into()));
        }
        Ok(Aggregator { kind, arity })
    }

    pub fn kind(&self) -> &AggregatorKind {
        &self.kind
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn requires_nonnegative(&self) -> bool {
        matches!(self.kind, AggregatorKind::PowerMean { .. })
    }

    pub fn apply(&self, xs: &[f64]) -> Result<f64> {
        if xs.len() != self.arity {
            return Err(Error::InvalidAggregator(format!(
                "expected {} inputs, got {}",
                self.arity,
                xs.len()
            )));
        }
        Ok(match &self.kind {
            AggregatorKind::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            AggregatorKind::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
            AggregatorKind::ConvexCombination { weights } => {
                weights.iter().zip(xs).map(|(w, x)| w * x).sum()
            }
            AggregatorKind::PowerMean { p, weights } => {
                if let Some(x) = xs.iter().find(|x| **x < 0.0) {
                    return Err(Error::InvalidAggregator(format!(
                        "power mean is defined on nonnegative inputs, got {x}"
                    )));
                }
                let s: f64 = weights.iter().zip(xs).map(|(w, x)| w * x.powf(*p)).sum();
                s.powf(1.0 / p)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditConfig {
    pub trials: usize,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            trials: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    /// `max (|L(u) − L(v)| − ‖u − v‖_∞)` over the sampled pairs.
    pub max_excess: f64,
    pub trials: usize,
    pub worst: Option<(Vec<f64>, Vec<f64>)>,
}

/// Randomized audit of `|L(u) − L(v)| ≤ ‖u − v‖_∞`.
///
/// Pairs are drawn three ways: independent points, small perturbations of a
/// point, and perturbations near the origin (where the power mean is least
/// smooth).
pub fn check_aggregator_nonexpansive(l: &Aggregator, cfg: AuditConfig) -> AuditReport {
    const RANGE: f64 = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let low = if l.requires_nonnegative() { 0.0 } else { -RANGE };
    let n = l.arity();
    let mut report = AuditReport {
        max_excess: f64::NEG_INFINITY,
        trials: cfg.trials,
        worst: None,
    };
    for trial in 0..cfg.trials {
        let scale = match trial % 3 {
            0 => RANGE,
            1 => 10f64.powi(-rng.gen_range(1..8)),
            _ => 1e-3,
        };
        let u: Vec<f64> = (0..n)
            .map(|_| match trial % 3 {
                2 => rng.gen_range(0.0..scale),
                _ => rng.gen_range(low..RANGE),
            })
            .collect();
        let v: Vec<f64> = match trial % 3 {
            0 => (0..n).map(|_| rng.gen_range(low..RANGE)).collect(),
            _ => u
                .iter()
                .map(|x| {
                    let y = x + rng.gen_range(-scale..scale);
                    if l.requires_nonnegative() { y.max(0.0) } else { y }
                })
                .collect(),
        };
        let lu = l.apply(&u).expect("sampled inputs respect the domain");
        let lv = l.apply(&v).expect("sampled inputs respect the domain");
        let gap = u.iter().zip(&v).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
        let excess = (lu - lv).abs() - gap;
        if excess > report.max_excess {
            report.max_excess = excess;
            report.worst = Some((u, v));
        }
    }
    if cfg.trials == 0 {
        report.max_excess = 0.0;
    }
    report
}
