//! Instance builders: grid geometry, the nested-squares translation example,
//! the rotated digit raster, and randomized families used by the tests.

use std::sync::Arc;

use rand::Rng;

use crate::domain::{DomainMap, FiniteDomain, Measurement, MeasurementSpace, PerceptionTriple, Tolerances};
use crate::error::{Error, Result};
use crate::instance::{InstanceFile, OperatorSpec, TripleSpec};
use crate::pgeneo::{Aggregator, OperatorPair, TabulatedMap, TransformationMap};

/// Square grid with row-major points labelled `r{row}c{col}`.
pub fn grid_domain(size: usize) -> Result<FiniteDomain> {
    FiniteDomain::new((0..size * size).map(|i| format!("r{}c{}", i / size, i % size)))
}

/// The map `s` with `(φs)(r, c) = φ(r − dr, c − dc)`, indices taken modulo
/// the grid size.
pub fn grid_translation(domain: &FiniteDomain, size: usize, dr: isize, dc: isize) -> Result<DomainMap> {
    let n = size as isize;
    let perm = (0..size * size)
        .map(|i| {
            let r = (i / size) as isize;
            let c = (i % size) as isize;
            ((r - dr).rem_euclid(n) * n + (c - dc).rem_euclid(n)) as usize
        })
        .collect();
    DomainMap::new(domain, perm)
}

/// Quarter turn: `(φs)(r, c) = φ(c, size − 1 − r)`.
pub fn grid_quarter_turn(domain: &FiniteDomain, size: usize) -> Result<DomainMap> {
    let perm = (0..size * size)
        .map(|i| {
            let (r, c) = (i / size, i % size);
            c * size + (size - 1 - r)
        })
        .collect();
    DomainMap::new(domain, perm)
}

/// `(φs)(i) = φ(i + k mod n)` on an indexed cycle.
pub fn cyclic_shift(domain: &FiniteDomain, k: isize) -> Result<DomainMap> {
    let n = domain.len() as isize;
    DomainMap::new(domain, (0..n).map(|i| (i + k).rem_euclid(n) as usize).collect())
}

fn rows(space: &MeasurementSpace) -> Vec<Vec<f64>> {
    space.members().iter().map(|m| m.values().to_vec()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquaresConfig {
    pub grid: usize,
    pub side: usize,
    pub margin: usize,
    pub shift: (isize, isize),
    /// Also emit `cut_naive`, whose `F′` copies `F` on `Φ ∩ Φ′`.
    pub naive_variant: bool,
}

impl Default for SquaresConfig {
    fn default() -> Self {
        SquaresConfig {
            grid: 16,
            side: 8,
            margin: 2,
            shift: (4, 4),
            naive_variant: false,
        }
    }
}

/// Axis-aligned pixel square `[r0, r0 + len) × [c0, c0 + len)`.
#[derive(Clone, Copy, Debug)]
struct Square {
    r0: isize,
    c0: isize,
    len: isize,
}

impl Square {
    fn contains(&self, r: isize, c: isize) -> bool {
        r >= self.r0 && r < self.r0 + self.len && c >= self.c0 && c < self.c0 + self.len
    }

    fn shifted(&self, (dr, dc): (isize, isize)) -> Square {
        Square {
            r0: self.r0 + dr,
            c0: self.c0 + dc,
            ..*self
        }
    }
}

/// Grid version of the nested-squares example.
///
/// `Φ` holds patterns supported in `Q1`, `Φ′` holds patterns supported in
/// `Q1 + a`, and the single operation translates by `a`. The operator `cut`
/// keeps values on `Q2` (for `Φ`) or `Q2 + a` (for `Φ′`) and zeroes the rest.
/// One pattern of `Φ` lives in `Q1 ∩ (Q1 − a)` so that its translate lies in
/// both `Φ` and `Φ′`.
pub fn squares_instance(cfg: &SquaresConfig) -> Result<InstanceFile> {
    let SquaresConfig {
        grid,
        side,
        margin,
        shift,
        naive_variant,
    } = *cfg;
    if side == 0 || margin == 0 || margin >= side {
        return Err(Error::Precondition(format!(
            "need 0 < margin < side, got margin {margin} and side {side}"
        )));
    }
    let (n, l, e) = (grid as isize, side as isize, margin as isize);
    let origin = ((-shift.0).max(0), (-shift.1).max(0));
    let q1 = Square {
        r0: origin.0,
        c0: origin.1,
        len: l,
    };
    let q1p = q1.shifted(shift);
    for sq in [q1, q1p] {
        if sq.r0 < 0 || sq.c0 < 0 || sq.r0 + l > n || sq.c0 + l > n {
            return Err(Error::Precondition(format!(
                "a {side}×{side} square translated by {shift:?} does not fit in a {grid}×{grid} grid"
            )));
        }
    }
    let q2 = Square {
        r0: q1.r0 + e,
        c0: q1.c0 + e,
        len: (l - 2 * e).max(0),
    };
    let q2p = q2.shifted(shift);

    let domain = grid_domain(grid)?;
    let s = grid_translation(&domain, grid, shift.0, shift.1)?;
    let dm = Tolerances::default().delta_mem;
    let pattern = |f: &dyn Fn(isize, isize) -> Option<f64>| -> Result<Measurement> {
        let values = (0..grid * grid)
            .map(|i| f((i / grid) as isize, (i % grid) as isize).unwrap_or(0.0))
            .collect();
        Measurement::new(&domain, values)
    };
    let local = move |sq: Square, r: isize, c: isize| sq.contains(r, c).then(|| (r - sq.r0, c - sq.c0));
    let lf = l as f64;

    let mut phi_members = vec![
        pattern(&|r, c| local(q1, r, c).map(|_| 1.0))?,
        pattern(&|r, c| local(q1, r, c).map(|(u, v)| (u + v + 1) as f64 / (2.0 * lf)))?,
        pattern(&|r, c| local(q1, r, c).map(|(u, v)| if (u + v) % 2 == 0 { 0.5 } else { 0.25 }))?,
        pattern(&|r, c| {
            local(q1, r, c).map(|(u, v)| {
                let d = (2 * u + 1 - l).abs().max((2 * v + 1 - l).abs());
                1.0 - d as f64 / (2.0 * lf)
            })
        })?,
    ];
    let overlap = pattern(&|r, c| {
        local(q1, r, c)
            .filter(|_| q1.contains(r + shift.0, c + shift.1))
            .map(|(u, _)| 0.75 - 0.25 * (u % 2) as f64)
    })?;
    if overlap.values().iter().any(|v| *v != 0.0) {
        let moved = crate::domain::right_action(&overlap, &s)?;
        phi_members.push(overlap);
        phi_members.push(moved);
    }
    let phi = MeasurementSpace::new("Phi", &domain, phi_members, dm)?;

    let mut phi_prime_members: Vec<Measurement> = phi.translated(&s, dm)?.members().to_vec();
    phi_prime_members.push(pattern(&|r, c| {
        local(q1p, r, c).map(|(u, v)| 1.0 - (u + v) as f64 / (2.0 * lf))
    })?);
    let phi_prime = MeasurementSpace::new("PhiPrime", &domain, phi_prime_members, dm)?;

    let cut = |m: &Measurement, sq: Square| -> Result<Measurement> {
        let values = m
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if sq.contains((i / grid) as isize, (i % grid) as isize) {
                    *v
                } else {
                    0.0
                }
            })
            .collect();
        Measurement::new(&domain, values)
    };
    let f: Vec<Measurement> = phi.members().iter().map(|m| cut(m, q2)).collect::<Result<_>>()?;
    let f_prime: Vec<Measurement> = phi_prime.members().iter().map(|m| cut(m, q2p)).collect::<Result<_>>()?;
    let psi = MeasurementSpace::new("Psi", &domain, f.clone(), dm)?;
    let psi_prime = MeasurementSpace::new("PsiPrime", &domain, f_prime.clone(), dm)?;

    let mut file = InstanceFile::new(domain.points().to_vec());
    file.ops.insert("translate".into(), s.perm().to_vec());
    let triple = |phi: &str, phi_prime: &str| TripleSpec {
        phi: phi.into(),
        phi_prime: phi_prime.into(),
        ops: vec!["translate".into()],
    };
    file.triples.insert("source".into(), triple("Phi", "PhiPrime"));
    file.triples.insert("target".into(), triple("Psi", "PsiPrime"));
    let raw = |ms: &[Measurement]| ms.iter().map(|m| m.values().to_vec()).collect::<Vec<_>>();
    file.operators.insert(
        "cut".into(),
        OperatorSpec {
            source: "source".into(),
            target: "target".into(),
            f: raw(&f),
            f_prime: raw(&f_prime),
            t: vec!["translate".into()],
            certificate: None,
        },
    );

    if naive_variant {
        let naive_prime: Vec<Measurement> = phi_prime
            .members()
            .iter()
            .zip(&f_prime)
            .map(|(m, img)| match phi.position(m, dm) {
                Some(k) => f[k].clone(),
                None => img.clone(),
            })
            .collect();
        let mut widened = f_prime.clone();
        widened.extend(naive_prime.iter().cloned());
        let psi_naive = MeasurementSpace::new("PsiPrimeNaive", &domain, widened, dm)?;
        file.spaces.insert("PsiPrimeNaive".into(), rows(&psi_naive));
        file.triples.insert("target_naive".into(), triple("Psi", "PsiPrimeNaive"));
        file.operators.insert(
            "cut_naive".into(),
            OperatorSpec {
                source: "source".into(),
                target: "target_naive".into(),
                f: raw(&f),
                f_prime: raw(&naive_prime),
                t: vec!["translate".into()],
                certificate: None,
            },
        );
    }

    for space in [&phi, &phi_prime, &psi, &psi_prime] {
        file.spaces.insert(space.label().to_string(), rows(space));
    }
    Ok(file)
}

const SIX: [&str; 5] = [".###.", "#....", "####.", "#...#", ".###."];

/// A 5×5 raster of the digit six under quarter turns.
///
/// `Φ′` contains the six turned by at most a quarter turn either way, so the
/// triple `small_turns` (identity and both quarter turns) is valid, while
/// `all_turns` also contains the half turn, which maps the six to a nine
/// outside `Φ′`.
pub fn digit_six_instance() -> Result<InstanceFile> {
    let size = SIX.len();
    let domain = grid_domain(size)?;
    let six: Vec<f64> = SIX
        .iter()
        .flat_map(|row| row.chars().map(|ch| if ch == '#' { 1.0 } else { 0.0 }))
        .collect();
    let six = Measurement::new(&domain, six)?;
    let r = grid_quarter_turn(&domain, size)?;
    let r2 = r.compose(&r)?;
    let r3 = r2.compose(&r)?;
    let id = DomainMap::identity(&domain);
    let act = |s: &DomainMap| crate::domain::right_action(&six, s).map(|m| m.values().to_vec());

    let mut file = InstanceFile::new(domain.points().to_vec());
    file.spaces.insert("Six".into(), vec![six.values().to_vec()]);
    file.spaces.insert("SmallTurns".into(), vec![act(&id)?, act(&r)?, act(&r3)?]);
    for (name, s) in [("id", &id), ("quarter", &r), ("half", &r2), ("three_quarter", &r3)] {
        file.ops.insert(name.into(), s.perm().to_vec());
    }
    let triple = |ops: &[&str]| TripleSpec {
        phi: "Six".into(),
        phi_prime: "SmallTurns".into(),
        ops: ops.iter().map(|s| s.to_string()).collect(),
    };
    file.triples.insert("small_turns".into(), triple(&["id", "quarter", "three_quarter"]));
    file.triples.insert("all_turns".into(), triple(&["id", "quarter", "half", "three_quarter"]));
    Ok(file)
}

pub fn random_measurement<R: Rng>(rng: &mut R, domain: &FiniteDomain, lo: f64, hi: f64) -> Measurement {
    let values = (0..domain.len()).map(|_| rng.gen_range(lo..hi)).collect();
    Measurement::new(domain, values).expect("finite values")
}

pub fn random_space<R: Rng>(rng: &mut R, label: &str, domain: &FiniteDomain, count: usize, lo: f64, hi: f64) -> MeasurementSpace {
    let members = (0..count).map(|_| random_measurement(rng, domain, lo, hi)).collect();
    MeasurementSpace::new(label, domain, members, Tolerances::default().delta_mem).expect("same domain")
}

pub fn random_map<R: Rng>(rng: &mut R, domain: &FiniteDomain) -> DomainMap {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..domain.len()).collect();
    perm.shuffle(rng);
    DomainMap::new(domain, perm).expect("a shuffle is a permutation")
}

/// `Φ` random on an `n`-cycle, `S` the given shifts, and
/// `Φ′ = Φ ∪ ⋃_{s∈S} Φs`, so every shift is admissible.
pub fn random_cycle_triple<R: Rng>(rng: &mut R, n: usize, phi_size: usize, shifts: &[isize]) -> Result<Arc<PerceptionTriple>> {
    let domain = FiniteDomain::indexed(n)?;
    let phi = random_space(rng, "Phi", &domain, phi_size, 0.0, 1.0);
    let ops = shifts.iter().map(|&k| cyclic_shift(&domain, k)).collect::<Result<Vec<_>>>()?;
    let dm = Tolerances::default().delta_mem;
    let mut members = phi.members().to_vec();
    for s in &ops {
        members.extend(phi.translated(s, dm)?.members().iter().cloned());
    }
    let phi_prime = MeasurementSpace::new("PhiPrime", &domain, members, dm)?;
    Ok(Arc::new(PerceptionTriple::new(Arc::new(phi), Arc::new(phi_prime), ops)?))
}

/// `Φ = Φ′` the orbit of random seeds under the cyclic subgroup of order
/// `order` (which must divide `n`), and `S` that whole subgroup.
pub fn group_closed_cycle_triple<R: Rng>(rng: &mut R, n: usize, order: usize, seeds: usize) -> Result<Arc<PerceptionTriple>> {
    if order == 0 || n % order != 0 {
        return Err(Error::Precondition(format!("order {order} does not divide {n}")));
    }
    let domain = FiniteDomain::indexed(n)?;
    let step = (n / order) as isize;
    let ops = (0..order as isize)
        .map(|j| cyclic_shift(&domain, j * step))
        .collect::<Result<Vec<_>>>()?;
    let dm = Tolerances::default().delta_mem;
    let base = random_space(rng, "Seeds", &domain, seeds, 0.0, 1.0);
    let mut members = Vec::new();
    for s in &ops {
        members.extend(base.translated(s, dm)?.members().iter().cloned());
    }
    let space = Arc::new(MeasurementSpace::new("Phi", &domain, members, dm)?);
    Ok(Arc::new(PerceptionTriple::new(space.clone(), space, ops)?))
}

/// Tabulations of a prospective operator pair on the members of `Φ` and `Φ′`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawPair {
    pub f: Vec<Measurement>,
    pub f_prime: Vec<Measurement>,
}

/// `out(i) = Σ_j k_j φ(i + j mod n)`, which commutes with every cyclic shift.
pub fn circular_convolution(phi: &Measurement, kernel: &[f64]) -> Measurement {
    let v = phi.values();
    let n = v.len();
    let values = (0..n)
        .map(|i| kernel.iter().enumerate().map(|(j, k)| k * v[(i + j) % n]).sum())
        .collect();
    Measurement::new(phi.domain(), values).expect("finite values")
}

pub fn convolve_pair(source: &PerceptionTriple, kernel: &[f64]) -> RawPair {
    let conv = |space: &MeasurementSpace| space.members().iter().map(|m| circular_convolution(m, kernel)).collect();
    RawPair {
        f: conv(source.phi()),
        f_prime: conv(source.phi_prime()),
    }
}

/// Nonnegative kernel of length `len` whose entries sum to a value in
/// `[0.5, 1]`, making the convolution non-expansive.
pub fn random_kernel<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let mass = rng.gen_range(0.5..1.0);
    raw.iter().map(|x| x * mass / total).collect()
}

/// Pointwise `L*` of raw tabulations, evaluated exactly as `combine` does.
pub fn aggregate_raw(l: &Aggregator, parts: &[&RawPair]) -> Result<RawPair> {
    let fuse = |pick: &dyn Fn(&RawPair) -> &Vec<Measurement>| -> Result<Vec<Measurement>> {
        let head = pick(parts[0]);
        (0..head.len())
            .map(|k| {
                let values = (0..head[k].len())
                    .map(|y| {
                        let column: Vec<f64> = parts.iter().map(|p| pick(p)[k].value(y)).collect();
                        l.apply(&column)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Measurement::new(head[k].domain(), values)
            })
            .collect()
    };
    Ok(RawPair {
        f: fuse(&|p| &p.f)?,
        f_prime: fuse(&|p| &p.f_prime)?,
    })
}

/// Turns raw tabulations over `source` into operator pairs with target
/// `(Ψ, Ψ′, S)`, where `Ψ` and `Ψ′` collect the images of `raws` and of
/// `extra`, `S` is the source op list, and `T` is the identity.
pub fn assemble_family(source: Arc<PerceptionTriple>, raws: &[RawPair], extra: &[RawPair]) -> Result<(Arc<PerceptionTriple>, Vec<OperatorPair>)> {
    let domain = source.domain().clone();
    let dm = Tolerances::default().delta_mem;
    let all = raws.iter().chain(extra);
    let psi = MeasurementSpace::new("Psi", &domain, all.clone().flat_map(|r| r.f.iter().cloned()).collect(), dm)?;
    let psi_prime = MeasurementSpace::new("PsiPrime", &domain, all.flat_map(|r| r.f_prime.iter().cloned()).collect(), dm)?;
    let target = Arc::new(PerceptionTriple::new(Arc::new(psi), Arc::new(psi_prime), source.ops().to_vec())?);
    let t = Arc::new(TransformationMap::identity(source.ops().to_vec()));
    let pairs = raws
        .iter()
        .map(|r| {
            OperatorPair::new(
                source.clone(),
                target.clone(),
                TabulatedMap::new(&domain, r.f.clone())?,
                TabulatedMap::new(&domain, r.f_prime.clone())?,
                t.clone(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((target, pairs))
}
