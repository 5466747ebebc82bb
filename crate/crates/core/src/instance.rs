//! JSON instance files: one document holding a domain, named measurement
//! spaces, named permutations, perception triples, tabulated operator pairs
//! and tolerances.
//!
//! Maps are serialized in key order and floats in shortest round-trip form,
//! so `to_json(load(f))` is a canonical form of `f`.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::{DomainMap, FiniteDomain, Measurement, MeasurementSpace, PerceptionTriple, Tolerances};
use crate::error::{Error, Result};
use crate::pgeneo::{Certificate, OperatorPair, TabulatedMap, TransformationMap};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: u32,
    /// Point labels of the single domain shared by every space.
    pub domain: Vec<String>,
    pub spaces: BTreeMap<String, Vec<Vec<f64>>>,
    /// Permutations; entry `i` is the index of the image of point `i`.
    pub ops: BTreeMap<String, Vec<usize>>,
    pub triples: BTreeMap<String, TripleSpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub phi: String,
    pub phi_prime: String,
    pub ops: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub source: String,
    pub target: String,
    /// Image of each member of the source `Φ`, in member order.
    pub f: Vec<Vec<f64>>,
    /// Image of each member of the source `Φ′`, in member order.
    pub f_prime: Vec<Vec<f64>>,
    /// `T(s)` for each op of the source triple, as a name from the target
    /// triple's op list.
    pub t: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<serde_json::Value>,
}

impl InstanceFile {
    pub fn new(domain: Vec<String>) -> Self {
        InstanceFile {
            version: FORMAT_VERSION,
            domain,
            spaces: BTreeMap::new(),
            ops: BTreeMap::new(),
            triples: BTreeMap::new(),
            operators: BTreeMap::new(),
            tolerances: Tolerances::default(),
        }
    }
}

/// A loaded and fully validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    file: InstanceFile,
    domain: FiniteDomain,
    spaces: BTreeMap<String, Arc<MeasurementSpace>>,
    ops: BTreeMap<String, DomainMap>,
    triples: BTreeMap<String, Arc<PerceptionTriple>>,
    operators: BTreeMap<String, OperatorPair>,
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, name: &str, field: &str, kind: &str) -> Result<&'a T> {
    map.get(name)
        .ok_or_else(|| Error::instance(field, format!("unknown {kind} `{name}`")))
}

fn measurement(domain: &FiniteDomain, values: &[f64], field: String) -> Result<Measurement> {
    Measurement::new(domain, values.to_vec()).map_err(|e| Error::instance(field, e.to_string()))
}

impl Instance {
    pub fn from_file(file: InstanceFile) -> Result<Self> {
        if file.version != FORMAT_VERSION {
            return Err(Error::instance(
                "version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", file.version),
            ));
        }
        let tol = file.tolerances;
        if !(tol.delta_mem >= 0.0 && tol.delta_mem.is_finite() && tol.delta_num >= 0.0 && tol.delta_num.is_finite()) {
            return Err(Error::instance("tolerances", "tolerances must be finite and nonnegative"));
        }
        let domain = FiniteDomain::new(file.domain.iter().cloned())
            .map_err(|e| Error::instance("domain", e.to_string()))?;

        let mut spaces = BTreeMap::new();
        for (name, rows) in &file.spaces {
            let members = rows
                .iter()
                .enumerate()
                .map(|(i, r)| measurement(&domain, r, format!("spaces.{name}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let space = MeasurementSpace::distinct(name.clone(), &domain, members, tol.delta_mem)?;
            spaces.insert(name.clone(), Arc::new(space));
        }

        let mut ops = BTreeMap::new();
        for (name, perm) in &file.ops {
            let map = DomainMap::new(&domain, perm.clone())
                .map_err(|e| Error::instance(format!("ops.{name}"), e.to_string()))?;
            ops.insert(name.clone(), map);
        }

        let mut triples = BTreeMap::new();
        for (name, spec) in &file.triples {
            let field = format!("triples.{name}");
            let phi = lookup(&spaces, &spec.phi, &format!("{field}.phi"), "space")?.clone();
            let phi_prime = lookup(&spaces, &spec.phi_prime, &format!("{field}.phi_prime"), "space")?.clone();
            let list = spec
                .ops
                .iter()
                .map(|o| lookup(&ops, o, &format!("{field}.ops"), "op").cloned())
                .collect::<Result<Vec<_>>>()?;
            let triple = PerceptionTriple::new(phi, phi_prime, list).map_err(|e| Error::instance(field, e.to_string()))?;
            triples.insert(name.clone(), Arc::new(triple));
        }

        let mut operators = BTreeMap::new();
        for (name, spec) in &file.operators {
            let field = format!("operators.{name}");
            let source = lookup(&triples, &spec.source, &format!("{field}.source"), "triple")?.clone();
            let target = lookup(&triples, &spec.target, &format!("{field}.target"), "triple")?.clone();
            let tabulate = |rows: &[Vec<f64>], expected: usize, key: &str| -> Result<TabulatedMap> {
                if rows.len() != expected {
                    return Err(Error::instance(
                        format!("{field}.{key}"),
                        format!("expected {expected} images, found {}", rows.len()),
                    ));
                }
                let images = rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| measurement(&domain, r, format!("{field}.{key}[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                TabulatedMap::new(&domain, images)
            };
            let f = tabulate(&spec.f, source.phi().len(), "f")?;
            let f_prime = tabulate(&spec.f_prime, source.phi_prime().len(), "f_prime")?;

            let source_names = &file.triples[&spec.source].ops;
            let target_names = &file.triples[&spec.target].ops;
            if spec.t.len() != source_names.len() {
                return Err(Error::instance(
                    format!("{field}.t"),
                    format!("expected {} entries, found {}", source_names.len(), spec.t.len()),
                ));
            }
            let assignment = spec
                .t
                .iter()
                .map(|q| {
                    target_names.iter().position(|n| n == q).ok_or_else(|| {
                        Error::instance(format!("{field}.t"), format!("`{q}` is not an op of triple `{}`", spec.target))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let t = TransformationMap::new(source.ops().to_vec(), target.ops().to_vec(), assignment)
                .map_err(|e| Error::instance(format!("{field}.t"), e.to_string()))?;
            let pair = OperatorPair::new(source, target, f, f_prime, Arc::new(t))
                .map_err(|e| Error::instance(field.clone(), e.to_string()))?;
            operators.insert(name.clone(), pair);
        }

        Ok(Instance {
            file,
            domain,
            spaces,
            ops,
            triples,
            operators,
        })
    }

    pub fn parse(json: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(json).map_err(|e| {
            Error::instance(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })?;
        Self::from_file(file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::instance(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(&self.file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::instance(path.display().to_string(), e.to_string()))
    }

    pub fn file(&self) -> &InstanceFile {
        &self.file
    }

    pub fn tolerances(&self) -> Tolerances {
        self.file.tolerances
    }

    /// Replaces the tolerances and re-validates (membership deduplication
    /// depends on `delta_mem`).
    pub fn with_tolerances(self, tol: Tolerances) -> Result<Self> {
        let mut file = self.file;
        file.tolerances = tol;
        Self::from_file(file)
    }

    pub fn domain(&self) -> &FiniteDomain {
        &self.domain
    }

    pub fn space(&self, name: &str) -> Result<&Arc<MeasurementSpace>> {
        lookup(&self.spaces, name, "spaces", "space")
    }

    pub fn op(&self, name: &str) -> Result<&DomainMap> {
        lookup(&self.ops, name, "ops", "op")
    }

    pub fn triple(&self, name: &str) -> Result<&Arc<PerceptionTriple>> {
        lookup(&self.triples, name, "triples", "triple")
    }

    pub fn operator(&self, name: &str) -> Result<&OperatorPair> {
        lookup(&self.operators, name, "operators", "operator")
    }

    pub fn spaces(&self) -> &BTreeMap<String, Arc<MeasurementSpace>> {
        &self.spaces
    }

    pub fn ops(&self) -> &BTreeMap<String, DomainMap> {
        &self.ops
    }

    pub fn triples(&self) -> &BTreeMap<String, Arc<PerceptionTriple>> {
        &self.triples
    }

    pub fn operators(&self) -> &BTreeMap<String, OperatorPair> {
        &self.operators
    }

    fn triple_name(&self, triple: &Arc<PerceptionTriple>) -> Option<&str> {
        self.triples
            .iter()
            .find(|(_, t)| Arc::ptr_eq(t, triple))
            .or_else(|| self.triples.iter().find(|(_, t)| t.as_ref() == triple.as_ref()))
            .map(|(n, _)| n.as_str())
    }

    /// Adds an operator pair over triples already present in the instance,
    /// optionally recording its certificate.
    pub fn add_operator(&mut self, name: &str, pair: &OperatorPair, certificate: Option<&Certificate>) -> Result<()> {
        let field = format!("operators.{name}");
        if self.operators.contains_key(name) {
            return Err(Error::instance(field, "an operator with this name already exists"));
        }
        let source = self
            .triple_name(pair.source())
            .ok_or_else(|| Error::instance(field.clone(), "source triple is not part of the instance"))?
            .to_string();
        let target = self
            .triple_name(pair.target())
            .ok_or_else(|| Error::instance(field.clone(), "target triple is not part of the instance"))?
            .to_string();
        let target_names = &self.file.triples[&target].ops;
        let t = pair
            .transformation()
            .assignment()
            .iter()
            .map(|&q| target_names[q].clone())
            .collect();
        let rows = |m: &TabulatedMap| m.images().iter().map(|i| i.values().to_vec()).collect();
        let spec = OperatorSpec {
            source,
            target,
            f: rows(pair.f()),
            f_prime: rows(pair.f_prime()),
            t,
            certificate: certificate.map(|c| serde_json::to_value(c).expect("certificate serializes")),
        };
        let mut file = self.file.clone();
        file.operators.insert(name.to_string(), spec);
        *self = Self::from_file(file)?;
        Ok(())
    }
}

pub fn to_canonical_json(file: &InstanceFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("instance serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "domain": ["p"],
        "spaces": {"Phi": [[1.0]]},
        "ops": {"id": [0]},
        "triples": {"t": {"phi": "Phi", "phi_prime": "Phi", "ops": ["id"]}}
    }"#;

    #[test]
    fn minimal_file_loads() {
        let inst = Instance::parse(MINIMAL).unwrap();
        assert_eq!(inst.domain().len(), 1);
        assert_eq!(inst.space("Phi").unwrap().len(), 1);
        assert_eq!(inst.tolerances(), Tolerances::default());
        assert!(inst.triple("t").unwrap().ops()[0].is_identity());
    }

    #[test]
    fn repeated_permutation_index_names_the_field() {
        let bad = MINIMAL.replace(r#""domain": ["p"]"#, r#""domain": ["p", "q"]"#)
            .replace(r#"[[1.0]]"#, r#"[[1.0, 2.0]]"#)
            .replace(r#""id": [0]"#, r#""id": [1, 1]"#);
        match Instance::parse(&bad) {
            Err(Error::Instance { field, message }) => {
                assert_eq!(field, "ops.id");
                assert!(message.contains("more than once"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unresolved_reference() {
        let bad = MINIMAL.replace(r#""phi_prime": "Phi""#, r#""phi_prime": "Nope""#);
        match Instance::parse(&bad) {
            Err(Error::Instance { field, .. }) => assert_eq!(field, "triples.t.phi_prime"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn length_mismatch_and_syntax_errors() {
        let bad = MINIMAL.replace("[[1.0]]", "[[1.0, 2.0]]");
        assert!(matches!(Instance::parse(&bad), Err(Error::Instance { field, .. }) if field == "spaces.Phi[0]"));
        let broken = MINIMAL.replace("\"version\": 1,", "\"version\": 1");
        assert!(matches!(Instance::parse(&broken), Err(Error::Instance { field, .. }) if field.starts_with("line 3")));
        let unknown = MINIMAL.replace("\"version\": 1,", "\"version\": 1, \"extra\": 0,");
        assert!(Instance::parse(&unknown).is_err());
        let v2 = MINIMAL.replace("\"version\": 1,", "\"version\": 2,");
        assert!(matches!(Instance::parse(&v2), Err(Error::Instance { field, .. }) if field == "version"));
    }

    #[test]
    fn duplicate_members_rejected() {
        let bad = MINIMAL.replace("[[1.0]]", "[[1.0], [1.0]]");
        assert!(Instance::parse(&bad).is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let inst = Instance::parse(MINIMAL).unwrap();
        let canonical = inst.to_json();
        let again = Instance::parse(&canonical).unwrap();
        assert_eq!(again.to_json(), canonical);
        assert_eq!(again.file(), inst.file());
    }

    #[test]
    fn operator_round_trip() {
        let mut inst = Instance::parse(MINIMAL).unwrap();
        let pair = OperatorPair::identity(inst.triple("t").unwrap().clone());
        let cert = crate::pgeneo::certify(&pair, &inst.tolerances());
        inst.add_operator("id_op", &pair, Some(&cert)).unwrap();
        let op = inst.operator("id_op").unwrap();
        assert!(crate::pgeneo::certify(op, &inst.tolerances()).certified);
        assert!(inst.add_operator("id_op", &pair, None).is_err());
        let reparsed = Instance::parse(&inst.to_json()).unwrap();
        assert_eq!(reparsed.to_json(), inst.to_json());
    }
}
