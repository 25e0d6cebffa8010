//! Input documents: typed model, canonical serialization and a
//! pointer-tracking parser.
//!
//! Parsing walks the JSON tree by hand so every schema error names the JSON
//! pointer of the offending value. Leaves go through `serde_path_to_error`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecDocument {
    GroupoidTable(TableSpec),
    Constructor(Constructor),
    DynamicalSystem(SystemSpec),
    BundleDemo(BundleDemoSpec),
}

/// A groupoid nested inside another document.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupoidSpec {
    GroupoidTable(TableSpec),
    Constructor(Constructor),
}

/// Explicit tables keyed by element name.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableSpec {
    pub elements: Vec<String>,
    pub units: Vec<String>,
    pub range: BTreeMap<String, String>,
    pub source: BTreeMap<String, String>,
    pub inverse: BTreeMap<String, String>,
    /// `[a, b, ab]`.
    pub mult: Vec<[String; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Constructor {
    Cyclic { order: usize },
    /// Order `2n`.
    Dihedral { n: usize },
    Symmetric { n: usize },
    Abelian { factors: Vec<usize> },
    Group { table: Vec<Vec<usize>> },
    Pair { n: usize },
    Cotrivial { n: usize },
    GroupBundle { base: Vec<String>, fibers: Vec<Constructor> },
    Transformation { group: Box<Constructor>, action: ActionSpec },
    DisjointUnion { parts: Vec<GroupoidSpec> },
    Product { left: Box<GroupoidSpec>, right: Box<GroupoidSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "by", rename_all = "kebab-case")]
pub enum ActionSpec {
    /// Left cosets of the subgroup generated by `generators`.
    Cosets { generators: Vec<usize> },
    /// One permutation of `points` per group element.
    Permutations { points: Vec<String>, permutations: Vec<Vec<usize>> },
}

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemSpec {
    pub groupoid: GroupoidSpec,
    /// Fiber dimension per unit name; missing units get 1.
    pub fibers: BTreeMap<String, usize>,
    /// Unitary per element name; missing elements get the identity.
    pub unitaries: BTreeMap<String, MatrixSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BundleDemoSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_up_to: Option<u32>,
}

impl SpecDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            SpecDocument::GroupoidTable(_) => "groupoid-table",
            SpecDocument::Constructor(_) => "constructor",
            SpecDocument::DynamicalSystem(_) => "dynamical-system",
            SpecDocument::BundleDemo(_) => "bundle-demo",
        }
    }

    pub fn groupoid(&self) -> Option<GroupoidSpec> {
        match self {
            SpecDocument::GroupoidTable(t) => Some(GroupoidSpec::GroupoidTable(t.clone())),
            SpecDocument::Constructor(c) => Some(GroupoidSpec::Constructor(c.clone())),
            _ => None,
        }
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec documents always serialize")
    }
}

pub fn parse_spec(path: &Path) -> Result<SpecDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_spec_str(&text)
}

pub fn parse_spec_str(text: &str) -> Result<SpecDocument, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::schema("", format!("not valid JSON: {e}")))?;
    parse_document(&value)
}

pub fn parse_document(v: &Value) -> Result<SpecDocument, CliError> {
    let obj = object(v, "")?;
    Ok(match tag(obj, "kind", "")? {
        "groupoid-table" => SpecDocument::GroupoidTable(parse_table(obj, "")?),
        "constructor" => SpecDocument::Constructor(parse_constructor(obj, "")?),
        "dynamical-system" => {
            allow_keys(obj, &["kind", "groupoid", "fibers", "unitaries"], "")?;
            SpecDocument::DynamicalSystem(SystemSpec {
                groupoid: parse_groupoid(required(obj, "groupoid", "")?, "/groupoid")?,
                fibers: optional(obj, "fibers", "")?.unwrap_or_default(),
                unitaries: optional(obj, "unitaries", "")?.unwrap_or_default(),
            })
        }
        "bundle-demo" => {
            allow_keys(obj, &["kind", "n_max", "phi_up_to"], "")?;
            SpecDocument::BundleDemo(BundleDemoSpec {
                n_max: optional(obj, "n_max", "")?,
                phi_up_to: optional(obj, "phi_up_to", "")?,
            })
        }
        other => return Err(CliError::schema("/kind", format!("unknown kind {other:?}"))),
    })
}

fn parse_groupoid(v: &Value, ptr: &str) -> Result<GroupoidSpec, CliError> {
    let obj = object(v, ptr)?;
    match tag(obj, "kind", ptr)? {
        "groupoid-table" => Ok(GroupoidSpec::GroupoidTable(parse_table(obj, ptr)?)),
        "constructor" => Ok(GroupoidSpec::Constructor(parse_constructor(obj, ptr)?)),
        other => Err(CliError::schema(&format!("{ptr}/kind"), format!("expected a groupoid, found kind {other:?}"))),
    }
}

fn parse_table(obj: &Map<String, Value>, ptr: &str) -> Result<TableSpec, CliError> {
    allow_keys(obj, &["kind", "elements", "units", "range", "source", "inverse", "mult", "weights"], ptr)?;
    Ok(TableSpec {
        elements: field(obj, "elements", ptr)?,
        units: field(obj, "units", ptr)?,
        range: field(obj, "range", ptr)?,
        source: field(obj, "source", ptr)?,
        inverse: field(obj, "inverse", ptr)?,
        mult: field(obj, "mult", ptr)?,
        weights: optional(obj, "weights", ptr)?,
    })
}

fn parse_constructor(obj: &Map<String, Value>, ptr: &str) -> Result<Constructor, CliError> {
    if let Some(k) = obj.get("kind") {
        if k.as_str() != Some("constructor") {
            return Err(CliError::schema(&format!("{ptr}/kind"), "expected \"constructor\""));
        }
    }
    let name = tag(obj, "name", ptr)?;
    let keys: &[&str] = match name {
        "cyclic" => &["order"],
        "dihedral" | "symmetric" | "pair" | "cotrivial" => &["n"],
        "abelian" => &["factors"],
        "group" => &["table"],
        "group-bundle" => &["base", "fibers"],
        "transformation" => &["group", "action"],
        "disjoint-union" => &["parts"],
        "product" => &["left", "right"],
        other => return Err(CliError::schema(&format!("{ptr}/name"), format!("unknown constructor {other:?}"))),
    };
    let mut allowed = vec!["kind", "name"];
    allowed.extend_from_slice(keys);
    allow_keys(obj, &allowed, ptr)?;
    let sub = |key: &str| format!("{ptr}/{}", escape(key));
    Ok(match name {
        "cyclic" => Constructor::Cyclic { order: field(obj, "order", ptr)? },
        "dihedral" => Constructor::Dihedral { n: field(obj, "n", ptr)? },
        "symmetric" => Constructor::Symmetric { n: field(obj, "n", ptr)? },
        "pair" => Constructor::Pair { n: field(obj, "n", ptr)? },
        "cotrivial" => Constructor::Cotrivial { n: field(obj, "n", ptr)? },
        "abelian" => Constructor::Abelian { factors: field(obj, "factors", ptr)? },
        "group" => Constructor::Group { table: field(obj, "table", ptr)? },
        "group-bundle" => {
            let base = field(obj, "base", ptr)?;
            let fibers = array(required(obj, "fibers", ptr)?, &sub("fibers"))?
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let p = format!("{}/{i}", sub("fibers"));
                    parse_constructor(object(f, &p)?, &p)
                })
                .collect::<Result<_, _>>()?;
            Constructor::GroupBundle { base, fibers }
        }
        "transformation" => {
            let group = parse_constructor(object(required(obj, "group", ptr)?, &sub("group"))?, &sub("group"))?;
            let action = parse_action(required(obj, "action", ptr)?, &sub("action"))?;
            Constructor::Transformation { group: Box::new(group), action }
        }
        "disjoint-union" => {
            let parts = array(required(obj, "parts", ptr)?, &sub("parts"))?
                .iter()
                .enumerate()
                .map(|(i, p)| parse_groupoid(p, &format!("{}/{i}", sub("parts"))))
                .collect::<Result<_, _>>()?;
            Constructor::DisjointUnion { parts }
        }
        "product" => Constructor::Product {
            left: Box::new(parse_groupoid(required(obj, "left", ptr)?, &sub("left"))?),
            right: Box::new(parse_groupoid(required(obj, "right", ptr)?, &sub("right"))?),
        },
        _ => unreachable!("names filtered above"),
    })
}

fn parse_action(v: &Value, ptr: &str) -> Result<ActionSpec, CliError> {
    let obj = object(v, ptr)?;
    match tag(obj, "by", ptr)? {
        "cosets" => {
            allow_keys(obj, &["by", "generators"], ptr)?;
            Ok(ActionSpec::Cosets { generators: field(obj, "generators", ptr)? })
        }
        "permutations" => {
            allow_keys(obj, &["by", "points", "permutations"], ptr)?;
            Ok(ActionSpec::Permutations {
                points: field(obj, "points", ptr)?,
                permutations: field(obj, "permutations", ptr)?,
            })
        }
        other => Err(CliError::schema(&format!("{ptr}/by"), format!("unknown action kind {other:?}"))),
    }
}

/// RFC 6901 escaping of one pointer segment.
pub fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn object<'v>(v: &'v Value, ptr: &str) -> Result<&'v Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| CliError::schema(ptr, "expected an object"))
}

fn array<'v>(v: &'v Value, ptr: &str) -> Result<&'v Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| CliError::schema(ptr, "expected an array"))
}

fn required<'v>(obj: &'v Map<String, Value>, key: &str, ptr: &str) -> Result<&'v Value, CliError> {
    obj.get(key).ok_or_else(|| CliError::schema(ptr, format!("missing field {key:?}")))
}

fn tag<'v>(obj: &'v Map<String, Value>, key: &str, ptr: &str) -> Result<&'v str, CliError> {
    required(obj, key, ptr)?
        .as_str()
        .ok_or_else(|| CliError::schema(&format!("{ptr}/{key}"), "expected a string"))
}

fn allow_keys(obj: &Map<String, Value>, allowed: &[&str], ptr: &str) -> Result<(), CliError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::schema(&format!("{ptr}/{}", escape(k)), "unknown field")),
        None => Ok(()),
    }
}

fn field<T: DeserializeOwned>(obj: &Map<String, Value>, key: &str, ptr: &str) -> Result<T, CliError> {
    leaf(required(obj, key, ptr)?, &format!("{ptr}/{}", escape(key)))
}

fn optional<T: DeserializeOwned>(obj: &Map<String, Value>, key: &str, ptr: &str) -> Result<Option<T>, CliError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => leaf(v, &format!("{ptr}/{}", escape(key))).map(Some),
    }
}

fn leaf<T: DeserializeOwned>(v: &Value, ptr: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let mut p = ptr.to_string();
        for seg in e.path().iter() {
            use serde_path_to_error::Segment;
            match seg {
                Segment::Seq { index } => p.push_str(&format!("/{index}")),
                Segment::Map { key } => p.push_str(&format!("/{}", escape(key))),
                Segment::Enum { .. } | Segment::Unknown => {}
            }
        }
        CliError::schema(&p, e.into_inner().to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_group_spec() {
        let doc = parse_spec_str(r#"{"kind":"constructor","name":"cyclic","order":4}"#).unwrap();
        assert_eq!(doc, SpecDocument::Constructor(Constructor::Cyclic { order: 4 }));
    }

    #[test]
    fn pointers_reach_the_bad_value() {
        let err = parse_spec_str(r#"{"kind":"constructor","name":"disjoint-union","parts":[{"kind":"constructor","name":"pair","n":-1}]}"#)
            .unwrap_err();
        assert_eq!(err.pointer(), Some("/parts/0/n"));
        let err = parse_spec_str(r#"{"kind":"dynamical-system","groupoid":{"kind":"constructor","name":"pair","n":2},"unitaries":{"x":[[[1,0],[0]]]}}"#)
            .unwrap_err();
        assert_eq!(err.pointer(), Some("/unitaries/x/0/1"));
        let err = parse_spec_str(r#"{"kind":"constructor","name":"cyclic","order":4,"extra":1}"#).unwrap_err();
        assert_eq!(err.pointer(), Some("/extra"));
        let err = parse_spec_str(r#"{"kind":"widget"}"#).unwrap_err();
        assert_eq!(err.pointer(), Some("/kind"));
    }

    #[test]
    fn escaping() {
        assert_eq!(escape("a/b~c"), "a~1b~0c");
    }
}
