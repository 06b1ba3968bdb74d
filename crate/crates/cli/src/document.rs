//! Evidence documents: a JSON object naming the frame, the kind of set
//! function stored, and its nonzero entries keyed by subset.
//!
//! ```json
//! {"frame": ["a", "b", "c"], "kind": "mass", "masses": {"a": 0.3, "b|c": 0.5, "a|b|c": 0.2}}
//! ```
//!
//! Mass documents store entries under `masses` and may omit zeros. The other
//! kinds (`bel`, `pl`, `q`, `b`) store every subset under `values`. Printed
//! documents are canonical: keys in frame order, entries in bitmask order,
//! values rounded to 12 significant digits.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use serde_json::{Map, Number, Value};
use tbm_core::belief::{mass_from, Kind as ValueKind};
use tbm_core::{Frame, LatticeVector, MassFunction, ValueFunction};

use crate::error::CliError;

/// Set function stored in a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocKind {
    Mass,
    Value(ValueKind),
}

impl DocKind {
    pub fn parse(s: &str) -> Option<DocKind> {
        match s {
            "mass" => Some(DocKind::Mass),
            "bel" => Some(DocKind::Value(ValueKind::Bel)),
            "pl" => Some(DocKind::Value(ValueKind::Pl)),
            "q" => Some(DocKind::Value(ValueKind::Q)),
            "b" => Some(DocKind::Value(ValueKind::B)),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DocKind::Mass => "mass",
            DocKind::Value(k) => k.name(),
        }
    }
}

impl fmt::Display for DocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed document: a frame plus a full-length vector in bitmask order.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceDocument {
    pub frame: Frame,
    pub kind: DocKind,
    pub values: LatticeVector,
}

/// Map entries in file order, so repeated keys can be rejected.
struct Entries(Vec<(String, f64)>);

impl<'de> Deserialize<'de> for Entries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Entries;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from subset key to number")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Entries, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = map.next_entry::<String, f64>()? {
                    out.push(entry);
                }
                Ok(Entries(out))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    frame: Vec<String>,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    masses: Option<Entries>,
    #[serde(default)]
    values: Option<Entries>,
}

impl EvidenceDocument {
    pub fn from_mass(m: &MassFunction) -> Self {
        EvidenceDocument {
            frame: m.frame().clone(),
            kind: DocKind::Mass,
            values: m.masses().clone(),
        }
    }

    pub fn from_values(v: &ValueFunction) -> Self {
        EvidenceDocument {
            frame: v.frame().clone(),
            kind: DocKind::Value(v.kind()),
            values: v.lattice().clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: Raw = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        let frame = Frame::new(&raw.frame)?;
        let kind_name = raw.kind.as_deref().unwrap_or("mass");
        let kind = DocKind::parse(kind_name)
            .ok_or_else(|| CliError::Input(format!("unknown kind {kind_name:?}")))?;
        let entries = match (kind, raw.masses, raw.values) {
            (DocKind::Mass, Some(e), None) => e,
            (DocKind::Value(_), None, Some(e)) => e,
            (DocKind::Mass, _, _) => {
                return Err(CliError::Input("a mass document needs exactly a \"masses\" map".into()))
            }
            (DocKind::Value(_), _, _) => {
                return Err(CliError::Input(format!(
                    "a {kind} document needs exactly a \"values\" map"
                )))
            }
        };
        let mut values = vec![0.0; frame.size()];
        let mut seen = vec![false; frame.size()];
        for (key, v) in entries.0 {
            let a = frame.parse_key(&key)?;
            if std::mem::replace(&mut seen[a.index()], true) {
                return Err(CliError::Input(format!("subset {key:?} listed twice")));
            }
            values[a.index()] = v;
        }
        if let DocKind::Value(k) = kind {
            if let Some(missing) = seen.iter().position(|s| !s) {
                let key = frame.key(tbm_core::SubsetIndex(missing as u32));
                return Err(CliError::Input(format!(
                    "{k} document is missing subset {key:?}"
                )));
            }
        }
        let values = LatticeVector::new(frame.clone(), values)?;
        let doc = EvidenceDocument { frame, kind, values };
        // reject anything that is not a belief function up front
        doc.to_mass()?;
        Ok(doc)
    }

    /// The mass function behind the document, whatever its kind.
    pub fn to_mass(&self) -> Result<MassFunction, CliError> {
        Ok(match self.kind {
            DocKind::Mass => MassFunction::from_lattice(self.values.clone())?,
            DocKind::Value(k) => mass_from(&ValueFunction::new(k, self.values.clone()))?,
        })
    }

    /// Canonical JSON text, newline-terminated.
    pub fn print(&self) -> String {
        let mut entries = Map::new();
        for a in self.frame.subsets() {
            let v = self.values.get(a);
            if self.kind == DocKind::Mass && round12(v) == 0.0 {
                continue;
            }
            entries.insert(self.frame.key(a), number(v));
        }
        let mut doc = Map::new();
        doc.insert(
            "frame".into(),
            Value::Array(self.frame.labels().iter().cloned().map(Value::String).collect()),
        );
        doc.insert("kind".into(), Value::String(self.kind.name().into()));
        let field = if self.kind == DocKind::Mass { "masses" } else { "values" };
        doc.insert(field.into(), Value::Object(entries));
        let mut out = serde_json::to_string_pretty(&Value::Object(doc)).expect("plain JSON");
        out.push('\n');
        out
    }
}

/// Rounds to 12 significant digits. Magnitudes below `5e-13` are transform
/// noise on a unit-mass scale and print as zero, as does negative zero.
pub fn round12(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float");
    if r.abs() < 5e-13 {
        0.0
    } else {
        r
    }
}

fn number(x: f64) -> Value {
    Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}
