//! File-backed store of replacement records.
//!
//! A record maps a source library/function name to its accelerator
//! replacement: how to call it, what to include, which interface it
//! expects, and a comparison body used for similarity detection.

use crate::frontend::{parse_unit, FunctionDef, Signature, SourceModel};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum DbError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("format error{}: {message}", location(*.record, .field))]
    Format {
        record: Option<usize>,
        field: Option<String>,
        message: String,
    },
    #[error("duplicate key `{key}` (records {first} and {second})")]
    DuplicateKey {
        key: String,
        first: usize,
        second: usize,
    },
    #[error("record {record} (`{key}`): comparison_code does not parse: {message}")]
    ComparisonCodeParse {
        record: usize,
        key: String,
        message: String,
    },
}

fn location(record: Option<usize>, field: &Option<String>) -> String {
    match (record, field) {
        (Some(r), Some(f)) => format!(" in record {r}, field `{f}`"),
        (Some(r), None) => format!(" in record {r}"),
        (None, Some(f)) => format!(" in field `{f}`"),
        (None, None) => String::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    GpuLibrary,
    FpgaIpCore,
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetKind::GpuLibrary => "gpu_library",
            TargetKind::FpgaIpCore => "fpga_ip_core",
        })
    }
}

/// One piece of a parsed call template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemplatePart {
    Text(String),
    Arg(usize),
    Ret,
}

/// Split a template into literal text and `{argN}` / `{ret}` placeholders.
/// Braces that do not form a placeholder are literal.
pub fn parse_template(template: &str) -> Vec<TemplatePart> {
    let mut parts = Vec::new();
    let mut text = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let placeholder = after.find('}').and_then(|close| {
            let name = &after[..close];
            let part = if name == "ret" {
                Some(TemplatePart::Ret)
            } else {
                name.strip_prefix("arg")
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|d| d.parse().ok())
                    .map(TemplatePart::Arg)
            };
            part.map(|p| (p, close))
        });
        match placeholder {
            Some((p, close)) => {
                text.push_str(&rest[..open]);
                if !text.is_empty() {
                    parts.push(TemplatePart::Text(std::mem::take(&mut text)));
                }
                parts.push(p);
                rest = &after[close + 1..];
            }
            None => {
                text.push_str(&rest[..=open]);
                rest = after;
            }
        }
    }
    text.push_str(rest);
    if !text.is_empty() {
        parts.push(TemplatePart::Text(text));
    }
    parts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub key_name: String,
    pub target_kind: TargetKind,
    pub replacement_name: String,
    pub call_template: String,
    pub prelude_template: String,
    pub interface: Signature,
    pub comparison_code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub artifact_ref: Option<String>,
}

#[derive(Serialize)]
struct DbFile<'a> {
    schema_version: u64,
    external_list: &'a BTreeSet<String>,
    records: &'a [PatternRecord],
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternDb {
    records: Vec<PatternRecord>,
    external_list: BTreeSet<String>,
    by_key: HashMap<String, usize>,
    comparison: Vec<SourceModel>,
}

impl PatternDb {
    pub fn empty() -> Self {
        PatternDb {
            records: Vec::new(),
            external_list: BTreeSet::new(),
            by_key: HashMap::new(),
            comparison: Vec::new(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DbError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DbError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, DbError> {
        let root: Value = serde_json::from_str(text).map_err(|e| DbError::Format {
            record: None,
            field: None,
            message: e.to_string(),
        })?;
        let top_err = |field: &str, message: String| DbError::Format {
            record: None,
            field: Some(field.to_string()),
            message,
        };
        let Value::Object(root) = root else {
            return Err(DbError::Format {
                record: None,
                field: None,
                message: "expected a JSON object".into(),
            });
        };
        match root.get("schema_version").and_then(Value::as_u64) {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(top_err(
                    "schema_version",
                    format!("unsupported version {v}"),
                ))
            }
            None => {
                return Err(top_err(
                    "schema_version",
                    "missing or not an integer".into(),
                ))
            }
        }
        let mut external_list = BTreeSet::new();
        match root.get("external_list") {
            None => {}
            Some(Value::Array(items)) => {
                for item in items {
                    let name = item.as_str().ok_or_else(|| {
                        top_err("external_list", "entries must be strings".into())
                    })?;
                    external_list.insert(name.to_string());
                }
            }
            Some(_) => return Err(top_err("external_list", "expected an array".into())),
        }
        let raw_records = match root.get("records") {
            Some(Value::Array(items)) => items,
            _ => return Err(top_err("records", "missing or not an array".into())),
        };
        let records = raw_records
            .iter()
            .enumerate()
            .map(|(i, v)| record_from_value(i, v))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_records(records, external_list)
    }

    /// Build a DB from records, validating every invariant.
    pub fn from_records(
        records: Vec<PatternRecord>,
        mut external_list: BTreeSet<String>,
    ) -> Result<Self, DbError> {
        let mut by_key = HashMap::new();
        let mut comparison = Vec::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if let Some(&first) = by_key.get(&r.key_name) {
                return Err(DbError::DuplicateKey {
                    key: r.key_name.clone(),
                    first,
                    second: i,
                });
            }
            by_key.insert(r.key_name.clone(), i);
            check_template(
                i,
                "call_template",
                &r.call_template,
                r.interface.params.len(),
            )?;
            comparison.push(parse_comparison(i, r)?);
            external_list.insert(r.key_name.clone());
        }
        Ok(PatternDb {
            records,
            external_list,
            by_key,
            comparison,
        })
    }

    pub fn records(&self) -> &[PatternRecord] {
        &self.records
    }

    pub fn external_list(&self) -> &BTreeSet<String> {
        &self.external_list
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Exact, case-sensitive lookup by source library name.
    pub fn lookup_by_name(&self, name: &str) -> Option<&PatternRecord> {
        self.by_key.get(name).map(|&i| &self.records[i])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_key.get(name).copied()
    }

    /// One parsed comparison function per record, in record order.
    pub fn comparison_corpus(&self) -> Vec<(&str, &FunctionDef)> {
        self.records
            .iter()
            .zip(&self.comparison)
            .map(|(r, m)| (r.key_name.as_str(), &m.functions[0]))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = DbFile {
            schema_version: SCHEMA_VERSION,
            external_list: &self.external_list,
            records: &self.records,
        };
        serde_json::to_string_pretty(&file).expect("DB serializes")
    }
}

fn record_from_value(index: usize, v: &Value) -> Result<PatternRecord, DbError> {
    let err = |field: &str, message: String| DbError::Format {
        record: Some(index),
        field: Some(field.to_string()),
        message,
    };
    let Value::Object(obj) = v else {
        return Err(DbError::Format {
            record: Some(index),
            field: None,
            message: "expected an object".into(),
        });
    };
    let string = |obj: &Map<String, Value>, field: &str| -> Result<String, DbError> {
        match obj.get(field) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(err(field, "expected a string".into())),
            None => Err(err(field, "missing".into())),
        }
    };
    let key_name = string(obj, "key_name")?;
    if key_name.is_empty() {
        return Err(err("key_name", "must not be empty".into()));
    }
    let target_kind = serde_json::from_value(
        obj.get("target_kind").cloned().unwrap_or(Value::Null),
    )
    .map_err(|_| {
        err(
            "target_kind",
            "expected \"gpu_library\" or \"fpga_ip_core\"".into(),
        )
    })?;
    let interface = serde_json::from_value(obj.get("interface").cloned().unwrap_or(Value::Null))
        .map_err(|e| err("interface", e.to_string()))?;
    let artifact_ref = match obj.get("artifact_ref") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(err("artifact_ref", "expected a string".into())),
    };
    Ok(PatternRecord {
        key_name,
        target_kind,
        replacement_name: string(obj, "replacement_name")?,
        call_template: string(obj, "call_template")?,
        prelude_template: string(obj, "prelude_template")?,
        interface,
        comparison_code: string(obj, "comparison_code")?,
        artifact_ref,
    })
}

fn check_template(record: usize, field: &str, template: &str, arity: usize) -> Result<(), DbError> {
    for part in parse_template(template) {
        if let TemplatePart::Arg(i) = part {
            if i >= arity {
                return Err(DbError::Format {
                    record: Some(record),
                    field: Some(field.to_string()),
                    message: format!("placeholder {{arg{i}}} exceeds interface arity {arity}"),
                });
            }
        }
    }
    Ok(())
}

fn parse_comparison(index: usize, r: &PatternRecord) -> Result<SourceModel, DbError> {
    let err = |message: String| DbError::ComparisonCodeParse {
        record: index,
        key: r.key_name.clone(),
        message,
    };
    let model = parse_unit(&r.comparison_code).map_err(|e| err(e.to_string()))?;
    if let Some(d) = model.diagnostics.first() {
        return Err(err(d.to_string()));
    }
    if model.functions.is_empty() {
        return Err(err("no function definition".into()));
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::CoarseType;

    pub(crate) const TWO_RECORDS: &str = r##"{
      "schema_version": 1,
      "external_list": ["printf"],
      "records": [
        { "key_name": "fft", "target_kind": "gpu_library", "replacement_name": "cufft_exec",
          "call_template": "gpu_fft({arg0}, {arg1});", "prelude_template": "#include \"gpu_fft.h\"",
          "interface": { "params": [{"coarse":"pointer-or-array"},{"coarse":"int-like"}], "return": "void" },
          "comparison_code": "void naive_fft(double *x, int n) { int i; for (i = 0; i < n; i++) { x[i] = x[i] * 2.0; } }" },
        { "key_name": "lu", "target_kind": "gpu_library", "replacement_name": "cusolver_getrf",
          "call_template": "gpu_lu({arg0}, {arg1});", "prelude_template": "#include \"gpu_lu.h\"",
          "interface": { "params": [{"coarse":"pointer-or-array"},{"coarse":"int-like"}], "return": "void" },
          "comparison_code": "void lu_ref(double *a, int n) { int k; for (k = 0; k < n; k++) { a[k] = a[k] / a[0]; } }",
          "artifact_ref": "bin/lu.so" }
      ]
    }"##;

    #[test]
    fn loads_two_records() {
        let db = PatternDb::from_json(TWO_RECORDS).unwrap();
        assert_eq!(db.len(), 2);
        let fft = db.lookup_by_name("fft").unwrap();
        assert_eq!(fft.replacement_name, "cufft_exec");
        assert_eq!(fft.interface.params[0].coarse, CoarseType::PointerOrArray);
        assert!(db.lookup_by_name("FFT").is_none());
        assert!(db.external_list().contains("printf") && db.external_list().contains("lu"));
    }

    #[test]
    fn empty_records() {
        let db = PatternDb::from_json(r#"{"schema_version":1,"records":[]}"#).unwrap();
        assert!(db.is_empty());
        assert!(db.lookup_by_name("fft").is_none());
        assert!(db.comparison_corpus().is_empty());
    }

    #[test]
    fn duplicate_key_rejected() {
        let v: Value = serde_json::from_str(TWO_RECORDS).unwrap();
        let mut v = v;
        v["records"][1]["key_name"] = "fft".into();
        match PatternDb::from_json(&v.to_string()) {
            Err(DbError::DuplicateKey { key, first, second }) => {
                assert_eq!((key.as_str(), first, second), ("fft", 0, 1))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn located_format_errors() {
        let mut v: Value = serde_json::from_str(TWO_RECORDS).unwrap();
        v["records"][1]
            .as_object_mut()
            .unwrap()
            .remove("call_template");
        match PatternDb::from_json(&v.to_string()) {
            Err(DbError::Format {
                record: Some(1),
                field: Some(f),
                ..
            }) => assert_eq!(f, "call_template"),
            other => panic!("{other:?}"),
        }
        let mut v: Value = serde_json::from_str(TWO_RECORDS).unwrap();
        v["records"][0]["call_template"] = "gpu_fft({arg0}, {arg2});".into();
        assert!(matches!(
            PatternDb::from_json(&v.to_string()),
            Err(DbError::Format {
                record: Some(0),
                ..
            })
        ));
        assert!(PatternDb::from_json(r#"{"schema_version":2,"records":[]}"#).is_err());
    }

    #[test]
    fn bad_comparison_code() {
        let mut v: Value = serde_json::from_str(TWO_RECORDS).unwrap();
        v["records"][0]["comparison_code"] = "int x;".into();
        assert!(matches!(
            PatternDb::from_json(&v.to_string()),
            Err(DbError::ComparisonCodeParse { record: 0, .. })
        ));
        v["records"][0]["comparison_code"] = "void f( {".into();
        assert!(matches!(
            PatternDb::from_json(&v.to_string()),
            Err(DbError::ComparisonCodeParse { record: 0, .. })
        ));
    }

    #[test]
    fn corpus_exposes_comparison_functions() {
        let db = PatternDb::from_json(TWO_RECORDS).unwrap();
        let corpus = db.comparison_corpus();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[0].0, "fft");
        assert_eq!(corpus[0].1.name, "naive_fft");
    }

    #[test]
    fn serialize_then_reload_is_identical() {
        let db = PatternDb::from_json(TWO_RECORDS).unwrap();
        assert_eq!(PatternDb::from_json(&db.to_json()).unwrap(), db);
    }

    #[test]
    fn template_parts() {
        assert_eq!(
            parse_template("{ret} = f({arg0}, {x}, {arg12});"),
            vec![
                TemplatePart::Ret,
                TemplatePart::Text(" = f(".into()),
                TemplatePart::Arg(0),
                TemplatePart::Text(", {x}, ".into()),
                TemplatePart::Arg(12),
                TemplatePart::Text(");".into()),
            ]
        );
        assert_eq!(
            parse_template("{ {arg} }"),
            vec![TemplatePart::Text("{ {arg} }".into())]
        );
    }
}
