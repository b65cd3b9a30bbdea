//! Report envelope, input decoding and the exit status contract.

use std::fs;
use std::path::Path;

use arveson_core::{Error, ErrorClass};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// Why a run did not succeed. `Input` never produces a report.
#[derive(Debug)]
pub enum Fail {
    Input(String),
    Validation(String),
    Numerical(String),
}

impl Fail {
    pub fn exit_code(&self) -> i32 {
        match self {
            Fail::Input(_) => 1,
            Fail::Validation(_) => 2,
            Fail::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Fail::Input(m) | Fail::Validation(m) | Fail::Numerical(m) => m,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            Fail::Input(_) => "input_error",
            Fail::Validation(_) => "validation_failure",
            Fail::Numerical(_) => "numerical_failure",
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e.class() {
            ErrorClass::Input => Fail::Input(m),
            ErrorClass::Validation => Fail::Validation(m),
            ErrorClass::Numerical => Fail::Numerical(m),
        }
    }
}

/// What a command produced: a result body and, possibly, a failed check
/// that still leaves a report worth writing.
pub struct Outcome {
    pub result: Option<Value>,
    pub failure: Option<Fail>,
    /// Aligned text echoed to stdout when the report goes to a file.
    pub table: Option<String>,
}

impl Outcome {
    pub fn ok<T: Serialize>(result: &T) -> Result<Self, Fail> {
        Ok(Self {
            result: Some(to_value(result)?),
            failure: None,
            table: None,
        })
    }

    pub fn checked<T: Serialize>(result: &T, failure: Option<Fail>) -> Result<Self, Fail> {
        Ok(Self {
            result: Some(to_value(result)?),
            failure,
            table: None,
        })
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value, Fail> {
    serde_json::to_value(v).map_err(|e| Fail::Numerical(format!("report serialization: {e}")))
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub cluster_tol: f64,
    pub rank_tol: f64,
    pub degree: Option<usize>,
    pub grid: Option<usize>,
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub schema_version: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub status: &'static str,
    pub error: Option<&'a str>,
    pub result: Option<&'a Value>,
}

impl<'a> Report<'a> {
    pub fn new(command: &'a str, seed: u64, tolerances: Tolerances, outcome: &'a Outcome) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "arveson",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            tolerances,
            status: outcome.failure.as_ref().map_or("ok", Fail::status),
            error: outcome.failure.as_ref().map(Fail::message),
            result: outcome.result.as_ref(),
        }
    }
}

/// Decode a JSON file, naming the offending field on failure.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let field = if field == "." { "<root>".to_string() } else { field };
        Fail::Input(format!("{}: field `{field}`: {}", path.display(), e.inner()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(Fail::from(Error::InvalidInput("x".into())).exit_code(), 1);
        assert_eq!(Fail::from(Error::NotCommuting { defect: 1.0 }).exit_code(), 2);
        assert_eq!(Fail::from(Error::Inadmissible { product: 1.5 }).exit_code(), 2);
        assert_eq!(Fail::from(Error::Singular("x")).exit_code(), 3);
        assert_eq!(Fail::from(Error::IllConditioned { what: "x", cond: 1e20 }).exit_code(), 3);
    }

    #[test]
    fn read_json_reports_the_path() {
        let dir = std::env::temp_dir().join(format!("arveson-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("t.json");
        std::fs::write(&p, r#"{"a": [1, 2, "three"]}"#).unwrap();
        #[derive(serde::Deserialize, Debug)]
        #[allow(dead_code)]
        struct T {
            a: Vec<u32>,
        }
        let err = read_json::<T>(&p).unwrap_err();
        assert!(err.message().contains("`a[2]`"), "{}", err.message());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
