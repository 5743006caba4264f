//! Problem files. The accepted shape is published in `schema/problem_spec.schema.json`.

use std::path::Path;

use berglab::domains::DomainDescriptor;
use berglab::jets::TermsJson;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    /// When present it must agree with the subcommand.
    #[serde(default)]
    pub command: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub domain: Option<DomainDescriptor>,
    #[serde(default)]
    pub f: Option<TermsJson>,
    /// Generators of `I`.
    #[serde(default)]
    pub ideal: Option<Vec<TermsJson>>,
    /// Toric weight `φ = Σ 2 a_j log|z_j|`.
    #[serde(default)]
    pub weight: Option<Vec<f64>>,
    #[serde(default)]
    pub xi: Option<TermsJson>,
    #[serde(default)]
    pub level: Option<u32>,
    #[serde(default)]
    pub k_range: Option<[u32; 2]>,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub degree: Option<u32>,
    #[serde(default)]
    pub exhaustion: Option<Vec<DomainDescriptor>>,
    #[serde(default)]
    pub limit_domain: Option<DomainDescriptor>,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub tol: Option<f64>,
}

/// A rejected problem file, with the JSON path of the offending field.
#[derive(Debug)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "schema violation at {}: {}", self.path, self.message)
    }
}

impl SchemaError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

pub fn parse(text: &str) -> Result<ProblemSpec, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let spec: ProblemSpec = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "$".to_string() } else { format!("$.{path}") };
        SchemaError::new(path, e.into_inner().to_string())
    })?;
    spec.check_dimensions()?;
    Ok(spec)
}

pub fn load(path: &Path) -> Result<ProblemSpec, SchemaError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SchemaError::new("$", format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

impl ProblemSpec {
    fn check_dimensions(&self) -> Result<(), SchemaError> {
        if self.n == 0 {
            return Err(SchemaError::new("$.n", "must be at least 1"));
        }
        let mut terms: Vec<(String, &TermsJson)> = Vec::new();
        if let Some(f) = &self.f {
            terms.push(("$.f".into(), f));
        }
        if let Some(xi) = &self.xi {
            terms.push(("$.xi".into(), xi));
        }
        for (i, g) in self.ideal.iter().flatten().enumerate() {
            terms.push((format!("$.ideal[{i}]"), g));
        }
        for (path, t) in terms {
            if t.n != self.n {
                return Err(SchemaError::new(format!("{path}.n"), format!("expected {}, got {}", self.n, t.n)));
            }
            for (j, term) in t.terms.iter().enumerate() {
                if term.alpha.len() != self.n {
                    return Err(SchemaError::new(
                        format!("{path}.terms[{j}].alpha"),
                        format!("expected {} exponents, got {}", self.n, term.alpha.len()),
                    ));
                }
            }
        }
        if let Some(a) = &self.weight {
            if a.len() != self.n {
                return Err(SchemaError::new("$.weight", format!("expected {} entries, got {}", self.n, a.len())));
            }
        }
        if let Some([lo, hi]) = self.k_range {
            if lo == 0 || lo > hi {
                return Err(SchemaError::new("$.k_range", "need 1 <= start <= end"));
            }
        }
        Ok(())
    }

    pub fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, SchemaError> {
        field.as_ref().ok_or_else(|| SchemaError::new(format!("$.{name}"), "missing field required by this command"))
    }
}
