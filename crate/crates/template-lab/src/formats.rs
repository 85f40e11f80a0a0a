//! JSON and CSV formats.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tlab_core::geodesic::{BoundaryEstimate, ClusterReport};
use tlab_core::torus::DivergenceRow;
use tlab_core::{expand_self_similar, SelfSimilarData, TemplateData, TemplateError};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown template kind {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Contents of a template file: explicit data or a self-similar tuple.
#[derive(Clone, Debug, PartialEq)]
pub enum TemplateFile {
    Explicit(TemplateData),
    SelfSimilar(SelfSimilarData),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SelfSimilarJson {
    kind: String,
    beta: f64,
    l0: f64,
    eps0: f64,
    l1: f64,
    eps1: f64,
}

impl TemplateFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let v: Value = serde_json::from_str(text)?;
        match v.get("kind").and_then(Value::as_str) {
            Some("self_similar") => {
                let s: SelfSimilarJson = serde_json::from_value(v)?;
                Ok(TemplateFile::SelfSimilar(SelfSimilarData::new(s.beta, s.l0, s.eps0, s.l1, s.eps1)))
            }
            Some("finite") | Some("half") => Ok(TemplateFile::Explicit(serde_json::from_value(v)?)),
            Some(k) => Err(FormatError::UnknownKind(k.into())),
            None => Err(FormatError::UnknownKind(String::new())),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            TemplateFile::Explicit(t) => template_json(t),
            TemplateFile::SelfSimilar(s) => serde_json::to_string(&SelfSimilarJson {
                kind: "self_similar".into(),
                beta: s.beta,
                l0: s.l0,
                eps0: s.eps0,
                l1: s.l1,
                eps1: s.eps1,
            })
            .expect("plain data serializes"),
        }
    }

    /// Explicit template; self-similar data is expanded to `n_walls` walls.
    pub fn into_template(self, n_walls: usize) -> Result<TemplateData, FormatError> {
        match self {
            TemplateFile::Explicit(t) => Ok(t),
            TemplateFile::SelfSimilar(s) => Ok(expand_self_similar(&s, n_walls, 0)?),
        }
    }
}

pub fn template_json(t: &TemplateData) -> String {
    serde_json::to_string(t).expect("plain data serializes")
}

#[derive(Serialize)]
struct BoundaryCsvRow {
    depth: usize,
    theta_lo: f64,
    theta_hi: f64,
    branches: usize,
}

#[derive(Serialize)]
struct ClusterCsvRow {
    n_span: usize,
    #[serde(rename = "R_prime")]
    r_prime: f64,
    excess: f64,
    normalized_excess: f64,
}

fn write_rows<S: Serialize>(w: impl Write, rows: impl IntoIterator<Item = S>) -> Result<(), FormatError> {
    let mut c = csv::Writer::from_writer(w);
    for r in rows {
        c.serialize(r)?;
    }
    c.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_boundary_csv(w: impl Write, profile: &[BoundaryEstimate]) -> Result<(), FormatError> {
    write_rows(
        w,
        profile.iter().map(|p| BoundaryCsvRow {
            depth: p.depth,
            theta_lo: p.theta_lo,
            theta_hi: p.theta_hi,
            branches: p.surviving_branches,
        }),
    )
}

/// One row per sample.
pub fn write_cluster_csv(w: impl Write, rep: &ClusterReport) -> Result<(), FormatError> {
    write_rows(
        w,
        rep.samples.iter().map(|s| ClusterCsvRow {
            n_span: rep.n_span,
            r_prime: rep.r_prime,
            excess: s.excess,
            normalized_excess: s.normalized_excess,
        }),
    )
}

pub fn write_divergence_csv(w: impl Write, rows: &[DivergenceRow]) -> Result<(), FormatError> {
    write_rows(w, rows.iter())
}
