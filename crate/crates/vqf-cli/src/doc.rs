//! On-disk form documents.
//!
//! A form is stored as full n x n matrices, one per component, with the
//! symmetry written out (a term like xy appears as 0.5 in both off-diagonal
//! slots). Serialization uses shortest-round-trip decimal for doubles, so
//! parse and serialize are mutually inverse bit-for-bit, and the canonical
//! rendering is stable enough to hash.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use vqf_core::{SymmetricMatrix, VQForm, VqfError};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum DocError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Form(#[from] VqfError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct FormMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormDocument {
    pub schema_version: String,
    pub n: usize,
    pub m: usize,
    pub matrices: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<FormMetadata>,
}

impl FormDocument {
    pub fn from_form(f: &VQForm, metadata: Option<FormMetadata>) -> Self {
        let n = f.domain_dim();
        FormDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            n,
            m: f.codomain_dim(),
            matrices: f
                .components()
                .iter()
                .map(|a| (0..n).map(|i| a.row(i).to_vec()).collect())
                .collect(),
            metadata,
        }
    }

    /// Validates the schema and rebuilds the form; asymmetry, non-finite
    /// entries, and shape mismatches are reported with their location.
    pub fn to_form(&self) -> Result<VQForm, DocError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(DocError::Schema(format!(
                "unsupported schema_version {:?}, expected {:?}",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        if self.m == 0 || self.matrices.len() != self.m {
            return Err(DocError::Schema(format!(
                "field 'matrices' has {} entries but m = {}",
                self.matrices.len(),
                self.m
            )));
        }
        let mut mats = Vec::with_capacity(self.m);
        for (k, rows) in self.matrices.iter().enumerate() {
            if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                return Err(DocError::Schema(format!(
                    "matrix {k} is not {n} x {n}",
                    n = self.n
                )));
            }
            mats.push(
                SymmetricMatrix::from_rows(rows)
                    .map_err(|e| DocError::Schema(format!("matrix {k}: {e}")))?,
            );
        }
        Ok(VQForm::new(mats)?)
    }
}

pub fn parse_document(text: &str) -> Result<FormDocument, DocError> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_document(path: &std::path::Path) -> Result<FormDocument, DocError> {
    let text = std::fs::read_to_string(path).map_err(|source| DocError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_document(&text)
}

/// The one true rendering: pretty JSON plus a trailing newline. Hashing
/// and byte-identity guarantees refer to this form.
pub fn canonical_json(doc: &FormDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn digest(doc: &FormDocument) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical_json(doc).as_bytes());
    format!("sha256:{:x}", hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use vqf_core::{coordinate_products, random_form, Ensemble};

    #[test]
    fn form_survives_the_document_round_trip_bit_for_bit() {
        for seed in 0..10u64 {
            let f = random_form(4, 3, Ensemble::Gaussian, seed).unwrap();
            let doc = FormDocument::from_form(&f, None);
            let text = canonical_json(&doc);
            let back = parse_document(&text).unwrap().to_form().unwrap();
            assert_eq!(f.components(), back.components());
        }
    }

    #[test]
    fn canonical_rendering_is_idempotent() {
        let doc = FormDocument::from_form(
            &coordinate_products(),
            Some(FormMetadata {
                name: Some("trident".into()),
                notes: None,
            }),
        );
        let once = canonical_json(&doc);
        let twice = canonical_json(&parse_document(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn digests_differ_when_the_form_differs() {
        let a = FormDocument::from_form(&coordinate_products(), None);
        let mut b = a.clone();
        b.matrices[0][0][0] = 1e-300;
        assert_ne!(digest(&a), digest(&b));
        assert!(digest(&a).starts_with("sha256:"));
    }

    #[test]
    fn asymmetric_input_is_rejected_with_location() {
        let text = r#"{
  "schema_version": "1",
  "n": 2,
  "m": 1,
  "matrices": [[[0.0, 1.0], [0.5, 0.0]]]
}"#;
        let err = parse_document(text).unwrap().to_form().unwrap_err();
        assert!(err.to_string().contains("matrix 0"));
    }

    #[test]
    fn wrong_shape_and_version_are_schema_errors() {
        let doc = FormDocument {
            schema_version: "1".into(),
            n: 3,
            m: 1,
            matrices: vec![vec![vec![0.0; 2]; 2]],
            metadata: None,
        };
        assert!(doc.to_form().is_err());
        let doc2 = FormDocument {
            schema_version: "0".into(),
            ..FormDocument::from_form(&coordinate_products(), None)
        };
        assert!(matches!(doc2.to_form(), Err(DocError::Schema(_))));
    }
}
