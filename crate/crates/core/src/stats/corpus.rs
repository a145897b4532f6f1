use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureBundle, SystemNetwork, UnitContext};
use crate::genre::Genre;
use crate::lexicon::Lang;
use crate::task_model::ElementKind;
use crate::violation::Violation;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusMeta {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedUnit {
    pub id: String,
    pub genre: Genre,
    pub element: ElementKind,
    pub lang: Lang,
    pub text: String,
    pub bundle: FeatureBundle,
    /// Task-model element the unit was generated from, if any.
    pub element_id: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CodedCorpus {
    pub units: Vec<CodedUnit>,
    pub meta: CorpusMeta,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitLine {
    id: String,
    genre: Genre,
    element: ElementKind,
    lang: Lang,
    text: String,
    bundle: BTreeMap<String, String>,
    context: UnitContext,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<LineMeta>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineMeta {
    #[serde(flatten)]
    corpus: CorpusMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    element_id: Option<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unit id `{0}` occurs twice")]
    DuplicateId(String),
    #[error("unit `{id}` has an invalid bundle: {}", list(.violations))]
    InvalidBundle { id: String, violations: Vec<Violation> },
}

fn list(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl CodedCorpus {
    pub fn new(units: Vec<CodedUnit>, meta: CorpusMeta) -> Result<Self, CorpusError> {
        let mut seen = BTreeSet::new();
        for u in &units {
            if !seen.insert(u.id.as_str()) {
                return Err(CorpusError::DuplicateId(u.id.clone()));
            }
        }
        Ok(Self { units, meta })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Reads JSON Lines. Blank lines are skipped; the metadata of the
    /// first unit carrying one becomes the corpus metadata.
    pub fn from_jsonl(text: &str, network: &SystemNetwork) -> Result<Self, CorpusError> {
        let mut units = Vec::new();
        let mut meta = None;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let raw: UnitLine = serde_json::from_str(line).map_err(|e| CorpusError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            let bundle = FeatureBundle {
                selections: raw.bundle,
                context: raw.context,
            };
            let violations = network.validate_bundle(&bundle);
            if !violations.is_empty() {
                return Err(CorpusError::InvalidBundle { id: raw.id, violations });
            }
            let element_id = match raw.meta {
                Some(m) => {
                    if meta.is_none() {
                        meta = Some(m.corpus);
                    }
                    m.element_id
                }
                None => None,
            };
            units.push(CodedUnit {
                id: raw.id,
                genre: raw.genre,
                element: raw.element,
                lang: raw.lang,
                text: raw.text,
                bundle,
                element_id,
            });
        }
        Self::new(units, meta.unwrap_or_default())
    }

    /// One JSON object per line, each carrying the corpus metadata.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for u in &self.units {
            let line = UnitLine {
                id: u.id.clone(),
                genre: u.genre,
                element: u.element,
                lang: u.lang,
                text: u.text.clone(),
                bundle: u.bundle.selections.clone(),
                context: u.bundle.context,
                meta: Some(LineMeta {
                    corpus: self.meta.clone(),
                    element_id: u.element_id.clone(),
                }),
            };
            out.push_str(&serde_json::to_string(&line).expect("unit serializes"));
            out.push('\n');
        }
        out
    }

    pub fn texts(&self) -> Vec<&str> {
        self.units.iter().map(|u| u.text.as_str()).collect()
    }

    /// Concatenation of corpora; ids must stay unique.
    pub fn merge(parts: Vec<CodedCorpus>) -> Result<Self, CorpusError> {
        let meta = parts.first().map(|c| c.meta.clone()).unwrap_or_default();
        let units = parts.into_iter().flat_map(|c| c.units).collect();
        Self::new(units, meta)
    }
}
