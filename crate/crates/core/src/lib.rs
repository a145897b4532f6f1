//! Genre-controlled generation of bilingual software instructions from a
//! task model, with the corpus statistics used to check the output.
//!
//! The pipeline runs task model → genre staging and feature preselection
//! → template realization. The `stats` module codes and tabulates corpora
//! so generated text can be compared against reference distributions.

pub mod data;
pub mod features;
pub mod generate;
pub mod genre;
pub mod lexicon;
pub mod realizer;
pub mod recode;
pub mod rng;
pub mod stats;
pub mod task_model;
pub mod violation;

pub use features::{FeatureBundle, SystemNetwork, UnitContext};
pub use generate::{generate_corpus, generate_document, CorpusRequest, GenerateError, Resources};
pub use genre::{Genre, GenreProfile, Profiles, SelectionMode};
pub use lexicon::{Lang, Lexicon};
pub use realizer::{HeadingStyle, Realizer, RuleSet};
pub use recode::recode_surface;
pub use rng::SplitMix64;
pub use task_model::{ElementKind, TaskElement, TaskModel};
pub use violation::Violation;
