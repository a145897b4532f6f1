//! Resources shipped with the crate, embedded at compile time so the CLI
//! and bindings work without a data directory.

use crate::features::SystemNetwork;
use crate::genre::{load_profiles, Profiles};
use crate::lexicon::Lexicon;
use crate::realizer::RuleSet;
use crate::task_model::{parse_task_model, TaskModel};

pub const NETWORK_JSON: &str = include_str!("../data/network.json");
pub const LEXICON_JSON: &str = include_str!("../data/lexicon.json");
pub const RULES_JSON: &str = include_str!("../data/rules.json");
pub const PROFILES_JSON: &str = include_str!("../data/paper-profiles.json");
pub const TASK_MODEL_JSON: &str = include_str!("../data/macwrite-sample.json");

/// Shipped reference tables, by file name.
pub const REFERENCE_TABLES: [(&str, &str); 7] = [
    ("paper-fig2-modal.tsv", include_str!("../data/paper-fig2-modal.tsv")),
    (
        "paper-fig2-polarity.tsv",
        include_str!("../data/paper-fig2-polarity.tsv"),
    ),
    ("paper-fig2-mood.tsv", include_str!("../data/paper-fig2-mood.tsv")),
    ("paper-fig3.tsv", include_str!("../data/paper-fig3.tsv")),
    ("paper-fig4.tsv", include_str!("../data/paper-fig4.tsv")),
    ("paper-fig5.tsv", include_str!("../data/paper-fig5.tsv")),
    ("paper-fig6.tsv", include_str!("../data/paper-fig6.tsv")),
];

pub fn network() -> SystemNetwork {
    SystemNetwork::from_json(NETWORK_JSON).expect("shipped network is valid")
}

pub fn lexicon() -> Lexicon {
    Lexicon::from_json(LEXICON_JSON).expect("shipped lexicon is valid")
}

pub fn rules() -> RuleSet {
    RuleSet::from_json(RULES_JSON).expect("shipped rules are valid")
}

pub fn profiles() -> Profiles {
    load_profiles(PROFILES_JSON, &network())
        .expect("shipped profiles are valid")
        .profiles
}

pub fn task_model() -> TaskModel {
    parse_task_model(TASK_MODEL_JSON).expect("shipped task model is valid")
}

pub fn reference_table(name: &str) -> Option<&'static str> {
    REFERENCE_TABLES.iter().find(|(n, _)| *n == name).map(|(_, body)| *body)
}
