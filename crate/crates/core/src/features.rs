//! Systemic networks of lexico-grammatical choices.
//!
//! A system is a set of mutually exclusive features guarded by an entry
//! condition. Conditions are either unit context (finite, clausal), a
//! feature selected in a parent system, or unconditional. The network is
//! loaded from JSON; nothing about the shipped inventory is hard-coded here.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::violation::Violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextFlag {
    Finite,
    Clausal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryCondition {
    Always,
    Context(ContextFlag),
    Feature { system: String, feature: String },
}

impl<'de> Deserialize<'de> for EntryCondition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Context { context: ContextFlag },
            Feature { system: String, feature: String },
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "always" => Ok(EntryCondition::Always),
            Raw::Word(w) => Err(de::Error::custom(format!("unknown entry condition `{w}`"))),
            Raw::Context { context } => Ok(EntryCondition::Context(context)),
            Raw::Feature { system, feature } => Ok(EntryCondition::Feature { system, feature }),
        }
    }
}

impl Serialize for EntryCondition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            EntryCondition::Always => s.serialize_str("always"),
            EntryCondition::Context(c) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("context", c)?;
                m.end()
            }
            EntryCondition::Feature { system, feature } => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("system", system)?;
                m.serialize_entry("feature", feature)?;
                m.end()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct System {
    pub name: String,
    pub features: Vec<String>,
    pub entry: EntryCondition,
}

impl System {
    pub fn has_feature(&self, feature: &str) -> bool {
        self.features.iter().any(|f| f == feature)
    }

    pub fn feature_index(&self, feature: &str) -> Option<usize> {
        self.features.iter().position(|f| f == feature)
    }
}

/// Unit context against which context entry conditions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitContext {
    pub finite: bool,
    pub clausal: bool,
}

impl UnitContext {
    pub const FINITE_CLAUSE: UnitContext = UnitContext {
        finite: true,
        clausal: true,
    };
    pub const NON_FINITE_CLAUSE: UnitContext = UnitContext {
        finite: false,
        clausal: true,
    };
    pub const NOMINAL: UnitContext = UnitContext {
        finite: false,
        clausal: false,
    };

    pub fn holds(&self, flag: ContextFlag) -> bool {
        match flag {
            ContextFlag::Finite => self.finite,
            ContextFlag::Clausal => self.clausal,
        }
    }
}

/// The coding of one text unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureBundle {
    pub selections: BTreeMap<String, String>,
    pub context: UnitContext,
}

impl FeatureBundle {
    pub fn new(context: UnitContext) -> Self {
        Self {
            selections: BTreeMap::new(),
            context,
        }
    }

    pub fn with(mut self, system: &str, feature: &str) -> Self {
        self.select(system, feature);
        self
    }

    pub fn select(&mut self, system: &str, feature: &str) {
        self.selections.insert(system.to_string(), feature.to_string());
    }

    pub fn get(&self, system: &str) -> Option<&str> {
        self.selections.get(system).map(String::as_str)
    }

    pub fn is(&self, system: &str, feature: &str) -> bool {
        self.get(system) == Some(feature)
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("malformed network definition: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("system `{0}` declares fewer than two features")]
    TooFewFeatures(String),
    #[error("feature `{feature}` declared twice (in `{first}` and `{second}`)")]
    DuplicateFeature {
        feature: String,
        first: String,
        second: String,
    },
    #[error("system `{0}` declared twice")]
    DuplicateSystem(String),
    #[error("system `{system}` enters on unknown `{parent}:{feature}`")]
    UnknownParent {
        system: String,
        parent: String,
        feature: String,
    },
    #[error("entry conditions form a cycle through `{0}`")]
    Cycle(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum BundleError {
    #[error("no selection and no default for applicable system `{0}`")]
    MissingDefault(String),
    #[error("default `{feature}` is not a feature of `{system}`")]
    BadDefault { system: String, feature: String },
    #[error("partial bundle is invalid: {0:?}")]
    InvalidPartial(Vec<Violation>),
}

pub const UNSELECTED_RULE: &str = "unselected applicable system";

#[derive(Debug, Clone)]
pub struct SystemNetwork {
    systems: Vec<System>,
    /// Indices into `systems`, parents before children, otherwise in
    /// declaration order.
    order: Vec<usize>,
}

impl SystemNetwork {
    pub fn from_json(document: &str) -> Result<Self, NetworkError> {
        let systems: Vec<System> = serde_json::from_str(document)?;
        Self::new(systems)
    }

    pub fn new(systems: Vec<System>) -> Result<Self, NetworkError> {
        let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
        let mut names = BTreeSet::new();
        for s in &systems {
            if !names.insert(s.name.as_str()) {
                return Err(NetworkError::DuplicateSystem(s.name.clone()));
            }
            if s.features.len() < 2 {
                return Err(NetworkError::TooFewFeatures(s.name.clone()));
            }
            for f in &s.features {
                if let Some(first) = owner.insert(f, &s.name) {
                    return Err(NetworkError::DuplicateFeature {
                        feature: f.clone(),
                        first: first.to_string(),
                        second: s.name.clone(),
                    });
                }
            }
        }
        for s in &systems {
            if let EntryCondition::Feature { system, feature } = &s.entry {
                let ok = systems.iter().any(|p| &p.name == system && p.has_feature(feature));
                if !ok {
                    return Err(NetworkError::UnknownParent {
                        system: s.name.clone(),
                        parent: system.clone(),
                        feature: feature.clone(),
                    });
                }
            }
        }
        let order = topological_order(&systems)?;
        Ok(Self { systems, order })
    }

    pub fn systems(&self) -> &[System] {
        &self.systems
    }

    /// Systems with every parent ahead of its dependents.
    pub fn ordered(&self) -> impl Iterator<Item = &System> {
        self.order.iter().map(|&i| &self.systems[i])
    }

    pub fn system(&self, name: &str) -> Option<&System> {
        self.systems.iter().find(|s| s.name == name)
    }

    pub fn system_of_feature(&self, feature: &str) -> Option<&System> {
        self.systems.iter().find(|s| s.has_feature(feature))
    }

    /// Whether `system`'s entry condition holds for the bundle as it stands.
    pub fn is_applicable(&self, system: &System, bundle: &FeatureBundle) -> bool {
        match &system.entry {
            EntryCondition::Always => true,
            EntryCondition::Context(flag) => bundle.context.holds(*flag),
            EntryCondition::Feature {
                system: parent,
                feature,
            } => {
                let parent_applicable = self
                    .system(parent)
                    .map(|p| self.is_applicable(p, bundle))
                    .unwrap_or(false);
                parent_applicable && bundle.is(parent, feature)
            }
        }
    }

    /// Systems whose entry conditions hold, in dependency order.
    pub fn applicable_systems(&self, bundle: &FeatureBundle) -> Vec<&str> {
        self.ordered()
            .filter(|s| self.is_applicable(s, bundle))
            .map(|s| s.name.as_str())
            .collect()
    }

    pub fn validate_bundle(&self, bundle: &FeatureBundle) -> Vec<Violation> {
        let mut out = Vec::new();
        if bundle.context.finite && !bundle.context.clausal {
            out.push(Violation::new("finite unit must be clausal", "context"));
        }
        for (system, feature) in &bundle.selections {
            match self.system(system) {
                None => out.push(Violation::new("unknown system", system)),
                Some(s) if !s.has_feature(feature) => {
                    out.push(Violation::new("unknown feature", format!("{system}={feature}")))
                }
                Some(s) if !self.is_applicable(s, bundle) => {
                    out.push(Violation::new("entry condition not met", system))
                }
                Some(_) => {}
            }
        }
        for s in self.ordered() {
            if self.is_applicable(s, bundle) && bundle.get(&s.name).is_none() {
                out.push(Violation::new(UNSELECTED_RULE, &s.name));
            }
        }
        out
    }

    /// Fills every applicable, unselected system from `defaults`. Existing
    /// selections are kept; systems that become applicable through a
    /// default are filled in turn.
    pub fn complete_bundle(
        &self,
        partial: &FeatureBundle,
        defaults: &BTreeMap<String, String>,
    ) -> Result<FeatureBundle, BundleError> {
        let blocking: Vec<_> = self
            .validate_bundle(partial)
            .into_iter()
            .filter(|v| v.rule != UNSELECTED_RULE)
            .collect();
        if !blocking.is_empty() {
            return Err(BundleError::InvalidPartial(blocking));
        }
        let mut bundle = partial.clone();
        for s in self.ordered() {
            if bundle.get(&s.name).is_some() || !self.is_applicable(s, &bundle) {
                continue;
            }
            let feature = defaults
                .get(&s.name)
                .ok_or_else(|| BundleError::MissingDefault(s.name.clone()))?;
            if !s.has_feature(feature) {
                return Err(BundleError::BadDefault {
                    system: s.name.clone(),
                    feature: feature.clone(),
                });
            }
            bundle.select(&s.name, feature);
        }
        Ok(bundle)
    }
}

fn topological_order(systems: &[System]) -> Result<Vec<usize>, NetworkError> {
    let index: BTreeMap<&str, usize> = systems.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
    let parent_of = |i: usize| match &systems[i].entry {
        EntryCondition::Feature { system, .. } => index.get(system.as_str()).copied(),
        _ => None,
    };
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; systems.len()];
    let mut order = Vec::with_capacity(systems.len());
    for start in 0..systems.len() {
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            match state[i] {
                2 => break,
                1 => return Err(NetworkError::Cycle(systems[i].name.clone())),
                _ => {
                    state[i] = 1;
                    chain.push(i);
                    cur = parent_of(i);
                }
            }
        }
        for &i in chain.iter().rev() {
            state[i] = 2;
            order.push(i);
        }
    }
    Ok(order)
}
