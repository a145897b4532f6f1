//! Genre profiles: element availability, realization distributions and
//! qualitative restrictions per genre, plus staging and preselection.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{FeatureBundle, System, SystemNetwork, UnitContext};
use crate::lexicon::{LexicalEntry, Lexicon, UnresolvedLexeme};
use crate::realizer::coherence_conflict;
use crate::rng::SplitMix64;
use crate::task_model::{plan_elements, ElementKind, TaskElement, TaskModel, TaskModelError};

/// Columns whose raw sum is further than this from 100 are reported.
pub const SUM_TOLERANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Genre {
    Procedure,
    ReadyReference,
    Elaboration,
}

impl Genre {
    pub const ALL: [Genre; 3] = [Genre::Procedure, Genre::ReadyReference, Genre::Elaboration];

    pub fn as_str(self) -> &'static str {
        match self {
            Genre::Procedure => "procedure",
            Genre::ReadyReference => "ready-reference",
            Genre::Elaboration => "elaboration",
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Genre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Genre::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown genre `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    Deterministic,
    Stochastic,
}

impl FromStr for SelectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deterministic" => Ok(SelectionMode::Deterministic),
            "stochastic" => Ok(SelectionMode::Stochastic),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// Weights over a system's features, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub system: String,
    pub features: Vec<String>,
    /// Normalized to sum to 1.
    pub weights: Vec<f64>,
    /// As written in the profile file.
    pub raw: Vec<f64>,
}

impl Distribution {
    fn from_raw(system: &System, raw: &BTreeMap<String, f64>) -> Result<(Self, f64), ProfileError> {
        for (f, w) in raw {
            if !system.has_feature(f) {
                return Err(ProfileError::UnknownFeature {
                    system: system.name.clone(),
                    feature: f.clone(),
                });
            }
            if !w.is_finite() || *w < 0.0 {
                return Err(ProfileError::BadWeight {
                    system: system.name.clone(),
                    feature: f.clone(),
                });
            }
        }
        let raw: Vec<f64> = system
            .features
            .iter()
            .map(|f| raw.get(f).copied().unwrap_or(0.0))
            .collect();
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(ProfileError::EmptyColumn(system.name.clone()));
        }
        let dist = Distribution {
            system: system.name.clone(),
            features: system.features.clone(),
            weights: raw.iter().map(|w| w / sum).collect(),
            raw,
        };
        Ok((dist, sum))
    }

    pub fn weight(&self, feature: &str) -> f64 {
        self.features
            .iter()
            .position(|f| f == feature)
            .map(|i| self.weights[i])
            .unwrap_or(0.0)
    }

    /// Maximum-weight feature; ties go to the earliest declared.
    pub fn argmax(&self) -> &str {
        let mut best = 0;
        for (i, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = i;
            }
        }
        &self.features[best]
    }

    /// Selection restricted to features passing `feasible`. Stochastic mode
    /// always consumes exactly one draw. When no feasible feature carries
    /// weight the first feasible one is returned.
    pub fn choose(&self, mode: SelectionMode, rng: &mut SplitMix64, feasible: impl Fn(&str) -> bool) -> Option<&str> {
        let mask: Vec<bool> = self.features.iter().map(|f| feasible(f)).collect();
        let masked: Vec<f64> = self
            .weights
            .iter()
            .zip(&mask)
            .map(|(w, ok)| if *ok { *w } else { 0.0 })
            .collect();
        let picked = match mode {
            SelectionMode::Stochastic => rng.categorical(&masked),
            SelectionMode::Deterministic => {
                let mut best: Option<usize> = None;
                for (i, w) in masked.iter().enumerate() {
                    if *w > 0.0 && best.is_none_or(|b| *w > masked[b]) {
                        best = Some(i);
                    }
                }
                best
            }
        };
        picked
            .or_else(|| mask.iter().position(|ok| *ok))
            .map(|i| self.features[i].as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Qualitative {
    pub causatives_allowed: bool,
    pub verbal_processes_allowed: bool,
    pub allowed_conjunctions: Vec<String>,
    pub goal_as_nominalisation_heading: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenreProfile {
    pub genre: Genre,
    /// Normalized share of each element kind.
    pub availability: BTreeMap<ElementKind, f64>,
    pub availability_raw: BTreeMap<ElementKind, f64>,
    pub realization: BTreeMap<ElementKind, BTreeMap<String, Distribution>>,
    pub qualitative: Qualitative,
    /// Fallback selections for systems without a distribution; the "*"
    /// entry is overridden per element kind.
    pub defaults: BTreeMap<String, String>,
    pub kind_defaults: BTreeMap<ElementKind, BTreeMap<String, String>>,
}

impl GenreProfile {
    pub fn element_availability(&self, kind: ElementKind) -> f64 {
        self.availability.get(&kind).copied().unwrap_or(0.0)
    }

    pub fn distribution(&self, kind: ElementKind, system: &str) -> Option<&Distribution> {
        self.realization.get(&kind).and_then(|m| m.get(system))
    }

    pub fn default_for(&self, kind: ElementKind, system: &str) -> Option<&str> {
        self.kind_defaults
            .get(&kind)
            .and_then(|m| m.get(system))
            .or_else(|| self.defaults.get(system))
            .map(String::as_str)
    }

    /// Defaults for `kind` with the per-kind overrides applied.
    pub fn defaults_for(&self, kind: ElementKind) -> BTreeMap<String, String> {
        let mut out = self.defaults.clone();
        if let Some(over) = self.kind_defaults.get(&kind) {
            out.extend(over.clone());
        }
        out
    }

    pub fn allows_entry(&self, entry: &LexicalEntry) -> bool {
        (self.qualitative.causatives_allowed || !entry.causative)
            && (self.qualitative.verbal_processes_allowed || !entry.is_verbal_process())
    }

    /// Whether every lexeme of `element` is admissible in this genre.
    pub fn allows_element(&self, element: &TaskElement, lexicon: &Lexicon) -> Result<bool, UnresolvedLexeme> {
        for l in element.lexemes() {
            if !self.allows_entry(lexicon.get(l)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn allows_conjunction(&self, conj: &str) -> bool {
        self.qualitative.allowed_conjunctions.iter().any(|c| c == conj)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    pub genres: BTreeMap<Genre, GenreProfile>,
    /// Genre-independent distributions used to fill missing cells.
    pub undifferentiated: BTreeMap<ElementKind, BTreeMap<String, Distribution>>,
}

impl Profiles {
    pub fn get(&self, genre: Genre) -> &GenreProfile {
        &self.genres[&genre]
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub profiles: Profiles,
    /// One line per renormalized column.
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("malformed profile file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown genre `{0}`")]
    UnknownGenre(String),
    #[error("genre `{0}` missing from profile file")]
    MissingGenre(Genre),
    #[error("unknown element kind `{0}`")]
    UnknownKind(String),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("system `{system}` has no feature `{feature}`")]
    UnknownFeature { system: String, feature: String },
    #[error("weight of `{system}`/`{feature}` is not a non-negative number")]
    BadWeight { system: String, feature: String },
    #[error("column for `{0}` has no positive weight")]
    EmptyColumn(String),
    #[error("availability column of `{0}` has no positive weight")]
    EmptyAvailability(Genre),
    #[error("{genre} gives a realization for {kind}, which it never realizes")]
    UnavailableKind { genre: Genre, kind: ElementKind },
}

type RawCells = BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfiles {
    #[serde(default)]
    sources: BTreeMap<String, String>,
    #[serde(default)]
    undifferentiated: RawCells,
    genres: BTreeMap<String, RawGenre>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenre {
    availability: BTreeMap<String, f64>,
    #[serde(default)]
    realization: RawCells,
    qualitative: Qualitative,
    #[serde(default)]
    defaults: BTreeMap<String, BTreeMap<String, String>>,
}

fn kind_of(s: &str) -> Result<ElementKind, ProfileError> {
    s.parse().map_err(|_| ProfileError::UnknownKind(s.to_string()))
}

fn off_hundred(sum: f64) -> bool {
    (sum - 100.0).abs() > SUM_TOLERANCE
}

struct CellReader<'a> {
    network: &'a SystemNetwork,
    sources: &'a BTreeMap<String, String>,
    warnings: Vec<String>,
}

impl CellReader<'_> {
    fn label(&self, key: &str) -> String {
        self.sources.get(key).cloned().unwrap_or_else(|| key.to_string())
    }

    fn read(
        &mut self,
        cells: &RawCells,
        column: &str,
        fallback_label: Option<&str>,
    ) -> Result<BTreeMap<ElementKind, BTreeMap<String, Distribution>>, ProfileError> {
        let mut out: BTreeMap<ElementKind, BTreeMap<String, Distribution>> = BTreeMap::new();
        for (kind_name, systems) in cells {
            let kind = kind_of(kind_name)?;
            for (system_name, raw) in systems {
                let system = self
                    .network
                    .system(system_name)
                    .ok_or_else(|| ProfileError::UnknownSystem(system_name.clone()))?;
                let (dist, sum) = Distribution::from_raw(system, raw)?;
                if off_hundred(sum) {
                    let label = match fallback_label {
                        Some(l) => self.label(l),
                        None => self.label(&format!("{kind_name}/{system_name}")),
                    };
                    self.warnings.push(format!(
                        "{label}: {column} {kind_name}/{system_name} sums to {sum:.1}, renormalized"
                    ));
                }
                out.entry(kind).or_default().insert(system_name.clone(), dist);
            }
        }
        Ok(out)
    }
}

fn check_defaults(network: &SystemNetwork, defaults: &BTreeMap<String, String>) -> Result<(), ProfileError> {
    for (s, f) in defaults {
        let system = network
            .system(s)
            .ok_or_else(|| ProfileError::UnknownSystem(s.clone()))?;
        if !system.has_feature(f) {
            return Err(ProfileError::UnknownFeature {
                system: s.clone(),
                feature: f.clone(),
            });
        }
    }
    Ok(())
}

/// Parses and normalizes a profile file against `network`.
pub fn load_profiles(document: &str, network: &SystemNetwork) -> Result<Loaded, ProfileError> {
    let raw: RawProfiles = serde_json::from_str(document)?;
    let mut reader = CellReader {
        network,
        sources: &raw.sources,
        warnings: Vec::new(),
    };
    let undifferentiated = reader.read(&raw.undifferentiated, "undifferentiated", Some("undifferentiated"))?;

    let mut genres = BTreeMap::new();
    for (name, g) in &raw.genres {
        let genre: Genre = name.parse().map_err(|_| ProfileError::UnknownGenre(name.clone()))?;

        let mut availability_raw = BTreeMap::new();
        for kind in ElementKind::ALL {
            availability_raw.insert(kind, 0.0);
        }
        for (k, w) in &g.availability {
            if !w.is_finite() || *w < 0.0 {
                return Err(ProfileError::BadWeight {
                    system: "availability".into(),
                    feature: k.clone(),
                });
            }
            availability_raw.insert(kind_of(k)?, *w);
        }
        let sum: f64 = availability_raw.values().sum();
        if sum <= 0.0 {
            return Err(ProfileError::EmptyAvailability(genre));
        }
        if off_hundred(sum) {
            reader.warnings.push(format!(
                "{}: {genre} availability sums to {sum:.1}, renormalized",
                reader.label("availability")
            ));
        }
        let availability: BTreeMap<_, _> = availability_raw.iter().map(|(k, w)| (*k, w / sum)).collect();

        let mut realization = reader.read(&g.realization, genre.as_str(), None)?;
        for kind in realization.keys() {
            if availability[kind] == 0.0 {
                return Err(ProfileError::UnavailableKind { genre, kind: *kind });
            }
        }
        for (kind, share) in &availability {
            if *share == 0.0 {
                continue;
            }
            if let Some(fallback) = undifferentiated.get(kind) {
                let cells = realization.entry(*kind).or_default();
                for (system, dist) in fallback {
                    cells.entry(system.clone()).or_insert_with(|| dist.clone());
                }
            }
        }

        let mut defaults = BTreeMap::new();
        let mut kind_defaults = BTreeMap::new();
        for (key, map) in &g.defaults {
            check_defaults(network, map)?;
            if key == "*" {
                defaults = map.clone();
            } else {
                kind_defaults.insert(kind_of(key)?, map.clone());
            }
        }

        genres.insert(
            genre,
            GenreProfile {
                genre,
                availability,
                availability_raw,
                realization,
                qualitative: g.qualitative.clone(),
                defaults,
                kind_defaults,
            },
        );
    }
    for genre in Genre::ALL {
        if !genres.contains_key(&genre) {
            return Err(ProfileError::MissingGenre(genre));
        }
    }
    Ok(Loaded {
        profiles: Profiles {
            genres,
            undifferentiated,
        },
        warnings: reader.warnings,
    })
}

#[derive(Debug, Error)]
pub enum GenreError {
    #[error("{genre} has no distribution for {kind}/{system}")]
    NoDistribution {
        genre: Genre,
        kind: ElementKind,
        system: String,
    },
    #[error("{genre} realizes no {kind} elements of this model")]
    NoElements { genre: Genre, kind: ElementKind },
    #[error("{genre} never realizes {kind} elements")]
    Unavailable { genre: Genre, kind: ElementKind },
    #[error("no coherent feature of `{system}` for element `{element}`")]
    Infeasible { element: String, system: String },
    #[error(transparent)]
    UnresolvedLexeme(#[from] UnresolvedLexeme),
    #[error(transparent)]
    TaskModel(#[from] TaskModelError),
}

/// Picks a feature of `system` for an element of `kind`.
pub fn select_feature(
    profile: &GenreProfile,
    kind: ElementKind,
    system: &str,
    mode: SelectionMode,
    rng: &mut SplitMix64,
) -> Result<String, GenreError> {
    let dist = profile
        .distribution(kind, system)
        .ok_or_else(|| GenreError::NoDistribution {
            genre: profile.genre,
            kind,
            system: system.to_string(),
        })?;
    let f = match mode {
        SelectionMode::Deterministic => dist.argmax(),
        SelectionMode::Stochastic => dist.choose(mode, rng, |_| true).unwrap_or_else(|| dist.argmax()),
    };
    Ok(f.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub element: TaskElement,
    /// Rendered as a nominal heading rather than a clause.
    pub as_heading: bool,
    /// A goal to prepend as a purpose clause.
    pub attach_purpose_goal: Option<TaskElement>,
}

impl Stage {
    fn clause(element: &TaskElement) -> Self {
        Stage {
            element: element.clone(),
            as_heading: false,
            attach_purpose_goal: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentPlan {
    pub genre: Genre,
    pub goal: String,
    pub stages: Vec<Stage>,
}

fn same_action(a: &TaskElement, b: &TaskElement) -> bool {
    match (a.action(), b.action()) {
        (Some(x), Some(y)) => x.verb == y.verb && x.patient == y.patient,
        _ => false,
    }
}

/// Orders the elements that document `goal` under `profile`.
pub fn stage_structure(
    profile: &GenreProfile,
    model: &TaskModel,
    lexicon: &Lexicon,
    goal: &str,
) -> Result<DocumentPlan, GenreError> {
    let elements = plan_elements(model, goal)?;
    let mut kept = Vec::new();
    for e in elements {
        if profile.element_availability(e.kind) > 0.0 && profile.allows_element(e, lexicon)? {
            kept.push(e);
        }
    }
    let of_kind = |k: ElementKind| kept.iter().copied().filter(move |e| e.kind == k);
    let goal_el = of_kind(ElementKind::Goal).next();

    let mut stages = Vec::new();
    match profile.genre {
        Genre::Procedure => {
            let heading = profile.qualitative.goal_as_nominalisation_heading;
            if let Some(g) = goal_el {
                stages.push(Stage {
                    as_heading: heading,
                    ..Stage::clause(g)
                });
            }
            stages.extend(of_kind(ElementKind::Constraint).map(Stage::clause));
            for (i, s) in of_kind(ElementKind::Substep).enumerate() {
                let mut stage = Stage::clause(s);
                if i == 0 && heading {
                    if let Some(g) = goal_el.filter(|g| !same_action(g, s)) {
                        stage.attach_purpose_goal = Some(g.clone());
                    }
                }
                stages.push(stage);
            }
            stages.extend(of_kind(ElementKind::Result).map(Stage::clause));
        }
        Genre::ReadyReference => {
            let mut functions = Vec::new();
            if profile.element_availability(ElementKind::Function) > 0.0 {
                for f in model.functions_for_goal(goal) {
                    if profile.allows_element(f, lexicon)? {
                        functions.push(f);
                    }
                }
            }
            stages.extend(functions.iter().copied().map(Stage::clause));
            if functions.is_empty() {
                stages.extend(goal_el.map(Stage::clause));
            }
            for k in [ElementKind::Constraint, ElementKind::Substep, ElementKind::Result] {
                stages.extend(of_kind(k).map(Stage::clause));
            }
        }
        Genre::Elaboration => stages.extend(kept.iter().copied().map(Stage::clause)),
    }
    Ok(DocumentPlan {
        genre: profile.genre,
        goal: goal.to_string(),
        stages,
    })
}

/// Chooses a complete, coherent bundle for `element` under `profile`.
///
/// Goals pick modality first, which fixes whether the clause is finite.
/// Every other system is then filled in network order: from its
/// distribution when the profile has one, else from the profile default,
/// in both cases restricted to features that still admit a coherent
/// completion. Kinds the genre never realizes are refused.
pub fn preselect(
    profile: &GenreProfile,
    network: &SystemNetwork,
    lexicon: &Lexicon,
    element: &TaskElement,
    as_heading: bool,
    mode: SelectionMode,
    rng: &mut SplitMix64,
) -> Result<FeatureBundle, GenreError> {
    let kind = element.kind;
    if profile.element_availability(kind) <= 0.0 {
        return Err(GenreError::Unavailable {
            genre: profile.genre,
            kind,
        });
    }
    let process = lexicon.get(element.payload.process_lemma())?;
    let systems: Vec<&System> = network.ordered().collect();
    let search = Completion {
        network,
        systems: &systems,
        element,
        process,
        profile,
    };

    let mut bundle = if as_heading {
        FeatureBundle::new(UnitContext::NOMINAL)
    } else if kind == ElementKind::Goal {
        let modal = match profile.distribution(kind, "modal-system") {
            Some(d) => d.choose(mode, rng, |_| true).unwrap_or("non-modal"),
            None => profile.default_for(kind, "modal-system").unwrap_or("non-modal"),
        };
        let ctx = if modal == "modal" {
            UnitContext::FINITE_CLAUSE
        } else {
            UnitContext::NON_FINITE_CLAUSE
        };
        FeatureBundle::new(ctx).with("modal-system", modal)
    } else {
        FeatureBundle::new(UnitContext::FINITE_CLAUSE)
    };

    for (i, system) in systems.iter().enumerate() {
        if bundle.get(&system.name).is_some() || !network.is_applicable(system, &bundle) {
            continue;
        }
        let feasible = |f: &str| search.completable(i + 1, &bundle.clone().with(&system.name, f));
        let chosen = match profile.distribution(kind, &system.name) {
            Some(d) => d.choose(mode, rng, feasible).map(str::to_string),
            None => profile
                .default_for(kind, &system.name)
                .filter(|f| feasible(f))
                .or_else(|| system.features.iter().map(String::as_str).find(|f| feasible(f)))
                .map(str::to_string),
        };
        let f = chosen.ok_or_else(|| GenreError::Infeasible {
            element: element.id.clone(),
            system: system.name.clone(),
        })?;
        bundle.select(&system.name, &f);
    }
    if search.conflict(&bundle) {
        return Err(GenreError::Infeasible {
            element: element.id.clone(),
            system: "modal-system".into(),
        });
    }
    Ok(bundle)
}

struct Completion<'a> {
    network: &'a SystemNetwork,
    systems: &'a [&'a System],
    element: &'a TaskElement,
    process: &'a LexicalEntry,
    profile: &'a GenreProfile,
}

impl Completion<'_> {
    fn conflict(&self, b: &FeatureBundle) -> bool {
        if coherence_conflict(self.element, self.process, b).is_some() {
            return true;
        }
        b.get("conjunction-type")
            .is_some_and(|c| !self.profile.allows_conjunction(c))
    }

    /// Whether `b` can be extended over `systems[from..]` without conflict.
    fn completable(&self, from: usize, b: &FeatureBundle) -> bool {
        if self.conflict(b) {
            return false;
        }
        let Some(pos) = (from..self.systems.len())
            .find(|&i| b.get(&self.systems[i].name).is_none() && self.network.is_applicable(self.systems[i], b))
        else {
            return true;
        };
        let s = self.systems[pos];
        s.features
            .iter()
            .any(|f| self.completable(pos + 1, &b.clone().with(&s.name, f)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn loaded() -> Loaded {
        load_profiles(data::PROFILES_JSON, &data::network()).unwrap()
    }

    #[test]
    fn renormalizes_and_warns() {
        let l = loaded();
        let rr = l.profiles.get(Genre::ReadyReference);
        assert!((rr.element_availability(ElementKind::Result) - 0.25).abs() < 1e-12);
        let el = l.profiles.get(Genre::Elaboration);
        let d = el.distribution(ElementKind::Goal, "modal-system").unwrap();
        assert!((d.weight("non-modal") - 72.6 / 101.0).abs() < 1e-12);
        assert!(l
            .warnings
            .iter()
            .any(|w| w.contains("goal-modality") && w.contains("101.0")));
        assert!(l
            .warnings
            .iter()
            .any(|w| w.contains("element-share") && w.contains("92.0")));
        assert_eq!(l.warnings.len(), 2, "{:?}", l.warnings);
    }

    #[test]
    fn missing_cells_come_from_the_undifferentiated_row() {
        let p = data::profiles();
        let rr = p.get(Genre::ReadyReference);
        let d = rr.distribution(ElementKind::Result, "polarity").unwrap();
        assert!((d.weight("positive") - 0.9).abs() < 1e-12);
        assert!(p
            .get(Genre::Procedure)
            .distribution(ElementKind::Result, "polarity")
            .is_none());
    }

    #[test]
    fn spot_selections() {
        let p = data::profiles();
        let mut rng = SplitMix64::new(0);
        let det = SelectionMode::Deterministic;
        assert_eq!(
            select_feature(
                p.get(Genre::Procedure),
                ElementKind::Substep,
                "mood-system",
                det,
                &mut rng
            )
            .unwrap(),
            "imperative"
        );
        assert_eq!(
            select_feature(
                p.get(Genre::ReadyReference),
                ElementKind::Constraint,
                "polarity",
                det,
                &mut rng
            )
            .unwrap(),
            "positive"
        );
        for seed in 0..200 {
            let mut r = SplitMix64::new(seed);
            let f = select_feature(
                p.get(Genre::Procedure),
                ElementKind::Goal,
                "modal-system",
                SelectionMode::Stochastic,
                &mut r,
            )
            .unwrap();
            assert_eq!(f, "non-modal");
        }
        assert!(matches!(
            select_feature(p.get(Genre::Procedure), ElementKind::Result, "polarity", det, &mut rng),
            Err(GenreError::NoDistribution { .. })
        ));
    }

    #[test]
    fn seeded_sequence_repeats() {
        let p = data::profiles();
        let e = p.get(Genre::Elaboration);
        let run = |seed| {
            let mut r = SplitMix64::new(seed);
            (0..10)
                .map(|_| {
                    select_feature(
                        e,
                        ElementKind::Substep,
                        "mood-system",
                        SelectionMode::Stochastic,
                        &mut r,
                    )
                    .unwrap()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
    }

    #[test]
    fn rejects_unknown_feature_and_unavailable_kind() {
        let net = data::network();
        let doc = data::PROFILES_JSON.replace("\"imperative\": 97.3", "\"imperativ\": 97.3");
        assert!(matches!(
            load_profiles(&doc, &net),
            Err(ProfileError::UnknownFeature { .. })
        ));
        let mut v: serde_json::Value = serde_json::from_str(data::PROFILES_JSON).unwrap();
        v["genres"]["procedure"]["realization"]["result"] = serde_json::json!({"polarity": {"positive": 100}});
        assert!(matches!(
            load_profiles(&v.to_string(), &net),
            Err(ProfileError::UnavailableKind { .. })
        ));
    }

    #[test]
    fn tie_breaks_by_declaration_order() {
        let net = data::network();
        let sys = net.system("polarity").unwrap();
        let raw = BTreeMap::from([("negative".to_string(), 50.0), ("positive".to_string(), 50.0)]);
        let (d, _) = Distribution::from_raw(sys, &raw).unwrap();
        assert_eq!(d.argmax(), sys.features[0]);
    }

    #[test]
    fn procedure_staging() {
        let p = data::profiles();
        let plan = stage_structure(
            p.get(Genre::Procedure),
            &data::task_model(),
            &data::lexicon(),
            "save-with-duplicate-title",
        )
        .unwrap();
        let kinds: Vec<_> = plan.stages.iter().map(|s| (s.element.kind, s.as_heading)).collect();
        assert_eq!(
            kinds,
            [
                (ElementKind::Goal, true),
                (ElementKind::Substep, false),
                (ElementKind::Substep, false)
            ]
        );
    }

    #[test]
    fn ready_reference_staging_leads_with_the_function() {
        let p = data::profiles();
        let plan = stage_structure(
            p.get(Genre::ReadyReference),
            &data::task_model(),
            &data::lexicon(),
            "paste",
        )
        .unwrap();
        let kinds: Vec<_> = plan.stages.iter().map(|s| s.element.kind).collect();
        assert_eq!(kinds[0], ElementKind::Function);
        assert!(!kinds.contains(&ElementKind::Goal));
        let c = kinds.iter().position(|k| *k == ElementKind::Constraint).unwrap();
        let s = kinds.iter().position(|k| *k == ElementKind::Substep).unwrap();
        let r = kinds.iter().position(|k| *k == ElementKind::Result).unwrap();
        assert!(c < s && s < r);
    }

    #[test]
    fn preselected_bundles_are_complete_and_valid() {
        let p = data::profiles();
        let net = data::network();
        let lex = data::lexicon();
        let model = data::task_model();
        let mut rng = SplitMix64::new(3);
        for genre in Genre::ALL {
            let prof = p.get(genre);
            for e in &model.elements {
                if prof.element_availability(e.kind) == 0.0 {
                    continue;
                }
                for mode in [SelectionMode::Deterministic, SelectionMode::Stochastic] {
                    let b = preselect(prof, &net, &lex, e, false, mode, &mut rng).unwrap();
                    assert!(net.validate_bundle(&b).is_empty(), "{genre} {} {b:?}", e.id);
                }
            }
        }
    }

    #[test]
    fn unavailable_kinds_are_refused() {
        let p = data::profiles();
        let model = data::task_model();
        let f = model.element("f-close").unwrap();
        let err = preselect(
            p.get(Genre::Procedure),
            &data::network(),
            &data::lexicon(),
            f,
            false,
            SelectionMode::Deterministic,
            &mut SplitMix64::new(0),
        );
        assert!(matches!(
            err,
            Err(GenreError::Unavailable {
                kind: ElementKind::Function,
                ..
            })
        ));
    }
}
