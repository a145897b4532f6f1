//! Document and corpus generation from a task model under a genre.

use thiserror::Error;

use crate::data;
use crate::features::{FeatureBundle, SystemNetwork};
use crate::genre::{preselect, stage_structure, Genre, GenreError, Profiles, SelectionMode};
use crate::lexicon::{Lang, Lexicon};
use crate::realizer::{HeadingStyle, RealizeError, Realizer, RuleSet};
use crate::rng::SplitMix64;
use crate::stats::{CodedCorpus, CodedUnit, CorpusError, CorpusMeta};
use crate::task_model::{ElementKind, TaskElement, TaskModel};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Genre(#[from] GenreError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{0} gives every element kind zero availability")]
    NothingAvailable(Genre),
}

/// Everything generation reads.
#[derive(Debug, Clone)]
pub struct Resources {
    pub network: SystemNetwork,
    pub lexicon: Lexicon,
    pub rules: RuleSet,
    pub profiles: Profiles,
    pub model: TaskModel,
}

impl Resources {
    pub fn shipped() -> Self {
        Self {
            network: data::network(),
            lexicon: data::lexicon(),
            rules: data::rules(),
            profiles: data::profiles(),
            model: data::task_model(),
        }
    }

    pub fn realizer(&self) -> Realizer<'_> {
        Realizer::new(&self.lexicon, &self.rules, &self.model)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusRequest {
    pub genre: Genre,
    pub lang: Lang,
    pub mode: SelectionMode,
    pub seed: u64,
    pub count: usize,
    pub profile_hash: Option<String>,
}

/// Chooses the element kind of each unit in deterministic mode: each
/// kind is scheduled in proportion to its availability, ties going to the
/// earlier kind.
struct KindSchedule {
    shares: Vec<(ElementKind, f64)>,
    issued: Vec<usize>,
    step: usize,
}

impl KindSchedule {
    fn new(shares: Vec<(ElementKind, f64)>) -> Self {
        let issued = vec![0; shares.len()];
        Self {
            shares,
            issued,
            step: 0,
        }
    }

    fn next(&mut self) -> ElementKind {
        self.step += 1;
        let mut best = 0;
        let mut best_lag = f64::NEG_INFINITY;
        for (i, (_, share)) in self.shares.iter().enumerate() {
            let lag = share * self.step as f64 - self.issued[i] as f64;
            if lag > best_lag + 1e-12 {
                best = i;
                best_lag = lag;
            }
        }
        self.issued[best] += 1;
        self.shares[best].0
    }
}

/// A corpus of `count` units sampled from `res.model` by element
/// availability, each coded with the bundle that generated it.
pub fn generate_corpus(res: &Resources, req: &CorpusRequest) -> Result<CodedCorpus, GenerateError> {
    let profile = res.profiles.get(req.genre);
    let realizer = res.realizer();
    let mut rng = SplitMix64::new(req.seed);

    let shares: Vec<(ElementKind, f64)> = ElementKind::ALL
        .into_iter()
        .map(|k| (k, profile.element_availability(k)))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    if shares.is_empty() {
        return Err(GenerateError::NothingAvailable(req.genre));
    }
    let mut candidates: Vec<(ElementKind, Vec<&TaskElement>)> = Vec::new();
    for (kind, _) in &shares {
        let mut v = Vec::new();
        for e in res.model.elements.iter().filter(|e| e.kind == *kind) {
            if profile.allows_element(e, &res.lexicon).map_err(GenreError::from)? {
                v.push(e);
            }
        }
        if v.is_empty() {
            return Err(GenreError::NoElements {
                genre: req.genre,
                kind: *kind,
            }
            .into());
        }
        candidates.push((*kind, v));
    }
    let all_weights: Vec<f64> = ElementKind::ALL
        .iter()
        .map(|k| profile.element_availability(*k))
        .collect();
    let mut schedule = KindSchedule::new(shares);
    let mut round_robin = vec![0usize; candidates.len()];

    let mut units = Vec::with_capacity(req.count);
    for i in 0..req.count {
        let kind = match req.mode {
            SelectionMode::Stochastic => {
                let k = rng.categorical(&all_weights).expect("availability has positive mass");
                ElementKind::ALL[k]
            }
            SelectionMode::Deterministic => schedule.next(),
        };
        let slot = candidates
            .iter()
            .position(|(k, _)| *k == kind)
            .expect("kind is available");
        let pool = &candidates[slot].1;
        let element = match req.mode {
            SelectionMode::Stochastic => pool[rng.index(pool.len())],
            SelectionMode::Deterministic => {
                let e = pool[round_robin[slot] % pool.len()];
                round_robin[slot] += 1;
                e
            }
        };
        let bundle = preselect(profile, &res.network, &res.lexicon, element, false, req.mode, &mut rng)?;
        let text = realizer.realize_unit(element, &bundle, req.lang)?;
        units.push(CodedUnit {
            id: format!("{}-{i:05}", req.genre),
            genre: req.genre,
            element: kind,
            lang: req.lang,
            text,
            bundle,
            element_id: Some(element.id.clone()),
        });
    }
    let meta = CorpusMeta {
        source: "generated".into(),
        seed: (req.mode == SelectionMode::Stochastic).then_some(req.seed),
        profile_hash: req.profile_hash.clone(),
    };
    Ok(CodedCorpus::new(units, meta)?)
}

/// Plan and per-stage bundles for `goal`, before realization.
pub fn plan_document(
    res: &Resources,
    genre: Genre,
    goal: &str,
    mode: SelectionMode,
    seed: u64,
) -> Result<(crate::genre::DocumentPlan, Vec<FeatureBundle>), GenerateError> {
    let profile = res.profiles.get(genre);
    let plan = stage_structure(profile, &res.model, &res.lexicon, goal)?;
    let mut rng = SplitMix64::new(seed);
    let mut bundles = Vec::with_capacity(plan.stages.len());
    for stage in &plan.stages {
        bundles.push(preselect(
            profile,
            &res.network,
            &res.lexicon,
            &stage.element,
            stage.as_heading,
            mode,
            &mut rng,
        )?);
    }
    Ok((plan, bundles))
}

/// The instruction text for `goal` under `genre`.
pub fn generate_document(
    res: &Resources,
    genre: Genre,
    goal: &str,
    lang: Lang,
    mode: SelectionMode,
    seed: u64,
    style: HeadingStyle,
) -> Result<String, GenerateError> {
    let (plan, bundles) = plan_document(res, genre, goal, mode, seed)?;
    Ok(res.realizer().realize_document(&plan, &bundles, lang, style)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_tracks_shares() {
        let mut s = KindSchedule::new(vec![(ElementKind::Goal, 0.25), (ElementKind::Substep, 0.75)]);
        let seq: Vec<_> = (0..8).map(|_| s.next()).collect();
        let goals = seq.iter().filter(|k| **k == ElementKind::Goal).count();
        assert_eq!(goals, 2);
    }

    #[test]
    fn procedure_document() {
        let res = Resources::shipped();
        let doc = generate_document(
            &res,
            Genre::Procedure,
            "select-word",
            Lang::Fr,
            SelectionMode::Deterministic,
            0,
            HeadingStyle::Plain,
        )
        .unwrap();
        assert_eq!(
            doc,
            "La sélection\n\nPour sélectionner un mot, faites un double-clic sur le mot"
        );
    }
}
