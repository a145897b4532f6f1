//! Template realization of coded task elements into French or English.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::features::{FeatureBundle, SystemNetwork, UnitContext};
use crate::genre::DocumentPlan;
use crate::lexicon::{Gender, Lang, LexicalEntry, Lexicon, UnresolvedLexeme};
use crate::task_model::{ElementKind, InterfaceObject, ObjectKind, Referent, TaskElement, TaskModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Det {
    Def,
    Indef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImperativeStyle {
    /// "Fermez la fenêtre"
    #[default]
    Direct,
    /// "Fermer la fenêtre"
    Infinitive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Heading,
    Conj,
    Subject,
    VerbGroup {
        lex: Option<String>,
        imperative: ImperativeStyle,
    },
    Infinitive,
    Patient(Det),
    Carrier(Det),
    Np {
        lex: String,
        det: Det,
    },
    Accessor,
    Modifiers,
    Lit(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSlot {
    Name(String),
    Object(BTreeMap<String, serde_json::Value>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerbGroup {
    #[serde(default)]
    lex: Option<String>,
    #[serde(default)]
    imperative: ImperativeStyle,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNp {
    lex: String,
    det: Det,
}

impl TryFrom<RawSlot> for Slot {
    type Error = String;

    fn try_from(raw: RawSlot) -> Result<Self, String> {
        match raw {
            RawSlot::Name(name) => match name.as_str() {
                "heading" => Ok(Slot::Heading),
                "conj" => Ok(Slot::Conj),
                "subject" => Ok(Slot::Subject),
                "verb_group" => Ok(Slot::VerbGroup {
                    lex: None,
                    imperative: ImperativeStyle::Direct,
                }),
                "infinitive" => Ok(Slot::Infinitive),
                "accessor" => Ok(Slot::Accessor),
                "modifiers" => Ok(Slot::Modifiers),
                other => Err(format!("unknown slot `{other}`")),
            },
            RawSlot::Object(map) => {
                let mut it = map.into_iter();
                let (key, value) = match (it.next(), it.next()) {
                    (Some(kv), None) => kv,
                    _ => return Err("a slot object must have exactly one key".into()),
                };
                let err = |e: serde_json::Error| format!("slot `{key}`: {e}");
                match key.as_str() {
                    "lit" => serde_json::from_value(value).map(Slot::Lit).map_err(err),
                    "patient" => serde_json::from_value(value).map(Slot::Patient).map_err(err),
                    "carrier" => serde_json::from_value(value).map(Slot::Carrier).map_err(err),
                    "np" => serde_json::from_value::<RawNp>(value)
                        .map(|n| Slot::Np { lex: n.lex, det: n.det })
                        .map_err(err),
                    "verb_group" => serde_json::from_value::<RawVerbGroup>(value)
                        .map(|v| Slot::VerbGroup {
                            lex: v.lex,
                            imperative: v.imperative,
                        })
                        .map_err(err),
                    other => Err(format!("unknown slot `{other}`")),
                }
            }
        }
    }
}

impl<'de> Deserialize<'de> for Slot {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawSlot::deserialize(d)?;
        Slot::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextMatch {
    #[serde(default)]
    pub finite: Option<bool>,
    #[serde(default)]
    pub clausal: Option<bool>,
}

impl ContextMatch {
    fn matches(&self, c: UnitContext) -> bool {
        self.finite.is_none_or(|f| f == c.finite) && self.clausal.is_none_or(|f| f == c.clausal)
    }

    fn is_empty(&self) -> bool {
        self.finite.is_none() && self.clausal.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateRule {
    /// `None` matches every element kind.
    pub kind: Option<ElementKind>,
    pub lang: Lang,
    pub when: BTreeMap<String, String>,
    pub context: ContextMatch,
    pub pattern: Vec<Slot>,
}

impl TemplateRule {
    pub fn applies(&self, kind: ElementKind, lang: Lang, bundle: &FeatureBundle) -> bool {
        self.kind.is_none_or(|k| k == kind)
            && self.lang == lang
            && self.context.matches(bundle.context)
            && self.when.iter().all(|(s, f)| bundle.is(s, f))
    }

    fn is_catch_all_for(&self, kind: ElementKind, lang: Lang) -> bool {
        self.kind.is_none_or(|k| k == kind) && self.lang == lang && self.when.is_empty() && self.context.is_empty()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    kind: String,
    lang: Lang,
    #[serde(default)]
    when: BTreeMap<String, String>,
    #[serde(default)]
    context: ContextMatch,
    pattern: Vec<Slot>,
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("malformed rules: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("rule {index}: {message}")]
    Invalid { index: usize, message: String },
    #[error("no catch-all rule for {kind} in {lang}")]
    MissingCatchAll { kind: ElementKind, lang: Lang },
}

/// Ordered template rules; the first applicable rule wins.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<TemplateRule>,
}

impl RuleSet {
    pub fn from_json(document: &str) -> Result<Self, RuleError> {
        let raw: Vec<RawRule> = serde_json::from_str(document)?;
        let mut rules = Vec::with_capacity(raw.len());
        for (index, r) in raw.into_iter().enumerate() {
            let kind = if r.kind == "*" {
                None
            } else {
                Some(
                    r.kind
                        .parse::<ElementKind>()
                        .map_err(|message| RuleError::Invalid { index, message })?,
                )
            };
            if r.pattern.is_empty() {
                return Err(RuleError::Invalid {
                    index,
                    message: "empty pattern".into(),
                });
            }
            rules.push(TemplateRule {
                kind,
                lang: r.lang,
                when: r.when,
                context: r.context,
                pattern: r.pattern,
            });
        }
        Self::new(rules)
    }

    pub fn new(rules: Vec<TemplateRule>) -> Result<Self, RuleError> {
        for kind in ElementKind::ALL {
            for lang in [Lang::Fr, Lang::En] {
                if !rules.iter().any(|r| r.is_catch_all_for(kind, lang)) {
                    return Err(RuleError::MissingCatchAll { kind, lang });
                }
            }
        }
        Ok(Self { rules })
    }

    pub fn rules(&self) -> &[TemplateRule] {
        &self.rules
    }

    pub fn select(&self, kind: ElementKind, lang: Lang, bundle: &FeatureBundle) -> Option<&TemplateRule> {
        self.rules.iter().find(|r| r.applies(kind, lang, bundle))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error(transparent)]
    UnresolvedLexeme(#[from] UnresolvedLexeme),
    #[error("unknown interface object `{0}`")]
    UnresolvedObject(String),
    #[error("no template for {kind} in {lang}")]
    NoTemplate { kind: ElementKind, lang: Lang },
    #[error("slot `{slot}` cannot be filled: {reason}")]
    SlotUnavailable { slot: &'static str, reason: String },
    #[error("{stages} stages but {bundles} bundles")]
    BundleCount { stages: usize, bundles: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadingStyle {
    /// The nominalisation alone on its line.
    #[default]
    Plain,
    /// Prefixed with "## ".
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mood {
    Declarative,
    Imperative,
    NonFinite,
    Nominal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Person {
    Second,
    Third,
}

/// The handful of selections the templates look at.
struct Clause<'b> {
    mood: Mood,
    modal: Option<(&'b str, bool)>,
    negative: bool,
    agency: Option<&'b str>,
    conj: Option<&'b str>,
    dependent: bool,
}

impl<'b> Clause<'b> {
    fn of(b: &'b FeatureBundle) -> Self {
        let mood = if !b.context.clausal {
            Mood::Nominal
        } else if !b.context.finite {
            Mood::NonFinite
        } else if b.is("mood-system", "imperative") {
            Mood::Imperative
        } else {
            Mood::Declarative
        };
        let modal = b.is("modal-system", "modal").then(|| {
            (
                b.get("modal-subtype").unwrap_or("possibility"),
                !b.is("modal-voice", "impersonal"),
            )
        });
        Clause {
            mood,
            modal,
            negative: b.is("polarity", "negative"),
            agency: b.get("agency"),
            conj: b.get("conjunction-type").filter(|c| *c != "none"),
            dependent: b.is("clause-dependency", "dependent"),
        }
    }

    fn person(&self) -> Person {
        match (self.modal, self.agency) {
            (Some((_, false)), _) => Person::Third,
            (_, Some("reader-direct")) => Person::Second,
            _ => Person::Third,
        }
    }
}

fn unavailable(slot: &'static str, reason: impl Into<String>) -> RealizeError {
    RealizeError::SlotUnavailable {
        slot,
        reason: reason.into(),
    }
}

/// "ne <first> pas <rest>"
fn wrap_ne(form: &str) -> String {
    match form.split_once(' ') {
        Some((first, rest)) => format!("ne {first} pas {rest}"),
        None => format!("ne {form} pas"),
    }
}

fn starts_with_vowel(word: &str) -> bool {
    word.chars()
        .next()
        .map(|c| "aàâäeéèêëiîïoôöuùûüyAÀÂEÉÈÊIÎOÔUÙÛY".contains(c))
        .unwrap_or(false)
}

/// Elision and article contraction over a space-separated French string.
pub fn french_surface(text: &str) -> String {
    const ELIDING: [&str; 6] = ["le", "la", "de", "ne", "que", "lorsque"];
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        let next = tokens.get(i + 1).copied();
        let lower = tok.to_lowercase();
        match next {
            Some(n) if ELIDING.contains(&lower.as_str()) && starts_with_vowel(n) => {
                let stem: String = tok.chars().take(tok.chars().count() - 1).collect();
                out.push(format!("{stem}'{n}"));
                i += 2;
                continue;
            }
            Some(n) if lower == "si" && (n == "il" || n == "ils") => {
                let s = tok.chars().next().unwrap_or('s');
                out.push(format!("{s}'{n}"));
                i += 2;
                continue;
            }
            _ => {}
        }
        out.push(tok.to_string());
        i += 1;
    }
    let mut merged: Vec<String> = Vec::with_capacity(out.len());
    let mut j = 0;
    while j < out.len() {
        let pair = (out[j].as_str(), out.get(j + 1).map(String::as_str));
        let contracted = match pair {
            ("de", Some("le")) => Some("du"),
            ("de", Some("les")) => Some("des"),
            ("à", Some("le")) => Some("au"),
            ("à", Some("les")) => Some("aux"),
            _ => None,
        };
        match contracted {
            Some(c) => {
                merged.push(c.to_string());
                j += 2;
            }
            None => {
                merged.push(out[j].clone());
                j += 1;
            }
        }
    }
    merged.join(" ")
}

/// "a" becomes "an" before a vowel letter.
pub fn english_surface(text: &str) -> String {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut out = Vec::with_capacity(tokens.len());
    for (i, tok) in tokens.iter().enumerate() {
        let before_vowel = tokens
            .get(i + 1)
            .and_then(|n| n.chars().next())
            .is_some_and(|c| "aeiouAEIOU".contains(c));
        match *tok {
            "a" if before_vowel => out.push("an"),
            "A" if before_vowel => out.push("An"),
            t => out.push(t),
        }
    }
    out.join(" ")
}

pub fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn decapitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn finish(words: &[String], lang: Lang) -> String {
    let joined = words
        .iter()
        .filter(|w| !w.is_empty())
        .map(String::as_str)
        .collect::<Vec<_>>()
        .join(" ");
    let surface = match lang {
        Lang::Fr => french_surface(&joined),
        Lang::En => english_surface(&joined),
    };
    capitalize(&surface)
}

fn conj_marker(conj: &str, dependent: bool, lang: Lang) -> &'static str {
    match (lang, conj, dependent) {
        (Lang::Fr, "purpose", _) => "pour",
        (Lang::Fr, "conditional", _) => "si",
        (Lang::Fr, "temporal", true) => "lorsque",
        (Lang::Fr, "temporal", false) => "ensuite,",
        (Lang::Fr, "alternative", _) => "ou bien",
        (Lang::En, "purpose", _) => "to",
        (Lang::En, "conditional", _) => "if",
        (Lang::En, "temporal", true) => "when",
        (Lang::En, "temporal", false) => "next,",
        (Lang::En, "alternative", _) => "or",
        _ => "",
    }
}

fn head_noun(kind: ObjectKind) -> Option<&'static str> {
    match kind {
        ObjectKind::Window => Some("window"),
        ObjectKind::Dialog => Some("dialog-box"),
        ObjectKind::Document => Some("document"),
        ObjectKind::Button => Some("button"),
        ObjectKind::MenuItem | ObjectKind::Other => None,
    }
}

fn accessor_noun(kind: ObjectKind) -> &'static str {
    head_noun(kind).unwrap_or("article")
}

fn french_article(gender: Gender, det: Det) -> &'static str {
    match (gender, det) {
        (Gender::M, Det::Def) => "le",
        (Gender::F, Det::Def) => "la",
        (Gender::M, Det::Indef) => "un",
        (Gender::F, Det::Indef) => "une",
    }
}

/// Realizes elements over a lexicon, rule set and the task model that
/// supplies interface objects.
pub struct Realizer<'a> {
    pub lexicon: &'a Lexicon,
    pub rules: &'a RuleSet,
    pub model: &'a TaskModel,
}

impl<'a> Realizer<'a> {
    pub fn new(lexicon: &'a Lexicon, rules: &'a RuleSet, model: &'a TaskModel) -> Self {
        Self { lexicon, rules, model }
    }

    pub fn realize_unit(
        &self,
        element: &TaskElement,
        bundle: &FeatureBundle,
        lang: Lang,
    ) -> Result<String, RealizeError> {
        let rule = self
            .rules
            .select(element.kind, lang, bundle)
            .ok_or(RealizeError::NoTemplate {
                kind: element.kind,
                lang,
            })?;
        let clause = Clause::of(bundle);
        let mut words = Vec::new();
        for slot in &rule.pattern {
            words.push(self.fill(slot, element, &clause, lang)?);
        }
        Ok(finish(&words, lang))
    }

    fn fill(&self, slot: &Slot, element: &TaskElement, c: &Clause<'_>, lang: Lang) -> Result<String, RealizeError> {
        let process = self.lexicon.get(element.payload.process_lemma())?;
        match slot {
            Slot::Lit(text) => Ok(text.clone()),
            Slot::Heading => Ok(match lang {
                Lang::Fr => format!(
                    "{} {}",
                    french_article(process.gender(), Det::Def),
                    process.fr.nominalisation
                ),
                Lang::En => process.en.nominalisation.clone(),
            }),
            Slot::Conj => Ok(c
                .conj
                .map(|k| conj_marker(k, c.dependent, lang))
                .unwrap_or("")
                .to_string()),
            Slot::Subject => self.subject(c, lang),
            Slot::VerbGroup { lex, imperative } => {
                let verb = match lex {
                    Some(l) => self.lexicon.get(l)?,
                    None => process,
                };
                match lang {
                    Lang::Fr => french_verb_group(verb, c, *imperative),
                    Lang::En => english_verb_group(verb, c),
                }
            }
            Slot::Infinitive => Ok(match lang {
                Lang::Fr => process.fr.infinitive.clone(),
                Lang::En => process.en.base.clone(),
            }),
            Slot::Patient(det) => match element.action().and_then(|a| a.patient.as_ref()) {
                Some(r) => self.referent(r, *det, lang),
                None => Ok(String::new()),
            },
            Slot::Carrier(det) => match element.state() {
                Some(s) => self.referent(&s.carrier, *det, lang),
                None => Err(unavailable("carrier", "element is not a state")),
            },
            Slot::Np { lex, det } => self.noun_phrase(lex, *det, lang),
            Slot::Accessor => {
                let object = self
                    .model
                    .object_for_function(&element.id)
                    .ok_or_else(|| unavailable("accessor", format!("`{}` has no interface object", element.id)))?;
                self.demonstrative(accessor_noun(object.kind), lang)
            }
            Slot::Modifiers => {
                let mut parts = Vec::new();
                for m in element.action().map(|a| a.modifiers.as_slice()).unwrap_or(&[]) {
                    parts.push(self.lexicon.get(m)?.nominal(lang).to_string());
                }
                Ok(parts.join(" "))
            }
        }
    }

    fn subject(&self, c: &Clause<'_>, lang: Lang) -> Result<String, RealizeError> {
        if matches!(c.mood, Mood::Imperative | Mood::NonFinite | Mood::Nominal) {
            return Ok(String::new());
        }
        if let Some((subtype, false)) = c.modal {
            return Ok(match (lang, subtype) {
                (Lang::Fr, _) => "il",
                (Lang::En, "obligation") => "you",
                (Lang::En, _) => "it",
            }
            .into());
        }
        match (c.agency, lang) {
            (Some("reader-direct"), Lang::Fr) => Ok("vous".into()),
            (Some("reader-direct"), Lang::En) => Ok("you".into()),
            (Some("impersonal-on"), Lang::Fr) => Ok("on".into()),
            (Some("impersonal-on"), Lang::En) => Ok("one".into()),
            (other, _) => Err(unavailable("subject", format!("agency {other:?} has no pronoun"))),
        }
    }

    fn referent(&self, r: &Referent, det: Det, lang: Lang) -> Result<String, RealizeError> {
        match r {
            Referent::Lexeme(l) => self.noun_phrase(l, det, lang),
            Referent::Object(id) => {
                let o = self
                    .model
                    .object(id)
                    .ok_or_else(|| RealizeError::UnresolvedObject(id.clone()))?;
                self.object_phrase(o, lang)
            }
        }
    }

    fn object_phrase(&self, o: &InterfaceObject, lang: Lang) -> Result<String, RealizeError> {
        let name = match lang {
            Lang::Fr => &o.name_fr,
            Lang::En => &o.name_en,
        };
        let Some(head) = head_noun(o.kind) else {
            return Ok(name.clone());
        };
        let entry = self.lexicon.get(head)?;
        Ok(match lang {
            Lang::Fr => format!(
                "{} {} {}",
                french_article(entry.gender(), Det::Def),
                entry.fr.nominalisation,
                name
            ),
            Lang::En => format!("the {} {}", name, entry.en.nominalisation),
        })
    }

    fn noun_phrase(&self, lemma: &str, det: Det, lang: Lang) -> Result<String, RealizeError> {
        let entry = self.lexicon.get(lemma)?;
        Ok(match lang {
            Lang::Fr => format!("{} {}", french_article(entry.gender(), det), entry.fr.nominalisation),
            Lang::En => format!(
                "{} {}",
                if det == Det::Def { "the" } else { "a" },
                entry.en.nominalisation
            ),
        })
    }

    fn demonstrative(&self, lemma: &str, lang: Lang) -> Result<String, RealizeError> {
        let entry = self.lexicon.get(lemma)?;
        Ok(match lang {
            Lang::Fr => {
                let noun = &entry.fr.nominalisation;
                let det = match entry.gender() {
                    Gender::F => "cette",
                    Gender::M if starts_with_vowel(noun) => "cet",
                    Gender::M => "ce",
                };
                format!("{det} {noun}")
            }
            Lang::En => format!("this {}", entry.en.nominalisation),
        })
    }

    /// The document for `plan`, one bundle per stage.
    pub fn realize_document(
        &self,
        plan: &DocumentPlan,
        bundles: &[FeatureBundle],
        lang: Lang,
        style: HeadingStyle,
    ) -> Result<String, RealizeError> {
        if plan.stages.len() != bundles.len() {
            return Err(RealizeError::BundleCount {
                stages: plan.stages.len(),
                bundles: bundles.len(),
            });
        }
        let mut sections: Vec<String> = Vec::new();
        let mut lines: Vec<String> = Vec::new();
        let mut condition: Option<String> = None;
        for (stage, bundle) in plan.stages.iter().zip(bundles) {
            let text = self.realize_unit(&stage.element, bundle, lang)?;
            if stage.as_heading {
                if !lines.is_empty() {
                    sections.push(lines.join("\n"));
                    lines.clear();
                }
                sections.push(match style {
                    HeadingStyle::Plain => text,
                    HeadingStyle::Markdown => format!("## {text}"),
                });
                continue;
            }
            if stage.element.kind == ElementKind::Constraint && bundle.is("conjunction-type", "conditional") {
                if let Some(previous) = condition.replace(text) {
                    lines.push(previous);
                }
                continue;
            }
            let mut text = text;
            if let Some(goal) = &stage.attach_purpose_goal {
                let purpose = self.realize_unit(goal, &self.purpose_bundle(goal)?, lang)?;
                text = format!("{purpose}, {}", decapitalize(&text));
            }
            if let Some(cond) = condition.take() {
                text = format!("{cond}, {}", decapitalize(&text));
            }
            lines.push(text);
        }
        if let Some(cond) = condition {
            lines.push(cond);
        }
        if !lines.is_empty() {
            sections.push(lines.join("\n"));
        }
        Ok(sections.join("\n\n"))
    }

    /// Non-finite purpose coding used when a goal is attached to a step.
    pub fn purpose_bundle(&self, goal: &TaskElement) -> Result<FeatureBundle, RealizeError> {
        let process = self.lexicon.get(goal.payload.process_lemma())?;
        Ok(FeatureBundle::new(UnitContext::NON_FINITE_CLAUSE)
            .with("modal-system", "non-modal")
            .with("polarity", "positive")
            .with("voice", "active")
            .with("process-type", process.process_type.as_deref().unwrap_or("material"))
            .with("conjunction-type", "purpose")
            .with("clause-dependency", "dependent"))
    }
}

fn french_modal(subtype: &str, person: Person) -> &'static str {
    match (subtype, person) {
        ("obligation", Person::Second) => "devez",
        ("obligation", Person::Third) => "doit",
        ("inclination", Person::Second) => "souhaitez",
        ("inclination", Person::Third) => "souhaite",
        (_, Person::Second) => "pouvez",
        (_, Person::Third) => "peut",
    }
}

fn french_modal_infinitive(subtype: &str) -> &'static str {
    match subtype {
        "obligation" => "devoir",
        "inclination" => "souhaiter",
        _ => "pouvoir",
    }
}

fn french_impersonal(subtype: &str) -> &'static str {
    match subtype {
        "obligation" => "faut",
        "inclination" => "est souhaitable de",
        _ => "est possible de",
    }
}

fn french_verb_group(v: &LexicalEntry, c: &Clause<'_>, style: ImperativeStyle) -> Result<String, RealizeError> {
    let neg = |form: &str| if c.negative { wrap_ne(form) } else { form.to_string() };
    let inf = &v.fr.infinitive;
    match c.mood {
        Mood::Nominal => Err(unavailable("verb_group", "nominal unit")),
        Mood::Imperative => Ok(match style {
            ImperativeStyle::Direct => neg(&v.fr.imperative_vous),
            ImperativeStyle::Infinitive if c.negative => format!("ne pas {inf}"),
            ImperativeStyle::Infinitive => inf.clone(),
        }),
        Mood::NonFinite => {
            let mut parts = Vec::new();
            if c.negative {
                parts.push("ne pas");
            }
            match c.modal {
                Some((_, false)) => return Err(unavailable("verb_group", "impersonal modal needs a finite clause")),
                Some((subtype, true)) => parts.push(french_modal_infinitive(subtype)),
                None => {}
            }
            parts.push(inf);
            Ok(parts.join(" "))
        }
        Mood::Declarative => Ok(match c.modal {
            None => neg(match c.person() {
                Person::Second => &v.fr.imperative_vous,
                Person::Third => &v.fr.present_3sg,
            }),
            Some((subtype, true)) => format!("{} {inf}", neg(french_modal(subtype, c.person()))),
            Some((subtype, false)) => format!("{} {inf}", neg(french_impersonal(subtype))),
        }),
    }
}

fn english_verb_group(v: &LexicalEntry, c: &Clause<'_>) -> Result<String, RealizeError> {
    let base = &v.en.base;
    let n = c.negative;
    match c.mood {
        Mood::Nominal => Err(unavailable("verb_group", "nominal unit")),
        Mood::Imperative => Ok(if n { format!("do not {base}") } else { base.clone() }),
        Mood::NonFinite => {
            let mut parts = Vec::new();
            if n {
                parts.push("not");
            }
            match c.modal {
                Some((_, false)) => return Err(unavailable("verb_group", "impersonal modal needs a finite clause")),
                Some(("obligation", true)) => parts.push("have to"),
                Some(("inclination", true)) => parts.push("wish to"),
                Some((_, true)) => parts.push("be able to"),
                None => {}
            }
            parts.push(base);
            Ok(parts.join(" "))
        }
        Mood::Declarative => {
            let person = c.person();
            let aux = match c.modal {
                None => {
                    return Ok(match (person, n) {
                        (Person::Second, false) => base.clone(),
                        (Person::Third, false) => v.en.present_3sg.clone(),
                        (Person::Second, true) => format!("do not {base}"),
                        (Person::Third, true) => format!("does not {base}"),
                    })
                }
                Some((subtype, true)) => match (subtype, person, n) {
                    ("obligation", Person::Second, false) => "have to",
                    ("obligation", Person::Third, false) => "has to",
                    ("obligation", Person::Second, true) => "do not have to",
                    ("obligation", Person::Third, true) => "does not have to",
                    ("inclination", _, false) => "may wish to",
                    ("inclination", _, true) => "may not wish to",
                    (_, _, false) => "can",
                    (_, _, true) => "cannot",
                },
                Some((subtype, false)) => match (subtype, n) {
                    ("obligation", false) => "must",
                    ("obligation", true) => "must not",
                    ("inclination", false) => "is advisable to",
                    ("inclination", true) => "is not advisable to",
                    (_, false) => "is possible to",
                    (_, true) => "is not possible to",
                },
            };
            Ok(format!("{aux} {base}"))
        }
    }
}

/// Why `bundle` cannot be generated for `element`, if it cannot. Only
/// systems already selected are checked, so the test also prunes partial
/// bundles during preselection.
pub fn coherence_conflict(element: &TaskElement, process: &LexicalEntry, b: &FeatureBundle) -> Option<&'static str> {
    let kind = element.kind;
    let ctx = b.context;
    let sel = |s: &str| b.get(s);

    if !ctx.clausal && kind != ElementKind::Goal {
        return Some("only goals are nominalised");
    }
    if ctx.clausal && kind != ElementKind::Goal && !ctx.finite {
        return Some("only goals have non-finite clauses");
    }
    if kind == ElementKind::Goal && ctx.clausal {
        if let Some(m) = sel("modal-system") {
            if (m == "modal") != ctx.finite {
                return Some("a goal is finite exactly when modal");
            }
        }
    }
    if sel("voice") == Some("passive") {
        return Some("passive is not generatable");
    }
    if sel("negation-kind") == Some("implicit-negative") {
        return Some("implicit negation is not generatable");
    }
    if let (Some(p), Some(own)) = (sel("process-type"), process.process_type.as_deref()) {
        if p != own {
            return Some("process type differs from the lexeme");
        }
    }
    let imperative = sel("mood-system") == Some("imperative");
    if imperative {
        if !kind.is_action() {
            return Some("states are not imperative");
        }
        if sel("modal-system") == Some("modal") {
            return Some("imperatives are not modal");
        }
        if sel("agency").is_some_and(|a| a != "reader-direct") {
            return Some("imperatives address the reader");
        }
    }
    if sel("modal-voice") == Some("impersonal") {
        if !ctx.finite {
            return Some("impersonal modality needs a finite clause");
        }
        if sel("agency").is_some_and(|a| a != "impersonal-on") {
            return Some("impersonal modality has no personal agent");
        }
    }
    if let Some(conj) = sel("conjunction-type") {
        let non_finite = ctx.clausal && !ctx.finite;
        if (conj == "purpose") != non_finite {
            return Some("purpose clauses are exactly the non-finite ones");
        }
        if conj == "conditional" && imperative {
            return Some("conditional clauses are declarative");
        }
        if let Some(dep) = sel("clause-dependency") {
            let dependent = dep == "dependent";
            match conj {
                "purpose" | "conditional" if !dependent => return Some("purpose and condition are dependent"),
                "none" | "alternative" if dependent => return Some("unmarked and alternative clauses are independent"),
                "temporal" if dependent && imperative => return Some("dependent temporal clauses are declarative"),
                _ => {}
            }
        }
    }
    if kind == ElementKind::Function {
        if sel("mood-system").is_some_and(|m| m != "declarative") {
            return Some("functions are declarative");
        }
        if sel("agency").is_some_and(|a| a != "system-agent") {
            return Some("functions are stated of the interface object");
        }
        if sel("modal-voice") == Some("impersonal") {
            return Some("functions take no impersonal modal");
        }
    }
    if element.state().is_some() {
        if let Some(a) = sel("agency") {
            if process.subject_is_carrier != (a == "system-agent") {
                return Some("state subject does not fit the predicate");
            }
        }
    }
    None
}

/// Every valid completed bundle the generator could emit for `element`,
/// ignoring genre restrictions.
pub fn realizable_bundles(
    network: &SystemNetwork,
    element: &TaskElement,
    process: &LexicalEntry,
) -> Vec<FeatureBundle> {
    let contexts: &[UnitContext] = if element.kind == ElementKind::Goal {
        &[
            UnitContext::NOMINAL,
            UnitContext::NON_FINITE_CLAUSE,
            UnitContext::FINITE_CLAUSE,
        ]
    } else {
        &[UnitContext::FINITE_CLAUSE]
    };
    let systems: Vec<_> = network.ordered().collect();
    let mut out = Vec::new();
    for &ctx in contexts {
        let mut stack = vec![(0usize, FeatureBundle::new(ctx))];
        while let Some((i, bundle)) = stack.pop() {
            if i == systems.len() {
                out.push(bundle);
                continue;
            }
            let s = systems[i];
            if !network.is_applicable(s, &bundle) {
                stack.push((i + 1, bundle));
                continue;
            }
            for f in s.features.iter().rev() {
                let next = bundle.clone().with(&s.name, f);
                if coherence_conflict(element, process, &next).is_none() {
                    stack.push((i + 1, next));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    #[test]
    fn french_elision_and_contraction() {
        assert_eq!(french_surface("la ouverture de le document"), "l'ouverture du document");
        assert_eq!(french_surface("si il faut ne ouvrir"), "s'il faut n'ouvrir");
        assert_eq!(french_surface("lorsque on choisit"), "lorsqu'on choisit");
        assert_eq!(french_surface("de le enregistrement"), "de l'enregistrement");
        assert_eq!(french_surface("à le menu"), "au menu");
    }

    #[test]
    fn english_article() {
        assert_eq!(english_surface("a active window"), "an active window");
        assert_eq!(english_surface("a dialog box"), "a dialog box");
    }

    #[test]
    fn rules_need_catch_alls() {
        let doc = r#"[{"kind": "goal", "lang": "fr", "pattern": ["conj"]}]"#;
        assert!(matches!(
            RuleSet::from_json(doc),
            Err(RuleError::MissingCatchAll { .. })
        ));
        let bad = r#"[{"kind": "goal", "lang": "fr", "pattern": ["nope"]}]"#;
        assert!(matches!(RuleSet::from_json(bad), Err(RuleError::Parse(_))));
    }

    #[test]
    fn shipped_rules_cover_every_kind() {
        let rules = data::rules();
        let b = FeatureBundle::new(UnitContext::FINITE_CLAUSE);
        for kind in ElementKind::ALL {
            for lang in [Lang::Fr, Lang::En] {
                assert!(rules.select(kind, lang, &b).is_some());
            }
        }
    }

    #[test]
    fn negation_wraps_first_token() {
        assert_eq!(wrap_ne("faites un double-clic sur"), "ne faites pas un double-clic sur");
        assert_eq!(wrap_ne("fermez"), "ne fermez pas");
    }

    #[test]
    fn passive_is_never_realizable() {
        let model = data::task_model();
        let lex = data::lexicon();
        let net = data::network();
        for e in &model.elements {
            let p = lex.get(e.payload.process_lemma()).unwrap();
            let all = realizable_bundles(&net, e, p);
            assert!(!all.is_empty(), "{}", e.id);
            assert!(all.iter().all(|b| !b.is("voice", "passive")));
            assert!(all.iter().all(|b| net.validate_bundle(b).is_empty()));
        }
    }
}
