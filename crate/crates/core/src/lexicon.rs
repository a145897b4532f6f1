//! Closed bilingual lexicon. Inflected forms are stored per entry; nothing
//! is conjugated by rule.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Fr,
    En,
}

impl Lang {
    pub fn as_str(self) -> &'static str {
        match self {
            Lang::Fr => "fr",
            Lang::En => "en",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fr" => Ok(Lang::Fr),
            "en" => Ok(Lang::En),
            _ => Err(format!("unknown language `{s}` (expected fr or en)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Verb,
    Noun,
    /// A fixed adverbial phrase; its text lives in `nominalisation`.
    Adjunct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    M,
    F,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrenchForms {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub infinitive: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub imperative_vous: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub present_3sg: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub nominalisation: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnglishForms {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub base: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub present_3sg: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub gerund: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub nominalisation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexicalEntry {
    pub lemma: String,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process_type: Option<String>,
    #[serde(default)]
    pub fr: FrenchForms,
    #[serde(default)]
    pub en: EnglishForms,
    /// Gender of the noun, or of a verb's nominalisation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article_gender_fr: Option<Gender>,
    #[serde(default)]
    pub causative: bool,
    /// For state predicates: the carrier is the grammatical subject
    /// ("le presse-papiers contient du texte") rather than the reader.
    #[serde(default)]
    pub subject_is_carrier: bool,
}

impl LexicalEntry {
    /// Noun or phrase text in `lang` (the `nominalisation` slot).
    pub fn nominal(&self, lang: Lang) -> &str {
        match lang {
            Lang::Fr => &self.fr.nominalisation,
            Lang::En => &self.en.nominalisation,
        }
    }

    pub fn gender(&self) -> Gender {
        self.article_gender_fr.unwrap_or(Gender::M)
    }

    pub fn is_verbal_process(&self) -> bool {
        self.process_type.as_deref() == Some("verbal")
    }

    /// Every verb form in `lang`; used by the surface recoder.
    pub fn verb_forms(&self, lang: Lang) -> Vec<&str> {
        let forms = match lang {
            Lang::Fr => [&self.fr.infinitive, &self.fr.imperative_vous, &self.fr.present_3sg],
            Lang::En => [&self.en.base, &self.en.present_3sg, &self.en.gerund],
        };
        forms
            .into_iter()
            .map(String::as_str)
            .filter(|f| !f.is_empty())
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("malformed lexicon: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("lemma `{0}` declared twice")]
    Duplicate(String),
    #[error("entry `{lemma}` lacks required form `{slot}`")]
    MissingForm { lemma: String, slot: &'static str },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unresolved lexeme `{0}`")]
pub struct UnresolvedLexeme(pub String);

#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: BTreeMap<String, LexicalEntry>,
}

impl Lexicon {
    pub fn from_json(document: &str) -> Result<Self, LexiconError> {
        let list: Vec<LexicalEntry> = serde_json::from_str(document)?;
        Self::new(list)
    }

    pub fn new(list: Vec<LexicalEntry>) -> Result<Self, LexiconError> {
        let mut entries = BTreeMap::new();
        for e in list {
            check_forms(&e)?;
            if entries.contains_key(&e.lemma) {
                return Err(LexiconError::Duplicate(e.lemma));
            }
            entries.insert(e.lemma.clone(), e);
        }
        Ok(Self { entries })
    }

    pub fn get(&self, lemma: &str) -> Result<&LexicalEntry, UnresolvedLexeme> {
        self.entries
            .get(lemma)
            .ok_or_else(|| UnresolvedLexeme(lemma.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries.values()
    }

    pub fn verbs(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries().filter(|e| e.category == Category::Verb)
    }

    pub fn nouns(&self) -> impl Iterator<Item = &LexicalEntry> {
        self.entries().filter(|e| e.category == Category::Noun)
    }
}

fn check_forms(e: &LexicalEntry) -> Result<(), LexiconError> {
    let missing = |slot| LexiconError::MissingForm {
        lemma: e.lemma.clone(),
        slot,
    };
    match e.category {
        Category::Verb => {
            let slots = [
                ("fr.infinitive", &e.fr.infinitive),
                ("fr.imperative_vous", &e.fr.imperative_vous),
                ("fr.present_3sg", &e.fr.present_3sg),
                ("fr.nominalisation", &e.fr.nominalisation),
                ("en.base", &e.en.base),
                ("en.present_3sg", &e.en.present_3sg),
                ("en.gerund", &e.en.gerund),
                ("en.nominalisation", &e.en.nominalisation),
            ];
            for (slot, value) in slots {
                if value.trim().is_empty() {
                    return Err(missing(slot));
                }
            }
            if e.process_type.is_none() {
                return Err(missing("process_type"));
            }
            if e.article_gender_fr.is_none() {
                return Err(missing("article_gender_fr"));
            }
        }
        Category::Noun => {
            if e.fr.nominalisation.is_empty() {
                return Err(missing("fr.nominalisation"));
            }
            if e.en.nominalisation.is_empty() {
                return Err(missing("en.nominalisation"));
            }
            if e.article_gender_fr.is_none() {
                return Err(missing("article_gender_fr"));
            }
        }
        Category::Adjunct => {
            if e.fr.nominalisation.is_empty() {
                return Err(missing("fr.nominalisation"));
            }
            if e.en.nominalisation.is_empty() {
                return Err(missing("en.nominalisation"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_lexicon_loads() {
        let lex = crate::data::lexicon();
        assert!(lex.entries().count() >= 40);
        let close = lex.get("close").unwrap();
        assert_eq!(close.fr.imperative_vous, "fermez");
        assert_eq!(lex.get("window").unwrap().gender(), Gender::F);
        assert_eq!(lex.get("nope"), Err(UnresolvedLexeme("nope".into())));
    }

    #[test]
    fn verb_without_forms_is_rejected() {
        let doc = r#"[{"lemma": "x", "category": "verb", "process_type": "material", "fr": {"infinitive": "x"}, "article_gender_fr": "m"}]"#;
        assert!(matches!(Lexicon::from_json(doc), Err(LexiconError::MissingForm { .. })));
    }
}
