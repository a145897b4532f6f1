//! Pattern-based coding of surface strings, independent of the templates
//! that produced them. Used to cross-check generated codings.

use crate::features::{FeatureBundle, UnitContext};
use crate::lexicon::{Category, Lang, Lexicon, UnresolvedLexeme};
use crate::realizer::french_surface;

fn strip_word<'t>(text: &'t str, word: &str) -> Option<&'t str> {
    let rest = text.strip_prefix(word)?;
    if rest.is_empty() {
        Some(rest)
    } else {
        rest.strip_prefix(' ')
    }
}

fn words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

fn has_word(text: &str, w: &str) -> bool {
    words(text).contains(&w)
}

fn has_phrase(text: &str, phrase: &str) -> bool {
    format!(" {text} ").contains(&format!(" {phrase} "))
}

/// Any form of any entry occurring on word boundaries.
fn mentions_lexicon(text: &str, lang: Lang, lexicon: &Lexicon) -> bool {
    lexicon.entries().any(|e| {
        let mut forms: Vec<&str> = e.verb_forms(lang);
        forms.push(e.nominal(lang));
        forms
            .into_iter()
            .filter(|f| !f.is_empty())
            .any(|f| has_phrase(text, &f.to_lowercase()) || text.contains(&format!("'{}", f.to_lowercase())))
    })
}

fn is_heading(text: &str, lang: Lang, lexicon: &Lexicon) -> bool {
    lexicon.verbs().any(|e| match lang {
        Lang::Fr => ["le", "la"]
            .iter()
            .any(|art| french_surface(&format!("{art} {}", e.fr.nominalisation)).to_lowercase() == text),
        Lang::En => e.en.nominalisation.to_lowercase() == text,
    })
}

/// Leading forms that mark a verb-initial clause.
fn clause_initial_forms(lang: Lang, lexicon: &Lexicon) -> Vec<String> {
    let mut out = Vec::new();
    for e in lexicon.verbs() {
        match lang {
            Lang::Fr => {
                let imp = e.fr.imperative_vous.to_lowercase();
                let negated = match imp.split_once(' ') {
                    Some((head, tail)) => format!("ne {head} pas {tail}"),
                    None => format!("ne {imp} pas"),
                };
                out.push(french_surface(&negated));
                out.push(imp);
                out.push(e.fr.infinitive.to_lowercase());
            }
            Lang::En => out.push(e.en.base.to_lowercase()),
        }
    }
    out
}

fn starts_with_any(text: &str, forms: &[String]) -> bool {
    forms.iter().any(|f| strip_word(text, f).is_some())
}

/// Codes `text` on every dimension its markers reveal. Dimensions without
/// a recognisable marker are left unselected.
pub fn recode_surface(text: &str, lang: Lang, lexicon: &Lexicon) -> Result<FeatureBundle, UnresolvedLexeme> {
    let t = text.trim().to_lowercase();
    if !mentions_lexicon(&t, lang, lexicon) {
        let first = t.split_whitespace().next().unwrap_or("").to_string();
        return Err(UnresolvedLexeme(first));
    }
    if is_heading(&t, lang, lexicon) {
        return Ok(FeatureBundle::new(UnitContext::NOMINAL));
    }
    Ok(match lang {
        Lang::Fr => recode_french(&t, lexicon),
        Lang::En => recode_english(&t, lexicon),
    })
}

fn negation(b: &mut FeatureBundle, explicit: bool, implicit: bool) {
    if explicit {
        b.select("polarity", "negative");
        b.select("negation-kind", "true-negative");
    } else if implicit {
        b.select("polarity", "negative");
        b.select("negation-kind", "implicit-negative");
    } else {
        b.select("polarity", "positive");
    }
}

fn conjunction(b: &mut FeatureBundle, conj: &str, dependent: bool) {
    b.select("conjunction-type", conj);
    b.select("clause-dependency", if dependent { "dependent" } else { "independent" });
}

fn recode_french(t: &str, lexicon: &Lexicon) -> FeatureBundle {
    let normalized;
    let mut rest = t;
    if let Some(r) = rest.strip_prefix("s'il ") {
        normalized = format!("si il {r}");
        rest = &normalized;
    }
    let (conj, dependent, body): (&str, bool, String) = if let Some(r) = strip_word(rest, "pour") {
        ("purpose", true, r.to_string())
    } else if let Some(r) = strip_word(rest, "si") {
        ("conditional", true, r.to_string())
    } else if let Some(r) = strip_word(rest, "lorsque") {
        ("temporal", true, r.to_string())
    } else if let Some(r) = rest.strip_prefix("lorsqu'") {
        ("temporal", true, r.to_string())
    } else if let Some(r) = strip_word(rest, "ensuite,") {
        ("temporal", false, r.to_string())
    } else if let Some(r) = strip_word(rest, "ou bien") {
        ("alternative", false, r.to_string())
    } else {
        ("none", false, rest.to_string())
    };
    let body = body.as_str();
    let explicit_neg = words(body).iter().any(|w| *w == "ne" || w.starts_with("n'")) && has_word(body, "pas");
    let implicit_neg = has_word(body, "sans") || has_word(body, "aucun") || has_word(body, "aucune");

    if conj == "purpose" {
        let mut b = FeatureBundle::new(UnitContext::NON_FINITE_CLAUSE);
        conjunction(&mut b, conj, dependent);
        let after_neg = strip_word(body, "ne pas").unwrap_or(body);
        negation(&mut b, explicit_neg || body.starts_with("ne pas"), implicit_neg);
        let modal = [
            ("pouvoir", "possibility"),
            ("devoir", "obligation"),
            ("souhaiter", "inclination"),
        ]
        .into_iter()
        .find(|(w, _)| strip_word(after_neg, w).is_some());
        match modal {
            Some((_, subtype)) => {
                b.select("modal-system", "modal");
                b.select("modal-subtype", subtype);
                b.select("modal-voice", "personal");
            }
            None => b.select("modal-system", "non-modal"),
        }
        b.select("voice", "active");
        return b;
    }

    let mut b = FeatureBundle::new(UnitContext::FINITE_CLAUSE);
    conjunction(&mut b, conj, dependent);
    negation(&mut b, explicit_neg || body.starts_with("ne pas"), implicit_neg);
    b.select("voice", "active");

    let verb_initial = {
        let stripped = strip_word(body, "ne pas").unwrap_or(body);
        starts_with_any(stripped, &clause_initial_forms(Lang::Fr, lexicon))
    };
    if verb_initial {
        b.select("mood-system", "imperative");
        b.select("modal-system", "non-modal");
        b.select("agency", "reader-direct");
        return b;
    }
    b.select("mood-system", "declarative");

    if let Some(r) = strip_word(body, "il") {
        let r = strip_word(r, "ne").unwrap_or(r);
        let r = r.strip_prefix("n'").unwrap_or(r);
        let subtype = if strip_word(r, "faut").is_some() {
            Some("obligation")
        } else if r.starts_with("est possible") || has_phrase(r, "possible de") || has_phrase(r, "possible d") {
            Some("possibility")
        } else if r.starts_with("est souhaitable") || has_word(r, "souhaitable") {
            Some("inclination")
        } else {
            None
        };
        if let Some(s) = subtype {
            b.select("modal-system", "modal");
            b.select("modal-subtype", s);
            b.select("modal-voice", "impersonal");
            b.select("agency", "impersonal-on");
        }
        return b;
    }

    if strip_word(body, "vous").is_some() {
        b.select("agency", "reader-direct");
    } else if strip_word(body, "on").is_some() {
        b.select("agency", "impersonal-on");
    } else {
        b.select("agency", "system-agent");
    }
    let modal = words(body).iter().find_map(|w| match *w {
        "pouvez" | "peut" => Some("possibility"),
        "devez" | "doit" => Some("obligation"),
        "souhaitez" | "souhaite" => Some("inclination"),
        _ => None,
    });
    match modal {
        Some(s) => {
            b.select("modal-system", "modal");
            b.select("modal-subtype", s);
            b.select("modal-voice", "personal");
        }
        None => b.select("modal-system", "non-modal"),
    }
    b
}

fn recode_english(t: &str, lexicon: &Lexicon) -> FeatureBundle {
    let (conj, dependent, body) = if let Some(r) = strip_word(t, "to") {
        ("purpose", true, r)
    } else if let Some(r) = strip_word(t, "if") {
        ("conditional", true, r)
    } else if let Some(r) = strip_word(t, "when") {
        ("temporal", true, r)
    } else if let Some(r) = strip_word(t, "next,") {
        ("temporal", false, r)
    } else if let Some(r) = strip_word(t, "or") {
        ("alternative", false, r)
    } else {
        ("none", false, t)
    };
    let explicit_neg = has_word(body, "not") || has_word(body, "cannot");
    let implicit_neg = has_word(body, "without") || has_word(body, "no");

    if conj == "purpose" {
        let mut b = FeatureBundle::new(UnitContext::NON_FINITE_CLAUSE);
        conjunction(&mut b, conj, dependent);
        negation(&mut b, explicit_neg, implicit_neg);
        let after_neg = strip_word(body, "not").unwrap_or(body);
        let modal = [
            ("be able to", "possibility"),
            ("have to", "obligation"),
            ("wish to", "inclination"),
        ]
        .into_iter()
        .find(|(w, _)| strip_word(after_neg, w).is_some());
        match modal {
            Some((_, subtype)) => {
                b.select("modal-system", "modal");
                b.select("modal-subtype", subtype);
                b.select("modal-voice", "personal");
            }
            None => b.select("modal-system", "non-modal"),
        }
        b.select("voice", "active");
        return b;
    }

    let mut b = FeatureBundle::new(UnitContext::FINITE_CLAUSE);
    conjunction(&mut b, conj, dependent);
    negation(&mut b, explicit_neg, implicit_neg);
    b.select("voice", "active");

    let stripped = strip_word(body, "do not").unwrap_or(body);
    if starts_with_any(stripped, &clause_initial_forms(Lang::En, lexicon)) {
        b.select("mood-system", "imperative");
        b.select("modal-system", "non-modal");
        b.select("agency", "reader-direct");
        return b;
    }
    b.select("mood-system", "declarative");

    let impersonal = if let Some(r) = strip_word(body, "you").and_then(|r| strip_word(r, "must")) {
        let _ = r;
        Some("obligation")
    } else if let Some(r) = strip_word(body, "it").and_then(|r| strip_word(r, "is")) {
        let r = strip_word(r, "not").unwrap_or(r);
        if strip_word(r, "possible to").is_some() {
            Some("possibility")
        } else if strip_word(r, "advisable to").is_some() {
            Some("inclination")
        } else {
            None
        }
    } else {
        None
    };
    if let Some(s) = impersonal {
        b.select("modal-system", "modal");
        b.select("modal-subtype", s);
        b.select("modal-voice", "impersonal");
        b.select("agency", "impersonal-on");
        return b;
    }

    if strip_word(body, "you").is_some() {
        b.select("agency", "reader-direct");
    } else if strip_word(body, "one").is_some() {
        b.select("agency", "impersonal-on");
    } else {
        b.select("agency", "system-agent");
    }
    let modal = if has_word(body, "can") || has_word(body, "cannot") {
        Some("possibility")
    } else if has_phrase(body, "have to") || has_phrase(body, "has to") {
        Some("obligation")
    } else if has_phrase(body, "wish to") {
        Some("inclination")
    } else {
        None
    };
    match modal {
        Some(s) => {
            b.select("modal-system", "modal");
            b.select("modal-subtype", s);
            b.select("modal-voice", "personal");
        }
        None => b.select("modal-system", "non-modal"),
    }
    b
}

/// Whether `lexicon` has any entry of `category` mentioned in `text`.
pub fn mentions_category(text: &str, lang: Lang, lexicon: &Lexicon, category: Category) -> bool {
    let t = text.to_lowercase();
    lexicon.entries().filter(|e| e.category == category).any(|e| {
        let mut forms = e.verb_forms(lang);
        forms.push(e.nominal(lang));
        forms
            .into_iter()
            .filter(|f| !f.is_empty())
            .any(|f| has_phrase(&t, &f.to_lowercase()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    #[test]
    fn recodes_reference_strings() {
        let lex = data::lexicon();
        let b = recode_surface("Fermez la fenêtre Rechercher", Lang::Fr, &lex).unwrap();
        assert_eq!(b.get("mood-system"), Some("imperative"));
        assert_eq!(b.get("polarity"), Some("positive"));
        assert_eq!(b.get("modal-system"), Some("non-modal"));
        assert_eq!(b.get("agency"), Some("reader-direct"));

        let b = recode_surface("Une zone de dialogue apparaît", Lang::Fr, &lex).unwrap();
        assert_eq!(b.get("mood-system"), Some("declarative"));
        assert_eq!(b.get("agency"), Some("system-agent"));
        assert_eq!(b.get("polarity"), Some("positive"));

        let b = recode_surface("Ne fermez pas la fenêtre", Lang::Fr, &lex).unwrap();
        assert_eq!(b.get("polarity"), Some("negative"));
        assert_eq!(b.get("negation-kind"), Some("true-negative"));
    }

    #[test]
    fn markers_for_modality_and_conjunction() {
        let lex = data::lexicon();
        let b = recode_surface("S'il faut choisir Coller dans le menu Edition", Lang::Fr, &lex).unwrap();
        assert_eq!(b.get("conjunction-type"), Some("conditional"));
        assert_eq!(b.get("modal-voice"), Some("impersonal"));
        let b = recode_surface("Ensuite, on ouvre le document de destination", Lang::Fr, &lex).unwrap();
        assert_eq!(b.get("agency"), Some("impersonal-on"));
        assert_eq!(b.get("conjunction-type"), Some("temporal"));
        let b = recode_surface("You can select a word", Lang::En, &lex).unwrap();
        assert_eq!(b.get("modal-subtype"), Some("possibility"));
        assert_eq!(b.get("agency"), Some("reader-direct"));
    }

    #[test]
    fn headings_and_unknown_text() {
        let lex = data::lexicon();
        let b = recode_surface("La sélection", Lang::Fr, &lex).unwrap();
        assert!(!b.context.clausal && b.selections.is_empty());
        assert!(recode_surface("Quelque chose d'autre", Lang::Fr, &lex).is_err());
    }
}
