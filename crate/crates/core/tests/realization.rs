use manualgen::data;
use manualgen::features::{FeatureBundle, UnitContext};
use manualgen::realizer::{realizable_bundles, Realizer};
use manualgen::recode::recode_surface;
use manualgen::task_model::{ActionSpec, ElementKind, Payload, Referent, StateSpec, TaskElement};
use manualgen::Lang;

fn finite() -> FeatureBundle {
    FeatureBundle::new(UnitContext::FINITE_CLAUSE)
        .with("modal-system", "non-modal")
        .with("polarity", "positive")
        .with("voice", "active")
        .with("process-type", "material")
        .with("conjunction-type", "none")
        .with("clause-dependency", "independent")
}

fn imperative() -> FeatureBundle {
    finite()
        .with("mood-system", "imperative")
        .with("agency", "reader-direct")
}

fn declarative(agency: &str) -> FeatureBundle {
    finite().with("mood-system", "declarative").with("agency", agency)
}

fn realize(id: &str, bundle: &FeatureBundle, lang: Lang) -> String {
    let (lex, rules, model) = (data::lexicon(), data::rules(), data::task_model());
    let net = data::network();
    assert!(
        net.validate_bundle(bundle).is_empty(),
        "{:?}",
        net.validate_bundle(bundle)
    );
    let element = model.element(id).unwrap().clone();
    Realizer::new(&lex, &rules, &model)
        .realize_unit(&element, bundle, lang)
        .unwrap()
}

#[test]
fn imperative_substep() {
    assert_eq!(
        realize("s-close-find-window", &imperative(), Lang::Fr),
        "Fermez la fenêtre Rechercher"
    );
    assert_eq!(
        realize("s-close-find-window", &imperative(), Lang::En),
        "Close the Find window"
    );
}

#[test]
fn function_through_its_menu_item() {
    let b = declarative("system-agent");
    assert_eq!(
        realize("f-close", &b, Lang::Fr),
        "Cet article permet de fermer une fenêtre activée"
    );
    assert_eq!(
        realize("f-close", &b, Lang::En),
        "This command enables you to close an active window"
    );
}

#[test]
fn result_with_system_agent() {
    let b = declarative("system-agent");
    assert_eq!(
        realize("r-clipboard-copy-appears", &b, Lang::Fr),
        "Une copie du contenu du presse-papiers apparaît"
    );
}

#[test]
fn purpose_goal() {
    let b = FeatureBundle::new(UnitContext::NON_FINITE_CLAUSE)
        .with("modal-system", "non-modal")
        .with("polarity", "positive")
        .with("voice", "active")
        .with("process-type", "material")
        .with("conjunction-type", "purpose")
        .with("clause-dependency", "dependent");
    assert_eq!(realize("select-word", &b, Lang::Fr), "Pour sélectionner un mot");
    assert_eq!(realize("select-word", &b, Lang::En), "To select a word");
}

#[test]
fn temporal_impersonal_substep() {
    let b = declarative("impersonal-on").with("conjunction-type", "temporal");
    assert_eq!(
        realize("s-open-target", &b, Lang::Fr),
        "Ensuite, on ouvre le document de destination"
    );
}

#[test]
fn conditional_constraint_and_modals() {
    let b = declarative("reader-direct")
        .with("conjunction-type", "conditional")
        .with("clause-dependency", "dependent");
    assert_eq!(
        realize("c-duplicate-title", &b, Lang::Fr),
        "Si vous donnez à votre document le titre d'un document déjà existant"
    );
    let modal = declarative("impersonal-on")
        .with("modal-system", "modal")
        .with("modal-subtype", "obligation")
        .with("modal-voice", "impersonal");
    assert_eq!(
        realize("s-choose-paste", &modal, Lang::Fr),
        "Il faut choisir Coller dans le menu Edition"
    );
    assert_eq!(
        realize("s-choose-paste", &modal, Lang::En),
        "You must choose Paste from the Edit menu"
    );
    let neg = imperative()
        .with("polarity", "negative")
        .with("negation-kind", "true-negative");
    assert_eq!(
        realize("s-open-target", &neg, Lang::Fr),
        "N'ouvrez pas le document de destination"
    );
    assert_eq!(
        realize("s-open-target", &neg, Lang::En),
        "Do not open the target document"
    );
}

#[test]
fn realization_is_deterministic() {
    let b = imperative();
    assert_eq!(
        realize("s-choose-paste", &b, Lang::Fr),
        realize("s-choose-paste", &b, Lang::Fr)
    );
}

/// Elements built from every verb in the lexicon, alongside the shipped
/// task model's own elements.
fn lexicon_elements() -> Vec<TaskElement> {
    let lex = data::lexicon();
    let mut out = data::task_model().elements.clone();
    for (i, v) in lex.verbs().enumerate() {
        if v.lemma == "enable" {
            continue;
        }
        for kind in [ElementKind::Goal, ElementKind::Substep] {
            out.push(TaskElement {
                id: format!("v{i}-{kind}"),
                kind,
                payload: Payload::Action(ActionSpec {
                    verb: v.lemma.clone(),
                    patient: Some(Referent::Lexeme("document".into())),
                    modifiers: vec!["on-screen".into()],
                }),
                plan: None,
            });
        }
        for kind in [ElementKind::Constraint, ElementKind::Result] {
            out.push(TaskElement {
                id: format!("v{i}-{kind}"),
                kind,
                payload: Payload::State(StateSpec {
                    carrier: Referent::Lexeme("text".into()),
                    predicate: v.lemma.clone(),
                    achievable_by_planning: true,
                }),
                plan: None,
            });
        }
    }
    out
}

#[test]
fn recoding_agrees_with_every_generatable_bundle() {
    let (lex, rules, model, net) = (data::lexicon(), data::rules(), data::task_model(), data::network());
    let realizer = Realizer::new(&lex, &rules, &model);
    let mut checked = 0;
    let mut failures = Vec::new();
    for e in lexicon_elements() {
        let process = lex.get(e.payload.process_lemma()).unwrap();
        for b in realizable_bundles(&net, &e, process) {
            for lang in [Lang::Fr, Lang::En] {
                let text = realizer.realize_unit(&e, &b, lang).unwrap();
                let coded = recode_surface(&text, lang, &lex).unwrap();
                for (system, feature) in &coded.selections {
                    if b.get(system) != Some(feature.as_str()) {
                        failures.push(format!(
                            "{lang} `{text}`: {system} recoded {feature}, generated {:?}",
                            b.get(system)
                        ));
                    }
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "{checked}");
    assert!(
        failures.is_empty(),
        "{} of {checked} disagree:\n{}",
        failures.len(),
        failures[..failures.len().min(30)].join("\n")
    );
}
