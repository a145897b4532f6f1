//! Semantic task structure: goals, plans, interface objects and the five
//! task-element kinds an instruction can express.
//!
//! A [`TaskModel`] is authored data. It is parsed from JSON, checked for
//! referential integrity, and never mutated afterwards.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::violation::Violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementKind {
    Goal,
    Function,
    Constraint,
    Result,
    Substep,
}

impl ElementKind {
    pub const ALL: [ElementKind; 5] = [
        ElementKind::Goal,
        ElementKind::Function,
        ElementKind::Constraint,
        ElementKind::Result,
        ElementKind::Substep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Goal => "goal",
            ElementKind::Function => "function",
            ElementKind::Constraint => "constraint",
            ElementKind::Result => "result",
            ElementKind::Substep => "substep",
        }
    }

    /// Goals, functions and substeps are actions; constraints and results are states.
    pub fn is_action(self) -> bool {
        matches!(self, ElementKind::Goal | ElementKind::Function | ElementKind::Substep)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ElementKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown element kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    MenuItem,
    Window,
    Button,
    Dialog,
    Document,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceObject {
    pub id: String,
    pub name_fr: String,
    pub name_en: String,
    pub kind: ObjectKind,
}

/// Something an action or state talks about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Referent {
    Object(String),
    Lexeme(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub verb: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patient: Option<Referent>,
    #[serde(default)]
    pub modifiers: Vec<String>,
}

/// A state. `achievable_by_planning` separates preconditions (true) from
/// constraints (false); downstream modules only ever see the merged
/// `constraint` kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub carrier: Referent,
    pub predicate: String,
    pub achievable_by_planning: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    Action(ActionSpec),
    State(StateSpec),
}

impl Payload {
    /// The lexeme that carries the process: the verb of an action, the
    /// predicate of a state.
    pub fn process_lemma(&self) -> &str {
        match self {
            Payload::Action(a) => &a.verb,
            Payload::State(s) => &s.predicate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskElement {
    pub id: String,
    pub kind: ElementKind,
    pub payload: Payload,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<String>,
}

impl TaskElement {
    pub fn action(&self) -> Option<&ActionSpec> {
        match &self.payload {
            Payload::Action(a) => Some(a),
            Payload::State(_) => None,
        }
    }

    pub fn state(&self) -> Option<&StateSpec> {
        match &self.payload {
            Payload::State(s) => Some(s),
            Payload::Action(_) => None,
        }
    }

    pub fn payload_agrees(&self) -> bool {
        self.kind.is_action() == matches!(self.payload, Payload::Action(_))
    }

    /// Every lexeme reference the element makes.
    pub fn lexemes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        match &self.payload {
            Payload::Action(a) => {
                out.push(a.verb.as_str());
                if let Some(Referent::Lexeme(l)) = &a.patient {
                    out.push(l.as_str());
                }
                out.extend(a.modifiers.iter().map(String::as_str));
            }
            Payload::State(s) => {
                if let Referent::Lexeme(l) = &s.carrier {
                    out.push(l.as_str());
                }
                out.push(s.predicate.as_str());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    pub id: String,
    pub achieves: String,
    #[serde(default)]
    pub preconditions: Vec<String>,
    pub substeps: Vec<String>,
    #[serde(default)]
    pub results: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionBinding {
    pub function: String,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskModel {
    pub objects: Vec<InterfaceObject>,
    pub elements: Vec<TaskElement>,
    pub plans: Vec<Plan>,
    pub functions: Vec<FunctionBinding>,
}

#[derive(Debug, Error)]
pub enum TaskModelError {
    #[error("malformed task-model JSON: {0}")]
    Syntax(String),
    #[error("task-model schema error: {0}")]
    Schema(String),
    #[error("dangling reference `{id}` in {context}")]
    Reference { id: String, context: String },
    #[error("task model violates {} invariant(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown goal `{0}`")]
    UnknownGoal(String),
    #[error("goal `{0}` has no plan")]
    NoPlanForGoal(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    objects: Vec<InterfaceObject>,
    elements: Vec<RawElement>,
    plans: Vec<Plan>,
    functions: Vec<FunctionBinding>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    id: String,
    kind: ElementKind,
    payload: serde_json::Value,
    #[serde(default)]
    plan: Option<String>,
}

fn classify(err: serde_json::Error) -> TaskModelError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => TaskModelError::Syntax(err.to_string()),
        Category::Data => TaskModelError::Schema(err.to_string()),
    }
}

/// Parses a task-model document and checks every invariant.
pub fn parse_task_model(document: &str) -> Result<TaskModel, TaskModelError> {
    let raw: RawModel = serde_json::from_str(document).map_err(classify)?;
    let mut elements = Vec::with_capacity(raw.elements.len());
    for e in raw.elements {
        let payload = if e.kind.is_action() {
            serde_json::from_value::<ActionSpec>(e.payload).map(Payload::Action)
        } else {
            serde_json::from_value::<StateSpec>(e.payload).map(Payload::State)
        }
        .map_err(|err| TaskModelError::Schema(format!("payload of {} `{}`: {err}", e.kind, e.id)))?;
        elements.push(TaskElement {
            id: e.id,
            kind: e.kind,
            payload,
            plan: e.plan,
        });
    }
    let model = TaskModel {
        objects: raw.objects,
        elements,
        plans: raw.plans,
        functions: raw.functions,
    };
    if let Some((id, context)) = first_dangling_reference(&model) {
        return Err(TaskModelError::Reference { id, context });
    }
    let violations = validate_task_model(&model);
    if !violations.is_empty() {
        return Err(TaskModelError::Invalid(violations));
    }
    Ok(model)
}

impl TaskModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("task model serializes")
    }

    pub fn element(&self, id: &str) -> Option<&TaskElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn object(&self, id: &str) -> Option<&InterfaceObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn plan(&self, id: &str) -> Option<&Plan> {
        self.plans.iter().find(|p| p.id == id)
    }

    pub fn plan_for_goal(&self, goal: &str) -> Option<&Plan> {
        self.plans.iter().find(|p| p.achieves == goal)
    }

    /// The interface object through which a function element is accessed.
    pub fn object_for_function(&self, function: &str) -> Option<&InterfaceObject> {
        self.functions
            .iter()
            .find(|b| b.function == function)
            .and_then(|b| self.object(&b.object))
    }

    /// Function elements tied to the plan of `goal`, in declaration order.
    pub fn functions_for_goal(&self, goal: &str) -> Vec<&TaskElement> {
        let Some(plan) = self.plan_for_goal(goal) else {
            return Vec::new();
        };
        self.elements
            .iter()
            .filter(|e| e.kind == ElementKind::Function && e.plan.as_deref() == Some(&plan.id))
            .collect()
    }

    pub fn goals(&self) -> impl Iterator<Item = &TaskElement> {
        self.elements.iter().filter(|e| e.kind == ElementKind::Goal)
    }
}

fn first_dangling_reference(model: &TaskModel) -> Option<(String, String)> {
    let elements: BTreeSet<&str> = model.elements.iter().map(|e| e.id.as_str()).collect();
    let objects: BTreeSet<&str> = model.objects.iter().map(|o| o.id.as_str()).collect();
    let plans: BTreeSet<&str> = model.plans.iter().map(|p| p.id.as_str()).collect();

    for e in &model.elements {
        if let Some(p) = &e.plan {
            if !plans.contains(p.as_str()) {
                return Some((p.clone(), format!("plan of element `{}`", e.id)));
            }
        }
        let referent = match &e.payload {
            Payload::Action(a) => a.patient.as_ref(),
            Payload::State(s) => Some(&s.carrier),
        };
        if let Some(Referent::Object(o)) = referent {
            if !objects.contains(o.as_str()) {
                return Some((o.clone(), format!("element `{}`", e.id)));
            }
        }
    }
    for p in &model.plans {
        let ids = std::iter::once(&p.achieves)
            .chain(&p.preconditions)
            .chain(&p.substeps)
            .chain(&p.results);
        for id in ids {
            if !elements.contains(id.as_str()) {
                return Some((id.clone(), format!("plan `{}`", p.id)));
            }
        }
    }
    for b in &model.functions {
        if !elements.contains(b.function.as_str()) {
            return Some((b.function.clone(), "functions".to_string()));
        }
        if !objects.contains(b.object.as_str()) {
            return Some((b.object.clone(), "functions".to_string()));
        }
    }
    None
}

fn duplicates<'a>(ids: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = BTreeSet::new();
    let mut dups = Vec::new();
    for id in ids {
        if !seen.insert(id) && !dups.contains(&id) {
            dups.push(id);
        }
    }
    dups
}

/// Lists every invariant the model breaks. An empty list means the model
/// is well formed.
pub fn validate_task_model(model: &TaskModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let by_id: BTreeMap<&str, &TaskElement> = model.elements.iter().map(|e| (e.id.as_str(), e)).collect();

    for id in duplicates(model.objects.iter().map(|o| o.id.as_str())) {
        out.push(Violation::new("object.id unique", id));
    }
    for id in duplicates(model.elements.iter().map(|e| e.id.as_str())) {
        out.push(Violation::new("element.id unique", id));
    }
    for id in duplicates(model.plans.iter().map(|p| p.id.as_str())) {
        out.push(Violation::new("plan.id unique", id));
    }
    for o in &model.objects {
        if o.name_fr.trim().is_empty() || o.name_en.trim().is_empty() {
            out.push(Violation::new("object names non-empty", &o.id));
        }
    }
    if let Some((id, context)) = first_dangling_reference(model) {
        out.push(Violation::new("references resolve", format!("{id} ({context})")));
    }

    for e in &model.elements {
        if !e.payload_agrees() {
            out.push(Violation::new("element kind/payload agreement", &e.id));
        }
        if e.kind == ElementKind::Substep {
            match &e.plan {
                None => out.push(Violation::new("substep.plan mandatory", &e.id)),
                Some(p) => {
                    if let Some(plan) = model.plan(p) {
                        if !plan.substeps.contains(&e.id) {
                            out.push(Violation::new("substep listed by its plan", &e.id));
                        }
                    }
                }
            }
        }
        if e.kind == ElementKind::Function {
            let n = model.functions.iter().filter(|b| b.function == e.id).count();
            if n != 1 {
                out.push(Violation::new(
                    "function accessed through exactly one interface object",
                    &e.id,
                ));
            }
        }
    }

    let mut goals_with_plan: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &model.plans {
        match by_id.get(p.achieves.as_str()) {
            Some(g) if g.kind == ElementKind::Goal => {
                *goals_with_plan.entry(g.id.as_str()).or_default() += 1;
            }
            Some(_) => out.push(Violation::new("plan.achieves is a goal", &p.id)),
            None => {}
        }
        if p.substeps.is_empty() {
            out.push(Violation::new("plan.substeps non-empty", &p.id));
        }
        let lists = [
            (
                &p.preconditions,
                ElementKind::Constraint,
                "plan.preconditions are constraints",
            ),
            (&p.substeps, ElementKind::Substep, "plan.substeps are substeps"),
            (&p.results, ElementKind::Result, "plan.results are results"),
        ];
        for (ids, kind, rule) in lists {
            for id in ids {
                if let Some(e) = by_id.get(id.as_str()) {
                    if e.kind != kind {
                        out.push(Violation::new(rule, format!("{} in {}", id, p.id)));
                    }
                }
            }
        }
    }
    for (goal, n) in goals_with_plan {
        if n > 1 {
            out.push(Violation::new("at most one plan per goal", goal));
        }
    }
    for b in &model.functions {
        if let Some(e) = by_id.get(b.function.as_str()) {
            if e.kind != ElementKind::Function {
                out.push(Violation::new("functions pair a function element", &b.function));
            }
        }
    }
    out
}

/// The elements an instruction for `goal` can draw on: the goal, then its
/// plan's constraints, substeps and results, each in plan order.
pub fn plan_elements<'m>(model: &'m TaskModel, goal: &str) -> Result<Vec<&'m TaskElement>, TaskModelError> {
    let g = model
        .element(goal)
        .filter(|e| e.kind == ElementKind::Goal)
        .ok_or_else(|| TaskModelError::UnknownGoal(goal.to_string()))?;
    let plan = model
        .plan_for_goal(goal)
        .ok_or_else(|| TaskModelError::NoPlanForGoal(goal.to_string()))?;
    let mut out = vec![g];
    for id in plan.preconditions.iter().chain(&plan.substeps).chain(&plan.results) {
        // referential integrity is a parse-time invariant
        if let Some(e) = model.element(id) {
            out.push(e);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "objects": [],
        "elements": [
            {"id": "g", "kind": "goal", "payload": {"verb": "select", "patient": {"lexeme": "word"}, "modifiers": []}, "plan": "p"},
            {"id": "s", "kind": "substep", "payload": {"verb": "double-click", "modifiers": []}, "plan": "p"}
        ],
        "plans": [{"id": "p", "achieves": "g", "preconditions": [], "substeps": ["s"], "results": []}],
        "functions": []
    }"#;

    #[test]
    fn minimal_document() {
        let m = parse_task_model(MINIMAL).unwrap();
        assert_eq!(m.elements.len(), 2);
        assert_eq!(m.plans.len(), 1);
        assert!(validate_task_model(&m).is_empty());
    }

    #[test]
    fn dangling_substep_is_named() {
        let doc = MINIMAL.replace(r#""substeps": ["s"]"#, r#""substeps": ["s", "s9"]"#);
        match parse_task_model(&doc) {
            Err(TaskModelError::Reference { id, .. }) => assert_eq!(id, "s9"),
            other => panic!("expected reference error, got {other:?}"),
        }
    }

    #[test]
    fn syntax_and_schema_errors_are_distinct() {
        assert!(matches!(
            parse_task_model("{\"objects\": ["),
            Err(TaskModelError::Syntax(_))
        ));
        let extra = MINIMAL.replacen("\"objects\": []", "\"objects\": [], \"extra\": 1", 1);
        assert!(matches!(parse_task_model(&extra), Err(TaskModelError::Schema(_))));
        let missing = r#"{"objects": [], "elements": [], "plans": []}"#;
        assert!(matches!(parse_task_model(missing), Err(TaskModelError::Schema(_))));
        let wrong_payload = MINIMAL.replace(
            r#"{"verb": "double-click", "modifiers": []}"#,
            r#"{"carrier": {"lexeme": "word"}, "predicate": "appear", "achievable_by_planning": false}"#,
        );
        assert!(matches!(
            parse_task_model(&wrong_payload),
            Err(TaskModelError::Schema(_))
        ));
    }

    #[test]
    fn empty_substeps_is_a_violation() {
        let mut m = parse_task_model(MINIMAL).unwrap();
        m.plans[0].substeps.clear();
        m.elements.retain(|e| e.kind != ElementKind::Substep);
        let v = validate_task_model(&m);
        assert_eq!(v, vec![Violation::new("plan.substeps non-empty", "p")]);
    }

    #[test]
    fn unpaired_function_is_a_violation() {
        let mut m = parse_task_model(MINIMAL).unwrap();
        m.elements.push(TaskElement {
            id: "f".into(),
            kind: ElementKind::Function,
            payload: Payload::Action(ActionSpec {
                verb: "close".into(),
                patient: None,
                modifiers: vec![],
            }),
            plan: None,
        });
        let v = validate_task_model(&m);
        assert_eq!(
            v,
            vec![Violation::new(
                "function accessed through exactly one interface object",
                "f"
            )]
        );
    }

    #[test]
    fn kind_payload_disagreement() {
        let mut m = parse_task_model(MINIMAL).unwrap();
        m.elements[1].kind = ElementKind::Result;
        let v = validate_task_model(&m);
        assert!(v.iter().any(|x| x.rule == "element kind/payload agreement"));
    }

    #[test]
    fn plan_elements_ordering_and_errors() {
        let m = parse_task_model(MINIMAL).unwrap();
        let ids: Vec<_> = plan_elements(&m, "g").unwrap().iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["g", "s"]);
        assert!(matches!(
            plan_elements(&m, "g-zzz"),
            Err(TaskModelError::UnknownGoal(_))
        ));
    }

    #[test]
    fn goal_without_plan() {
        let doc = MINIMAL.replace(
            r#"{"id": "s", "kind""#,
            r#"{"id": "g2", "kind": "goal", "payload": {"verb": "close", "modifiers": []}},
            {"id": "s", "kind""#,
        );
        let m = parse_task_model(&doc).unwrap();
        assert!(matches!(plan_elements(&m, "g2"), Err(TaskModelError::NoPlanForGoal(_))));
    }
}
