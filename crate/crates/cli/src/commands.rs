use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use manualgen::genre::{load_profiles, Loaded};
use manualgen::stats::{
    compare_tables, cross_tab, indicator_sample, kwic, local_mean_table, parse_tsv, render_kwic, render_pretty, t_test,
    to_tsv, CodedCorpus, FrequencyTable, Partition, TASK_ELEMENT,
};
use manualgen::task_model::{parse_task_model, TaskModelError};
use manualgen::{
    data, generate_corpus, generate_document, CorpusRequest, Lexicon, Resources, RuleSet, SelectionMode, SystemNetwork,
    Violation,
};

use crate::args::{
    ByArg, CompareArgs, ElementArg, FormatArg, GenArgs, GenreArg, Inputs, KwicArgs, ModeArg, TablesArgs, TtestArgs,
    ValidateArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Io { .. } | CliError::Data(_) => 2,
        }
    }
}

fn data_err<E: Display>(context: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Data(format!("{context}: {e}"))
}

/// What a command produced: bytes for its output and the exit code.
pub struct Outcome {
    pub text: String,
    pub code: i32,
    pub output: Option<PathBuf>,
}

impl Outcome {
    fn ok(text: String, output: Option<PathBuf>) -> Self {
        Self { text, code: 0, output }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads `path`, falling back to the embedded copy when the path is absent
/// or names a shipped file that is not on disk.
fn resolve(path: Option<&Path>, shipped: &[(&str, &'static str)]) -> Result<(String, String), CliError> {
    let Some(path) = path else {
        let (name, body) = shipped[0];
        return Ok((name.to_string(), body.to_string()));
    };
    if path.exists() {
        return Ok((path.display().to_string(), read(path)?));
    }
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    match shipped.iter().find(|(name, _)| *name == file_name) {
        Some((name, body)) => Ok((name.to_string(), body.to_string())),
        None => read(path).map(|body| (path.display().to_string(), body)),
    }
}

struct LoadedInputs {
    resources: Resources,
    profile_hash: String,
    warnings: Vec<String>,
}

fn load_inputs(inputs: &Inputs) -> Result<LoadedInputs, CliError> {
    let network = data::network();
    let (_, lex) = resolve(inputs.lexicon.as_deref(), &[("lexicon.json", data::LEXICON_JSON)])?;
    let lexicon = Lexicon::from_json(&lex).map_err(data_err("lexicon"))?;
    let (_, rules) = resolve(inputs.rules.as_deref(), &[("rules.json", data::RULES_JSON)])?;
    let rules = RuleSet::from_json(&rules).map_err(data_err("rules"))?;
    let (_, model) = resolve(
        inputs.task_model.as_deref(),
        &[("macwrite-sample.json", data::TASK_MODEL_JSON)],
    )?;
    let model = parse_task_model(&model).map_err(data_err("task model"))?;
    let (_, profile_text) = resolve(
        inputs.profiles.as_deref(),
        &[("paper-profiles.json", data::PROFILES_JSON)],
    )?;
    let Loaded { profiles, warnings } = load_profiles(&profile_text, &network).map_err(data_err("profiles"))?;
    Ok(LoadedInputs {
        resources: Resources {
            network,
            lexicon,
            rules,
            profiles,
            model,
        },
        profile_hash: hex::encode(Sha256::digest(profile_text.as_bytes())),
        warnings,
    })
}

fn warn(message: &str) {
    eprintln!("warning: {message}");
}

fn seed_for(mode: ModeArg, seed: Option<u64>) -> Result<u64, CliError> {
    match (mode, seed) {
        (ModeArg::Stochastic, None) => Err(CliError::Usage("--mode stochastic requires --seed".into())),
        (ModeArg::Stochastic, Some(s)) => Ok(s),
        (ModeArg::Deterministic, Some(_)) => {
            warn("--seed is ignored in deterministic mode");
            Ok(0)
        }
        (ModeArg::Deterministic, None) => Ok(0),
    }
}

pub fn gen(args: GenArgs) -> Result<Outcome, CliError> {
    let seed = seed_for(args.mode, args.seed)?;
    let loaded = load_inputs(&args.inputs)?;
    for w in &loaded.warnings {
        warn(w);
    }
    let res = &loaded.resources;
    let mode = SelectionMode::from(args.mode);
    let text = if args.corpus {
        let req = CorpusRequest {
            genre: args.genre.into(),
            lang: args.lang.into(),
            mode,
            seed,
            count: args.count.unwrap_or(1) as usize,
            profile_hash: Some(loaded.profile_hash.clone()),
        };
        generate_corpus(res, &req).map_err(data_err("generation"))?.to_jsonl()
    } else {
        let goal = args.goal.as_deref().unwrap_or_default();
        let mut doc = generate_document(
            res,
            args.genre.into(),
            goal,
            args.lang.into(),
            mode,
            seed,
            args.heading_style.into(),
        )
        .map_err(data_err("generation"))?;
        doc.push('\n');
        doc
    };
    Ok(Outcome::ok(text, args.output))
}

fn load_corpus(paths: &[PathBuf], network: &SystemNetwork) -> Result<CodedCorpus, CliError> {
    let mut parts = Vec::with_capacity(paths.len());
    for path in paths {
        let text = read(path)?;
        parts.push(CodedCorpus::from_jsonl(&text, network).map_err(data_err(&path.display().to_string()))?);
    }
    CodedCorpus::merge(parts).map_err(data_err("corpus"))
}

fn partition(by: ByArg, genre: Option<GenreArg>, element: Option<ElementArg>) -> Result<Partition, CliError> {
    match (by, genre, element) {
        (ByArg::Element, None, None) => Ok(Partition::ByElement),
        (ByArg::Genre, None, None) => Ok(Partition::ByGenre),
        (ByArg::Element, Some(g), None) => Ok(Partition::ByElementWithinGenre(g.into())),
        (ByArg::Genre, None, Some(k)) => Ok(Partition::ByGenreWithinElement(k.into())),
        (ByArg::Element, _, Some(_)) => Err(CliError::Usage("--element goes with --by genre".into())),
        (ByArg::Genre, Some(_), _) => Err(CliError::Usage("--genre goes with --by element".into())),
    }
}

fn render(table: &FrequencyTable, format: FormatArg) -> String {
    match format {
        FormatArg::Tsv => to_tsv(table),
        FormatArg::Pretty => render_pretty(table),
    }
}

pub fn tables(args: TablesArgs) -> Result<Outcome, CliError> {
    let network = data::network();
    let table = if args.system == TASK_ELEMENT {
        if args.genre.is_some() || args.element.is_some() || args.by != ByArg::Element {
            return Err(CliError::Usage(format!(
                "--system {TASK_ELEMENT} always has genre rows; drop --by, --genre and --element"
            )));
        }
        cross_tab(&load_corpus(&args.corpus, &network)?)
    } else {
        let part = partition(args.by, args.genre, args.element)?;
        let corpus = load_corpus(&args.corpus, &network)?;
        local_mean_table(&corpus, &network, &args.system, part).map_err(data_err("tables"))?
    };
    Ok(Outcome::ok(render(&table, args.format), args.output))
}

fn load_table(path: &Path) -> Result<FrequencyTable, CliError> {
    let (name, text) = resolve(Some(path), &data::REFERENCE_TABLES)?;
    parse_tsv(&text).map_err(data_err(&name))
}

pub fn compare(args: CompareArgs) -> Result<Outcome, CliError> {
    if !(args.tolerance.is_finite() && args.tolerance >= 0.0) {
        return Err(CliError::Usage("--tolerance must be a non-negative number".into()));
    }
    let observed = load_table(&args.observed)?;
    let reference = load_table(&args.reference)?;
    let report = compare_tables(&observed, &reference, args.tolerance).map_err(data_err("compare"))?;
    Ok(Outcome {
        text: report.to_string(),
        code: if report.pass { 0 } else { 1 },
        output: args.output,
    })
}

pub fn kwic_cmd(args: KwicArgs) -> Result<Outcome, CliError> {
    if args.pattern.trim().is_empty() {
        return Err(CliError::Usage("--pattern must not be empty".into()));
    }
    let corpus = load_corpus(&args.corpus, &data::network())?;
    let lines = kwic(&corpus.texts(), &args.pattern, args.window);
    let mut text = String::new();
    let width = corpus.units.iter().map(|u| u.id.chars().count()).max().unwrap_or(0);
    for (line, row) in lines.iter().zip(render_kwic(&lines).lines()) {
        text.push_str(&format!("{:<width$}  {row}\n", corpus.units[line.unit].id));
    }
    Ok(Outcome::ok(text, args.output))
}

pub fn ttest(args: TtestArgs) -> Result<Outcome, CliError> {
    let (a, b, labels) = match (args.a, args.b, args.corpus.is_empty()) {
        (Some(a), Some(b), true) => (a, b, ("a".to_string(), "b".to_string())),
        (None, None, false) => {
            let rows = args.rows.unwrap_or_default();
            let [ra, rb] = rows.as_slice() else {
                return Err(CliError::Usage("--rows takes exactly two labels".into()));
            };
            let feature = args.feature.unwrap_or_default();
            let part = partition(args.by, args.genre, args.element)?;
            let network = data::network();
            let corpus = load_corpus(&args.corpus, &network)?;
            let sample =
                |row: &str| indicator_sample(&corpus, &network, &feature, part, row).map_err(data_err("ttest"));
            (sample(ra)?, sample(rb)?, (ra.clone(), rb.clone()))
        }
        _ => return Err(CliError::Usage("give either --a and --b, or --corpus".into())),
    };
    let r = t_test(&a, &b, args.alpha).map_err(data_err("ttest"))?;
    let text = format!(
        "samples\t{} (n={})\t{} (n={})\nt\t{:.6}\ndf\t{:.6}\nalpha\t{}\ncritical\t{:.6}\nsignificant\t{}\n",
        labels.0,
        a.len(),
        labels.1,
        b.len(),
        r.t,
        r.df,
        r.alpha,
        r.critical,
        if r.significant { "yes" } else { "no" }
    );
    Ok(Outcome::ok(text, args.output))
}

pub fn validate(args: ValidateArgs) -> Result<Outcome, CliError> {
    let network = data::network();
    let mut report = String::new();
    let mut failed = false;
    let mut line = |name: &str, problems: Vec<String>, notes: Vec<String>| {
        if problems.is_empty() {
            report.push_str(&format!("{name}: ok\n"));
        } else {
            failed = true;
            report.push_str(&format!("{name}: {} problem(s)\n", problems.len()));
            for p in problems {
                report.push_str(&format!("  {p}\n"));
            }
        }
        for n in notes {
            report.push_str(&format!("  note: {n}\n"));
        }
    };

    let inputs = &args.inputs;
    let (name, lex) = resolve(inputs.lexicon.as_deref(), &[("lexicon.json", data::LEXICON_JSON)])?;
    let lexicon = Lexicon::from_json(&lex);
    line(
        &name,
        lexicon.as_ref().err().map(|e| e.to_string()).into_iter().collect(),
        vec![],
    );

    let (name, rules) = resolve(inputs.rules.as_deref(), &[("rules.json", data::RULES_JSON)])?;
    line(
        &name,
        RuleSet::from_json(&rules)
            .err()
            .map(|e| e.to_string())
            .into_iter()
            .collect(),
        vec![],
    );

    let (name, profiles) = resolve(
        inputs.profiles.as_deref(),
        &[("paper-profiles.json", data::PROFILES_JSON)],
    )?;
    match load_profiles(&profiles, &network) {
        Ok(l) => line(&name, vec![], l.warnings),
        Err(e) => line(&name, vec![e.to_string()], vec![]),
    }

    let (name, model) = resolve(
        inputs.task_model.as_deref(),
        &[("macwrite-sample.json", data::TASK_MODEL_JSON)],
    )?;
    let problems = match parse_task_model(&model) {
        Ok(m) => {
            let mut unresolved: Vec<Violation> = Vec::new();
            if let Ok(lex) = &lexicon {
                for e in &m.elements {
                    for lemma in e.lexemes() {
                        if lex.get(lemma).is_err() {
                            unresolved.push(Violation::new("lexeme-resolves", format!("{}: {lemma}", e.id)));
                        }
                    }
                }
            }
            unresolved.iter().map(ToString::to_string).collect()
        }
        Err(TaskModelError::Invalid(v)) => v.iter().map(ToString::to_string).collect(),
        Err(e) => vec![e.to_string()],
    };
    line(&name, problems, vec![]);

    if let Some(path) = &args.corpus {
        let text = read(path)?;
        let problems = match CodedCorpus::from_jsonl(&text, &network) {
            Ok(_) => vec![],
            Err(e) => vec![e.to_string()],
        };
        line(&path.display().to_string(), problems, vec![]);
    }

    Ok(Outcome {
        text: report,
        code: if failed { 2 } else { 0 },
        output: args.output,
    })
}
