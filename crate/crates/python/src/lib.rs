//! Python bindings: an `Engine` over task model, profiles, lexicon and
//! rules, plus coded corpora, frequency tables and the statistics helpers.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use manualgen::genre::{load_profiles, preselect};
use manualgen::stats::{self, CodedCorpus, FrequencyTable, Partition};
use manualgen::task_model::parse_task_model;
use manualgen::{
    data, CorpusRequest, ElementKind, FeatureBundle, Genre, HeadingStyle, Lang, Lexicon, Resources, RuleSet,
    SelectionMode, SplitMix64, UnitContext,
};

create_exception!(pymanualgen, ManualgenError, PyException);

fn fail<E: Display>(e: E) -> PyErr {
    ManualgenError::new_err(e.to_string())
}

fn parse<T: FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(PyValueError::new_err)
}

fn heading_style(s: &str) -> PyResult<HeadingStyle> {
    match s {
        "plain" => Ok(HeadingStyle::Plain),
        "markdown" => Ok(HeadingStyle::Markdown),
        other => Err(PyValueError::new_err(format!("unknown heading style `{other}`"))),
    }
}

/// Resolves `(mode, seed)` the way the command line does: stochastic needs
/// a seed, deterministic ignores it.
fn mode_seed(mode: &str, seed: Option<u64>) -> PyResult<(SelectionMode, u64)> {
    let mode: SelectionMode = parse(mode)?;
    match (mode, seed) {
        (SelectionMode::Stochastic, None) => Err(PyValueError::new_err("stochastic mode requires a seed")),
        (SelectionMode::Stochastic, Some(s)) => Ok((mode, s)),
        (SelectionMode::Deterministic, _) => Ok((mode, 0)),
    }
}

fn partition(by: &str, genre: Option<&str>, element: Option<&str>) -> PyResult<Partition> {
    match (by, genre, element) {
        ("element", None, None) => Ok(Partition::ByElement),
        ("genre", None, None) => Ok(Partition::ByGenre),
        ("element", Some(g), None) => Ok(Partition::ByElementWithinGenre(parse(g)?)),
        ("genre", None, Some(k)) => Ok(Partition::ByGenreWithinElement(parse::<ElementKind>(k)?)),
        _ => Err(PyValueError::new_err(
            "by must be `element` (optionally with genre) or `genre` (optionally with element)",
        )),
    }
}

/// Generation resources. Every argument is a JSON document; omitted ones
/// use the shipped data.
#[pyclass(name = "Engine", module = "pymanualgen")]
struct PyEngine {
    res: Resources,
    warnings: Vec<String>,
}

#[pymethods]
impl PyEngine {
    #[new]
    #[pyo3(signature = (task_model=None, profiles=None, lexicon=None, rules=None))]
    fn new(
        task_model: Option<&str>,
        profiles: Option<&str>,
        lexicon: Option<&str>,
        rules: Option<&str>,
    ) -> PyResult<Self> {
        let network = data::network();
        let loaded = load_profiles(profiles.unwrap_or(data::PROFILES_JSON), &network).map_err(fail)?;
        let res = Resources {
            lexicon: Lexicon::from_json(lexicon.unwrap_or(data::LEXICON_JSON)).map_err(fail)?,
            rules: RuleSet::from_json(rules.unwrap_or(data::RULES_JSON)).map_err(fail)?,
            model: parse_task_model(task_model.unwrap_or(data::TASK_MODEL_JSON)).map_err(fail)?,
            profiles: loaded.profiles,
            network,
        };
        Ok(Self {
            res,
            warnings: loaded.warnings,
        })
    }

    /// Renormalization notices raised while loading the profiles.
    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }

    fn goals(&self) -> Vec<String> {
        self.res.model.goals().map(|g| g.id.clone()).collect()
    }

    /// Ids of every task element, in model order.
    fn elements(&self) -> Vec<(String, String)> {
        self.res
            .model
            .elements
            .iter()
            .map(|e| (e.id.clone(), e.kind.to_string()))
            .collect()
    }

    /// Realizes one element under an explicit bundle.
    #[pyo3(signature = (element, bundle, lang="fr", finite=true, clausal=true))]
    fn realize(
        &self,
        element: &str,
        bundle: BTreeMap<String, String>,
        lang: &str,
        finite: bool,
        clausal: bool,
    ) -> PyResult<String> {
        let e = self
            .res
            .model
            .element(element)
            .ok_or_else(|| PyValueError::new_err(format!("unknown element `{element}`")))?;
        let bundle = FeatureBundle {
            selections: bundle,
            context: UnitContext { finite, clausal },
        };
        let violations = self.res.network.validate_bundle(&bundle);
        if !violations.is_empty() {
            let listed: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(ManualgenError::new_err(listed.join("; ")));
        }
        self.res.realizer().realize_unit(e, &bundle, parse(lang)?).map_err(fail)
    }

    /// The bundle the genre preselects for one element.
    #[pyo3(signature = (genre, element, mode="deterministic", seed=None, as_heading=false))]
    fn preselect<'py>(
        &self,
        py: Python<'py>,
        genre: &str,
        element: &str,
        mode: &str,
        seed: Option<u64>,
        as_heading: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let (mode, seed) = mode_seed(mode, seed)?;
        let e = self
            .res
            .model
            .element(element)
            .ok_or_else(|| PyValueError::new_err(format!("unknown element `{element}`")))?;
        let profile = self.res.profiles.get(parse(genre)?);
        let mut rng = SplitMix64::new(seed);
        let b = preselect(
            profile,
            &self.res.network,
            &self.res.lexicon,
            e,
            as_heading,
            mode,
            &mut rng,
        )
        .map_err(fail)?;
        bundle_dict(py, &b)
    }

    #[pyo3(signature = (genre, goal, lang="fr", mode="deterministic", seed=None, heading_style="plain"))]
    fn generate_document(
        &self,
        genre: &str,
        goal: &str,
        lang: &str,
        mode: &str,
        seed: Option<u64>,
        heading_style: &str,
    ) -> PyResult<String> {
        let (mode, seed) = mode_seed(mode, seed)?;
        manualgen::generate_document(
            &self.res,
            parse(genre)?,
            goal,
            parse(lang)?,
            mode,
            seed,
            self::heading_style(heading_style)?,
        )
        .map_err(fail)
    }

    #[pyo3(signature = (genre, count, lang="fr", mode="deterministic", seed=None))]
    fn generate_corpus(
        &self,
        genre: &str,
        count: usize,
        lang: &str,
        mode: &str,
        seed: Option<u64>,
    ) -> PyResult<PyCorpus> {
        if count == 0 {
            return Err(PyValueError::new_err("count must be positive"));
        }
        let (mode, seed) = mode_seed(mode, seed)?;
        let req = CorpusRequest {
            genre: parse(genre)?,
            lang: parse(lang)?,
            mode,
            seed,
            count,
            profile_hash: None,
        };
        let corpus = manualgen::generate_corpus(&self.res, &req).map_err(fail)?;
        Ok(PyCorpus { corpus })
    }
}

fn bundle_dict<'py>(py: Python<'py>, b: &FeatureBundle) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (system, feature) in &b.selections {
        d.set_item(system, feature)?;
    }
    Ok(d)
}

type UnitRow<'py> = (String, String, String, String, Bound<'py, PyDict>);

/// A coded corpus of text units with their bundles.
#[pyclass(name = "Corpus", module = "pymanualgen")]
struct PyCorpus {
    corpus: CodedCorpus,
}

#[pymethods]
impl PyCorpus {
    #[staticmethod]
    fn from_jsonl(text: &str) -> PyResult<Self> {
        let corpus = CodedCorpus::from_jsonl(text, &data::network()).map_err(fail)?;
        Ok(Self { corpus })
    }

    #[staticmethod]
    fn merge(parts: Vec<PyRef<'_, PyCorpus>>) -> PyResult<Self> {
        let corpus = CodedCorpus::merge(parts.iter().map(|p| p.corpus.clone()).collect()).map_err(fail)?;
        Ok(Self { corpus })
    }

    fn to_jsonl(&self) -> String {
        self.corpus.to_jsonl()
    }

    fn __len__(&self) -> usize {
        self.corpus.len()
    }

    fn texts(&self) -> Vec<String> {
        self.corpus.units.iter().map(|u| u.text.clone()).collect()
    }

    /// `(id, genre, element, text, bundle)` per unit.
    fn units<'py>(&self, py: Python<'py>) -> PyResult<Vec<UnitRow<'py>>> {
        self.corpus
            .units
            .iter()
            .map(|u| {
                Ok((
                    u.id.clone(),
                    u.genre.to_string(),
                    u.element.to_string(),
                    u.text.clone(),
                    bundle_dict(py, &u.bundle)?,
                ))
            })
            .collect()
    }

    #[pyo3(signature = (system, by="element", genre=None, element=None))]
    fn local_mean_table(
        &self,
        system: &str,
        by: &str,
        genre: Option<&str>,
        element: Option<&str>,
    ) -> PyResult<PyTable> {
        let part = partition(by, genre, element)?;
        let table = stats::local_mean_table(&self.corpus, &data::network(), system, part).map_err(fail)?;
        Ok(PyTable { table })
    }

    fn cross_tab(&self) -> PyTable {
        PyTable {
            table: stats::cross_tab(&self.corpus),
        }
    }

    /// 0/1 indicators of `feature` for the units in `row`.
    #[pyo3(signature = (feature, row, by="element", genre=None, element=None))]
    fn indicator_sample(
        &self,
        feature: &str,
        row: &str,
        by: &str,
        genre: Option<&str>,
        element: Option<&str>,
    ) -> PyResult<Vec<f64>> {
        let part = partition(by, genre, element)?;
        stats::indicator_sample(&self.corpus, &data::network(), feature, part, row).map_err(fail)
    }

    #[pyo3(signature = (pattern, window=4))]
    fn kwic(&self, pattern: &str, window: usize) -> Vec<(String, String, String, String)> {
        kwic_lines(&self.corpus.texts(), pattern, window)
            .into_iter()
            .map(|(unit, l, k, r)| (self.corpus.units[unit].id.clone(), l, k, r))
            .collect()
    }
}

/// A percentage table: rows of a partition against the features of one system.
#[pyclass(name = "Table", module = "pymanualgen")]
struct PyTable {
    table: FrequencyTable,
}

#[pymethods]
impl PyTable {
    #[staticmethod]
    fn from_tsv(text: &str) -> PyResult<Self> {
        Ok(Self {
            table: stats::parse_tsv(text).map_err(fail)?,
        })
    }

    /// A shipped reference table by file name.
    #[staticmethod]
    fn reference(name: &str) -> PyResult<Self> {
        let body =
            data::reference_table(name).ok_or_else(|| PyValueError::new_err(format!("no shipped table `{name}`")))?;
        Self::from_tsv(body)
    }

    fn to_tsv(&self) -> String {
        stats::to_tsv(&self.table)
    }

    fn pretty(&self) -> String {
        stats::render_pretty(&self.table)
    }

    #[getter]
    fn system(&self) -> String {
        self.table.system.clone()
    }

    #[getter]
    fn features(&self) -> Vec<String> {
        self.table.features.clone()
    }

    #[getter]
    fn rows(&self) -> Vec<String> {
        self.table.rows.iter().map(|r| r.label.clone()).collect()
    }

    /// Percentage in one cell; `None` for an empty row.
    fn cell(&self, row: &str, feature: &str) -> Option<f64> {
        self.table.cell(row, feature)
    }

    /// `(passed, report)` against `reference`.
    #[pyo3(signature = (reference, tolerance=3.0))]
    fn compare(&self, reference: &PyTable, tolerance: f64) -> PyResult<(bool, String)> {
        let r = stats::compare_tables(&self.table, &reference.table, tolerance).map_err(fail)?;
        Ok((r.pass, r.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Table(system={:?}, rows={})", self.table.system, self.table.rows.len())
    }
}

fn kwic_lines(texts: &[&str], pattern: &str, window: usize) -> Vec<(usize, String, String, String)> {
    stats::kwic(texts, pattern, window)
        .into_iter()
        .map(|l| (l.unit, l.left, l.keyword, l.right))
        .collect()
}

/// Concordance over plain strings: `(unit index, left, keyword, right)`.
#[pyfunction]
#[pyo3(signature = (texts, pattern, window=4))]
fn kwic(texts: Vec<String>, pattern: &str, window: usize) -> Vec<(usize, String, String, String)> {
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    kwic_lines(&refs, pattern, window)
}

/// Welch two-sample t-test.
#[pyfunction]
#[pyo3(signature = (a, b, alpha=0.05))]
fn t_test<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = stats::t_test(&a, &b, alpha).map_err(fail)?;
    let d = PyDict::new(py);
    d.set_item("t", r.t)?;
    d.set_item("df", r.df)?;
    d.set_item("alpha", r.alpha)?;
    d.set_item("critical", r.critical)?;
    d.set_item("significant", r.significant)?;
    Ok(d)
}

/// Features recoverable from a unit's surface text.
#[pyfunction]
#[pyo3(signature = (text, lang="fr"))]
fn recode<'py>(py: Python<'py>, text: &str, lang: &str) -> PyResult<Bound<'py, PyDict>> {
    let lang: Lang = parse(lang)?;
    let b = manualgen::recode_surface(text, lang, &data::lexicon()).map_err(fail)?;
    bundle_dict(py, &b)
}

/// Genre names accepted everywhere a genre is expected.
#[pyfunction]
fn genres() -> Vec<String> {
    Genre::ALL.iter().map(ToString::to_string).collect()
}

#[pymodule]
fn pymanualgen(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEngine>()?;
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyTable>()?;
    m.add_function(wrap_pyfunction!(kwic, m)?)?;
    m.add_function(wrap_pyfunction!(t_test, m)?)?;
    m.add_function(wrap_pyfunction!(recode, m)?)?;
    m.add_function(wrap_pyfunction!(genres, m)?)?;
    m.add("ManualgenError", m.py().get_type::<ManualgenError>())?;
    Ok(())
}
