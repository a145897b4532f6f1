use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::corpus::{CodedCorpus, CodedUnit};
use crate::features::SystemNetwork;
use crate::genre::Genre;
use crate::task_model::ElementKind;

/// Marker for a row whose denominator is zero.
pub const EMPTY_CELL: &str = "—";

/// Pseudo-system name of the genre × element-kind cross-tabulation.
pub const TASK_ELEMENT: &str = "task-element";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    ByElement,
    ByGenre,
    ByElementWithinGenre(Genre),
    ByGenreWithinElement(ElementKind),
}

type UnitFilter = Box<dyn Fn(&CodedUnit) -> bool>;

impl Partition {
    pub fn label(&self) -> String {
        match self {
            Partition::ByElement => "by-element".into(),
            Partition::ByGenre => "by-genre".into(),
            Partition::ByElementWithinGenre(g) => format!("by-element-within-genre({g})"),
            Partition::ByGenreWithinElement(k) => format!("by-genre-within-element({k})"),
        }
    }

    fn row_header(&self) -> &'static str {
        match self {
            Partition::ByElement | Partition::ByElementWithinGenre(_) => "element",
            Partition::ByGenre | Partition::ByGenreWithinElement(_) => "genre",
        }
    }

    /// Row labels in presentation order, with the unit filter for each.
    fn rows(&self) -> Vec<(String, UnitFilter)> {
        match *self {
            Partition::ByElement => ElementKind::ALL
                .into_iter()
                .map(|k| {
                    (
                        k.to_string(),
                        Box::new(move |u: &CodedUnit| u.element == k) as Box<dyn Fn(&CodedUnit) -> bool>,
                    )
                })
                .collect(),
            Partition::ByGenre => Genre::ALL
                .into_iter()
                .map(|g| {
                    (
                        g.to_string(),
                        Box::new(move |u: &CodedUnit| u.genre == g) as Box<dyn Fn(&CodedUnit) -> bool>,
                    )
                })
                .collect(),
            Partition::ByElementWithinGenre(g) => ElementKind::ALL
                .into_iter()
                .map(|k| {
                    (
                        k.to_string(),
                        Box::new(move |u: &CodedUnit| u.genre == g && u.element == k)
                            as Box<dyn Fn(&CodedUnit) -> bool>,
                    )
                })
                .collect(),
            Partition::ByGenreWithinElement(k) => Genre::ALL
                .into_iter()
                .map(|g| {
                    (
                        g.to_string(),
                        Box::new(move |u: &CodedUnit| u.genre == g && u.element == k)
                            as Box<dyn Fn(&CodedUnit) -> bool>,
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    /// Denominator; absent in reference tables that do not give it.
    pub n: Option<usize>,
    /// Percentages aligned with the table's features; `None` when empty.
    pub cells: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub system: String,
    pub partition: String,
    pub row_header: String,
    pub features: Vec<String>,
    pub rows: Vec<Row>,
}

impl FrequencyTable {
    pub fn row(&self, label: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn cell(&self, row: &str, feature: &str) -> Option<f64> {
        let i = self.features.iter().position(|f| f == feature)?;
        self.row(row)?.cells.as_ref().map(|c| c[i])
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("tables differ in shape: {0}")]
    ShapeMismatch(String),
    #[error("table line {line}: {message}")]
    TableSyntax { line: usize, message: String },
}

fn percentages(counts: &[usize], n: usize) -> Option<Vec<f64>> {
    (n > 0).then(|| counts.iter().map(|c| 100.0 * *c as f64 / n as f64).collect())
}

/// Feature percentages for `system`, each row over the units of that row
/// which select the system at all.
pub fn local_mean_table(
    corpus: &CodedCorpus,
    network: &SystemNetwork,
    system: &str,
    partition: Partition,
) -> Result<FrequencyTable, StatsError> {
    let sys = network
        .system(system)
        .ok_or_else(|| StatsError::UnknownSystem(system.to_string()))?;
    if corpus.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let mut rows = Vec::new();
    for (label, keep) in partition.rows() {
        let mut counts = vec![0usize; sys.features.len()];
        let mut n = 0;
        for u in corpus.units.iter().filter(|u| keep(u)) {
            if let Some(i) = u.bundle.get(system).and_then(|f| sys.feature_index(f)) {
                counts[i] += 1;
                n += 1;
            }
        }
        rows.push(Row {
            label,
            n: Some(n),
            cells: percentages(&counts, n),
        });
    }
    Ok(FrequencyTable {
        system: system.to_string(),
        partition: partition.label(),
        row_header: partition.row_header().to_string(),
        features: sys.features.clone(),
        rows,
    })
}

/// Share of each element kind within each genre. Stored with genres as
/// rows; [`render_pretty`] shows genres as columns.
pub fn cross_tab(corpus: &CodedCorpus) -> FrequencyTable {
    let mut rows = Vec::new();
    for g in Genre::ALL {
        let mut counts = vec![0usize; ElementKind::ALL.len()];
        let mut n = 0;
        for u in corpus.units.iter().filter(|u| u.genre == g) {
            let i = ElementKind::ALL.iter().position(|k| *k == u.element).unwrap_or(0);
            counts[i] += 1;
            n += 1;
        }
        rows.push(Row {
            label: g.to_string(),
            n: Some(n),
            cells: percentages(&counts, n),
        });
    }
    FrequencyTable {
        system: TASK_ELEMENT.into(),
        partition: Partition::ByGenre.label(),
        row_header: "genre".into(),
        features: ElementKind::ALL.iter().map(ToString::to_string).collect(),
        rows,
    }
}

/// Per-unit 0/1 indicators of `feature` for the units of `row`, over
/// units selecting its system.
pub fn indicator_sample(
    corpus: &CodedCorpus,
    network: &SystemNetwork,
    feature: &str,
    partition: Partition,
    row: &str,
) -> Result<Vec<f64>, StatsError> {
    let sys = network
        .system_of_feature(feature)
        .ok_or_else(|| StatsError::UnknownSystem(feature.to_string()))?;
    let rows = partition.rows();
    let (_, keep) = rows
        .iter()
        .find(|(l, _)| l == row)
        .ok_or_else(|| StatsError::ShapeMismatch(format!("no row `{row}` in {}", partition.label())))?;
    Ok(corpus
        .units
        .iter()
        .filter(|u| keep(u))
        .filter_map(|u| u.bundle.get(&sys.name))
        .map(|f| if f == feature { 1.0 } else { 0.0 })
        .collect())
}

fn fmt_cell(v: f64) -> String {
    format!("{v:.1}")
}

/// TSV rendering: two comment lines, a header, one line per row.
pub fn to_tsv(table: &FrequencyTable) -> String {
    let with_n = table.rows.iter().any(|r| r.n.is_some());
    let mut out = format!("# system: {}\n# partition: {}\n", table.system, table.partition);
    let mut header = vec![table.row_header.clone()];
    header.extend(table.features.iter().cloned());
    if with_n {
        header.push("n".into());
    }
    out.push_str(&header.join("\t"));
    out.push('\n');
    for r in &table.rows {
        let mut line = vec![r.label.clone()];
        match &r.cells {
            Some(c) => line.extend(c.iter().map(|v| fmt_cell(*v))),
            None => line.extend(table.features.iter().map(|_| EMPTY_CELL.to_string())),
        }
        if with_n {
            line.push(r.n.map(|n| n.to_string()).unwrap_or_default());
        }
        out.push_str(&line.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse_tsv(text: &str) -> Result<FrequencyTable, StatsError> {
    let syntax = |line: usize, message: String| StatsError::TableSyntax { line, message };
    let mut system = None;
    let mut partition = String::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut with_n = false;
    for (i, line) in text.lines().enumerate() {
        let no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(s) = comment.strip_prefix("system:") {
                system = Some(s.trim().to_string());
            } else if let Some(p) = comment.strip_prefix("partition:") {
                partition = p.trim().to_string();
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let Some(h) = &header else {
            let mut h: Vec<String> = fields.iter().map(|s| s.trim().to_string()).collect();
            if h.len() < 2 {
                return Err(syntax(no, "header needs a row column and at least one feature".into()));
            }
            with_n = h.last().is_some_and(|l| l == "n");
            if with_n {
                h.pop();
            }
            header = Some(h);
            continue;
        };
        let width = h.len() + usize::from(with_n);
        if fields.len() != width {
            return Err(syntax(no, format!("expected {width} fields, found {}", fields.len())));
        }
        let cells_raw = &fields[1..h.len()];
        let cells = if cells_raw.iter().all(|c| c.trim() == EMPTY_CELL) {
            None
        } else {
            let mut v = Vec::new();
            for c in cells_raw {
                v.push(
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| syntax(no, format!("`{c}` is not a percentage")))?,
                );
            }
            Some(v)
        };
        let n = if with_n {
            let raw = fields[h.len()].trim();
            if raw.is_empty() {
                None
            } else {
                Some(raw.parse().map_err(|_| syntax(no, format!("`{raw}` is not a count")))?)
            }
        } else {
            None
        };
        rows.push(Row {
            label: fields[0].trim().to_string(),
            n,
            cells,
        });
    }
    let header = header.ok_or_else(|| syntax(0, "no header line".into()))?;
    Ok(FrequencyTable {
        system: system.ok_or_else(|| syntax(0, "missing `# system:` line".into()))?,
        partition,
        row_header: header[0].clone(),
        features: header[1..].to_vec(),
        rows,
    })
}

/// Labelled rows of already formatted cells.
type Grid = Vec<(String, Vec<String>)>;

/// Aligned plain text. The element-kind cross-tabulation is transposed so
/// genres run across.
pub fn render_pretty(table: &FrequencyTable) -> String {
    let (corner, cols, grid): (String, Vec<String>, Grid) = if table.system == TASK_ELEMENT {
        let cols = table.rows.iter().map(|r| r.label.clone()).collect();
        let grid = table
            .features
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let cells = table
                    .rows
                    .iter()
                    .map(|r| {
                        r.cells
                            .as_ref()
                            .map(|c| fmt_cell(c[j]))
                            .unwrap_or_else(|| EMPTY_CELL.into())
                    })
                    .collect();
                (f.clone(), cells)
            })
            .collect();
        ("element".to_string(), cols, grid)
    } else {
        let mut cols = table.features.clone();
        let with_n = table.rows.iter().any(|r| r.n.is_some());
        if with_n {
            cols.push("n".into());
        }
        let grid = table
            .rows
            .iter()
            .map(|r| {
                let mut cells: Vec<String> = match &r.cells {
                    Some(c) => c.iter().map(|v| fmt_cell(*v)).collect(),
                    None => table.features.iter().map(|_| EMPTY_CELL.into()).collect(),
                };
                if with_n {
                    cells.push(r.n.map(|n| n.to_string()).unwrap_or_default());
                }
                (r.label.clone(), cells)
            })
            .collect();
        (table.row_header.clone(), cols, grid)
    };
    let first_w = grid
        .iter()
        .map(|(l, _)| l.chars().count())
        .chain([corner.chars().count()])
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| {
            grid.iter()
                .map(|(_, cells)| cells[j].chars().count())
                .chain([c.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = format!("{} ({})\n", table.system, table.partition);
    let mut line = format!("{corner:<first_w$}");
    for (c, w) in cols.iter().zip(&widths) {
        line.push_str(&format!("  {c:>w$}"));
    }
    out.push_str(&line);
    out.push('\n');
    for (label, cells) in &grid {
        let mut line = format!("{label:<first_w$}");
        for (c, w) in cells.iter().zip(&widths) {
            line.push_str(&format!("  {c:>w$}"));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellDelta {
    pub row: String,
    pub feature: String,
    pub observed: f64,
    pub reference: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub pass: bool,
    pub tolerance: f64,
    pub deltas: Vec<CellDelta>,
    pub worst: Option<CellDelta>,
    /// Rows empty in exactly one of the two tables.
    pub emptiness_mismatches: Vec<String>,
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} (tolerance {:.2} pp)",
            if self.pass { "PASS" } else { "FAIL" },
            self.tolerance
        )?;
        for d in &self.deltas {
            writeln!(
                f,
                "{}\t{}\tobserved {:.1}\treference {:.1}\tdelta {:.2}",
                d.row, d.feature, d.observed, d.reference, d.delta
            )?;
        }
        for r in &self.emptiness_mismatches {
            writeln!(f, "{r}\tempty in only one table")?;
        }
        if let Some(w) = &self.worst {
            writeln!(f, "worst: {}/{} delta {:.2}", w.row, w.feature, w.delta)?;
        }
        Ok(())
    }
}

/// Cell-by-cell comparison, aligned by row label and feature name.
pub fn compare_tables(
    observed: &FrequencyTable,
    reference: &FrequencyTable,
    tolerance: f64,
) -> Result<CompareReport, StatsError> {
    let mut of = observed.features.clone();
    let mut rf = reference.features.clone();
    of.sort();
    rf.sort();
    if of != rf {
        return Err(StatsError::ShapeMismatch(format!(
            "features {:?} vs {:?}",
            observed.features, reference.features
        )));
    }
    let labels = |t: &FrequencyTable| {
        let mut v: Vec<String> = t.rows.iter().map(|r| r.label.clone()).collect();
        v.sort();
        v
    };
    if labels(observed) != labels(reference) {
        return Err(StatsError::ShapeMismatch(format!(
            "rows {:?} vs {:?}",
            labels(observed),
            labels(reference)
        )));
    }
    let index = |t: &FrequencyTable| -> BTreeMap<String, usize> {
        t.features.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect()
    };
    let (oi, ri) = (index(observed), index(reference));
    let mut deltas = Vec::new();
    let mut emptiness_mismatches = Vec::new();
    for orow in &observed.rows {
        let rrow = reference.row(&orow.label).expect("labels checked");
        match (&orow.cells, &rrow.cells) {
            (Some(oc), Some(rc)) => {
                for f in &observed.features {
                    let (o, r) = (oc[oi[f]], rc[ri[f]]);
                    deltas.push(CellDelta {
                        row: orow.label.clone(),
                        feature: f.clone(),
                        observed: o,
                        reference: r,
                        delta: (o - r).abs(),
                    });
                }
            }
            (None, None) => {}
            _ => emptiness_mismatches.push(orow.label.clone()),
        }
    }
    let worst = deltas
        .iter()
        .fold(None::<&CellDelta>, |acc, d| match acc {
            Some(a) if a.delta >= d.delta => Some(a),
            _ => Some(d),
        })
        .cloned();
    let pass = emptiness_mismatches.is_empty() && deltas.iter().all(|d| d.delta <= tolerance + 1e-9);
    Ok(CompareReport {
        pass,
        tolerance,
        deltas,
        worst,
        emptiness_mismatches,
    })
}
