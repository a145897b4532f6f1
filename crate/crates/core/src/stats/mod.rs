//! Coded corpora and the statistics computed over them.

pub mod corpus;
pub mod kwic;
pub mod table;
pub mod ttest;

pub use corpus::{CodedCorpus, CodedUnit, CorpusError, CorpusMeta};
pub use kwic::{kwic, render_kwic, tokenize, KwicLine};
pub use table::{
    compare_tables, cross_tab, indicator_sample, local_mean_table, parse_tsv, render_pretty, to_tsv, CellDelta,
    CompareReport, FrequencyTable, Partition, Row, StatsError, EMPTY_CELL, TASK_ELEMENT,
};
pub use ttest::{critical_value, t_test, TTest, TTestError};
