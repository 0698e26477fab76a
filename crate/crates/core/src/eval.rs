//! Accuracy of intent mapping against labelled tickets, and model comparison tables.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::TicketCollection;
use crate::embeddings::EmbeddingModel;
use crate::error::{Error, Result};
use crate::intent::{EmbeddedTaxonomy, Mapper, MappingConfig};
use crate::preprocess::PatternLibrary;

/// Label of the micro-average row in report files.
pub const TOTAL_ROW: &str = "(all)";
/// Label of the count row in comparison tables.
pub const COUNT_ROW: &str = "Total Number of Ticket";
const REPORT_COLUMNS: [&str; 10] = [
    "model",
    "labels_fingerprint",
    "config",
    "use_case",
    "count",
    "correct",
    "accuracy",
    "top_k",
    "top_k_hits",
    "top_k_accuracy",
];

/// Gold use case per ticket id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledSet {
    labels: Vec<(String, String)>,
}

impl LabelledSet {
    pub fn new(labels: Vec<(String, String)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (id, _) in &labels {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(LabelledSet { labels })
    }

    pub fn labels(&self) -> &[(String, String)] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Order-independent digest of the (id, label) pairs.
    pub fn fingerprint(&self) -> String {
        let mut pairs: Vec<&(String, String)> = self.labels.iter().collect();
        pairs.sort();
        let mut h = Sha256::new();
        for (id, uc) in pairs {
            h.update(id.as_bytes());
            h.update([0]);
            h.update(uc.as_bytes());
            h.update([0]);
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn read_labels<R: Read>(reader: R) -> Result<LabelledSet> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let id_col = column("id").ok_or_else(|| Error::MissingColumn("id".into()))?;
    let uc_col = column("use_case").ok_or_else(|| Error::MissingColumn("use_case".into()))?;
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let id = record.get(id_col).unwrap_or("").trim();
        let uc = record.get(uc_col).unwrap_or("").trim();
        if id.is_empty() || uc.is_empty() {
            return Err(Error::Row {
                line,
                message: "empty id or use_case".into(),
            });
        }
        labels.push((id.to_string(), uc.to_string()));
    }
    LabelledSet::new(labels)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<LabelledSet> {
    let path = path.as_ref();
    read_labels(File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_labels<W: Write>(writer: W, labels: &LabelledSet) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "use_case"])?;
    for (id, uc) in &labels.labels {
        wtr.write_record([id, uc])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_labels(path: impl AsRef<Path>, labels: &LabelledSet) -> Result<()> {
    let path = path.as_ref();
    write_labels(File::create(path).map_err(|e| Error::io(path, e))?, labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UseCaseScore {
    pub use_case: String,
    pub count: usize,
    pub correct: usize,
    pub top_k_hits: usize,
}

impl UseCaseScore {
    pub fn accuracy(&self) -> f64 {
        ratio(self.correct, self.count)
    }

    pub fn top_k_accuracy(&self) -> f64 {
        ratio(self.top_k_hits, self.count)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Top-1 accuracy per labelled use case, plus top-k hit rates.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Short model label such as `skipgram-100`.
    pub model: String,
    pub labels_fingerprint: String,
    /// Settings the numbers depend on, as `key=value` pairs joined by `;`.
    pub config: String,
    pub top_k: usize,
    /// Use cases with at least one labelled ticket, in taxonomy order.
    pub rows: Vec<UseCaseScore>,
}

impl EvalReport {
    pub fn total(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn micro_accuracy(&self) -> f64 {
        ratio(self.rows.iter().map(|r| r.correct).sum(), self.total())
    }

    pub fn micro_top_k_accuracy(&self) -> f64 {
        ratio(self.rows.iter().map(|r| r.top_k_hits).sum(), self.total())
    }

    pub fn row(&self, use_case: &str) -> Option<&UseCaseScore> {
        self.rows.iter().find(|r| r.use_case == use_case)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(REPORT_COLUMNS)?;
        let mut emit = |name: &str, count: usize, correct: usize, hits: usize| {
            wtr.write_record([
                self.model.clone(),
                self.labels_fingerprint.clone(),
                self.config.clone(),
                name.to_string(),
                count.to_string(),
                correct.to_string(),
                format!("{:.6}", ratio(correct, count)),
                self.top_k.to_string(),
                hits.to_string(),
                format!("{:.6}", ratio(hits, count)),
            ])
        };
        for r in &self.rows {
            emit(&r.use_case, r.count, r.correct, r.top_k_hits)?;
        }
        let correct = self.rows.iter().map(|r| r.correct).sum();
        let hits = self.rows.iter().map(|r| r.top_k_hits).sum();
        emit(TOTAL_ROW, self.total(), correct, hits)?;
        wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        for (i, name) in REPORT_COLUMNS.iter().enumerate() {
            if headers.get(i).map(str::trim) != Some(*name) {
                return Err(Error::MissingColumn((*name).into()));
            }
        }
        let mut report: Option<EvalReport> = None;
        for record in rdr.records() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let bad = |message: &str| Error::Row {
                line,
                message: message.into(),
            };
            let num = |i: usize| -> Result<usize> { record[i].trim().parse().map_err(|_| bad("bad count")) };
            let top_k = num(7)?;
            let r = report.get_or_insert_with(|| EvalReport {
                model: record[0].to_string(),
                labels_fingerprint: record[1].to_string(),
                config: record[2].to_string(),
                top_k,
                rows: Vec::new(),
            });
            if r.model != record[0] || r.labels_fingerprint != record[1] || r.top_k != top_k {
                return Err(bad("rows of one report must share model, fingerprint and top_k"));
            }
            if &record[3] == TOTAL_ROW {
                continue;
            }
            r.rows.push(UseCaseScore {
                use_case: record[3].to_string(),
                count: num(4)?,
                correct: num(5)?,
                top_k_hits: num(8)?,
            });
        }
        report.ok_or_else(|| Error::invalid("empty report"))
    }
}

pub fn save_report(path: impl AsRef<Path>, report: &EvalReport) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    report.write_csv(std::io::BufWriter::new(file))
}

pub fn load_report(path: impl AsRef<Path>) -> Result<EvalReport> {
    let path = path.as_ref();
    EvalReport::read_csv(File::open(path).map_err(|e| Error::io(path, e))?)
}

/// `arch-dim`, the row label used in comparison tables.
pub fn model_label(model: &EmbeddingModel) -> String {
    format!("{}-{}", model.architecture(), model.dim())
}

/// Scores every labelled ticket; a ticket is correct when its top-ranked use
/// case equals the label. Empty rankings and per-ticket failures count as wrong.
pub fn evaluate(
    labelled: &LabelledSet,
    collection: &TicketCollection,
    etx: &EmbeddedTaxonomy,
    model: &EmbeddingModel,
    config: &MappingConfig,
    top_k: usize,
) -> Result<EvalReport> {
    evaluate_with(labelled, collection, etx, model, config, top_k, PatternLibrary::default())
}

pub fn evaluate_with(
    labelled: &LabelledSet,
    collection: &TicketCollection,
    etx: &EmbeddedTaxonomy,
    model: &EmbeddingModel,
    config: &MappingConfig,
    top_k: usize,
    patterns: PatternLibrary,
) -> Result<EvalReport> {
    if top_k == 0 {
        return Err(Error::invalid("top_k must be >= 1"));
    }
    let mut tickets = Vec::with_capacity(labelled.len());
    for (id, uc) in labelled.labels() {
        if !etx.taxonomy().contains_use_case(uc) {
            return Err(Error::invalid(format!("label `{uc}` of ticket `{id}` is not in the taxonomy")));
        }
        let t = collection
            .get(id)
            .ok_or_else(|| Error::invalid(format!("labelled ticket `{id}` is not in the input")))?;
        tickets.push(t.clone());
    }
    // the ranking must reach at least top_k entries for the secondary metric
    let ranking_config = MappingConfig {
        top_n: config.top_n.max(top_k),
        ..config.clone()
    };
    let mapper = Mapper::new(model, etx, ranking_config)?.with_patterns(patterns);
    let subset = TicketCollection::new(tickets, collection.source())?;
    let results = mapper.rank_batch(&subset);

    let mut index: HashMap<&str, UseCaseScore> = HashMap::new();
    for ((_, uc), result) in labelled.labels().iter().zip(&results) {
        let entries = result.as_ref().map(|r| r.entries.as_slice()).unwrap_or(&[]);
        let s = index.entry(uc.as_str()).or_insert_with(|| UseCaseScore {
            use_case: uc.clone(),
            count: 0,
            correct: 0,
            top_k_hits: 0,
        });
        s.count += 1;
        if entries.first().is_some_and(|e| &e.use_case == uc) {
            s.correct += 1;
        }
        if entries.iter().take(top_k).any(|e| &e.use_case == uc) {
            s.top_k_hits += 1;
        }
    }
    let rows = etx
        .taxonomy()
        .use_cases()
        .filter_map(|(_, u)| index.remove(u.name.as_str()))
        .collect();
    Ok(EvalReport {
        model: model_label(model),
        labels_fingerprint: labelled.fingerprint(),
        config: format!(
            "metric=top1;arch={};dim={};model={};subject_threshold={};subject_narrowing={};min_score={}",
            model.architecture(),
            model.dim(),
            model.fingerprint(),
            config.subject_threshold,
            config.subject_narrowing,
            config.min_score
        ),
        top_k,
        rows,
    })
}

/// Model rows by use-case accuracy columns, plus a ticket-count row.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub use_cases: Vec<String>,
    /// `(model label, per-use-case accuracy, overall accuracy)`.
    pub rows: Vec<(String, Vec<f64>, f64)>,
    pub counts: Vec<usize>,
}

pub fn compare_models(reports: &[EvalReport]) -> Result<ComparisonTable> {
    let first = reports.first().ok_or_else(|| Error::invalid("no report to compare"))?;
    let use_cases: Vec<String> = first.rows.iter().map(|r| r.use_case.clone()).collect();
    let counts = first.rows.iter().map(|r| r.count).collect();
    let mut rows = Vec::with_capacity(reports.len());
    for r in reports {
        if r.labels_fingerprint != first.labels_fingerprint {
            return Err(Error::invalid(format!(
                "report `{}` was computed on a different labelled set ({} vs {})",
                r.model, r.labels_fingerprint, first.labels_fingerprint
            )));
        }
        let acc = use_cases
            .iter()
            .map(|u| r.row(u).map(UseCaseScore::accuracy))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::invalid(format!("report `{}` lacks a use case", r.model)))?;
        rows.push((r.model.clone(), acc, r.micro_accuracy()));
    }
    Ok(ComparisonTable {
        use_cases,
        rows,
        counts,
    })
}

impl ComparisonTable {
    fn cells(&self) -> Vec<Vec<String>> {
        let mut out = Vec::with_capacity(self.rows.len() + 2);
        let mut header = vec!["Model".to_string()];
        header.extend(self.use_cases.iter().cloned());
        header.push("Overall".into());
        out.push(header);
        for (m, acc, overall) in &self.rows {
            let mut line = vec![m.clone()];
            line.extend(acc.iter().map(|a| format!("{a:.3}")));
            line.push(format!("{overall:.3}"));
            out.push(line);
        }
        let mut line = vec![COUNT_ROW.to_string()];
        line.extend(self.counts.iter().map(usize::to_string));
        line.push(self.counts.iter().sum::<usize>().to_string());
        out.push(line);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for row in self.cells() {
            wtr.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Space-aligned columns for terminals.
    pub fn to_text(&self) -> String {
        let cells = self.cells();
        let width: Vec<usize> = (0..cells[0].len())
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for row in &cells {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                if c == 0 {
                    let _ = write!(line, "{cell:<w$}", w = width[c]);
                } else {
                    let _ = write!(line, "  {cell:>w$}", w = width[c]);
                }
            }
            s.push_str(line.trim_end());
            s.push('\n');
        }
        s
    }
}
