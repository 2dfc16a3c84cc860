//! Dataset loading, 80/20 split, run-by-run training and confusion-matrix
//! evaluation.
//!
//! A *run* is one random batch drawn from the training rows, one
//! forward/backward pass, one Adam step, then a scoring pass over the whole
//! training and test sets with the updated parameters.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dnn::{
    adam_step, backward, classify_logits, element_agreement, forward, init_network, loss, AdamConfig,
    AdamState, DnnParams, Matrix, Prediction, DEFAULT_LEARN_RATE,
};
use crate::error::{Error, Result};
use crate::fuse_select::{apply_mask, FeatureMask, SpectrumRow, DEFAULT_THRESHOLD};
use crate::rng::{derive_seed, rng_from, tag};
use crate::synthgen::validate_label;
use crate::MAX_FREQ_HZ;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: Vec<SpectrumRow>,
    /// Distinct labels in order of first appearance.
    pub label_vocab: Vec<String>,
}

impl Dataset {
    pub fn new(rows: Vec<SpectrumRow>) -> Self {
        let mut label_vocab: Vec<String> = Vec::new();
        for r in &rows {
            if !label_vocab.contains(&r.label) {
                label_vocab.push(r.label.clone());
            }
        }
        Self { rows, label_vocab }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.label_vocab.iter().position(|l| l == label)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.label_vocab.len()];
        for r in &self.rows {
            counts[self.class_index(&r.label).expect("vocab covers rows")] += 1;
        }
        counts
    }
}

/// Serializes rows as 300 magnitudes followed by the label.
pub fn rows_to_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::with_capacity(rows.len() * MAX_FREQ_HZ * 12);
    for r in rows {
        for v in &r.bins {
            let _ = write!(out, "{v},");
        }
        out.push_str(&r.label);
        out.push('\n');
    }
    out
}

pub fn write_rows(path: &Path, rows: &[SpectrumRow]) -> Result<()> {
    std::fs::write(path, rows_to_csv(rows)).map_err(|e| Error::io(path, e))
}

/// Parses the 301-column format. Lines starting with `#` and blank lines are
/// skipped; `path` is only used in error messages.
pub fn parse_rows(text: &str, path: &Path) -> Result<Dataset> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != MAX_FREQ_HZ + 1 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {} fields, found {}", MAX_FREQ_HZ + 1, fields.len()),
            ));
        }
        let mut bins = Vec::with_capacity(MAX_FREQ_HZ);
        for (col, f) in fields[..MAX_FREQ_HZ].iter().enumerate() {
            let v: f64 = f.trim().parse().map_err(|_| {
                Error::parse(path, lineno, format!("column {}: {f:?} is not a number", col + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(path, lineno, format!("column {}: non-finite value", col + 1)));
            }
            bins.push(v);
        }
        let label = fields[MAX_FREQ_HZ].trim();
        validate_label(label).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        rows.push(SpectrumRow {
            bins,
            label: label.to_string(),
        });
    }
    if rows.is_empty() {
        return Err(Error::parse(path, 0, "no data rows"));
    }
    Ok(Dataset::new(rows))
}

pub fn load_rows(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rows(&text, path)
}

pub fn one_hot(label: &str, vocab: &[String]) -> Result<Vec<f64>> {
    let k = vocab
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::Validation(format!("label {label:?} not in vocabulary")))?;
    let mut v = vec![0.0; vocab.len()];
    v[k] = 1.0;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitScheme {
    Glorot,
    /// All-zero parameters; only useful as a sanity baseline.
    Zeros,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub train_fraction: f64,
    pub batch_size: usize,
    pub runs: usize,
    pub learn_rate: f64,
    pub threshold: f64,
    pub seed: u64,
    pub normalize_rows: bool,
    pub stratified: bool,
    pub init: InitScheme,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            batch_size: 150,
            runs: 200,
            learn_rate: DEFAULT_LEARN_RATE,
            threshold: DEFAULT_THRESHOLD,
            seed: 0,
            normalize_rows: true,
            stratified: false,
            init: InitScheme::Glorot,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction {} must lie strictly between 0 and 1",
                self.train_fraction
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if !(self.learn_rate.is_finite() && self.learn_rate >= 0.0) {
            return Err(Error::Config(format!("learn_rate {} is invalid", self.learn_rate)));
        }
        Ok(())
    }
}

/// Disjoint index sets into a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Labels with no training rows.
    pub missing_from_train: Vec<String>,
}

/// Random partition without replacement; `round(fraction · n)` rows go to
/// training (per class when `cfg.stratified`).
pub fn split(ds: &Dataset, cfg: &TrainConfig) -> Result<Split> {
    cfg.validate()?;
    let mut rng = rng_from(derive_seed(cfg.seed, &[tag("split")]));
    let (mut train, mut test) = (Vec::new(), Vec::new());
    if cfg.stratified {
        for label in &ds.label_vocab {
            let mut idx: Vec<usize> = (0..ds.len()).filter(|&i| &ds.rows[i].label == label).collect();
            idx.shuffle(&mut rng);
            let n_train = (cfg.train_fraction * idx.len() as f64).round() as usize;
            train.extend_from_slice(&idx[..n_train]);
            test.extend_from_slice(&idx[n_train..]);
        }
    } else {
        let mut idx: Vec<usize> = (0..ds.len()).collect();
        idx.shuffle(&mut rng);
        let n_train = (cfg.train_fraction * idx.len() as f64).round() as usize;
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    let missing_from_train: Vec<String> = ds
        .label_vocab
        .iter()
        .filter(|l| !train.iter().any(|&i| &ds.rows[i].label == *l))
        .cloned()
        .collect();
    for l in &missing_from_train {
        log::warn!("class {l:?} has no training rows; the network cannot learn it");
    }
    Ok(Split {
        train,
        test,
        missing_from_train,
    })
}

/// Masked feature vector, optionally divided by its own maximum.
pub fn feature_vector(row: &SpectrumRow, mask: &FeatureMask, normalize: bool) -> Vec<f64> {
    let mut x = apply_mask(row, mask);
    if normalize {
        let peak = x.iter().copied().fold(0.0, f64::max);
        if peak > 0.0 {
            x.iter_mut().for_each(|v| *v /= peak);
        }
    }
    x
}

fn feature_matrix<'a>(
    rows: impl Iterator<Item = &'a SpectrumRow>,
    mask: &FeatureMask,
    normalize: bool,
) -> Result<Matrix> {
    let xs: Vec<Vec<f64>> = rows.map(|r| feature_vector(r, mask, normalize)).collect();
    if xs.is_empty() {
        return Ok(Matrix::zeros(0, mask.len()));
    }
    Matrix::from_rows(&xs)
}

fn target_matrix<'a>(rows: impl Iterator<Item = &'a SpectrumRow>, vocab: &[String]) -> Result<Matrix> {
    let ys = rows.map(|r| one_hot(&r.label, vocab)).collect::<Result<Vec<_>>>()?;
    if ys.is_empty() {
        return Ok(Matrix::zeros(0, vocab.len()));
    }
    Matrix::from_rows(&ys)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
    pub test_loss: f64,
    pub train_elem_acc: f64,
    pub test_elem_acc: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub records: Vec<RunRecord>,
}

impl RunLog {
    pub fn last(&self) -> Option<&RunRecord> {
        self.records.last()
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("run,train_loss,train_acc,test_acc,test_loss,train_elem_acc,test_elem_acc\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.run, r.train_loss, r.train_acc, r.test_acc, r.test_loss, r.train_elem_acc, r.test_elem_acc
            );
        }
        out
    }
}

/// Rows are actual classes; columns are predicted classes then `Unclassified`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self {
            labels,
            counts: vec![vec![0; n + 1]; n],
        }
    }

    pub fn record(&mut self, actual: usize, predicted: Prediction) {
        let col = match predicted {
            Prediction::Class(k) => k,
            Prediction::Unclassified => self.labels.len(),
        };
        self.counts[actual][col] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, actual: usize) -> usize {
        self.counts[actual].iter().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn unclassified(&self) -> usize {
        self.counts.iter().map(|r| r[self.labels.len()]).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("actual");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push_str(",Unclassified\n");
        for (label, row) in self.labels.iter().zip(&self.counts) {
            out.push_str(label);
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

impl std::fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let width = self
            .labels
            .iter()
            .map(String::len)
            .chain(["Unclassified".len()])
            .max()
            .unwrap_or(0);
        write!(f, "{:width$}", "")?;
        for l in self.labels.iter().map(String::as_str).chain(["Unclassified"]) {
            write!(f, " {l:>width$}")?;
        }
        writeln!(f)?;
        for (label, row) in self.labels.iter().zip(&self.counts) {
            write!(f, "{label:width$}")?;
            for c in row {
                write!(f, " {c:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Rows whose prediction equals the true class, over all rows.
    pub accuracy: f64,
    /// Output bits whose rounded sigmoid matches the one-hot target.
    pub element_accuracy: f64,
    pub loss: f64,
    pub confusion: ConfusionMatrix,
}

/// Scores `p` on `rows`, tallying each row exactly once.
pub fn evaluate(
    p: &DnnParams,
    rows: &[SpectrumRow],
    mask: &FeatureMask,
    vocab: &[String],
    normalize: bool,
) -> Result<Evaluation> {
    evaluate_refs(p, rows.iter(), mask, vocab, normalize)
}

fn evaluate_refs<'a>(
    p: &DnnParams,
    rows: impl Iterator<Item = &'a SpectrumRow> + Clone,
    mask: &FeatureMask,
    vocab: &[String],
    normalize: bool,
) -> Result<Evaluation> {
    if p.classes() != vocab.len() {
        return Err(Error::Validation(format!(
            "network has {} outputs for {} labels",
            p.classes(),
            vocab.len()
        )));
    }
    let x = feature_matrix(rows.clone(), mask, normalize)?;
    if x.rows() == 0 {
        return Err(Error::Validation("evaluation needs at least one row".into()));
    }
    let y = target_matrix(rows.clone(), vocab)?;
    let trace = forward(p, &x)?;
    let mut confusion = ConfusionMatrix::new(vocab.to_vec());
    for (r, row) in rows.enumerate() {
        let actual = vocab.iter().position(|l| *l == row.label).expect("checked by one_hot");
        confusion.record(actual, classify_logits(trace.logits.row(r)));
    }
    Ok(Evaluation {
        accuracy: confusion.correct() as f64 / x.rows() as f64,
        element_accuracy: element_agreement(&trace.logits, &y),
        loss: loss(&trace.logits, &y)?,
        confusion,
    })
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub params: DnnParams,
    pub log: RunLog,
    pub split: Split,
    pub optimizer: AdamState,
}

/// Trains a fresh network for `cfg.runs` runs on the training part of the
/// split and logs train/test metrics after every step.
pub fn train(ds: &Dataset, mask: &FeatureMask, cfg: &TrainConfig) -> Result<TrainResult> {
    cfg.validate()?;
    if mask.is_empty() {
        return Err(Error::Config("feature mask is empty".into()));
    }
    if ds.label_vocab.len() < 2 {
        return Err(Error::Validation("training needs at least two classes".into()));
    }
    let split = split(ds, cfg)?;
    if cfg.batch_size > split.train.len() {
        return Err(Error::Config(format!(
            "batch_size {} exceeds {} training rows",
            cfg.batch_size,
            split.train.len()
        )));
    }
    if split.test.is_empty() {
        return Err(Error::Config("split leaves no test rows".into()));
    }
    let vocab = &ds.label_vocab;
    let train_rows = || split.train.iter().map(|&i| &ds.rows[i]);
    let test_rows = || split.test.iter().map(|&i| &ds.rows[i]);
    let train_x = feature_matrix(train_rows(), mask, cfg.normalize_rows)?;
    let train_y = target_matrix(train_rows(), vocab)?;

    let d = mask.len();
    let c = vocab.len();
    let mut params = match cfg.init {
        InitScheme::Glorot => init_network(d, c, derive_seed(cfg.seed, &[tag("init")]))?,
        InitScheme::Zeros => DnnParams::zeros(d, c),
    };
    let mut optimizer = AdamState::for_params(AdamConfig::with_alpha(cfg.learn_rate), &params);
    let mut batch_rng = rng_from(derive_seed(cfg.seed, &[tag("batches")]));
    let mut log = RunLog::default();

    for run in 1..=cfg.runs {
        let picks = sample(&mut batch_rng, train_x.rows(), cfg.batch_size);
        let mut bx = Matrix::zeros(cfg.batch_size, d);
        let mut by = Matrix::zeros(cfg.batch_size, c);
        for (b, i) in picks.iter().enumerate() {
            bx.row_mut(b).copy_from_slice(train_x.row(i));
            by.row_mut(b).copy_from_slice(train_y.row(i));
        }
        let trace = forward(&params, &bx)?;
        let grads = backward(&params, &trace, &by)?;
        adam_step(&mut params, &grads, &mut optimizer)?;

        let tr = evaluate_refs(&params, train_rows(), mask, vocab, cfg.normalize_rows)?;
        let te = evaluate_refs(&params, test_rows(), mask, vocab, cfg.normalize_rows)?;
        if !tr.loss.is_finite() {
            return Err(Error::Numerical(format!("training loss diverged at run {run}")));
        }
        log.records.push(RunRecord {
            run,
            train_loss: tr.loss,
            train_acc: tr.accuracy,
            test_acc: te.accuracy,
            test_loss: te.loss,
            train_elem_acc: tr.element_accuracy,
            test_elem_acc: te.element_accuracy,
        });
        if run % 100 == 0 || run == cfg.runs {
            log::info!(
                "run {run}: train loss {:.5}, train acc {:.4}, test acc {:.4}",
                tr.loss,
                tr.accuracy,
                te.accuracy
            );
        }
    }
    Ok(TrainResult {
        params,
        log,
        split,
        optimizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dnn::LayerParams;

    fn row(label: &str, hot: usize) -> SpectrumRow {
        let mut bins = vec![0.1; MAX_FREQ_HZ];
        bins[hot] = 1.0;
        SpectrumRow {
            bins,
            label: label.into(),
        }
    }

    fn toy(n_per: usize) -> Dataset {
        let mut rows = Vec::new();
        for i in 0..n_per {
            rows.push(row("A", 10 + i % 2));
            rows.push(row("B", 50 + i % 2));
            rows.push(row("C", 90 + i % 2));
        }
        Dataset::new(rows)
    }

    #[test]
    fn csv_round_trip_and_vocab_order() {
        let rows = vec![row("A", 1), row("B", 2), row("A", 3)];
        let text = format!("# header\n{}", rows_to_csv(&rows));
        let ds = parse_rows(&text, Path::new("x.csv")).unwrap();
        assert_eq!(ds.rows, rows);
        assert_eq!(ds.label_vocab, ["A", "B"]);
    }

    #[test]
    fn wrong_arity_names_line() {
        let mut text = rows_to_csv(&[row("A", 1)]);
        let short: Vec<String> = (0..299).map(|_| "1.0".to_string()).chain(["A".into()]).collect();
        text.push_str(&short.join(","));
        text.push('\n');
        match parse_rows(&text, Path::new("r.csv")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_and_empty_rejected() {
        let mut fields: Vec<String> = (0..300).map(|_| "1".to_string()).collect();
        fields[7] = "abc".into();
        fields.push("A".into());
        assert!(matches!(
            parse_rows(&fields.join(","), Path::new("r.csv")),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_rows("# only a header\n", Path::new("r.csv")).is_err());
    }

    #[test]
    fn one_hot_encoding() {
        let vocab: Vec<String> = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
        assert_eq!(one_hot("C", &vocab).unwrap(), [0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(one_hot("Z", &vocab), Err(Error::Validation(_))));
        let seven: Vec<String> = (0..7).map(|i| format!("T{i}")).collect();
        for l in &seven {
            assert_eq!(one_hot(l, &seven).unwrap().iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let ds = Dataset::new((0..10).map(|i| row(if i % 2 == 0 { "A" } else { "B" }, 3)).collect());
        let s = split(&ds, &TrainConfig::default()).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (8, 2));
        assert!(s.train.iter().all(|i| !s.test.contains(i)));
        assert_eq!(s, split(&ds, &TrainConfig::default()).unwrap());
    }

    #[test]
    fn split_thousand_rows() {
        let ds = Dataset::new((0..1000).map(|i| row(["A", "B", "C"][i % 3], 3)).collect());
        let s = split(&ds, &TrainConfig::default()).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (800, 200));
    }

    #[test]
    fn stratified_split_keeps_each_class() {
        let ds = toy(10);
        let cfg = TrainConfig {
            stratified: true,
            ..TrainConfig::default()
        };
        let s = split(&ds, &cfg).unwrap();
        assert_eq!(s.train.len(), 24);
        assert!(s.missing_from_train.is_empty());
    }

    #[test]
    fn split_warns_on_missing_class() {
        let mut rows = vec![row("A", 1); 20];
        rows.push(row("Rare", 2));
        let ds = Dataset::new(rows);
        let warned = (0..20)
            .map(|seed| split(&ds, &TrainConfig { seed, ..TrainConfig::default() }).unwrap())
            .any(|s| s.missing_from_train == ["Rare"]);
        assert!(warned);
    }

    #[test]
    fn confusion_csv_layout() {
        let mut cm = ConfusionMatrix::new(vec!["A".into(), "B".into()]);
        cm.record(0, Prediction::Class(0));
        cm.record(1, Prediction::Unclassified);
        cm.record(1, Prediction::Class(0));
        assert_eq!(cm.to_csv(), "actual,A,B,Unclassified\nA,1,0,0\nB,1,0,1\n");
        assert_eq!(cm.total(), 3);
        assert_eq!(cm.unclassified(), 1);
    }

    /// Hand-built network that maps a hot bin at 11/51/91 Hz to its class.
    fn oracle_model() -> (DnnParams, FeatureMask) {
        let mask = FeatureMask::new(vec![11, 51, 91]).unwrap();
        let mut l1 = LayerParams::zeros(3, 3);
        let mut l2 = LayerParams::zeros(3, 3);
        let mut l3 = LayerParams::zeros(3, 3);
        for i in 0..3 {
            l1.weight[(i, i)] = 20.0;
            l1.bias[i] = -10.0;
            l2.weight[(i, i)] = 20.0;
            l2.bias[i] = -10.0;
            l3.weight[(i, i)] = 20.0;
            l3.bias[i] = -10.0;
        }
        (DnnParams::from_layers([l1, l2, l3]).unwrap(), mask)
    }

    #[test]
    fn perfect_model_gives_diagonal_matrix() {
        let (p, mask) = oracle_model();
        let rows: Vec<_> = ["A", "B", "C"]
            .iter()
            .zip([10, 50, 90])
            .flat_map(|(l, h)| vec![row(l, h); 4])
            .collect();
        let vocab: Vec<String> = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let ev = evaluate(&p, &rows, &mask, &vocab, true).unwrap();
        assert_eq!(ev.accuracy, 1.0);
        for i in 0..3 {
            assert_eq!(ev.confusion.counts[i][i], 4);
            assert_eq!(ev.confusion.row_sum(i), 4);
        }
        assert_eq!(ev.confusion.unclassified(), 0);
    }

    #[test]
    fn training_learns_toy_problem() {
        let ds = toy(60);
        let mask = FeatureMask::new(vec![11, 12, 51, 52, 91, 92]).unwrap();
        let cfg = TrainConfig {
            runs: 300,
            batch_size: 50,
            seed: 3,
            ..TrainConfig::default()
        };
        let out = train(&ds, &mask, &cfg).unwrap();
        assert_eq!(out.log.records.len(), 300);
        assert_eq!(out.optimizer.t, 300);
        let last = out.log.last().unwrap();
        assert!(last.test_acc > 0.95, "{last:?}");
        assert!(last.train_loss < out.log.records[0].train_loss);
    }

    #[test]
    fn zero_init_starts_at_ln2() {
        let ds = toy(20);
        let mask = FeatureMask::new(vec![11, 51, 91]).unwrap();
        let cfg = TrainConfig {
            runs: 1,
            batch_size: 20,
            init: InitScheme::Zeros,
            ..TrainConfig::default()
        };
        let out = train(&ds, &mask, &cfg).unwrap();
        let l = out.log.records[0].train_loss;
        assert!((l - std::f64::consts::LN_2).abs() < 0.02, "{l}");
    }

    #[test]
    fn zero_learn_rate_keeps_loss_constant() {
        let ds = toy(20);
        let mask = FeatureMask::new(vec![11, 51, 91]).unwrap();
        let cfg = TrainConfig {
            runs: 10,
            batch_size: 20,
            learn_rate: 0.0,
            ..TrainConfig::default()
        };
        let out = train(&ds, &mask, &cfg).unwrap();
        let first = out.log.records[0].train_loss;
        assert!(out.log.records.iter().all(|r| r.train_loss == first));
    }

    #[test]
    fn oversized_batch_rejected() {
        let ds = toy(5);
        let mask = FeatureMask::new(vec![11]).unwrap();
        assert!(matches!(train(&ds, &mask, &TrainConfig::default()), Err(Error::Config(_))));
    }
}
