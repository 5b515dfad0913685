//! Scoring and aggregation: accuracy, output span, forecast-error metrics,
//! global normalized error, cross-metric correlation and report assembly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tasks::{Difficulty, Verdict};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("empty series")]
    EmptySeries,
    #[error("series needs at least {needed} parsed items, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("truths and predictions differ in length ({truths} vs {predictions})")]
    LengthMismatch { truths: usize, predictions: usize },
    #[error("task answer range is zero")]
    ZeroRange,
    #[error("normalizer is zero")]
    DegenerateNorm,
    #[error("mean predictor has zero error; truths are constant")]
    DegenerateBaseline,
    #[error("need at least {needed} {what}, got {got}")]
    NotEnough { what: &'static str, needed: usize, got: usize },
}

pub const SMAPE_EPS: f64 = 1e-12;

/// Ground truths with predictions; `None` marks an unparsed prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries {
    truths: Vec<f64>,
    predictions: Vec<Option<f64>>,
}

impl PairedSeries {
    pub fn new(truths: Vec<f64>, predictions: Vec<Option<f64>>) -> Result<Self, MetricsError> {
        if truths.len() != predictions.len() {
            return Err(MetricsError::LengthMismatch { truths: truths.len(), predictions: predictions.len() });
        }
        Ok(PairedSeries { truths, predictions })
    }

    pub fn complete(truths: Vec<f64>, predictions: Vec<f64>) -> Result<Self, MetricsError> {
        Self::new(truths, predictions.into_iter().map(Some).collect())
    }

    pub fn len(&self) -> usize {
        self.truths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truths.is_empty()
    }

    /// Parsed `(y, ŷ)` pairs.
    pub fn parsed(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.truths.iter().zip(&self.predictions).filter_map(|(&y, p)| p.map(|p| (y, p)))
    }

    pub fn parse_failure_rate(&self) -> Result<f64, MetricsError> {
        if self.is_empty() {
            return Err(MetricsError::EmptySeries);
        }
        Ok(self.predictions.iter().filter(|p| p.is_none()).count() as f64 / self.len() as f64)
    }

    fn parsed_at_least(&self, needed: usize) -> Result<(Vec<f64>, Vec<f64>), MetricsError> {
        let (y, p): (Vec<f64>, Vec<f64>) = self.parsed().unzip();
        if y.is_empty() && needed > 0 {
            return Err(MetricsError::EmptySeries);
        }
        if y.len() < needed {
            return Err(MetricsError::TooShort { needed, got: y.len() });
        }
        Ok((y, p))
    }
}

pub fn accuracy(verdicts: &[Verdict]) -> Result<f64, MetricsError> {
    if verdicts.is_empty() {
        return Err(MetricsError::EmptySeries);
    }
    Ok(verdicts.iter().filter(|v| **v == Verdict::Correct).count() as f64 / verdicts.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpanResult {
    Defined {
        span: f64,
        excluded: usize,
    },
    /// No example had two parsed outputs.
    SpanUndefined {
        excluded: usize,
    },
}

impl SpanResult {
    pub fn value(&self) -> Option<f64> {
        match *self {
            SpanResult::Defined { span, .. } => Some(span),
            SpanResult::SpanUndefined { .. } => None,
        }
    }
}

/// Max minus min ground truth; the normalizer for [`output_span`].
pub fn task_range(truths: &[f64]) -> Result<f64, MetricsError> {
    let (lo, hi) = min_max(truths).ok_or(MetricsError::EmptySeries)?;
    Ok(hi - lo)
}

/// Mean over examples of the spread of their parsed outputs across
/// relabelings, divided by `task_range`.
pub fn output_span(per_example: &[Vec<Option<f64>>], task_range: f64) -> Result<SpanResult, MetricsError> {
    if task_range.is_nan() || task_range <= 0.0 {
        return Err(MetricsError::ZeroRange);
    }
    let mut spans = Vec::new();
    let mut excluded = 0;
    for outputs in per_example {
        let parsed: Vec<f64> = outputs.iter().flatten().copied().collect();
        if parsed.len() < 2 {
            excluded += 1;
            continue;
        }
        let (lo, hi) = min_max(&parsed).expect("nonempty");
        spans.push((hi - lo) / task_range);
    }
    Ok(match mean(&spans) {
        Some(span) => SpanResult::Defined { span, excluded },
        None => SpanResult::SpanUndefined { excluded },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    Range,
    Std,
}

pub fn rmse(series: &PairedSeries) -> Result<f64, MetricsError> {
    let (y, p) = series.parsed_at_least(1)?;
    let sq: Vec<f64> = y.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).collect();
    Ok(mean(&sq).expect("nonempty").sqrt())
}

pub fn nrmse(series: &PairedSeries, norm: Norm) -> Result<f64, MetricsError> {
    let (y, _) = series.parsed_at_least(2)?;
    let denom = match norm {
        Norm::Range => task_range(&y)?,
        Norm::Std => sample_std(&y).expect("n >= 2"),
    };
    if denom == 0.0 {
        return Err(MetricsError::DegenerateNorm);
    }
    Ok(rmse(series)? / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmapeScale {
    #[serde(rename = "0_200")]
    Zero200,
    #[serde(rename = "0_100")]
    Zero100,
}

pub fn smape(series: &PairedSeries, scale: SmapeScale) -> Result<f64, MetricsError> {
    let (y, p) = series.parsed_at_least(1)?;
    let terms: Vec<f64> =
        y.iter().zip(&p).map(|(a, b)| 2.0 * (a - b).abs() / (a.abs() + b.abs() + SMAPE_EPS)).collect();
    let full = 100.0 * mean(&terms).expect("nonempty");
    Ok(match scale {
        SmapeScale::Zero200 => full,
        SmapeScale::Zero100 => full / 2.0,
    })
}

pub fn mae(series: &PairedSeries) -> Result<f64, MetricsError> {
    let (y, p) = series.parsed_at_least(1)?;
    let abs: Vec<f64> = y.iter().zip(&p).map(|(a, b)| (a - b).abs()).collect();
    Ok(mean(&abs).expect("nonempty"))
}

/// MAE relative to the MAE of always predicting the mean truth.
pub fn relmae(series: &PairedSeries) -> Result<f64, MetricsError> {
    let (y, _) = series.parsed_at_least(2)?;
    let ybar = mean(&y).expect("nonempty");
    let dev: Vec<f64> = y.iter().map(|v| (v - ybar).abs()).collect();
    let baseline = mean(&dev).expect("nonempty");
    if baseline == 0.0 {
        return Err(MetricsError::DegenerateBaseline);
    }
    Ok(mae(series)? / baseline)
}

/// One value of one metric for one (task, model) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCell {
    pub task: String,
    pub model: String,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalError {
    pub scores: BTreeMap<String, f64>,
    /// `(task, metric)` columns with zero spread across models.
    pub dropped: Vec<(String, String)>,
}

impl GlobalError {
    /// Models from lowest to highest score.
    pub fn ranking(&self) -> Vec<&str> {
        let mut v: Vec<_> = self.scores.iter().collect();
        v.sort_by(|a, b| a.1.total_cmp(b.1).then_with(|| a.0.cmp(b.0)));
        v.into_iter().map(|(m, _)| m.as_str()).collect()
    }
}

/// Min-max normalizes each `(task, metric)` column across models and
/// averages every model's normalized values over all columns.
pub fn global_normalized_error(cells: &[MetricCell], metrics: &[&str]) -> Result<GlobalError, MetricsError> {
    let models: BTreeSet<&str> = cells.iter().map(|c| c.model.as_str()).collect();
    if models.len() < 2 {
        return Err(MetricsError::NotEnough { what: "models", needed: 2, got: models.len() });
    }
    let mut columns: BTreeMap<(&str, &str), BTreeMap<&str, f64>> = BTreeMap::new();
    for c in cells.iter().filter(|c| metrics.contains(&c.metric.as_str())) {
        columns.entry((&c.task, &c.metric)).or_default().insert(&c.model, c.value);
    }
    if columns.is_empty() {
        return Err(MetricsError::NotEnough { what: "tasks", needed: 1, got: 0 });
    }
    let mut sums: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    let mut dropped = Vec::new();
    for ((task, metric), col) in &columns {
        let values: Vec<f64> = col.values().copied().collect();
        let (lo, hi) = min_max(&values).expect("nonempty column");
        if hi - lo == 0.0 || !(hi - lo).is_finite() {
            log::warn!("dropping ({task}, {metric}): no spread across models");
            dropped.push((task.to_string(), metric.to_string()));
            continue;
        }
        for (model, v) in col {
            let e = sums.entry(model).or_default();
            e.0 += (v - lo) / (hi - lo);
            e.1 += 1;
        }
    }
    let scores = sums.into_iter().map(|(m, (s, k))| (m.to_string(), s / k as f64)).collect();
    Ok(GlobalError { scores, dropped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    /// One observation per (task, model); a single Pearson coefficient.
    #[default]
    Pooled,
    /// Correlate across models within each task, then average over tasks.
    PerTaskMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub metrics: Vec<String>,
    /// `None` where a column has zero variance.
    pub values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.metrics.iter().position(|m| m == a)?;
        let j = self.metrics.iter().position(|m| m == b)?;
        self.values[i][j]
    }
}

pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ma, mb) = (mean(a)?, mean(b)?);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation between metric columns. Only (task, model) pairs
/// that carry every metric take part.
pub fn metric_correlation(
    cells: &[MetricCell],
    metrics: &[&str],
    mode: CorrelationMode,
) -> Result<CorrelationMatrix, MetricsError> {
    let mut rows: BTreeMap<(&str, &str), BTreeMap<&str, f64>> = BTreeMap::new();
    for c in cells.iter().filter(|c| metrics.contains(&c.metric.as_str())) {
        rows.entry((&c.task, &c.model)).or_default().insert(&c.metric, c.value);
    }
    rows.retain(|_, r| r.len() == metrics.len());
    let tasks: BTreeSet<&str> = rows.keys().map(|k| k.0).collect();
    if tasks.len() < 3 {
        return Err(MetricsError::NotEnough { what: "tasks", needed: 3, got: tasks.len() });
    }
    let column = |metric: &str, task: Option<&str>| -> Vec<f64> {
        rows.iter().filter(|(k, _)| task.is_none_or(|t| k.0 == t)).map(|(_, r)| r[metric]).collect()
    };
    let k = metrics.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            values[i][j] = match mode {
                CorrelationMode::Pooled => pearson(&column(metrics[i], None), &column(metrics[j], None)),
                CorrelationMode::PerTaskMean => {
                    let per: Vec<f64> = tasks
                        .iter()
                        .filter_map(|t| pearson(&column(metrics[i], Some(t)), &column(metrics[j], Some(t))))
                        .collect();
                    mean(&per)
                }
            };
        }
    }
    Ok(CorrelationMatrix { metrics: metrics.iter().map(|m| m.to_string()).collect(), values })
}

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation with the `n - 1` denominator.
pub fn sample_std(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    Some((xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt())
}

fn min_max(xs: &[f64]) -> Option<(f64, f64)> {
    xs.iter().fold(None, |acc, &x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

/// One judged inference, reduced to what scoring needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub task: String,
    pub model: String,
    pub encoding: String,
    pub graph_id: String,
    pub seed: u64,
    pub verdict: Verdict,
    /// Numeric truth and prediction for numeric tasks.
    pub truth: Option<f64>,
    pub prediction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: Option<f64>,
    pub n: usize,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Option<Self> {
        Some(MeanStd { mean: mean(xs)?, std: sample_std(xs), n: xs.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub task: String,
    pub model: String,
    pub encoding: String,
    pub difficulty: Option<Difficulty>,
    pub examples: usize,
    pub accuracy: f64,
    /// Accuracy per seed, aggregated.
    pub accuracy_over_seeds: MeanStd,
    pub parse_failure_rate: f64,
    pub span: Option<SpanResult>,
    pub nrmse_range: Option<f64>,
    pub nrmse_std: Option<f64>,
    pub smape_0_100: Option<f64>,
    pub relmae: Option<f64>,
    /// Accuracy minus the baseline encoding's accuracy for the same task and model.
    pub delta_vs_baseline: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyRollup {
    pub model: String,
    pub encoding: String,
    pub difficulty: Difficulty,
    pub tasks: usize,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub baseline_encoding: String,
    pub cells: Vec<CellReport>,
    pub rollups: Vec<DifficultyRollup>,
    /// Over sMAPE and RelMAE on the baseline encoding, when at least two models have them.
    pub global_error: Option<GlobalError>,
}

/// Aggregates items per (task, model, encoding). The result depends only on
/// the multiset of items, not their order.
pub fn build_report<F>(items: &[ScoredItem], difficulty_of: F, baseline_encoding: &str) -> MetricReport
where
    F: Fn(&str) -> Option<Difficulty>,
{
    let mut items: Vec<&ScoredItem> = items.iter().collect();
    items.sort_by(|a, b| {
        (&a.task, &a.model, &a.encoding, &a.graph_id, a.seed)
            .cmp(&(&b.task, &b.model, &b.encoding, &b.graph_id, b.seed))
            .then_with(|| a.prediction.unwrap_or(f64::NAN).total_cmp(&b.prediction.unwrap_or(f64::NAN)))
    });

    // per-task answer range over the task's ground truths, one per graph
    let mut truths_by_task: BTreeMap<&str, BTreeMap<&str, f64>> = BTreeMap::new();
    for it in &items {
        if let Some(t) = it.truth {
            truths_by_task.entry(&it.task).or_default().entry(&it.graph_id).or_insert(t);
        }
    }

    let mut groups: BTreeMap<(&str, &str, &str), Vec<&ScoredItem>> = BTreeMap::new();
    for it in &items {
        groups.entry((&it.task, &it.model, &it.encoding)).or_default().push(it);
    }

    let mut cells = Vec::new();
    for ((task, model, encoding), group) in &groups {
        let verdicts: Vec<Verdict> = group.iter().map(|i| i.verdict).collect();
        let mut by_seed: BTreeMap<u64, Vec<Verdict>> = BTreeMap::new();
        for i in group {
            by_seed.entry(i.seed).or_default().push(i.verdict);
        }
        let seed_acc: Vec<f64> = by_seed.values().map(|v| accuracy(v).expect("nonempty")).collect();
        let numeric: Vec<&&ScoredItem> = group.iter().filter(|i| i.truth.is_some()).collect();
        let series = PairedSeries::new(
            numeric.iter().map(|i| i.truth.expect("filtered")).collect(),
            numeric.iter().map(|i| i.prediction).collect(),
        )
        .expect("equal lengths");
        let span = (!numeric.is_empty())
            .then(|| {
                let mut per_graph: BTreeMap<&str, Vec<Option<f64>>> = BTreeMap::new();
                for i in &numeric {
                    per_graph.entry(&i.graph_id).or_default().push(i.prediction);
                }
                let truths: Vec<f64> = truths_by_task[task].values().copied().collect();
                let range = task_range(&truths).ok()?;
                output_span(&per_graph.into_values().collect::<Vec<_>>(), range).ok()
            })
            .flatten();
        cells.push(CellReport {
            task: task.to_string(),
            model: model.to_string(),
            encoding: encoding.to_string(),
            difficulty: difficulty_of(task),
            examples: group.len(),
            accuracy: accuracy(&verdicts).expect("nonempty"),
            accuracy_over_seeds: MeanStd::of(&seed_acc).expect("nonempty"),
            parse_failure_rate: verdicts.iter().filter(|v| **v == Verdict::Unparsed).count() as f64
                / verdicts.len() as f64,
            span,
            nrmse_range: nrmse(&series, Norm::Range).ok(),
            nrmse_std: nrmse(&series, Norm::Std).ok(),
            smape_0_100: smape(&series, SmapeScale::Zero100).ok(),
            relmae: relmae(&series).ok(),
            delta_vs_baseline: None,
        });
    }

    let baseline: BTreeMap<(String, String), f64> = cells
        .iter()
        .filter(|c| c.encoding == baseline_encoding)
        .map(|c| ((c.task.clone(), c.model.clone()), c.accuracy))
        .collect();
    for c in &mut cells {
        c.delta_vs_baseline = baseline.get(&(c.task.clone(), c.model.clone())).map(|b| c.accuracy - b);
    }

    let mut roll: BTreeMap<(&str, &str, Difficulty), Vec<f64>> = BTreeMap::new();
    for c in &cells {
        if let Some(d) = c.difficulty {
            roll.entry((&c.model, &c.encoding, d)).or_default().push(c.accuracy);
        }
    }
    let rollups = roll
        .into_iter()
        .map(|((model, encoding, difficulty), accs)| DifficultyRollup {
            model: model.into(),
            encoding: encoding.into(),
            difficulty,
            tasks: accs.len(),
            mean_accuracy: mean(&accs).expect("nonempty"),
        })
        .collect();

    let mut metric_cells = Vec::new();
    for c in cells.iter().filter(|c| c.encoding == baseline_encoding) {
        for (name, v) in [("smape_0_100", c.smape_0_100), ("relmae", c.relmae)] {
            if let Some(value) = v {
                metric_cells.push(MetricCell {
                    task: c.task.clone(),
                    model: c.model.clone(),
                    metric: name.into(),
                    value,
                });
            }
        }
    }
    let global_error = global_normalized_error(&metric_cells, &["smape_0_100", "relmae"]).ok();

    MetricReport { baseline_encoding: baseline_encoding.into(), cells, rollups, global_error }
}

impl MetricReport {
    pub fn cell(&self, task: &str, model: &str, encoding: &str) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.task == task && c.model == model && c.encoding == encoding)
    }

    /// One JSON object per cell.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&serde_json::to_string(c).expect("cells serialize"));
            out.push('\n');
        }
        out
    }

    /// Accuracy in percent: one row per task, one column per (model, encoding),
    /// `mean ± std` over seeds when there are several.
    pub fn accuracy_table(&self) -> Table {
        let cols: BTreeSet<(&str, &str)> = self.cells.iter().map(|c| (c.model.as_str(), c.encoding.as_str())).collect();
        let tasks: BTreeSet<&str> = self.cells.iter().map(|c| c.task.as_str()).collect();
        let mut header = vec!["task".to_string(), "difficulty".to_string()];
        header.extend(cols.iter().map(|(m, e)| format!("{m}/{e}")));
        header.push("parse_failure_rate".into());
        let mut rows = Vec::new();
        for task in tasks {
            let mine: Vec<&CellReport> = self.cells.iter().filter(|c| c.task == task).collect();
            let diff = mine.iter().find_map(|c| c.difficulty).map_or(String::new(), |d| format!("{d:?}"));
            let mut row = vec![task.to_string(), diff];
            for (m, e) in &cols {
                row.push(match mine.iter().find(|c| c.model == *m && c.encoding == *e) {
                    None => String::new(),
                    Some(c) => match c.accuracy_over_seeds.std {
                        Some(s) => format!("{:.1} ± {:.1}", 100.0 * c.accuracy_over_seeds.mean, 100.0 * s),
                        None => format!("{:.1}", 100.0 * c.accuracy),
                    },
                });
            }
            let pf: Vec<f64> = mine.iter().map(|c| c.parse_failure_rate).collect();
            row.push(format!("{:.3}", mean(&pf).unwrap_or(0.0)));
            rows.push(row);
        }
        Table { header, rows }
    }

    /// Numeric error metrics on the baseline encoding: one row per task, one
    /// column per (metric, model), plus each model's parse-failure rate.
    pub fn error_table(&self) -> Table {
        let cells: Vec<&CellReport> =
            self.cells.iter().filter(|c| c.encoding == self.baseline_encoding && c.smape_0_100.is_some()).collect();
        let models: BTreeSet<&str> = cells.iter().map(|c| c.model.as_str()).collect();
        let tasks: BTreeSet<&str> = cells.iter().map(|c| c.task.as_str()).collect();
        type Getter = fn(&CellReport) -> Option<f64>;
        let metrics: [(&str, Getter); 5] = [
            ("nrmse_std", |c| c.nrmse_std),
            ("nrmse_range", |c| c.nrmse_range),
            ("smape_0_100", |c| c.smape_0_100),
            ("relmae", |c| c.relmae),
            ("parse_failure_rate", |c| Some(c.parse_failure_rate)),
        ];
        let mut header = vec!["task".to_string()];
        for (name, _) in &metrics {
            header.extend(models.iter().map(|m| format!("{name}:{m}")));
        }
        let mut rows = Vec::new();
        for task in tasks {
            let mut row = vec![task.to_string()];
            for (_, get) in &metrics {
                for m in &models {
                    let v = cells.iter().find(|c| c.task == task && c.model == *m).and_then(|c| get(c));
                    row.push(v.map_or(String::new(), |v| format!("{v:.2}")));
                }
            }
            rows.push(row);
        }
        Table { header, rows }
    }
}

/// A rectangular string table, written as CSV or aligned text.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn to_text(&self) -> String {
        let width = |i: usize| {
            std::iter::once(&self.header)
                .chain(&self.rows)
                .map(|r| r.get(i).map_or(0, |s| s.chars().count()))
                .max()
                .unwrap_or(0)
        };
        let widths: Vec<usize> = (0..self.header.len()).map(width).collect();
        let mut out = String::new();
        for row in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }
}
