use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde_json::json;

use super::client::HttpModel;
use super::config::{Backend, DatasetConfig, ModelConfig, RunConfig};
use super::extract::{extract_with, ExtractRule};
use super::mock::{mock_answer, MockContext, MockKind};
use super::prompt::{build_prompt, graph_block};
use super::record::{read_records, EvalRecord, RecordSink, TRANSPORT_PREFIX};
use super::HarnessError;
use crate::graph::{Permutation, RngStream};
use crate::metrics::{build_report, mean, MetricReport, ScoredItem};
use crate::serialize::{parse, EncodingSpec};
use crate::tasks::{
    self, check, generate_instances, ingest_erdos, relabel_instance, Answer, CheckConfig, TaskInstance, TaskSpec,
    Verdict,
};

/// The instances a run evaluates, before relabeling.
pub fn build_test_set(cfg: &RunConfig) -> Result<Vec<TaskInstance>, HarnessError> {
    let specs = cfg.task_specs()?;
    match &cfg.dataset {
        DatasetConfig::Synthetic { instances_per_task, seed } => {
            let mut out = Vec::new();
            for task in specs {
                let got = generate_instances(task, *instances_per_task, *seed);
                if got.len() < *instances_per_task {
                    log::warn!("{}: generated {} of {} instances", task.id, got.len(), instances_per_task);
                }
                out.extend(got);
            }
            Ok(out)
        }
        DatasetConfig::Erdos { path } => {
            let wanted: BTreeSet<&str> = specs.iter().map(|t| t.id).collect();
            Ok(ingest_erdos(path)?.into_iter().filter(|i| wanted.contains(i.task.id)).collect())
        }
    }
}

/// One prompt of the matrix, shared by every model.
#[derive(Debug, Clone)]
pub struct PromptJob {
    pub instance: TaskInstance,
    pub encoding: String,
    pub spec: EncodingSpec,
    pub seed: u64,
    pub perm_seed: Option<u64>,
    /// The prompt, or why the cell could not be built.
    pub prompt: Result<String, String>,
}

impl PromptJob {
    pub fn task(&self) -> &'static TaskSpec {
        self.instance.task
    }
}

fn relabel_for(inst: &TaskInstance, seed: u64) -> Result<TaskInstance, String> {
    let mut rng = RngStream::derive(seed, &format!("relabel/{}", inst.graph_id));
    let p = Permutation::random(inst.graph.n(), &mut rng).map_err(|e| e.to_string())?;
    relabel_instance(inst, &p).map_err(|e| e.to_string())
}

/// Every (instance, seed, encoding) prompt, in a fixed order.
pub fn build_jobs(cfg: &RunConfig, test_set: &[TaskInstance]) -> Vec<PromptJob> {
    let specs = cfg.encoding_specs();
    let mut jobs = Vec::new();
    for inst in test_set {
        for &seed in &cfg.relabel_seeds {
            let relabeled = if cfg.relabel { relabel_for(inst, seed) } else { Ok(inst.clone()) };
            for spec in &specs {
                let effective = if spec.order.is_shuffled() {
                    spec.with_shuffle_seed(spec.shuffle_seed.unwrap_or(0).wrapping_add(seed))
                } else {
                    *spec
                };
                let (instance, prompt) = match &relabeled {
                    Ok(r) => (r.clone(), build_prompt(r, &effective).map_err(|e| e.to_string())),
                    Err(e) => (inst.clone(), Err(e.clone())),
                };
                jobs.push(PromptJob {
                    instance,
                    encoding: spec.id(),
                    spec: effective,
                    seed,
                    perm_seed: cfg.relabel.then_some(seed),
                    prompt,
                });
            }
        }
    }
    jobs
}

fn file_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' }).collect()
}

/// Writes one file per prompt plus `manifest.jsonl`. Returns the prompt count.
pub fn encode_corpus(cfg: &RunConfig, dir: &Path) -> Result<usize, HarnessError> {
    let test_set = build_test_set(cfg)?;
    let jobs = build_jobs(cfg, &test_set);
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut manifest = String::new();
    let mut written = 0;
    for job in &jobs {
        let inst = &job.instance;
        let file = format!("{}__{}__{}__s{}.txt", inst.task.id, file_safe(&inst.graph_id), job.encoding, job.seed);
        let mut entry = json!({
            "file": file,
            "task": inst.task.id,
            "graph_id": inst.graph_id,
            "encoding": job.encoding,
            "spec": job.spec,
            "seed": job.seed,
            "perm_seed": job.perm_seed,
            "params": inst.params,
            "truth": inst.truth.to_json(),
        });
        match &job.prompt {
            Ok(prompt) => {
                let path = dir.join(&file);
                std::fs::write(&path, prompt).map_err(|e| HarnessError::io(&path, e))?;
                written += 1;
            }
            Err(e) => {
                entry["file"] = json!(null);
                entry["error"] = json!(e);
            }
        }
        manifest.push_str(&entry.to_string());
        manifest.push('\n');
    }
    let path = dir.join("manifest.jsonl");
    std::fs::write(&path, manifest).map_err(|e| HarnessError::io(&path, e))?;
    Ok(written)
}

/// Constant answer of the mean baseline per task: the mean truth for numeric
/// tasks, otherwise the most frequent truth.
fn baseline_constants(test_set: &[TaskInstance]) -> BTreeMap<&'static str, String> {
    let mut by_task: BTreeMap<&'static str, Vec<&TaskInstance>> = BTreeMap::new();
    for inst in test_set {
        by_task.entry(inst.task.id).or_default().push(inst);
    }
    by_task
        .into_iter()
        .map(|(id, insts)| {
            let numeric: Vec<f64> = insts.iter().filter_map(|i| i.truth.as_f64()).collect();
            let constant = if insts[0].task.answer_kind.is_numeric() && numeric.len() == insts.len() {
                format!("{}", mean(&numeric).expect("nonempty"))
            } else {
                let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                for i in &insts {
                    *counts.entry(i.truth.format()).or_default() += 1;
                }
                let best = counts.values().copied().max().unwrap_or(0);
                counts.into_iter().find(|(_, c)| *c == best).map(|(s, _)| s).unwrap_or_default()
            };
            (id, constant)
        })
        .collect()
}

enum Caller {
    Mock(MockKind),
    Http(HttpModel),
}

struct Evaluator<'a> {
    run_id: &'a str,
    model: &'a str,
    caller: Caller,
    rules: &'a [ExtractRule],
    check: &'a CheckConfig,
    solve: &'a tasks::SolveConfig,
    constants: &'a BTreeMap<&'static str, String>,
}

impl Evaluator<'_> {
    fn evaluate(&self, job: &PromptJob) -> Result<EvalRecord, HarnessError> {
        let inst = &job.instance;
        let kind = inst.task.answer_kind;
        let mut rec = EvalRecord {
            run_id: self.run_id.into(),
            model: self.model.into(),
            task: inst.task.id.into(),
            graph_id: inst.graph_id.clone(),
            encoding: job.encoding.clone(),
            spec: job.spec,
            seed: job.seed,
            perm_seed: job.perm_seed,
            params: inst.params,
            prompt: String::new(),
            completion: None,
            parsed: None,
            truth: inst.truth.to_json(),
            verdict: Verdict::Unparsed,
            numeric_truth: if kind.is_numeric() { inst.truth.as_f64() } else { None },
            numeric_prediction: None,
            numeric_error: None,
            latency_ms: 0,
            prompt_tokens: None,
            completion_tokens: None,
            error: None,
        };
        let prompt = match &job.prompt {
            Ok(p) => p,
            Err(e) => {
                rec.error = Some(e.clone());
                return Ok(rec);
            }
        };
        rec.prompt = prompt.clone();
        let started = Instant::now();
        match &self.caller {
            Caller::Mock(mock) => {
                let constant = self.constants.get(inst.task.id).map_or("", String::as_str);
                let ctx = MockContext {
                    task: inst.task,
                    params: inst.params,
                    truth: &inst.truth,
                    constant,
                    solve: self.solve,
                };
                rec.completion = Some(mock_answer(*mock, prompt, &ctx));
                rec.latency_ms = started.elapsed().as_millis() as u64;
            }
            Caller::Http(client) => match client.complete(prompt) {
                Ok(c) => {
                    rec.completion = Some(c.text);
                    rec.latency_ms = c.latency_ms;
                    rec.prompt_tokens = c.prompt_tokens;
                    rec.completion_tokens = c.completion_tokens;
                }
                Err(HarnessError::Transport(m)) => {
                    rec.error = Some(format!("{TRANSPORT_PREFIX}{m}"));
                    rec.latency_ms = started.elapsed().as_millis() as u64;
                }
                Err(e) => return Err(e),
            },
        }
        judge(&mut rec, inst, self.rules, self.check);
        Ok(rec)
    }
}

/// Fills parsed answer, verdict and numeric fields from `rec.completion`.
fn judge(rec: &mut EvalRecord, inst: &TaskInstance, rules: &[ExtractRule], cfg: &CheckConfig) {
    let kind = inst.task.answer_kind;
    let parsed = rec.completion.as_deref().and_then(|c| extract_with(c, kind, rules));
    rec.parsed = parsed.as_ref().map(Answer::to_json);
    rec.verdict = match check(inst.task, &inst.graph, &inst.params, parsed.as_ref(), Some(&inst.truth), cfg) {
        Ok(v) => v,
        Err(e) => {
            rec.error = Some(e.to_string());
            Verdict::Incorrect
        }
    };
    rec.numeric_prediction = if kind.is_numeric() { parsed.as_ref().and_then(Answer::as_f64) } else { None };
    rec.numeric_error = match (rec.numeric_truth, rec.numeric_prediction) {
        (Some(y), Some(p)) => Some((y - p).abs()),
        _ => None,
    };
}

/// Re-extracts and re-checks a persisted record from its prompt and
/// completion, without contacting any model.
pub fn rescore_record(rec: &EvalRecord, rules: &[ExtractRule], cfg: &CheckConfig) -> EvalRecord {
    let mut out = rec.clone();
    let Some(task) = tasks::lookup(&rec.task) else { return out };
    let Some(graph) = graph_block(&rec.prompt).and_then(|b| parse(b).ok()).map(|p| p.graph) else { return out };
    let Some(truth) = Answer::from_json(task.answer_kind, &rec.truth, graph.is_directed()) else { return out };
    let inst = TaskInstance {
        task,
        graph_id: rec.graph_id.clone(),
        graph,
        params: rec.params,
        truth,
        source: tasks::TruthSource::Computed,
        question: None,
    };
    judge(&mut out, &inst, rules, cfg);
    out
}

/// Metric report of a record stream; `rescore` re-derives verdicts first.
pub fn score_records(
    records: &[EvalRecord],
    baseline_encoding: &str,
    rescore: Option<(&[ExtractRule], &CheckConfig)>,
) -> MetricReport {
    let items: Vec<ScoredItem> = records
        .iter()
        .map(|r| {
            let r = match rescore {
                Some((rules, cfg)) => rescore_record(r, rules, cfg),
                None => r.clone(),
            };
            ScoredItem {
                task: r.task,
                model: r.model,
                encoding: r.encoding,
                graph_id: r.graph_id,
                seed: r.seed,
                verdict: r.verdict,
                truth: r.numeric_truth,
                prediction: r.numeric_prediction,
            }
        })
        .collect();
    build_report(&items, |t| tasks::lookup(t).map(|s| s.difficulty), baseline_encoding)
}

/// Writes `<stem>.report.jsonl`, `<stem>.summary.json` and the accuracy and
/// error tables as CSV and aligned text.
pub fn write_report(report: &MetricReport, dir: &Path, stem: &str) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let summary = json!({
        "baseline_encoding": report.baseline_encoding,
        "rollups": report.rollups,
        "global_error": report.global_error,
    });
    let acc = report.accuracy_table();
    let err = report.error_table();
    let files = [
        (format!("{stem}.report.jsonl"), report.to_jsonl()),
        (format!("{stem}.summary.json"), serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
        (format!("{stem}.accuracy.csv"), acc.to_csv()),
        (format!("{stem}.accuracy.txt"), acc.to_text()),
        (format!("{stem}.errors.csv"), err.to_csv()),
        (format!("{stem}.errors.txt"), err.to_text()),
    ];
    let mut out = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub records_path: PathBuf,
    /// Records written by this invocation.
    pub written: usize,
    /// Cells skipped because a record already existed.
    pub skipped: usize,
    pub report: MetricReport,
}

/// Runs every model over every prompt, appending records as they complete
/// and skipping cells already on disk, then scores the whole record file.
pub fn run_matrix(cfg: &RunConfig) -> Result<RunOutcome, HarnessError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output).map_err(|e| HarnessError::io(&cfg.output, e))?;
    let config_path = cfg.output.join(format!("{}.config.json", cfg.run_id));
    std::fs::write(&config_path, serde_json::to_string_pretty(cfg).expect("config serializes") + "\n")
        .map_err(|e| HarnessError::io(&config_path, e))?;

    let test_set = build_test_set(cfg)?;
    let jobs = build_jobs(cfg, &test_set);
    let constants = baseline_constants(&test_set);
    let records_path = cfg.records_path();
    let done: BTreeSet<_> =
        read_records(&records_path)?.iter().filter(|r| !r.is_transport_failure()).map(EvalRecord::key).collect();
    let mut sink = RecordSink::open(&records_path)?;
    let (mut written, mut skipped) = (0, 0);

    for model in &cfg.models {
        let pending: Vec<&PromptJob> = jobs
            .iter()
            .filter(|j| {
                let key = (
                    model.name.clone(),
                    j.task().id.to_string(),
                    j.instance.graph_id.clone(),
                    j.encoding.clone(),
                    j.seed,
                );
                !done.contains(&key)
            })
            .collect();
        skipped += jobs.len() - pending.len();
        log::info!("{}: {} prompts to run, {} already recorded", model.name, pending.len(), jobs.len() - pending.len());
        written += dispatch(cfg, model, &pending, &constants, &mut sink)?;
    }
    drop(sink);

    let records = read_records(&records_path)?;
    let report = score_records(&records, &cfg.baseline_encoding.id(), None);
    write_report(&report, &cfg.output, &cfg.run_id)?;
    Ok(RunOutcome { records_path, written, skipped, report })
}

fn dispatch(
    cfg: &RunConfig,
    model: &ModelConfig,
    jobs: &[&PromptJob],
    constants: &BTreeMap<&'static str, String>,
    sink: &mut RecordSink,
) -> Result<usize, HarnessError> {
    if jobs.is_empty() {
        return Ok(0);
    }
    let (caller, workers) = match model.backend()? {
        Backend::Mock(kind) => (Caller::Mock(kind), std::thread::available_parallelism().map_or(4, |n| n.get())),
        Backend::Http => (Caller::Http(HttpModel::new(model)?), model.max_in_flight),
    };
    let eval = Evaluator {
        run_id: &cfg.run_id,
        model: &model.name,
        caller,
        rules: &cfg.extraction,
        check: &cfg.check,
        solve: &cfg.solve,
        constants,
    };
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let mut written = 0;
    let mut failure = None;
    std::thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..workers.min(jobs.len()) {
            let tx = tx.clone();
            let (eval, next, abort) = (&eval, &next, &abort);
            s.spawn(move || {
                while !abort.load(Ordering::Relaxed) {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(job) = jobs.get(i) else { break };
                    if tx.send(eval.evaluate(job)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);
        for result in rx {
            if failure.is_some() {
                continue;
            }
            match result.and_then(|rec| sink.append(&rec)) {
                Ok(()) => written += 1,
                Err(e) => {
                    abort.store(true, Ordering::Relaxed);
                    failure = Some(e);
                }
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(written),
    }
}
