//! Acceptance suite. Each test checks one criterion and writes a single
//! `criterion N ...: PASS|FAIL` line to stderr (outside the test harness
//! capture, so the lines show up in plain `cargo test` output).

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::json;

use graphprobe::algo;
use graphprobe::graph::{sample, Graph, NodeId, Permutation, RngStream};
use graphprobe::harness::{
    encode_corpus, graph_block, read_records, run_matrix, score_records, DatasetConfig, EncodingSelection, EncodingSet,
    ExtractRule, MockKind, ModelConfig, RunConfig, TaskGroup, TaskSelection,
};
use graphprobe::metrics::{relmae, smape, PairedSeries, SmapeScale, SpanResult};
use graphprobe::serialize::{parse, render, EncodingSpec, OrderRule, Structure, Syntax};
use graphprobe::spectral::{adjacency_matrix, eigensym, laplacian_matrix, spectral_truth, SpectralTaskId};
use graphprobe::tasks::{self, ground_truth, Answer, AnswerKind, CheckConfig, Verdict};

fn criterion(id: u32, name: &str, body: impl FnOnce() -> String) {
    let started = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(body));
    let secs = started.elapsed().as_secs_f64();
    let line = match &result {
        Ok(detail) => format!("criterion {id} [{name}]: PASS ({detail}; {secs:.1}s)"),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| p.downcast_ref::<&str>().copied())
                .unwrap_or("panic");
            format!("criterion {id} [{name}]: FAIL ({})", msg.lines().next().unwrap_or(""))
        }
    };
    let _ = writeln!(std::io::stderr(), "{line}");
    if let Err(p) = result {
        resume_unwind(p);
    }
}

fn config(dir: &Path, run_id: &str, tasks: TaskSelection, encodings: EncodingSelection) -> RunConfig {
    let mut cfg: RunConfig = serde_json::from_value(json!({"run_id": run_id, "models": [], "output": dir})).unwrap();
    cfg.tasks = tasks;
    cfg.encodings = encodings;
    cfg
}

fn task_list(ids: &[&str]) -> TaskSelection {
    TaskSelection::List(ids.iter().map(|s| s.to_string()).collect())
}

fn random_graph(i: u64, rng: &mut RngStream) -> Graph {
    let n = 1 + rng.below(20);
    let p = 0.05 + 0.5 * rng.unit();
    let g = sample::gnp(n, p, i.is_multiple_of(3), rng);
    if i % 4 == 1 {
        sample::with_integer_weights(&g, 9, rng)
    } else {
        g
    }
}

#[test]
fn c1_round_trip() {
    criterion(1, "round trip", || {
        let started = Instant::now();
        let mut rng = RngStream::new(2024);
        let (mut checked, mut skipped) = (0, 0);
        for i in 0..200u64 {
            let g = random_graph(i, &mut rng);
            for structure in Structure::ALL {
                for order in OrderRule::ALL {
                    for syntax in Syntax::ALL {
                        for replicate in [false, true] {
                            let spec = EncodingSpec::new(structure, order, replicate, syntax).with_shuffle_seed(i);
                            if spec.validate().is_err() {
                                skipped += 1;
                                continue;
                            }
                            let text = render(&g, &spec).unwrap().text;
                            let back = parse(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", spec.id())).graph;
                            assert_eq!(back.canonical(), g.canonical(), "{} on graph {i}", spec.id());
                            checked += 1;
                        }
                    }
                }
            }
        }
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
        format!("{checked} renders; {skipped} combinations skipped as invalid (code syntaxes need an edge list)")
    });
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn plain(structure: Structure, order: OrderRule, replicate: bool) -> EncodingSpec {
    EncodingSpec::new(structure, order, replicate, Syntax::ErdosPlain).with_shuffle_seed(11)
}

#[test]
fn c2_golden_formats() {
    criterion(2, "golden formats", || {
        let g = parse(&golden("edge_list_erdos.txt")).unwrap().graph;
        assert_eq!((g.n(), g.m()), (19, 33));
        let mut exact = 0;
        let full = [
            (EncodingSpec::erdos(), "edge_list_erdos.txt"),
            (plain(Structure::EdgeList, OrderRule::SortedSourceTarget, false), "edge_list_sorted.txt"),
            (plain(Structure::EdgeList, OrderRule::SortedSourceTarget, true), "edge_list_sorted_replicated.txt"),
            (EncodingSpec::new(Structure::EdgeList, OrderRule::Verbatim, false, Syntax::Json), "json.txt"),
            (EncodingSpec::new(Structure::EdgeList, OrderRule::Verbatim, false, Syntax::NetworkxCode), "networkx.txt"),
            (EncodingSpec::new(Structure::EdgeList, OrderRule::Verbatim, false, Syntax::PygCode), "pyg.txt"),
        ];
        for (spec, file) in full {
            assert_eq!(render(&g, &spec).unwrap().text, golden(file), "{file}");
            exact += 1;
        }
        let prefixes = [
            (plain(Structure::AdjList, OrderRule::SortedSourceTarget, true), "adj_list_sorted.prefix.txt"),
            (plain(Structure::AdjMatrix, OrderRule::SortedSourceTarget, false), "adj_matrix.prefix.txt"),
        ];
        for (spec, file) in prefixes {
            let text = render(&g, &spec).unwrap().text;
            assert!(text.starts_with(&golden(file)), "{file}");
            exact += 1;
        }
        // Shuffled variants: the header matches byte for byte and the body
        // lists the same edges; the appendix order came from another RNG.
        let shuffled = [
            (
                plain(Structure::EdgeList, OrderRule::SortedSourceShuffledTarget, false),
                "edge_list_source_shuffled_target.txt",
            ),
            (
                plain(Structure::EdgeList, OrderRule::SortedSourceShuffledTarget, true),
                "edge_list_source_shuffled_target_replicated.txt",
            ),
            (plain(Structure::EdgeList, OrderRule::ShuffledAll, false), "edge_list_shuffled_all.txt"),
            (plain(Structure::EdgeList, OrderRule::ShuffledAll, true), "edge_list_shuffled_all_replicated.txt"),
            (
                plain(Structure::AdjList, OrderRule::SortedSourceShuffledTarget, true),
                "adj_list_source_shuffled_target.prefix.txt",
            ),
            (
                plain(Structure::AdjList, OrderRule::SortedTargetShuffledSource, true),
                "adj_list_target_shuffled_source.prefix.txt",
            ),
            (plain(Structure::AdjList, OrderRule::ShuffledAll, true), "adj_list_shuffled_all.prefix.txt"),
        ];
        for (spec, file) in shuffled {
            let (ours, expected) = (render(&g, &spec).unwrap().text, golden(file));
            let head = |s: &str| s[..s.find(':').unwrap() + 1].to_string();
            assert_eq!(head(&ours), head(&expected), "{file}");
            assert!(parse(&ours).unwrap().graph.same_edges(&g), "{file}");
            if !file.ends_with(".prefix.txt") {
                assert!(parse(&expected).unwrap().graph.same_edges(&g), "{file}");
            }
        }
        let relabeled = parse(&golden("relabeled_sorted.txt")).unwrap().graph;
        let sorted = plain(Structure::EdgeList, OrderRule::SortedSourceTarget, false);
        assert_eq!(render(&relabeled, &sorted).unwrap().text, golden("relabeled_sorted.txt"));
        exact += 1;
        format!("{exact} byte-exact encodings, {} shuffled headers", shuffled.len())
    });
}

fn agree(task: &str, kind: AnswerKind, a: &Answer, b: &Answer) {
    match (kind, a, b) {
        (AnswerKind::Float, Answer::Float(x), Answer::Float(y)) => {
            assert!((x - y).abs() <= 1e-8, "{task}: {x} vs {y}")
        }
        _ => assert_eq!(a, b, "{task}"),
    }
}

#[test]
fn c3_relabel_invariance() {
    criterion(3, "relabel invariance", || {
        let scalar: Vec<&'static tasks::TaskSpec> = tasks::catalog()
            .iter()
            .filter(|t| t.spectral_id().is_some() || (t.core && t.answer_kind.is_scalar()))
            .collect();
        let mut comparisons = 0;
        for task in &scalar {
            let instances = tasks::generate_instances(task, 2, 77);
            assert_eq!(instances.len(), 2, "{}", task.id);
            for inst in &instances {
                let mut rng = RngStream::derive(5, &inst.graph_id);
                for _ in 0..100 {
                    let p = Permutation::random(inst.graph.n(), &mut rng).unwrap();
                    let g = inst.graph.relabel(&p).unwrap();
                    let got = ground_truth(task, &g, &inst.params.relabel(&p)).unwrap();
                    agree(task.id, task.answer_kind, &inst.truth, &got);
                    comparisons += 1;
                }
            }
        }
        let spectral = scalar.iter().filter(|t| t.spectral_id().is_some()).count();
        assert_eq!(spectral, 12);
        format!("{} tasks ({spectral} spectral), {comparisons} relabelings", scalar.len())
    });
}

/// Union-find written here, independent of the library's.
fn components_by_union_find(g: &Graph) -> usize {
    let mut parent: Vec<usize> = (0..=g.n() as usize).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in g.edges() {
        let (a, b) = (root(&mut parent, e.source as usize), root(&mut parent, e.target as usize));
        parent[a] = b;
    }
    (1..=g.n() as usize).filter(|&u| root(&mut parent, u) == u).count()
}

#[test]
fn c4_spectral_identities() {
    criterion(4, "spectral identities", || {
        let mut rng = RngStream::new(99);
        let mut worst = (0.0f64, 0.0f64);
        for i in 0..100 {
            let n = 2 + rng.below(19);
            let g = sample::gnp(n, 0.05 + 0.4 * rng.unit(), false, &mut rng);
            let lambda = eigensym(&adjacency_matrix(&g)).unwrap().values;
            let sum: f64 = lambda.iter().sum();
            let sq: f64 = lambda.iter().map(|l| l * l).sum();
            assert!(sum.abs() <= 1e-8, "graph {i}: sum {sum}");
            assert!((sq - 2.0 * g.m() as f64).abs() <= 1e-6, "graph {i}: {sq} vs 2m = {}", 2 * g.m());
            worst = (worst.0.max(sum.abs()), worst.1.max((sq - 2.0 * g.m() as f64).abs()));

            let mu = eigensym(&laplacian_matrix(&g)).unwrap().values;
            let zeros = mu.iter().filter(|m| m.abs() <= 1e-8 * n as f64).count();
            let uf = components_by_union_find(&g);
            assert_eq!(zeros, uf, "graph {i}");
            assert_eq!(spectral_truth(SpectralTaskId::NComponents, &g).unwrap(), uf as f64);
            assert_eq!(algo::component_count(&g), uf);

            if g.m() > 0 {
                let h = spectral_truth(SpectralTaskId::VonNeumannEntropy, &g).unwrap();
                assert!(
                    (0.0..=(n as f64).ln() + 1e-12).contains(&h),
                    "graph {i}: entropy {h}, ln n {}",
                    (n as f64).ln()
                );
            }
        }
        for n in 2..=8u32 {
            let pairs: Vec<(NodeId, NodeId)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
            let k = Graph::from_pairs(n, false, &pairs).unwrap();
            let lambda = eigensym(&adjacency_matrix(&k)).unwrap().values;
            assert!((lambda[0] - (n - 1) as f64).abs() <= 1e-8, "K{n}: {lambda:?}");
            assert!(lambda[1..].iter().all(|l| (l + 1.0).abs() <= 1e-8), "K{n}: {lambda:?}");
        }
        format!("max |sum lambda| = {:.1e}, max |sum lambda^2 - 2m| = {:.1e}; K2..K8 exact", worst.0, worst.1)
    });
}

#[test]
fn c5_metric_examples() {
    criterion(5, "metric examples", || {
        let s = |y: f64, p: f64, scale| smape(&PairedSeries::complete(vec![y], vec![p]).unwrap(), scale).unwrap();
        let a = s(150.0, 100.0, SmapeScale::Zero200);
        let b = s(0.1, 0.2, SmapeScale::Zero200);
        assert!((a - 40.0).abs() < 5e-4, "{a}");
        assert!((b - 200.0 / 3.0).abs() <= 0.001 && (b - 66.667).abs() <= 0.001, "{b}");
        assert!((s(150.0, 100.0, SmapeScale::Zero100) - 20.0).abs() < 1e-12);

        // MAE 2 against a mean-predictor MAE of 5, and MAE 8 against 5
        let better = relmae(&PairedSeries::complete(vec![0.0, 10.0], vec![2.0, 8.0]).unwrap()).unwrap();
        let worse = relmae(&PairedSeries::complete(vec![0.0, 10.0], vec![8.0, 2.0]).unwrap()).unwrap();
        assert!((better - 0.4).abs() <= 1e-12, "{better}");
        assert!((worse - 1.6).abs() <= 1e-12, "{worse}");

        let mut rng = RngStream::new(5);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let len = 2 + rng.below(50) as usize;
            let y: Vec<f64> = (0..len).map(|_| 1000.0 * (rng.unit() - 0.3)).collect();
            let m = y.iter().sum::<f64>() / len as f64;
            if y.iter().all(|v| *v == y[0]) {
                continue;
            }
            let r = relmae(&PairedSeries::complete(y.clone(), vec![m; len]).unwrap()).unwrap();
            worst = worst.max((r - 1.0).abs());
        }
        assert!(worst <= 1e-12, "{worst}");
        format!("sMAPE {a:.3} and {b:.3}, RelMAE {better} and {worse}, mean predictor within {worst:.1e}")
    });
}

#[test]
fn c6_oracle_full_grid() {
    criterion(6, "oracle over full grid", || {
        let started = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(
            dir.path(),
            "oracle",
            TaskSelection::Group(TaskGroup::All),
            EncodingSelection::Set(EncodingSet::FullGrid),
        );
        cfg.relabel_seeds = vec![0, 1, 2];
        cfg.dataset = DatasetConfig::Synthetic { instances_per_task: 3, seed: 11 };
        cfg.models = vec![ModelConfig::mock("oracle", MockKind::Oracle)];
        let outcome = run_matrix(&cfg).unwrap();
        let report = &outcome.report;
        let n_tasks = tasks::catalog().len();
        let n_specs = graphprobe::serialize::full_grid().len();
        assert_eq!(n_specs, 17);
        assert_eq!(report.cells.len(), n_tasks * n_specs, "every (task, encoding) cell is present");
        for c in &report.cells {
            assert_eq!(c.accuracy, 1.0, "{} / {}: accuracy {}", c.task, c.encoding, c.accuracy);
            assert_eq!(c.parse_failure_rate, 0.0, "{} / {}", c.task, c.encoding);
        }

        // Span from the raw records: every example's outputs across seeds coincide.
        let records = read_records(&outcome.records_path).unwrap();
        let mut outputs: BTreeMap<(String, String, String), BTreeSet<u64>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.numeric_truth.is_some()) {
            let p = r.numeric_prediction.unwrap_or_else(|| panic!("{} unparsed", r.task));
            outputs.entry((r.task.clone(), r.encoding.clone(), r.graph_id.clone())).or_default().insert(p.to_bits());
        }
        let spread: Vec<_> = outputs
            .iter()
            .filter(|(_, s)| s.len() > 1)
            .map(|(k, s)| (k.clone(), s.iter().map(|b| f64::from_bits(*b)).collect::<Vec<_>>()))
            .collect();
        assert!(spread.is_empty(), "nonzero span on {} examples: {:?}", spread.len(), &spread[..spread.len().min(5)]);
        let numeric: Vec<_> =
            report.cells.iter().filter(|c| tasks::lookup(&c.task).unwrap().answer_kind.is_numeric()).collect();
        let mut truths: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for r in &records {
            if let Some(y) = r.numeric_truth {
                truths.entry(r.task.as_str()).or_default().push(y);
            }
        }
        let constant = |task: &str| truths[task].iter().all(|y| *y == truths[task][0]);
        let mut undefined = 0;
        for c in &numeric {
            match c.span {
                Some(SpanResult::Defined { span, .. }) => assert_eq!(span, 0.0, "{} / {}", c.task, c.encoding),
                // 0/0: every truth of the task is equal, the raw spread was checked above
                None if constant(&c.task) => undefined += 1,
                other => panic!("{} / {}: span {other:?}", c.task, c.encoding),
            }
        }
        let elapsed = started.elapsed();
        assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
        format!(
            "{} records, {} cells at accuracy 1.0, {} numeric cells with span 0 ({undefined} with a constant truth)",
            outcome.written,
            report.cells.len(),
            numeric.len()
        )
    });
}

#[test]
fn c7_mean_baseline_and_ranking() {
    criterion(7, "mean baseline and ranking", || {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(
            dir.path(),
            "spectral",
            TaskSelection::Group(TaskGroup::Spectral),
            EncodingSelection::Set(EncodingSet::Erdos),
        );
        cfg.relabel_seeds = vec![0, 1, 2];
        cfg.dataset = DatasetConfig::Synthetic { instances_per_task: 20, seed: 3 };
        cfg.models = vec![
            ModelConfig::mock("oracle", MockKind::Oracle),
            ModelConfig::mock("noisy", MockKind::Noisy { sigma: 0.05, seed: 1 }),
            ModelConfig::mock("mean", MockKind::MeanBaseline),
        ];
        let report = run_matrix(&cfg).unwrap().report;
        let mut worst = 0.0f64;
        for task in tasks::spectral_tasks() {
            let cell = report.cell(task.id, "mean", &EncodingSpec::erdos().id()).unwrap();
            let r = cell.relmae.unwrap_or_else(|| panic!("{}: RelMAE undefined", task.id));
            assert!((r - 1.0).abs() <= 1e-9, "{}: RelMAE {r}", task.id);
            worst = worst.max((r - 1.0).abs());
        }
        let global = report.global_error.as_ref().unwrap();
        assert_eq!(global.ranking(), vec!["oracle", "noisy", "mean"], "{:?}", global.scores);
        format!("mean-baseline RelMAE within {worst:.1e} on 12 tasks, global error {:?}", global.scores)
    });
}

fn cli(args: &[&str], envs: &[(&str, &str)]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_graphprobe"))
        .args(args)
        .envs(envs.iter().copied())
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(out.status.success(), "graphprobe {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn c8_http_smoke() {
    criterion(8, "http smoke", || {
        // Counts the nodes of the prompt graph; the first request gets a 503
        // and every fifth reply is unusable.
        let server = common::serve(Box::new(|n, prompt| {
            if n == 0 {
                return None;
            }
            if n % 5 == 3 {
                return Some("I am not sure how to answer this.".into());
            }
            let g = graph_block(prompt).and_then(|b| parse(b).ok()).map(|p| p.graph)?;
            Some(format!("Counting carefully, the final answer is: {}", g.n()))
        }));
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let config = json!({
            "run_id": "smoke",
            "models": [{"name": "local", "endpoint": server.base_url, "model": "tiny", "api_key_env": "GRAPHPROBE_SMOKE_KEY",
                        "max_in_flight": 2, "backoff_ms": 1, "max_tokens": 256}],
            "tasks": ["node_number", "edge_number", "spectral_radius"],
            "relabel_seeds": [0, 1],
            "dataset": {"source": "synthetic", "instances_per_task": 2, "seed": 8},
            "output": out,
        });
        let cfg_path = dir.path().join("smoke.json");
        std::fs::write(&cfg_path, config.to_string()).unwrap();
        let cfg = cfg_path.to_str().unwrap();
        let key = [("GRAPHPROBE_SMOKE_KEY", "sk-local")];
        cli(&["run", "--config", cfg], &key);

        let records_path = out.join("smoke.records.jsonl");
        let records = read_records(&records_path).unwrap();
        assert_eq!(records.len(), 12);
        assert!(records.iter().all(|r| r.completion.is_some() && r.error.is_none()));
        let unparsed = records.iter().filter(|r| r.verdict == Verdict::Unparsed).count();
        assert!(unparsed > 0);
        assert!(records.iter().filter(|r| r.task == "node_number").all(|r| r.verdict != Verdict::Incorrect));
        let requests = server.requests.lock().unwrap().clone();
        assert_eq!(requests.len(), 13, "one retried request");
        for (body, auth) in &requests {
            assert_eq!(body["model"], "tiny");
            assert_eq!(body["temperature"], 0.0);
            assert_eq!(body["max_tokens"], 256);
            assert_eq!(auth.as_deref(), Some("Bearer sk-local"));
        }

        // replay without the server
        let rp = records_path.to_str().unwrap();
        let scored = cli(&["score", "--records", rp], &[]);
        let rescored = cli(&["score", "--records", rp, "--reextract"], &[]);
        assert_eq!(scored, rescored);
        assert_eq!(scored, std::fs::read_to_string(out.join("smoke.report.jsonl")).unwrap());
        let report_dir = dir.path().join("report");
        cli(&["report", "--records", rp, "--out-dir", report_dir.to_str().unwrap(), "--stem", "smoke"], &[]);
        let accuracy = std::fs::read_to_string(report_dir.join("smoke.accuracy.csv")).unwrap();
        let errors = std::fs::read_to_string(report_dir.join("smoke.errors.csv")).unwrap();
        let acc_header = accuracy.lines().next().unwrap();
        assert!(
            acc_header.starts_with("task,difficulty,local/") && acc_header.ends_with(",parse_failure_rate"),
            "{acc_header}"
        );
        assert_eq!(accuracy.lines().count(), 4);
        let err_header = errors.lines().next().unwrap();
        assert_eq!(
            err_header,
            "task,nrmse_std:local,nrmse_range:local,smape_0_100:local,relmae:local,parse_failure_rate:local"
        );
        assert!(errors.lines().nth(1).unwrap().starts_with("edge_number,"), "{errors}");
        let pf: f64 = accuracy.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
        assert!(pf > 0.0);
        format!("{} prompts over HTTP ({unparsed} unparsed), replayed score and report tables", records.len())
    });
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn c9_determinism() {
    criterion(9, "determinism", || {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(
            dir.path(),
            "det",
            task_list(&["density", "shortest_path", "graph_energy", "bfs", "maximal_flow"]),
            EncodingSelection::Set(EncodingSet::FullGrid),
        );
        cfg.relabel_seeds = vec![0, 1, 2];
        cfg.dataset = DatasetConfig::Synthetic { instances_per_task: 3, seed: 21 };
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        let n = encode_corpus(&cfg, &a).unwrap();
        encode_corpus(&cfg, &b).unwrap();
        let (ta, tb) = (tree(&a), tree(&b));
        assert_eq!(ta.len(), n + 1);
        assert!(ta == tb, "corpora differ");
        cfg.dataset = DatasetConfig::Synthetic { instances_per_task: 3, seed: 22 };
        let c = dir.path().join("c");
        encode_corpus(&cfg, &c).unwrap();
        assert!(tree(&c) != ta, "a different seed changes the corpus");

        cfg.encodings = EncodingSelection::Set(EncodingSet::Shuffles);
        cfg.models = vec![
            ModelConfig::mock("oracle", MockKind::Oracle),
            ModelConfig::mock("noisy", MockKind::Noisy { sigma: 0.2, seed: 4 }),
        ];
        let outcome = run_matrix(&cfg).unwrap();
        let records = read_records(&outcome.records_path).unwrap();
        let on_disk = std::fs::read_to_string(dir.path().join("det.report.jsonl")).unwrap();
        let baseline = cfg.baseline_encoding.id();
        let check = CheckConfig::default();
        let replay = score_records(&records, &baseline, None).to_jsonl();
        let reextracted = score_records(&records, &baseline, Some((&ExtractRule::DEFAULT, &check))).to_jsonl();
        let mut reversed = records.clone();
        reversed.reverse();
        assert_eq!(replay, on_disk);
        assert_eq!(reextracted, on_disk);
        assert_eq!(score_records(&reversed, &baseline, None).to_jsonl(), on_disk);
        format!(
            "{n} prompt files byte-identical across two encodes; report of {} records replays identically",
            records.len()
        )
    });
}
