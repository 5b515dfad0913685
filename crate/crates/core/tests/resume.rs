mod common;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use graphprobe::harness::{read_records, run_matrix, RunConfig};
use serde_json::json;

#[test]
fn transport_failures_are_retried_on_resume() {
    let up = Arc::new(AtomicBool::new(false));
    let flag = up.clone();
    let server =
        common::serve(Box::new(move |_, _| flag.load(Ordering::SeqCst).then(|| "The final answer is: 1".to_string())));
    let dir = tempfile::tempdir().unwrap();
    let cfg: RunConfig = serde_json::from_value(json!({
        "run_id": "flaky",
        "models": [{"name": "m", "endpoint": server.base_url, "attempts": 1, "max_in_flight": 1}],
        "tasks": ["node_number"],
        "relabel_seeds": [0],
        "dataset": {"source": "synthetic", "instances_per_task": 3},
        "output": dir.path(),
    }))
    .unwrap();

    let first = run_matrix(&cfg).unwrap();
    assert_eq!(first.written, 3);
    let records = read_records(&first.records_path).unwrap();
    assert!(records.iter().all(|r| r.is_transport_failure() && r.completion.is_none()));
    assert_eq!(first.report.cells[0].parse_failure_rate, 1.0);

    up.store(true, Ordering::SeqCst);
    let second = run_matrix(&cfg).unwrap();
    assert_eq!((second.written, second.skipped), (3, 0));
    let records = read_records(&second.records_path).unwrap();
    assert_eq!(records.len(), 3);
    assert!(records.iter().all(|r| r.completion.as_deref() == Some("The final answer is: 1") && r.error.is_none()));

    let third = run_matrix(&cfg).unwrap();
    assert_eq!((third.written, third.skipped), (0, 3));
    assert_eq!(server.requests.lock().unwrap().len(), 6);
}
