use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::HarnessError;
use crate::serialize::EncodingSpec;
use crate::tasks::{QueryParams, Verdict};

/// One inference and its judgement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub run_id: String,
    pub model: String,
    pub task: String,
    pub graph_id: String,
    /// Identifier of the configured encoding; cells are grouped by it.
    pub encoding: String,
    /// The spec actually rendered, with its shuffle seed.
    pub spec: EncodingSpec,
    pub seed: u64,
    /// Seed of the node relabeling, absent when labels were kept.
    pub perm_seed: Option<u64>,
    pub params: QueryParams,
    pub prompt: String,
    pub completion: Option<String>,
    pub parsed: Option<Value>,
    pub truth: Value,
    pub verdict: Verdict,
    pub numeric_truth: Option<f64>,
    pub numeric_prediction: Option<f64>,
    /// Absolute error for numeric tasks.
    pub numeric_error: Option<f64>,
    pub latency_ms: u64,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
    pub error: Option<String>,
}

pub(crate) const TRANSPORT_PREFIX: &str = "TransportError: ";

/// Identity of a matrix cell within a run.
pub type RecordKey = (String, String, String, String, u64);

impl EvalRecord {
    pub fn key(&self) -> RecordKey {
        (self.model.clone(), self.task.clone(), self.graph_id.clone(), self.encoding.clone(), self.seed)
    }

    /// The model could not be reached; resuming retries the cell.
    pub fn is_transport_failure(&self) -> bool {
        self.error.as_deref().is_some_and(|e| e.starts_with(TRANSPORT_PREFIX))
    }
}

/// Append-only JSON-lines record file.
pub struct RecordSink {
    path: PathBuf,
    file: File,
}

impl RecordSink {
    /// Opens for appending, dropping a torn last line left by an
    /// interrupted write.
    pub fn open(path: &Path) -> Result<Self, HarnessError> {
        let io = |e| HarnessError::io(path, e);
        if let Ok(bytes) = std::fs::read(path) {
            if bytes.last().is_some_and(|&b| b != b'\n') {
                let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
                log::warn!("{}: dropping {} bytes of a torn last line", path.display(), bytes.len() - keep);
                OpenOptions::new().write(true).open(path).and_then(|f| f.set_len(keep as u64)).map_err(io)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
        Ok(RecordSink { path: path.to_path_buf(), file })
    }

    pub fn append(&mut self, rec: &EvalRecord) -> Result<(), HarnessError> {
        let mut line = serde_json::to_string(rec).expect("records serialize");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|e| HarnessError::io(&self.path, e))
    }
}

/// Reads a record file, keeping the first record of each key unless it is a
/// transport failure that a later record supersedes. A truncated last line
/// (an interrupted write) is skipped.
pub fn read_records(path: &Path) -> Result<Vec<EvalRecord>, HarnessError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(HarnessError::io(path, e)),
    };
    let lines: Vec<String> =
        BufReader::new(file).lines().collect::<Result<_, _>>().map_err(|e| HarnessError::io(path, e))?;
    let mut seen: BTreeMap<RecordKey, usize> = BTreeMap::new();
    let mut out: Vec<EvalRecord> = Vec::new();
    for (i, line) in lines.iter().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match serde_json::from_str::<EvalRecord>(line) {
            Ok(rec) => match seen.get(&rec.key()) {
                None => {
                    seen.insert(rec.key(), out.len());
                    out.push(rec);
                }
                Some(&at) if out[at].is_transport_failure() => out[at] = rec,
                Some(_) => {}
            },
            Err(e) if i + 1 == lines.len() => log::warn!("{}: ignoring truncated last line: {e}", path.display()),
            Err(e) => return Err(HarnessError::io(path, format!("line {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(seed: u64) -> EvalRecord {
        EvalRecord {
            run_id: "r".into(),
            model: "m".into(),
            task: "density".into(),
            graph_id: "g".into(),
            encoding: "e".into(),
            spec: EncodingSpec::erdos(),
            seed,
            perm_seed: Some(seed),
            params: QueryParams::default(),
            prompt: "p".into(),
            completion: Some("The final answer is: 0.5".into()),
            parsed: Some(Value::from(0.5)),
            truth: Value::from(0.5),
            verdict: Verdict::Correct,
            numeric_truth: Some(0.5),
            numeric_prediction: Some(0.5),
            numeric_error: Some(0.0),
            latency_ms: 1,
            prompt_tokens: None,
            completion_tokens: None,
            error: None,
        }
    }

    #[test]
    fn append_read_and_dedup() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        assert!(read_records(&path).unwrap().is_empty());
        let mut sink = RecordSink::open(&path).unwrap();
        sink.append(&rec(0)).unwrap();
        sink.append(&rec(1)).unwrap();
        sink.append(&rec(0)).unwrap();
        drop(sink);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"run_id\": \"r\", \"mod").unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, vec![rec(0), rec(1)]);
        RecordSink::open(&path).unwrap().append(&rec(2)).unwrap();
        assert_eq!(read_records(&path).unwrap(), vec![rec(0), rec(1), rec(2)]);
    }

    #[test]
    fn later_records_replace_transport_failures() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let failed = EvalRecord { error: Some(format!("{TRANSPORT_PREFIX}timeout")), completion: None, ..rec(0) };
        let mut sink = RecordSink::open(&path).unwrap();
        for r in [&failed, &rec(1), &rec(0), &EvalRecord { latency_ms: 9, ..rec(0) }] {
            sink.append(r).unwrap();
        }
        assert!(failed.is_transport_failure() && !rec(0).is_transport_failure());
        assert_eq!(read_records(&path).unwrap(), vec![rec(0), rec(1)]);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        std::fs::write(&path, format!("garbage\n{}\n", serde_json::to_string(&rec(0)).unwrap())).unwrap();
        assert!(matches!(read_records(&path), Err(HarnessError::Io { .. })));
    }
}
