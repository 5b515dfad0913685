use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::prompt::graph_block;
use crate::graph::RngStream;
use crate::serialize::parse;
use crate::tasks::{ground_truth_with, Answer, AnswerKind, QueryParams, SolveConfig, TaskSpec};

/// Offline stand-ins for a model endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MockKind {
    /// Re-derives the answer from the graph in the prompt.
    Oracle,
    /// Always answers the task's mean ground truth (the mode for non-numeric tasks).
    MeanBaseline,
    /// Oracle plus Gaussian noise of relative size `sigma` on numeric answers.
    Noisy { sigma: f64, seed: u64 },
}

impl MockKind {
    pub fn parse(spec: &str) -> Option<Self> {
        let (name, query) = spec.split_once('?').unwrap_or((spec, ""));
        match name {
            "oracle" => Some(MockKind::Oracle),
            "mean_baseline" => Some(MockKind::MeanBaseline),
            "noisy" => {
                let (mut sigma, mut seed) = (None, 0);
                for kv in query.split('&').filter(|s| !s.is_empty()) {
                    match kv.split_once('=')? {
                        ("sigma", v) => sigma = Some(v.parse().ok()?),
                        ("seed", v) => seed = v.parse().ok()?,
                        _ => return None,
                    }
                }
                let sigma: f64 = sigma?;
                (sigma >= 0.0 && sigma.is_finite()).then_some(MockKind::Noisy { sigma, seed })
            }
            _ => None,
        }
    }

    pub fn endpoint(&self) -> String {
        match self {
            MockKind::Oracle => "mock://oracle".into(),
            MockKind::MeanBaseline => "mock://mean_baseline".into(),
            MockKind::Noisy { sigma, seed } => format!("mock://noisy?sigma={sigma}&seed={seed}"),
        }
    }
}

/// What a mock may know beyond the prompt text.
#[derive(Debug, Clone, Copy)]
pub struct MockContext<'a> {
    pub task: &'static TaskSpec,
    pub params: QueryParams,
    /// Reference answer of this instance.
    pub truth: &'a Answer,
    /// Constant prediction for the mean baseline, already formatted.
    pub constant: &'a str,
    pub solve: &'a SolveConfig,
}

pub fn mock_answer(kind: MockKind, prompt: &str, ctx: &MockContext) -> String {
    let answer = match kind {
        MockKind::MeanBaseline => ctx.constant.to_string(),
        MockKind::Oracle => oracle(prompt, ctx).format(),
        MockKind::Noisy { sigma, seed } => {
            let clean = oracle(prompt, ctx);
            match clean {
                Answer::Float(_) | Answer::Integer(_) if sigma > 0.0 => {
                    let y = clean.as_f64().expect("numeric");
                    let z: f64 = StandardNormal.sample(RngStream::new(noise_seed(seed, prompt)).inner_mut());
                    let noisy = y + sigma * z * y.abs().max(1.0);
                    match ctx.task.answer_kind {
                        AnswerKind::Integer => Answer::Integer(noisy.round() as i64).format(),
                        _ => Answer::Float(noisy).format(),
                    }
                }
                other => other.format(),
            }
        }
    };
    format!("The final answer is: {answer}")
}

fn oracle(prompt: &str, ctx: &MockContext) -> Answer {
    let graph = graph_block(prompt).and_then(|block| parse(block).ok()).map(|p| p.graph);
    match graph {
        Some(g) => ground_truth_with(ctx.task, &g, &ctx.params, ctx.solve).unwrap_or_else(|_| ctx.truth.clone()),
        None => ctx.truth.clone(),
    }
}

fn noise_seed(seed: u64, prompt: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(prompt.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}
