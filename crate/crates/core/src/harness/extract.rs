use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::graph::NodeId;
use crate::tasks::{Answer, AnswerKind};

/// Places an answer is looked for, tried in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractRule {
    /// Content of the last `\boxed{...}`.
    Boxed,
    /// Value after the last "final answer is".
    FinalAnswer,
    /// Last bracketed list; list-valued kinds only.
    BracketedList,
    /// Last standalone number or boolean; scalar kinds only.
    LastScalar,
}

impl ExtractRule {
    pub const DEFAULT: [ExtractRule; 4] =
        [ExtractRule::Boxed, ExtractRule::FinalAnswer, ExtractRule::BracketedList, ExtractRule::LastScalar];
}

static NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:^|[^\w.])(-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)").expect("valid regex"));
static BOOL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(true|false)\b").expect("valid regex"));
static LOOSE_BOOL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(true|false|yes|no)\b").expect("valid regex"));
static FINAL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)final answer is\s*:?").expect("valid regex"));
static PAIR: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[(\[]\s*(\d+)\s*,\s*(\d+)\s*(?:,[^()\[\]]*)?[)\]]").expect("valid regex"));

pub fn extract_answer(raw: &str, kind: AnswerKind) -> Option<Answer> {
    extract_with(raw, kind, &ExtractRule::DEFAULT)
}

pub fn extract_with(raw: &str, kind: AnswerKind, rules: &[ExtractRule]) -> Option<Answer> {
    let listy = matches!(kind, AnswerKind::NodeSequence | AnswerKind::NodeSet | AnswerKind::EdgeSet);
    rules.iter().find_map(|rule| match rule {
        ExtractRule::Boxed => last_boxed(raw).and_then(|s| coerce(s, kind, true)),
        ExtractRule::FinalAnswer => {
            let at = FINAL.find_iter(raw).last()?.end();
            coerce(&raw[at..], kind, true)
        }
        ExtractRule::BracketedList if listy => last_list(raw).and_then(|s| coerce(s, kind, false)),
        ExtractRule::LastScalar if !listy => last_scalar(raw, kind),
        _ => None,
    })
}

fn last_boxed(raw: &str) -> Option<&str> {
    let start = raw.rfind("\\boxed{")? + "\\boxed{".len();
    let mut depth = 1;
    for (i, c) in raw[start..].char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&raw[start..start + i]);
                }
            }
            _ => {}
        }
    }
    None
}

/// Balanced `[...]` starting at byte `open`.
fn list_at(raw: &str, open: usize) -> Option<&str> {
    let mut depth = 0;
    for (i, c) in raw[open..].char_indices() {
        match c {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&raw[open..=open + i]);
                }
            }
            _ => {}
        }
    }
    None
}

fn first_list(raw: &str) -> Option<&str> {
    list_at(raw, raw.find('[')?)
}

/// Last outermost list: scan closing brackets from the end.
fn last_list(raw: &str) -> Option<&str> {
    let close = raw.rfind(']')?;
    let mut depth = 0;
    for (i, c) in raw[..=close].char_indices().rev() {
        match c {
            ']' => depth += 1,
            '[' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&raw[i..=close]);
                }
            }
            _ => {}
        }
    }
    None
}

fn number(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn numeric_answer(x: f64, kind: AnswerKind) -> Option<Answer> {
    match kind {
        AnswerKind::Float => Some(Answer::Float(x)),
        AnswerKind::Integer if x.fract() == 0.0 && x.abs() < 9.0e15 => Some(Answer::Integer(x as i64)),
        // kept as a float so it scores as a wrong but parsed number
        AnswerKind::Integer => Some(Answer::Float(x)),
        AnswerKind::Node if x.fract() == 0.0 && x >= 1.0 && x <= NodeId::MAX as f64 => Some(Answer::Node(x as NodeId)),
        _ => None,
    }
}

fn last_scalar(raw: &str, kind: AnswerKind) -> Option<Answer> {
    if kind == AnswerKind::Boolean {
        return BOOL.captures_iter(raw).last().and_then(|c| boolean(&c[1]));
    }
    let m = NUMBER.captures_iter(raw).last()?;
    numeric_answer(number(&m[1])?, kind)
}

fn boolean(word: &str) -> Option<Answer> {
    match word.to_ascii_lowercase().as_str() {
        "true" | "yes" => Some(Answer::Boolean(true)),
        "false" | "no" => Some(Answer::Boolean(false)),
        _ => None,
    }
}

fn node_list(list: &str) -> Option<Vec<NodeId>> {
    let inner = list.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|item| item.trim().parse::<NodeId>().ok().filter(|&u| u >= 1)).collect()
}

fn edge_list(list: &str) -> Option<Vec<(NodeId, NodeId)>> {
    let inner = list.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return Some(Vec::new());
    }
    let pairs: Vec<(NodeId, NodeId)> =
        PAIR.captures_iter(inner).filter_map(|c| Some((c[1].parse().ok()?, c[2].parse().ok()?))).collect();
    (!pairs.is_empty()).then_some(pairs)
}

/// Reads the first value of `kind` in `text`. `leading` fragments come
/// after an answer marker, so comma-separated nodes without brackets and
/// yes/no count as well.
fn coerce(text: &str, kind: AnswerKind, leading: bool) -> Option<Answer> {
    match kind {
        AnswerKind::Boolean => {
            let re = if leading { &*LOOSE_BOOL } else { &*BOOL };
            re.captures(text).and_then(|c| boolean(&c[1]))
        }
        AnswerKind::Integer | AnswerKind::Float | AnswerKind::Node => {
            let m = NUMBER.captures(text)?;
            numeric_answer(number(&m[1])?, kind)
        }
        AnswerKind::NodeSequence | AnswerKind::NodeSet => {
            let nodes = match first_list(text) {
                Some(list) => node_list(list)?,
                None if leading => {
                    let line = text.trim_start().lines().next()?.trim().trim_end_matches('.');
                    node_list(&format!("[{line}]"))?
                }
                None => return None,
            };
            Some(if kind == AnswerKind::NodeSet { Answer::node_set(nodes) } else { Answer::NodeSequence(nodes) })
        }
        AnswerKind::EdgeSet => edge_list(first_list(text)?).map(Answer::EdgeSet),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcript_examples() {
        assert_eq!(extract_answer("Therefore, the final answer is: 0.2.", AnswerKind::Float), Some(Answer::Float(0.2)));
        assert_eq!(
            extract_answer("the Estrada index is approximately: 54.24", AnswerKind::Float),
            Some(Answer::Float(54.24))
        );
        assert_eq!(
            extract_answer("[12, 1, 6, 9, 19]", AnswerKind::NodeSequence),
            Some(Answer::NodeSequence(vec![12, 1, 6, 9, 19]))
        );
    }

    #[test]
    fn precedence() {
        let raw = "The final answer is: 3. Actually \\boxed{4} and then 5";
        assert_eq!(extract_answer(raw, AnswerKind::Integer), Some(Answer::Integer(4)));
        let raw = "final answer is 7, final answer is: 8 then 9";
        assert_eq!(extract_answer(raw, AnswerKind::Integer), Some(Answer::Integer(8)));
        let raw = "Path [1, 2] is wrong; use [1, 3, 2].";
        assert_eq!(extract_answer(raw, AnswerKind::NodeSequence), Some(Answer::NodeSequence(vec![1, 3, 2])));
        assert_eq!(extract_answer("I think 3 then 12.5", AnswerKind::Float), Some(Answer::Float(12.5)));
        assert_eq!(
            extract_with("\\boxed{4} 5", AnswerKind::Integer, &[ExtractRule::LastScalar]),
            Some(Answer::Integer(5))
        );
    }

    #[test]
    fn kinds() {
        assert_eq!(extract_answer("The final answer is: True", AnswerKind::Boolean), Some(Answer::Boolean(true)));
        assert_eq!(extract_answer("final answer is: no", AnswerKind::Boolean), Some(Answer::Boolean(false)));
        assert_eq!(extract_answer("so it is False.", AnswerKind::Boolean), Some(Answer::Boolean(false)));
        assert_eq!(extract_answer("roughly 3.5 nodes", AnswerKind::Integer), Some(Answer::Float(3.5)));
        assert_eq!(extract_answer("value -1.5e-3", AnswerKind::Float), Some(Answer::Float(-1.5e-3)));
        assert_eq!(
            extract_answer("The final answer is: [(3, 1), (1, 2)]", AnswerKind::EdgeSet),
            Some(Answer::EdgeSet(vec![(3, 1), (1, 2)]))
        );
        assert_eq!(
            extract_answer("edges: [[1, 2], [2, 3]]", AnswerKind::EdgeSet),
            Some(Answer::EdgeSet(vec![(1, 2), (2, 3)]))
        );
        assert_eq!(
            extract_answer("The final answer is: [3, 1, 3]", AnswerKind::NodeSet),
            Some(Answer::NodeSet(vec![1, 3]))
        );
        assert_eq!(
            extract_answer("final answer is: 4, 2, 7.", AnswerKind::NodeSequence),
            Some(Answer::NodeSequence(vec![4, 2, 7]))
        );
        assert_eq!(extract_answer("final answer is: []", AnswerKind::EdgeSet), Some(Answer::EdgeSet(vec![])));
    }

    #[test]
    fn unparsed() {
        assert_eq!(extract_answer("I cannot tell.", AnswerKind::Float), None);
        assert_eq!(extract_answer("[node-1, node-2]", AnswerKind::NodeSequence), None);
        assert_eq!(extract_answer("maybe", AnswerKind::Boolean), None);
        assert_eq!(extract_answer("\\boxed{unclosed", AnswerKind::Integer), None);
    }
}
