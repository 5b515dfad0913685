use crate::serialize::{render, EncodingSpec, SerializeError};
use crate::tasks::TaskInstance;

const QUESTION: &str = "\n\nQuestion: ";

/// Task description, graph block, question and answer-format instruction,
/// separated by blank lines.
pub fn build_prompt(inst: &TaskInstance, spec: &EncodingSpec) -> Result<String, SerializeError> {
    let block = render(&inst.graph, spec)?;
    Ok(format!(
        "{}\n\n{}{QUESTION}{}\n\n{}",
        inst.task.description,
        block.text,
        inst.question_text(),
        inst.task.answer_kind.format_instruction()
    ))
}

/// The rendered graph block inside a prompt built by [`build_prompt`].
pub fn graph_block(prompt: &str) -> Option<&str> {
    let start = prompt.find("Here is a")?;
    let end = prompt.rfind(QUESTION)?;
    (start < end).then(|| &prompt[start..end])
}
