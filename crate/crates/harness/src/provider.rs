//! Completion providers decide the next tool call from a text context.

use std::io::Write;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolSpec {
    pub name: &'static str,
    pub description: &'static str,
}

pub const QUERY_TOOL: ToolSpec = ToolSpec {
    name: "query",
    description: "GET a knowledge plane path. Arguments: {\"path\": string}. Only paths listed in the frontier may be used.",
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tool", rename_all = "snake_case")]
pub enum Completion {
    Query { path: String },
    Final { answer: String },
}

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("context is not valid JSON: {0}")]
    BadContext(serde_json::Error),
    #[error("provider command failed: {0}")]
    Spawn(#[from] std::io::Error),
    #[error("provider exited with {status}: {stderr}")]
    Exit { status: i32, stderr: String },
    #[error("provider output is not a completion: {0}")]
    BadOutput(String),
}

pub trait CompletionProvider {
    fn complete(&mut self, context: &str, tools: &[ToolSpec]) -> Result<Completion, ProviderError>;
}

/// Deterministic provider: queries the head of the frontier and finishes
/// when it is empty.
#[derive(Debug, Default, Clone, Copy)]
pub struct ScriptedProvider;

impl CompletionProvider for ScriptedProvider {
    fn complete(&mut self, context: &str, _tools: &[ToolSpec]) -> Result<Completion, ProviderError> {
        let ctx: Value = serde_json::from_str(context).map_err(ProviderError::BadContext)?;
        Ok(match ctx["frontier"].get(0).and_then(|c| c["path"].as_str()) {
            Some(path) => Completion::Query {
                path: path.to_string(),
            },
            None => Completion::Final {
                answer: "frontier exhausted".to_string(),
            },
        })
    }
}

/// Runs a shell command per turn. The command reads
/// `{"context": <string>, "tools": [...]}` on stdin and prints one JSON
/// completion such as `{"tool": "query", "path": "/docs/ue"}` on stdout.
#[derive(Debug, Clone)]
pub struct ExternalProvider {
    pub command: String,
}

impl ExternalProvider {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
        }
    }
}

impl CompletionProvider for ExternalProvider {
    fn complete(&mut self, context: &str, tools: &[ToolSpec]) -> Result<Completion, ProviderError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()?;
        let input = json!({ "context": context, "tools": tools });
        {
            let mut stdin = child.stdin.take().expect("stdin is piped");
            serde_json::to_writer(&mut stdin, &input).map_err(std::io::Error::from)?;
            stdin.flush()?;
        }
        let out = child.wait_with_output()?;
        if !out.status.success() {
            return Err(ProviderError::Exit {
                status: out.status.code().unwrap_or(-1),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            });
        }
        let text = String::from_utf8_lossy(&out.stdout);
        let line = text
            .lines()
            .rev()
            .find(|l| !l.trim().is_empty())
            .unwrap_or_default();
        serde_json::from_str(line).map_err(|_| ProviderError::BadOutput(line.to_string()))
    }
}
