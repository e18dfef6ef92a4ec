use std::io::Write;

use serde_json::{json, Value};
use special_monoids::Error;

use crate::Global;

pub const OK: u8 = 0;
pub const VERIFICATION_FAILED: u8 = 1;
pub const INPUT_ERROR: u8 = 2;
pub const BUDGET_EXHAUSTED: u8 = 3;

/// A primary artifact and the exit status it carries.
pub struct Artifact {
    pub text: String,
    pub status: u8,
    /// Extra diagnostics for stderr, e.g. unknown verdicts.
    pub notes: Vec<Value>,
}

impl Artifact {
    pub fn new(text: String, status: u8) -> Self {
        Artifact { text, status, notes: Vec::new() }
    }

    pub fn json(v: &Value, status: u8) -> Self {
        Artifact::new(pretty(v), status)
    }

    pub fn with_notes(mut self, notes: Vec<Value>) -> Self {
        self.notes = notes;
        self
    }
}

/// Sorted keys and a trailing newline, so output is byte-stable.
pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT_ERROR, kind: "input", message: message.into() }
    }

    pub fn to_json(&self) -> Value {
        json!({ "kind": self.kind, "message": self.message, "exit": self.code })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::BudgetExhausted { .. } | Error::UnitsNotCompleted | Error::NonCertifiedDelta(_) => {
                (BUDGET_EXHAUSTED, "budget")
            }
            Error::CompositeNotZero { .. } => (VERIFICATION_FAILED, "verification"),
            _ => (INPUT_ERROR, "input"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

pub fn read(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn write(g: &Global, text: &str) -> Result<(), Failure> {
    match &g.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn diagnostic(level: &str, body: &Value) {
    let line = json!({ "level": level, "diagnostic": body });
    eprintln!("{line}");
}
