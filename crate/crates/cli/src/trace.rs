//! Trace input: files, standard input, or inline integers on the command line.
//!
//! Files hold integers separated by whitespace, normally one per line. `#`
//! starts a comment and blank lines are ignored.

use std::fs;
use std::io::{self, Read};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{source_name}:{line}: expected an integer, found {token:?}")]
    Parse {
        source_name: String,
        line: usize,
        token: String,
    },
    #[error("{source_name}: {err}")]
    Io { source_name: String, err: io::Error },
    #[error("expected a single trace, got {0} arguments that are not all integers")]
    Ambiguous(usize),
}

/// A parsed trace together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub path: String,
    pub values: Vec<i64>,
}

pub fn parse_trace(text: &str, source_name: &str) -> Result<Vec<i64>, TraceError> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let value = token.parse::<i64>().map_err(|_| TraceError::Parse {
                source_name: source_name.to_string(),
                line: idx + 1,
                token: token.to_string(),
            })?;
            values.push(value);
        }
    }
    Ok(values)
}

/// Whitespace-separated integers given directly as an argument.
fn inline_values(arg: &str) -> Option<Vec<i64>> {
    let tokens: Vec<&str> = arg.split_whitespace().collect();
    if tokens.is_empty() {
        return None;
    }
    tokens.iter().map(|t| t.parse().ok()).collect()
}

/// Resolves one argument: `-` is standard input, an integer list is used
/// inline, anything else is a file path.
pub fn load_one(arg: &str) -> Result<TraceFile, TraceError> {
    if let Some(values) = inline_values(arg) {
        return Ok(TraceFile {
            path: "<inline>".into(),
            values,
        });
    }
    let (name, text) = if arg == "-" {
        let mut text = String::new();
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|err| TraceError::Io {
                source_name: "<stdin>".into(),
                err,
            })?;
        ("<stdin>".to_string(), text)
    } else {
        let text = fs::read_to_string(arg).map_err(|err| TraceError::Io {
            source_name: arg.into(),
            err,
        })?;
        (arg.to_string(), text)
    };
    let values = parse_trace(&text, &name)?;
    Ok(TraceFile { path: name, values })
}

/// Resolves the positional arguments of a single-trace command. Several
/// arguments are accepted only when they are all integers.
pub fn load_single(args: &[String]) -> Result<TraceFile, TraceError> {
    match args {
        [] => load_one("-"),
        [one] => load_one(one),
        many => {
            let values: Option<Vec<i64>> = many.iter().map(|a| a.trim().parse().ok()).collect();
            values
                .map(|values| TraceFile {
                    path: "<inline>".into(),
                    values,
                })
                .ok_or(TraceError::Ambiguous(many.len()))
        }
    }
}
