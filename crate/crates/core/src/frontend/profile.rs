//! Loop execution-count profiles: one `loop_id count` pair per line,
//! `#` starts a comment.

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("profile line {line}: {message}")]
pub struct ProfileError {
    pub line: usize,
    pub message: String,
}

pub fn parse_profile(text: &str) -> Result<BTreeMap<usize, u64>, ProfileError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| ProfileError {
            line: i + 1,
            message,
        };
        let mut parts = line.split_whitespace();
        let (Some(id), Some(count), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `loop_id count`, got `{line}`")));
        };
        let id: usize = id.parse().map_err(|_| err(format!("bad loop id `{id}`")))?;
        let count: u64 = count
            .parse()
            .map_err(|_| err(format!("bad count `{count}`")))?;
        if out.insert(id, count).is_some() {
            return Err(err(format!("loop {id} listed twice")));
        }
    }
    Ok(out)
}
