//! Raw commit ingestion: `git log` command construction and wire-format
//! parsing.
//!
//! Records travel as 10 fields separated by the unit separator byte (0x1F)
//! and terminated by the record separator byte (0x1E). Commit messages carry
//! newlines, so line-oriented formats are out; the control bytes never occur
//! in real commit metadata. With `--pretty=format:` git additionally inserts
//! a plain `\n` between records, which the parser strips from the front of
//! each chunk.
//!
//! Parsing is fail-fast: a record with the wrong field count or an
//! unparseable timestamp aborts with its position instead of resynchronizing,
//! so record counts stay trustworthy.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, FixedOffset};
use thiserror::Error;

/// `git log` pretty format emitting the 10 record fields:
/// id, parents, author name/email/date, committer name/email/date,
/// decorations, raw body.
pub const RECORD_FORMAT: &str =
    "%H%x1f%P%x1f%an%x1f%ae%x1f%aI%x1f%cn%x1f%ce%x1f%cI%x1f%D%x1f%B%x1e";

/// `git for-each-ref` format for the tag-date pass. Note that for-each-ref
/// spells hex escapes `%1f`, unlike the `%x1f` convention of `git log`.
pub const TAG_DATE_FORMAT: &str = "%(refname:short)%1f%(taggerdate:iso-strict)%1e";

const FIELDS_PER_RECORD: usize = 10;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("malformed record {index}: expected {expected} fields, found {found}")]
    MalformedRecord {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("record {index}: unterminated trailing record (missing 0x1E)")]
    UnterminatedRecord { index: usize },
    #[error("record {index}: {field} is not an ISO-8601 timestamp: {value:?}")]
    BadTimestamp {
        index: usize,
        field: &'static str,
        value: String,
    },
}

/// One commit as it crosses the wire; all fields still strings. Timestamps
/// are validated during parsing but kept in their original form so offsets
/// survive verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCommitRecord {
    pub id: String,
    pub parent_ids: Vec<String>,
    pub author_name: String,
    pub author_email: String,
    pub author_time: String,
    pub committer_name: String,
    pub committer_email: String,
    pub commit_time: String,
    pub decorations: String,
    pub message: String,
}

/// A subprocess invocation, described rather than executed so the parser
/// stays testable without a git binary. Callers run it themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandSpec {
    pub program: String,
    pub args: Vec<String>,
    pub cwd: PathBuf,
}

impl fmt::Display for CommandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.program)?;
        for arg in &self.args {
            write!(f, " {arg}")?;
        }
        Ok(())
    }
}

/// The exact `git log` invocation that produces the wire format.
pub fn git_log_command(repo_path: &Path) -> CommandSpec {
    CommandSpec {
        program: "git".to_owned(),
        args: vec![
            "log".to_owned(),
            "--reverse".to_owned(),
            "--all".to_owned(),
            "--date=iso-strict".to_owned(),
            format!("--pretty=format:{RECORD_FORMAT}"),
        ],
        cwd: repo_path.to_owned(),
    }
}

/// The `git for-each-ref` invocation that yields tagger dates for annotated
/// tags (lightweight tags produce an empty date field).
pub fn tag_dates_command(repo_path: &Path) -> CommandSpec {
    CommandSpec {
        program: "git".to_owned(),
        args: vec![
            "for-each-ref".to_owned(),
            "refs/tags".to_owned(),
            format!("--format={TAG_DATE_FORMAT}"),
        ],
        cwd: repo_path.to_owned(),
    }
}

/// Splits a stream into record chunks. Trailing bytes after the last 0x1E
/// must be whitespace (git emits nothing; editors may add a final newline).
fn record_chunks(stream: &[u8]) -> Result<Vec<&[u8]>, LogError> {
    let mut chunks: Vec<&[u8]> = stream.split(|&b| b == 0x1E).collect();
    let trailer = chunks.pop().unwrap_or(&[]);
    if !trailer.iter().all(u8::is_ascii_whitespace) {
        return Err(LogError::UnterminatedRecord { index: chunks.len() });
    }
    Ok(chunks)
}

/// Strips the inter-record newline `--pretty=format:` inserts before every
/// record but the first.
fn strip_leading_newlines(chunk: &[u8]) -> &[u8] {
    let start = chunk
        .iter()
        .position(|&b| b != b'\n' && b != b'\r')
        .unwrap_or(chunk.len());
    &chunk[start..]
}

fn split_fields(chunk: &[u8], index: usize, expected: usize) -> Result<Vec<String>, LogError> {
    let fields: Vec<String> = strip_leading_newlines(chunk)
        .split(|&b| b == 0x1F)
        .map(|f| String::from_utf8_lossy(f).into_owned())
        .collect();
    if fields.len() != expected {
        return Err(LogError::MalformedRecord {
            index,
            expected,
            found: fields.len(),
        });
    }
    Ok(fields)
}

fn check_timestamp(index: usize, field: &'static str, value: &str) -> Result<(), LogError> {
    DateTime::parse_from_rfc3339(value)
        .map(|_| ())
        .map_err(|_| LogError::BadTimestamp {
            index,
            field,
            value: value.to_owned(),
        })
}

/// Parses a full log stream into records, preserving order. Record count
/// equals the number of 0x1E separators in the stream.
pub fn parse_log_stream(stream: &[u8]) -> Result<Vec<RawCommitRecord>, LogError> {
    let chunks = record_chunks(stream)?;
    let mut records = Vec::with_capacity(chunks.len());
    for (index, chunk) in chunks.into_iter().enumerate() {
        let mut fields = split_fields(chunk, index, FIELDS_PER_RECORD)?.into_iter();
        let mut next = || fields.next().expect("field count checked");
        let record = RawCommitRecord {
            id: next(),
            parent_ids: next().split(' ').filter(|p| !p.is_empty()).map(str::to_owned).collect(),
            author_name: next(),
            author_email: next(),
            author_time: next(),
            committer_name: next(),
            committer_email: next(),
            commit_time: next(),
            decorations: next(),
            message: next(),
        };
        check_timestamp(index, "author_time", &record.author_time)?;
        check_timestamp(index, "commit_time", &record.commit_time)?;
        records.push(record);
    }
    Ok(records)
}

/// Parses the tag-date stream into `tag name → tagger date`. Lightweight
/// tags (empty date field) are omitted; their release date falls back to the
/// head commit's time downstream.
pub fn parse_tag_dates_stream(
    stream: &[u8],
) -> Result<BTreeMap<String, DateTime<FixedOffset>>, LogError> {
    let chunks = record_chunks(stream)?;
    let mut dates = BTreeMap::new();
    for (index, chunk) in chunks.into_iter().enumerate() {
        let mut fields = split_fields(chunk, index, 2)?.into_iter();
        let name = fields.next().expect("field count checked");
        let raw_date = fields.next().expect("field count checked");
        if raw_date.is_empty() {
            continue;
        }
        let date = DateTime::parse_from_rfc3339(&raw_date).map_err(|_| LogError::BadTimestamp {
            index,
            field: "taggerdate",
            value: raw_date.clone(),
        })?;
        dates.insert(name, date);
    }
    Ok(dates)
}

/// Tag names from a `%D` decoration string; branch refs and HEAD markers are
/// dropped.
pub fn parse_decorations(raw: &str) -> BTreeSet<String> {
    raw.split(',')
        .filter_map(|part| part.trim().strip_prefix("tag: "))
        .filter(|name| !name.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Inverse of `parse_log_stream` for building fixtures and round-trip tests.
/// Faithful as long as non-message fields carry no 0x1F/0x1E bytes and the id
/// does not start with a newline.
pub fn serialize_records(records: &[RawCommitRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        let parents = r.parent_ids.join(" ");
        let fields = [
            r.id.as_str(),
            parents.as_str(),
            r.author_name.as_str(),
            r.author_email.as_str(),
            r.author_time.as_str(),
            r.committer_name.as_str(),
            r.committer_email.as_str(),
            r.commit_time.as_str(),
            r.decorations.as_str(),
            r.message.as_str(),
        ];
        for (i, field) in fields.iter().enumerate() {
            if i > 0 {
                out.push(0x1F);
            }
            out.extend_from_slice(field.as_bytes());
        }
        out.push(0x1E);
    }
    out
}
