//! Issue ingestion: GitHub Issues REST API client and its offline JSON twin.
//!
//! Both sources produce the same `Issue` values through one mapping, so a
//! stub server serving file F and `load_issues_json(F)` are interchangeable.
//! Only the fields the model needs survive the boundary: number, title,
//! user.login, created_at, closed_at, labels[].name. Pull requests share the
//! issue number space and are retained as issues.

use std::collections::BTreeSet;
use std::path::Path;
use std::thread;
use std::time::Duration;

use chrono::{DateTime, FixedOffset};
use serde_json::Value;
use thiserror::Error;

use crate::linking::{classify_issue, LinkConfig};
use crate::model::Issue;

pub const DEFAULT_BASE_URL: &str = "https://api.github.com";
pub const DEFAULT_PAGE_SIZE: u32 = 100;

/// Fixed backoff before the single retry a 5xx response earns.
const RETRY_BACKOFF: Duration = Duration::from_secs(2);

#[derive(Debug, Error)]
pub enum IssueError {
    #[error("invalid issue source config: {0}")]
    Config(String),
    #[error("HTTP {status} fetching {url}")]
    Http { status: u16, url: String },
    #[error("rate limited; resets at epoch {reset}")]
    RateLimited { reset: String },
    #[error("transport error: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("issue record {index}: missing or invalid field {field:?}")]
    Schema { index: usize, field: &'static str },
    #[error("JSON parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where and how to fetch issues. The token is read from the environment
/// variable named here, never passed directly, so secrets stay out of
/// process lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IssueSourceConfig {
    pub base_url: String,
    pub repo: String,
    pub auth_token_env: Option<String>,
    pub page_size: u32,
}

impl IssueSourceConfig {
    pub fn new(repo: impl Into<String>) -> Self {
        IssueSourceConfig {
            base_url: DEFAULT_BASE_URL.to_owned(),
            repo: repo.into(),
            auth_token_env: None,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }

    pub fn validate(&self) -> Result<(), IssueError> {
        match self.repo.split_once('/') {
            Some((owner, name))
                if !owner.is_empty() && !name.is_empty() && !name.contains('/') => {}
            _ => {
                return Err(IssueError::Config(format!(
                    "repo must be \"owner/name\", got {:?}",
                    self.repo
                )))
            }
        }
        if self.page_size == 0 || self.page_size > 100 {
            return Err(IssueError::Config(format!(
                "page_size must be in 1..=100, got {}",
                self.page_size
            )));
        }
        Ok(())
    }
}

/// Fetches every issue (`state=all`), following RFC 5988 `Link` headers
/// until no `rel="next"` remains. Pagination is inherently sequential.
pub fn fetch_issues(config: &IssueSourceConfig) -> Result<Vec<Issue>, IssueError> {
    config.validate()?;
    let token = match &config.auth_token_env {
        Some(var) => Some(std::env::var(var).map_err(|_| {
            IssueError::Config(format!("auth token env var {var} is not set"))
        })?),
        None => None,
    };
    let client = reqwest::blocking::Client::builder()
        .user_agent("relprov")
        .build()?;

    let mut url = format!(
        "{}/repos/{}/issues?state=all&per_page={}&page=1",
        config.base_url.trim_end_matches('/'),
        config.repo,
        config.page_size
    );
    let mut issues = Vec::new();
    loop {
        let response = get_with_retry(&client, &url, token.as_deref())?;
        let status = response.status();
        if status.as_u16() == 403 && header(&response, "x-ratelimit-remaining").as_deref() == Some("0")
        {
            let reset = header(&response, "x-ratelimit-reset").unwrap_or_else(|| "unknown".to_owned());
            return Err(IssueError::RateLimited { reset });
        }
        if !status.is_success() {
            return Err(IssueError::Http {
                status: status.as_u16(),
                url,
            });
        }
        let next = header(&response, "link").and_then(|value| parse_link_next(&value));
        let body = response.text()?;
        issues.extend(parse_issues_json(&body)?);
        match next {
            Some(next_url) => url = next_url,
            None => break,
        }
    }
    Ok(issues)
}

fn header(response: &reqwest::blocking::Response, name: &str) -> Option<String> {
    response
        .headers()
        .get(name)
        .and_then(|v| v.to_str().ok())
        .map(str::to_owned)
}

fn get_with_retry(
    client: &reqwest::blocking::Client,
    url: &str,
    token: Option<&str>,
) -> Result<reqwest::blocking::Response, IssueError> {
    let send = || {
        let mut request = client.get(url);
        if let Some(token) = token {
            request = request.header("Authorization", format!("token {token}"));
        }
        request.send()
    };
    let response = send()?;
    if response.status().is_server_error() {
        thread::sleep(RETRY_BACKOFF);
        return Ok(send()?);
    }
    Ok(response)
}

/// Extracts the `rel="next"` target from an RFC 5988 `Link` header.
fn parse_link_next(value: &str) -> Option<String> {
    for part in value.split(',') {
        let mut segments = part.split(';');
        let target = segments.next()?.trim();
        let url = target.strip_prefix('<')?.strip_suffix('>')?;
        for param in segments {
            let param = param.trim();
            if param == "rel=\"next\"" || param == "rel=next" {
                return Some(url.to_owned());
            }
        }
    }
    None
}

/// Loads issues from a JSON file holding the same array schema the API
/// returns; the offline twin of `fetch_issues`.
pub fn load_issues_json(path: &Path) -> Result<Vec<Issue>, IssueError> {
    let text = std::fs::read_to_string(path)?;
    parse_issues_json(&text)
}

/// Parses a JSON array of issue records.
pub fn parse_issues_json(text: &str) -> Result<Vec<Issue>, IssueError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IssueError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let records = value.as_array().ok_or(IssueError::Parse {
        line: 1,
        message: "expected a JSON array of issue records".to_owned(),
    })?;
    records
        .iter()
        .enumerate()
        .map(|(index, record)| map_issue(record, index))
        .collect()
}

fn required_timestamp(
    record: &Value,
    index: usize,
    field: &'static str,
) -> Result<DateTime<FixedOffset>, IssueError> {
    record
        .get(field)
        .and_then(Value::as_str)
        .and_then(|s| DateTime::parse_from_rfc3339(s).ok())
        .ok_or(IssueError::Schema { index, field })
}

fn map_issue(record: &Value, index: usize) -> Result<Issue, IssueError> {
    let number = record
        .get("number")
        .and_then(Value::as_u64)
        .filter(|&n| n > 0)
        .ok_or(IssueError::Schema { index, field: "number" })?;
    let subject = record
        .get("title")
        .and_then(Value::as_str)
        .ok_or(IssueError::Schema { index, field: "title" })?
        .to_owned();
    // user can be null for deleted accounts
    let author = record
        .get("user")
        .and_then(|u| u.get("login"))
        .and_then(Value::as_str)
        .map(str::to_owned);
    let created_at = required_timestamp(record, index, "created_at")?;
    let closed_at = match record.get("closed_at") {
        None | Some(Value::Null) => None,
        Some(value) => Some(
            value
                .as_str()
                .and_then(|s| DateTime::parse_from_rfc3339(s).ok())
                .ok_or(IssueError::Schema { index, field: "closed_at" })?,
        ),
    };
    let mut labels = BTreeSet::new();
    if let Some(raw) = record.get("labels") {
        let list = raw
            .as_array()
            .ok_or(IssueError::Schema { index, field: "labels" })?;
        for entry in list {
            // the API sends label objects; plain strings are accepted too
            let name = entry
                .as_str()
                .or_else(|| entry.get("name").and_then(Value::as_str))
                .ok_or(IssueError::Schema { index, field: "labels" })?;
            labels.insert(name.to_owned());
        }
    }
    // Recomputed with the active config at graph build; the default pattern
    // gives loaded issues a sensible kind on their own.
    let kind = classify_issue(labels.iter().map(String::as_str), &LinkConfig::default());
    Ok(Issue {
        number,
        subject,
        author,
        created_at: Some(created_at),
        closed_at,
        labels,
        kind,
        placeholder: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IssueKind;

    #[test]
    fn empty_array_yields_no_issues() {
        assert_eq!(parse_issues_json("[]").unwrap(), vec![]);
    }

    #[test]
    fn maps_a_full_record() {
        let text = r#"[{
            "number": 1,
            "title": "Implements feature",
            "user": {"login": "me"},
            "created_at": "2015-01-01T09:00:00Z",
            "closed_at": null,
            "labels": []
        }]"#;
        let issues = parse_issues_json(text).unwrap();
        assert_eq!(issues.len(), 1);
        let issue = &issues[0];
        assert_eq!(issue.number, 1);
        assert_eq!(issue.subject, "Implements feature");
        assert_eq!(issue.author.as_deref(), Some("me"));
        assert!(issue.closed_at.is_none());
        assert_eq!(issue.kind, IssueKind::Feature);
        assert!(!issue.placeholder);
    }

    #[test]
    fn label_objects_and_strings_are_both_accepted() {
        let text = r#"[{
            "number": 2,
            "title": "crash",
            "user": null,
            "created_at": "2015-01-01T09:00:00Z",
            "closed_at": "2015-01-02T09:00:00Z",
            "labels": [{"name": "bug"}, "help wanted"]
        }]"#;
        let issue = &parse_issues_json(text).unwrap()[0];
        assert_eq!(
            issue.labels,
            BTreeSet::from(["bug".to_owned(), "help wanted".to_owned()])
        );
        assert_eq!(issue.kind, IssueKind::Bugfix);
        assert!(issue.author.is_none());
        assert!(issue.closed_at.unwrap() > issue.created_at.unwrap());
    }

    #[test]
    fn missing_number_is_a_schema_error() {
        let text = r#"[{"title": "x", "created_at": "2015-01-01T09:00:00Z"}]"#;
        let err = parse_issues_json(text).unwrap_err();
        assert!(matches!(err, IssueError::Schema { index: 0, field: "number" }), "{err:?}");
    }

    #[test]
    fn malformed_json_reports_the_line() {
        let err = parse_issues_json("[\n{\"number\": }\n]").unwrap_err();
        match err {
            IssueError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn top_level_object_is_rejected() {
        let err = parse_issues_json("{}").unwrap_err();
        assert!(matches!(err, IssueError::Parse { .. }));
    }

    #[test]
    fn link_header_next_is_extracted() {
        let value = "<https://api.github.com/repositories/1/issues?page=2>; rel=\"next\", \
                     <https://api.github.com/repositories/1/issues?page=3>; rel=\"last\"";
        assert_eq!(
            parse_link_next(value).as_deref(),
            Some("https://api.github.com/repositories/1/issues?page=2")
        );
        assert_eq!(parse_link_next("<https://x>; rel=\"last\""), None);
        assert_eq!(parse_link_next(""), None);
    }

    #[test]
    fn config_validation_catches_bad_repo_and_page_size() {
        assert!(IssueSourceConfig::new("owner/name").validate().is_ok());
        for repo in ["", "noslash", "a/b/c", "/name", "owner/"] {
            assert!(IssueSourceConfig::new(repo).validate().is_err(), "{repo:?}");
        }
        let mut config = IssueSourceConfig::new("owner/name");
        config.page_size = 0;
        assert!(config.validate().is_err());
        config.page_size = 101;
        assert!(config.validate().is_err());
    }
}
