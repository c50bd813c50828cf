//! Command-line front end: wires git/log ingestion, issue ingestion,
//! linking, release algebra, reporting and export together.
//!
//! Diagnostics go to stderr, payload to stdout (or `--output`). Exit codes:
//! 0 success, 1 unexpected or I/O failure, 2 ingestion or parse failure,
//! 3 configuration error, 4 unknown release tag, 5 empty changelog range.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use chrono::{DateTime, FixedOffset};
use clap::{Parser, Subcommand};
use relprov_core::gitlog::{
    git_log_command, parse_log_stream, parse_tag_dates_stream, tag_dates_command, CommandSpec,
    RawCommitRecord,
};
use relprov_core::{
    build_graph_with_tag_times, changelog, fetch_issues, load_issues_json, project_overview,
    release_report, render_changelog, render_overview, render_release_report, serialize_provn,
    to_dot, to_prov, ExportError, Issue, IssueError, IssueSourceConfig, LinkConfig, ReportError,
    RepoGraph,
};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "relprov",
    version,
    about = "Mines git history and issue data into release provenance reports"
)]
struct Cli {
    /// Git repository to mine (runs the git binary)
    #[arg(long, global = true, value_name = "PATH")]
    repo: Option<PathBuf>,

    /// Pre-captured git log stream in the record format (offline mode)
    #[arg(long, global = true, value_name = "PATH")]
    log_file: Option<PathBuf>,

    /// Issue export as a JSON array (offline mode)
    #[arg(long, global = true, value_name = "PATH")]
    issues_file: Option<PathBuf>,

    /// Issue tracker API URL, e.g. https://api.github.com/repos/owner/name
    #[arg(long, global = true, value_name = "URL")]
    issue_url: Option<String>,

    /// Override the release tag recognition pattern
    #[arg(long, global = true, value_name = "REGEX")]
    release_regex: Option<String>,

    /// Override the bug label pattern
    #[arg(long, global = true, value_name = "REGEX")]
    bug_label_regex: Option<String>,

    /// Override the issue reference pattern
    #[arg(long, global = true, value_name = "REGEX")]
    issue_ref_regex: Option<String>,

    /// Write the payload to this file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Config file with `section.key = value` lines
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project-wide summary: releases, commits, developers, linked issues
    Overview,
    /// Detailed report for one release tag
    Release {
        /// Release tag name, e.g. 3.2.1
        tag: String,
    },
    /// Markdown changelog over a release range (from exclusive, to inclusive)
    Changelog {
        /// Oldest release to exclude
        #[arg(long, value_name = "TAG")]
        from: Option<String>,
        /// Newest release to include
        #[arg(long, value_name = "TAG")]
        to: Option<String>,
    },
    /// Serialize the provenance graph
    Export {
        /// Output format: provn or dot
        #[arg(long, value_name = "FORMAT")]
        format: String,
        /// Restrict the export to one release neighborhood
        #[arg(long, value_name = "TAG")]
        scope: Option<String>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Ingest(String),
    #[error("unknown release tag {0:?}")]
    UnknownTag(String),
    #[error("no releases fall inside the requested range")]
    EmptyRange,
    #[error("{0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Internal(_) => 1,
            CliError::Ingest(_) => 2,
            CliError::Config(_) => 3,
            CliError::UnknownTag(_) => 4,
            CliError::EmptyRange => 5,
        }
    }
}

impl From<ReportError> for CliError {
    fn from(err: ReportError) -> Self {
        match err {
            ReportError::UnknownTag(tag) => CliError::UnknownTag(tag),
            ReportError::EmptyRange => CliError::EmptyRange,
            ReportError::InvalidRange { from, to } => CliError::Config(format!(
                "invalid range: {from} does not precede {to}"
            )),
        }
    }
}

impl From<ExportError> for CliError {
    fn from(err: ExportError) -> Self {
        match err {
            ExportError::UnknownTag(tag) => CliError::UnknownTag(tag),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<IssueError> for CliError {
    fn from(err: IssueError) -> Self {
        match err {
            IssueError::Config(message) => CliError::Config(message),
            other => CliError::Ingest(other.to_string()),
        }
    }
}

/// Values read from the config file; flags override each one.
#[derive(Debug, Default)]
struct FileConfig {
    issue_ref_pattern: Option<String>,
    bug_label_pattern: Option<String>,
    release_tag_pattern: Option<String>,
    base_url: Option<String>,
    repo: Option<String>,
    auth_token_env: Option<String>,
    page_size: Option<u32>,
}

fn parse_config_file(text: &str) -> Result<FileConfig, CliError> {
    let mut config = FileConfig::default();
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key = value", index + 1))
        })?;
        let key = key.trim();
        let value = value.trim().to_owned();
        match key {
            "link.issue_ref_pattern" => config.issue_ref_pattern = Some(value),
            "link.bug_label_pattern" => config.bug_label_pattern = Some(value),
            "link.release_tag_pattern" => config.release_tag_pattern = Some(value),
            "issue_source.base_url" => config.base_url = Some(value),
            "issue_source.repo" => config.repo = Some(value),
            "issue_source.auth_token_env" => config.auth_token_env = Some(value),
            "issue_source.page_size" => {
                let size = value.parse().map_err(|_| {
                    CliError::Config(format!(
                        "config line {}: page_size must be a number, got {value:?}",
                        index + 1
                    ))
                })?;
                config.page_size = Some(size);
            }
            other => {
                return Err(CliError::Config(format!(
                    "config line {}: unknown key {other:?}",
                    index + 1
                )))
            }
        }
    }
    Ok(config)
}

/// Splits `<base>/repos/<owner>/<name>` (optionally ending in `/issues`)
/// into the API base URL and the `owner/name` pair.
fn parse_issue_url(url: &str) -> Result<(String, String), CliError> {
    let trimmed = url.trim_end_matches('/');
    let trimmed = trimmed.strip_suffix("/issues").unwrap_or(trimmed);
    let (base, repo) = trimmed.split_once("/repos/").ok_or_else(|| {
        CliError::Config(format!(
            "issue URL must look like <base>/repos/<owner>/<name>, got {url:?}"
        ))
    })?;
    if base.is_empty() || repo.split('/').count() != 2 || repo.split('/').any(str::is_empty) {
        return Err(CliError::Config(format!(
            "issue URL must look like <base>/repos/<owner>/<name>, got {url:?}"
        )));
    }
    Ok((base.to_owned(), repo.to_owned()))
}

fn build_link_config(cli: &Cli, file: &FileConfig) -> Result<LinkConfig, CliError> {
    let defaults = LinkConfig::default();
    let pick = |flag: &Option<String>, file_value: &Option<String>, default: &str| {
        flag.clone()
            .or_else(|| file_value.clone())
            .unwrap_or_else(|| default.to_owned())
    };
    let issue_ref = pick(
        &cli.issue_ref_regex,
        &file.issue_ref_pattern,
        defaults.issue_ref_pattern(),
    );
    let bug_label = pick(
        &cli.bug_label_regex,
        &file.bug_label_pattern,
        defaults.bug_label_pattern(),
    );
    let release_tag = pick(
        &cli.release_regex,
        &file.release_tag_pattern,
        defaults.release_tag_pattern(),
    );
    LinkConfig::new(&issue_ref, &bug_label, &release_tag)
        .map_err(|err| CliError::Config(err.to_string()))
}

fn run_command_spec(spec: &CommandSpec) -> Result<Vec<u8>, CliError> {
    let output = Process::new(&spec.program)
        .args(&spec.args)
        .current_dir(&spec.cwd)
        .output()
        .map_err(|err| CliError::Ingest(format!("failed to run {}: {err}", spec.program)))?;
    if !output.status.success() {
        return Err(CliError::Ingest(format!(
            "{} exited with {}: {}",
            spec.program,
            output.status,
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    Ok(output.stdout)
}

type Ingested = (Vec<RawCommitRecord>, BTreeMap<String, DateTime<FixedOffset>>);

fn ingest_history(cli: &Cli) -> Result<Ingested, CliError> {
    match (&cli.repo, &cli.log_file) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "pass exactly one of --repo and --log-file, not both".to_owned(),
        )),
        (None, None) => Err(CliError::Config(
            "pass exactly one of --repo and --log-file".to_owned(),
        )),
        (Some(repo), None) => {
            let log = run_command_spec(&git_log_command(repo))?;
            let tags = run_command_spec(&tag_dates_command(repo))?;
            let records =
                parse_log_stream(&log).map_err(|err| CliError::Ingest(err.to_string()))?;
            let tag_times = parse_tag_dates_stream(&tags)
                .map_err(|err| CliError::Ingest(err.to_string()))?;
            Ok((records, tag_times))
        }
        (None, Some(path)) => {
            let log = std::fs::read(path).map_err(|err| {
                CliError::Ingest(format!("cannot read log file {}: {err}", path.display()))
            })?;
            let records =
                parse_log_stream(&log).map_err(|err| CliError::Ingest(err.to_string()))?;
            Ok((records, BTreeMap::new()))
        }
    }
}

fn ingest_issues(cli: &Cli, file: &FileConfig) -> Result<Vec<Issue>, CliError> {
    if cli.issues_file.is_some() && cli.issue_url.is_some() {
        return Err(CliError::Config(
            "pass at most one of --issues-file and --issue-url".to_owned(),
        ));
    }
    if let Some(path) = &cli.issues_file {
        return Ok(load_issues_json(path)?);
    }
    let source = match &cli.issue_url {
        Some(url) => {
            let (base_url, repo) = parse_issue_url(url)?;
            let mut source = IssueSourceConfig::new(repo);
            source.base_url = base_url;
            Some(source)
        }
        None => file.repo.clone().map(|repo| {
            let mut source = IssueSourceConfig::new(repo);
            if let Some(base) = &file.base_url {
                source.base_url = base.clone();
            }
            source
        }),
    };
    match source {
        Some(mut source) => {
            if source.auth_token_env.is_none() {
                source.auth_token_env = file.auth_token_env.clone();
            }
            if let Some(size) = file.page_size {
                source.page_size = size;
            }
            Ok(fetch_issues(&source)?)
        }
        None => Ok(Vec::new()),
    }
}

fn render_command(graph: &RepoGraph, command: &Command) -> Result<String, CliError> {
    match command {
        Command::Overview => Ok(render_overview(&project_overview(graph))),
        Command::Release { tag } => Ok(render_release_report(&release_report(graph, tag)?)),
        Command::Changelog { from, to } => Ok(render_changelog(&changelog(
            graph,
            from.as_deref(),
            to.as_deref(),
        )?)),
        Command::Export { format, scope } => match format.as_str() {
            "provn" => Ok(serialize_provn(&to_prov(graph, scope.as_deref())?)?),
            "dot" => Ok(to_dot(graph, scope.as_deref())?),
            other => Err(CliError::Config(format!(
                "unknown export format {other:?}; expected provn or dot"
            ))),
        },
    }
}

fn emit(payload: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, payload)?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file_config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|err| {
                CliError::Config(format!("cannot read config file {}: {err}", path.display()))
            })?;
            parse_config_file(&text)?
        }
        None => FileConfig::default(),
    };
    let link = build_link_config(cli, &file_config)?;
    let (records, tag_times) = ingest_history(cli)?;
    let issues = ingest_issues(cli, &file_config)?;
    let graph = build_graph_with_tag_times(records, issues, &tag_times, &link)
        .map_err(|err| CliError::Ingest(err.to_string()))?;
    let payload = render_command(&graph, &cli.command)?;
    emit(&payload, cli.output.as_deref())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trips_every_key() {
        let text = "\
# comment line
link.issue_ref_pattern = ^.*JIRA-[0-9]+.*
link.bug_label_pattern = ^defect.*$

issue_source.base_url = https://ghe.local/api/v3
issue_source.repo = team/product
issue_source.auth_token_env = GH_TOKEN
issue_source.page_size = 50
";
        let config = parse_config_file(text).unwrap();
        assert_eq!(config.issue_ref_pattern.as_deref(), Some("^.*JIRA-[0-9]+.*"));
        assert_eq!(config.bug_label_pattern.as_deref(), Some("^defect.*$"));
        assert_eq!(config.release_tag_pattern, None);
        assert_eq!(config.base_url.as_deref(), Some("https://ghe.local/api/v3"));
        assert_eq!(config.repo.as_deref(), Some("team/product"));
        assert_eq!(config.auth_token_env.as_deref(), Some("GH_TOKEN"));
        assert_eq!(config.page_size, Some(50));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let err = parse_config_file("link.unknown = x").unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn config_line_without_equals_is_rejected() {
        assert!(matches!(
            parse_config_file("just some words"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn bad_page_size_is_rejected() {
        assert!(matches!(
            parse_config_file("issue_source.page_size = lots"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn issue_url_splits_into_base_and_repo() {
        let (base, repo) =
            parse_issue_url("https://api.github.com/repos/octo/demo").unwrap();
        assert_eq!(base, "https://api.github.com");
        assert_eq!(repo, "octo/demo");
        let (base, repo) =
            parse_issue_url("https://ghe.local/api/v3/repos/team/product/issues/").unwrap();
        assert_eq!(base, "https://ghe.local/api/v3");
        assert_eq!(repo, "team/product");
    }

    #[test]
    fn malformed_issue_urls_are_rejected() {
        for url in [
            "https://api.github.com/octo/demo",
            "https://api.github.com/repos/justowner",
            "/repos/a/b",
            "https://x/repos//b",
        ] {
            assert!(parse_issue_url(url).is_err(), "url {url:?}");
        }
    }

    #[test]
    fn exit_codes_are_stable() {
        assert_eq!(CliError::Internal("x".into()).exit_code(), 1);
        assert_eq!(CliError::Ingest("x".into()).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 3);
        assert_eq!(CliError::UnknownTag("x".into()).exit_code(), 4);
        assert_eq!(CliError::EmptyRange.exit_code(), 5);
    }

    #[test]
    fn report_errors_map_to_documented_exits() {
        let unknown: CliError = ReportError::UnknownTag("x".into()).into();
        assert_eq!(unknown.exit_code(), 4);
        let empty: CliError = ReportError::EmptyRange.into();
        assert_eq!(empty.exit_code(), 5);
        let reversed: CliError = ReportError::InvalidRange {
            from: "2.0.0".into(),
            to: "1.0.0".into(),
        }
        .into();
        assert_eq!(reversed.exit_code(), 3);
    }
}
