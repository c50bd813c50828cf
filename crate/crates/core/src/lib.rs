//! Mines git history and issue-tracker data into a release provenance graph.
//!
//! The pipeline: ingest raw commit records ([`gitlog`]) and issues
//! ([`issues`]), link them ([`linking`]), build the immutable [`model::RepoGraph`],
//! then query it with the release set algebra ([`algebra`]) and render
//! reports ([`report`]) or provenance exports ([`export`]).

pub mod algebra;
pub mod export;
pub mod gitlog;
pub mod issues;
pub mod linking;
pub mod model;
pub mod report;
pub mod version;

pub use algebra::{CommitSet, IssueSet, QueryError, TagSet};
pub use export::{serialize_provn, to_dot, to_prov, ExportError, ProvDocument, QualifiedName, Statement};
pub use issues::{fetch_issues, load_issues_json, parse_issues_json, IssueError, IssueSourceConfig};
pub use linking::LinkConfig;
pub use model::{
    build_graph, build_graph_with_tag_times, BuildError, Commit, CommitId, Developer, Issue,
    IssueKind, ReleaseTag, RepoGraph,
};
pub use report::{
    changelog, project_overview, release_report, render_changelog, render_overview,
    render_release_report, Changelog, ChangelogEntry, ProjectOverview, ReleaseIssueLine,
    ReleaseReport, ReportError,
};
pub use version::{parse_semver, SemVer};
