//! User-facing reports: project overview, per-release information, and the
//! markdown changelog. Renderers are deterministic: identical graphs produce
//! byte-identical text.

use std::collections::BTreeMap;

use chrono::{DateTime, FixedOffset};
use thiserror::Error;

use crate::algebra::QueryError;
use crate::model::{Developer, IssueKind, ReleaseTag, RepoGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown release tag {0:?}")]
    UnknownTag(String),
    #[error("no releases fall in the requested range")]
    EmptyRange,
    #[error("invalid range: {from:?} does not precede {to:?}")]
    InvalidRange { from: String, to: String },
}

impl From<QueryError> for ReportError {
    fn from(err: QueryError) -> Self {
        match err {
            QueryError::UnknownTag(name) | QueryError::UnknownCommit(name) => {
                ReportError::UnknownTag(name)
            }
        }
    }
}

/// Timestamps render with their original offset, never normalized.
pub(crate) fn format_timestamp(t: &DateTime<FixedOffset>) -> String {
    t.format("%Y-%m-%d %H:%M:%S%:z").to_string()
}

/// Total order used everywhere a "latest" release is needed: version
/// precedence, then release time, then name.
fn release_order(a: &ReleaseTag, b: &ReleaseTag) -> std::cmp::Ordering {
    a.version
        .cmp(&b.version)
        .then_with(|| a.time.cmp(&b.time))
        .then_with(|| a.name.cmp(&b.name))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectOverview {
    /// None when the project has no release tags; rendering flags this.
    pub last_release: Option<String>,
    pub release_count: usize,
    pub commit_count: usize,
    pub developer_count: usize,
    /// Issues referenced by at least one commit; tracker issues nobody
    /// references do not count.
    pub linked_issue_count: usize,
    /// `Name <email>`, ascending by each developer's first authored commit
    /// time (first committed time for committer-only identities).
    pub developers: Vec<String>,
}

pub fn project_overview(graph: &RepoGraph) -> ProjectOverview {
    let last_release = graph
        .releases()
        .max_by(|a, b| release_order(a, b))
        .map(|r| r.name.clone());

    let mut first_authored: BTreeMap<String, DateTime<FixedOffset>> = BTreeMap::new();
    let mut first_committed: BTreeMap<String, DateTime<FixedOffset>> = BTreeMap::new();
    let record = |map: &mut BTreeMap<String, DateTime<FixedOffset>>,
                      dev: &Developer,
                      time: DateTime<FixedOffset>| {
        map.entry(dev.display())
            .and_modify(|t| {
                if time < *t {
                    *t = time;
                }
            })
            .or_insert(time);
    };
    for commit in graph.commits() {
        record(&mut first_authored, &commit.author, commit.author_time);
        record(&mut first_committed, &commit.committer, commit.commit_time);
    }
    let mut developers: Vec<(DateTime<FixedOffset>, String)> = graph
        .developers()
        .map(|dev| {
            let display = dev.display();
            let time = first_authored
                .get(&display)
                .or_else(|| first_committed.get(&display))
                .copied()
                .expect("every developer appears in some commit");
            (time, display)
        })
        .collect();
    developers.sort();

    let linked_issue_count = graph
        .issues()
        .filter(|issue| graph.commits().any(|c| c.issue_refs.contains(&issue.number)))
        .count();

    ProjectOverview {
        last_release,
        release_count: graph.release_count(),
        commit_count: graph.commit_count(),
        developer_count: graph.developer_count(),
        linked_issue_count,
        developers: developers.into_iter().map(|(_, d)| d).collect(),
    }
}

pub fn render_overview(overview: &ProjectOverview) -> String {
    let mut out = String::from("Project Overview\n");
    match &overview.last_release {
        Some(last) => out.push_str(&format!(
            "- {} is the last of {} releases\n",
            last, overview.release_count
        )),
        None => out.push_str("- no releases found\n"),
    }
    out.push_str(&format!(
        "- {} commits made by {} developers\n",
        overview.commit_count, overview.developer_count
    ));
    out.push_str(&format!("- {} issues linked\n", overview.linked_issue_count));
    out.push_str("\nDevelopers\n");
    for dev in &overview.developers {
        out.push_str(&format!("- {dev}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseIssueLine {
    pub number: u64,
    pub subject: String,
    pub kind: IssueKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseReport {
    pub tag: String,
    /// Version-descending.
    pub base_releases: Vec<String>,
    pub date: DateTime<FixedOffset>,
    /// |CR|: commits delivered exclusively by this release.
    pub commit_count: usize,
    /// Authors of CR commits, ascending by first authored commit within CR.
    pub authors: Vec<String>,
    /// IR entries, number-descending.
    pub issues: Vec<ReleaseIssueLine>,
}

fn sort_names_by_version_desc(graph: &RepoGraph, names: Vec<String>) -> Vec<String> {
    let mut releases: Vec<&ReleaseTag> = names
        .iter()
        .map(|n| graph.release(n).expect("names come from the graph"))
        .collect();
    releases.sort_by(|a, b| release_order(b, a));
    releases.into_iter().map(|r| r.name.clone()).collect()
}

pub fn release_report(graph: &RepoGraph, tag: &str) -> Result<ReleaseReport, ReportError> {
    let release = graph
        .release(tag)
        .ok_or_else(|| ReportError::UnknownTag(tag.to_owned()))?;
    let cr = graph.commits_released(tag)?;
    let base_releases =
        sort_names_by_version_desc(graph, graph.base_releases(tag)?.into_iter().collect());

    let mut first_in_cr: BTreeMap<String, DateTime<FixedOffset>> = BTreeMap::new();
    for id in cr.iter() {
        let commit = graph.commit(id).expect("CR members exist");
        first_in_cr
            .entry(commit.author.display())
            .and_modify(|t| {
                if commit.author_time < *t {
                    *t = commit.author_time;
                }
            })
            .or_insert(commit.author_time);
    }
    let mut authors: Vec<(DateTime<FixedOffset>, String)> =
        first_in_cr.into_iter().map(|(d, t)| (t, d)).collect();
    authors.sort();

    let mut issues: Vec<ReleaseIssueLine> = graph
        .issues_released(tag)?
        .into_iter()
        .map(|number| {
            let issue = graph.issue(number).expect("IR members exist");
            ReleaseIssueLine {
                number,
                subject: issue.subject.clone(),
                kind: issue.kind,
            }
        })
        .collect();
    issues.sort_by(|a, b| b.number.cmp(&a.number));

    Ok(ReleaseReport {
        tag: release.name.clone(),
        base_releases,
        date: release.time,
        commit_count: cr.len(),
        authors: authors.into_iter().map(|(_, d)| d).collect(),
        issues,
    })
}

pub fn render_release_report(report: &ReleaseReport) -> String {
    let mut out = format!("Information about release {}\n", report.tag);
    out.push_str("Based on:");
    for base in &report.base_releases {
        out.push(' ');
        out.push_str(base);
    }
    out.push('\n');
    out.push_str(&format!("Date: {}\n", format_timestamp(&report.date)));
    out.push_str(&format!("Commits: {}\n", report.commit_count));
    out.push_str("Authors:\n");
    for author in &report.authors {
        out.push_str(&format!("- {author}\n"));
    }
    out.push_str("\nIssues:\n");
    for issue in &report.issues {
        out.push_str(&format!("- {}: {}\n", issue.number, issue.subject));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangelogEntry {
    pub release: String,
    pub date: DateTime<FixedOffset>,
    /// (number, subject), number-descending.
    pub features: Vec<(u64, String)>,
    pub bugfixes: Vec<(u64, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Changelog {
    /// Version-descending.
    pub entries: Vec<ChangelogEntry>,
}

/// One entry per release in the half-open version range (from, to]; both
/// bounds optional. Entries list IR partitioned by issue kind; a release
/// with an empty IR still gets its heading.
pub fn changelog(
    graph: &RepoGraph,
    from: Option<&str>,
    to: Option<&str>,
) -> Result<Changelog, ReportError> {
    let resolve = |name: Option<&str>| -> Result<Option<&ReleaseTag>, ReportError> {
        match name {
            Some(n) => graph
                .release(n)
                .map(Some)
                .ok_or_else(|| ReportError::UnknownTag(n.to_owned())),
            None => Ok(None),
        }
    };
    let from = resolve(from)?;
    let to = resolve(to)?;
    if let (Some(f), Some(t)) = (from, to) {
        if f.version > t.version {
            return Err(ReportError::InvalidRange {
                from: f.name.clone(),
                to: t.name.clone(),
            });
        }
    }

    let mut selected: Vec<&ReleaseTag> = graph
        .releases()
        .filter(|r| from.is_none_or(|f| r.version > f.version))
        .filter(|r| to.is_none_or(|t| r.version <= t.version))
        .collect();
    if selected.is_empty() {
        return Err(ReportError::EmptyRange);
    }
    selected.sort_by(|a, b| release_order(b, a));

    let mut entries = Vec::with_capacity(selected.len());
    for release in selected {
        let mut features = Vec::new();
        let mut bugfixes = Vec::new();
        let mut numbers: Vec<u64> = graph.issues_released(&release.name)?.into_iter().collect();
        numbers.sort_by(|a, b| b.cmp(a));
        for number in numbers {
            let issue = graph.issue(number).expect("IR members exist");
            let item = (number, issue.subject.clone());
            match issue.kind {
                IssueKind::Feature => features.push(item),
                IssueKind::Bugfix => bugfixes.push(item),
            }
        }
        entries.push(ChangelogEntry {
            release: release.name.clone(),
            date: release.time,
            features,
            bugfixes,
        });
    }
    Ok(Changelog { entries })
}

pub fn render_changelog(log: &Changelog) -> String {
    let mut out = String::from("# Changelog\n");
    for entry in &log.entries {
        out.push_str(&format!(
            "\n## {} ({})\n",
            entry.release,
            format_timestamp(&entry.date)
        ));
        for (title, items) in [("### Features", &entry.features), ("### Bugfixes", &entry.bugfixes)]
        {
            if items.is_empty() {
                continue;
            }
            out.push_str(&format!("\n{title}\n\n"));
            for (number, subject) in items {
                out.push_str(&format!("- #{number}: {subject}\n"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gitlog::RawCommitRecord;
    use crate::linking::LinkConfig;
    use crate::model::{build_graph, Issue};

    fn rec(
        id: &str,
        parents: &[&str],
        author: (&str, &str),
        time: &str,
        decorations: &str,
        message: &str,
    ) -> RawCommitRecord {
        RawCommitRecord {
            id: id.to_owned(),
            parent_ids: parents.iter().map(|p| (*p).to_owned()).collect(),
            author_name: author.0.to_owned(),
            author_email: author.1.to_owned(),
            author_time: time.to_owned(),
            committer_name: author.0.to_owned(),
            committer_email: author.1.to_owned(),
            commit_time: time.to_owned(),
            decorations: decorations.to_owned(),
            message: message.to_owned(),
        }
    }

    fn issue(number: u64, subject: &str, labels: &[&str]) -> Issue {
        Issue {
            number,
            subject: subject.to_owned(),
            author: Some("dev".to_owned()),
            created_at: Some(
                DateTime::parse_from_rfc3339("2014-12-01T00:00:00+00:00").unwrap(),
            ),
            closed_at: None,
            labels: labels.iter().map(|l| (*l).to_owned()).collect(),
            kind: IssueKind::Feature,
            placeholder: false,
        }
    }

    fn sample() -> RepoGraph {
        let records = vec![
            rec("a", &[], ("Alice", "alice@x"), "2015-01-01T10:00:00+01:00", "tag: 1.0.0", "start #1"),
            rec("b", &["a"], ("Bob", "bob@x"), "2015-01-02T10:00:00+01:00", "", "fix crash #2"),
            rec("c", &["b"], ("Alice", "alice@x"), "2015-01-03T10:00:00+01:00", "tag: 1.1.0", "more #3"),
        ];
        let issues = vec![
            issue(1, "Add profile page", &[]),
            issue(2, "Crash on empty input", &["bug"]),
            issue(3, "Improve docs", &[]),
            issue(9, "Never referenced", &[]),
        ];
        build_graph(records, issues, &LinkConfig::default()).unwrap()
    }

    #[test]
    fn overview_counts_and_linked_issues() {
        let overview = project_overview(&sample());
        assert_eq!(overview.last_release.as_deref(), Some("1.1.0"));
        assert_eq!(overview.release_count, 2);
        assert_eq!(overview.commit_count, 3);
        assert_eq!(overview.developer_count, 2);
        // issue 9 exists in the tracker data but nothing references it
        assert_eq!(overview.linked_issue_count, 3);
        assert_eq!(
            overview.developers,
            vec!["Alice <alice@x>".to_owned(), "Bob <bob@x>".to_owned()]
        );
    }

    #[test]
    fn overview_renders_in_figure_shape() {
        let text = render_overview(&project_overview(&sample()));
        let expected = "Project Overview\n\
                        - 1.1.0 is the last of 2 releases\n\
                        - 3 commits made by 2 developers\n\
                        - 3 issues linked\n\
                        \n\
                        Developers\n\
                        - Alice <alice@x>\n\
                        - Bob <bob@x>\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn overview_without_releases_is_flagged() {
        let graph = build_graph(
            vec![rec("a", &[], ("A", "a@x"), "2015-01-01T10:00:00+01:00", "", "m")],
            Vec::new(),
            &LinkConfig::default(),
        )
        .unwrap();
        let overview = project_overview(&graph);
        assert_eq!(overview.last_release, None);
        assert!(render_overview(&overview).contains("- no releases found\n"));
    }

    #[test]
    fn empty_graph_overview_is_all_zeroes() {
        let graph = build_graph(Vec::new(), Vec::new(), &LinkConfig::default()).unwrap();
        let overview = project_overview(&graph);
        assert_eq!(overview.release_count, 0);
        assert_eq!(overview.commit_count, 0);
        assert_eq!(overview.developer_count, 0);
        assert_eq!(overview.linked_issue_count, 0);
    }

    #[test]
    fn release_report_fields() {
        let report = release_report(&sample(), "1.1.0").unwrap();
        assert_eq!(report.tag, "1.1.0");
        assert_eq!(report.base_releases, vec!["1.0.0".to_owned()]);
        assert_eq!(report.commit_count, 2);
        assert_eq!(
            report.authors,
            vec!["Bob <bob@x>".to_owned(), "Alice <alice@x>".to_owned()],
            "authors ordered by first CR commit"
        );
        let numbers: Vec<u64> = report.issues.iter().map(|i| i.number).collect();
        assert_eq!(numbers, vec![3, 2], "issues number-descending");
        assert_eq!(report.issues[1].kind, IssueKind::Bugfix);
    }

    #[test]
    fn release_report_renders_in_figure_shape() {
        let text = render_release_report(&release_report(&sample(), "1.1.0").unwrap());
        let expected = "Information about release 1.1.0\n\
                        Based on: 1.0.0\n\
                        Date: 2015-01-03 10:00:00+01:00\n\
                        Commits: 2\n\
                        Authors:\n\
                        - Bob <bob@x>\n\
                        - Alice <alice@x>\n\
                        \n\
                        Issues:\n\
                        - 3: Improve docs\n\
                        - 2: Crash on empty input\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn earliest_release_has_empty_base_line() {
        let text = render_release_report(&release_report(&sample(), "1.0.0").unwrap());
        assert!(text.contains("Based on:\n"), "{text}");
    }

    #[test]
    fn unknown_tag_is_reported() {
        assert_eq!(
            release_report(&sample(), "9.9.9").unwrap_err(),
            ReportError::UnknownTag("9.9.9".to_owned())
        );
    }

    #[test]
    fn changelog_partitions_by_kind_and_orders_desc() {
        let log = changelog(&sample(), None, None).unwrap();
        let names: Vec<&str> = log.entries.iter().map(|e| e.release.as_str()).collect();
        assert_eq!(names, vec!["1.1.0", "1.0.0"]);
        let entry = &log.entries[0];
        assert_eq!(entry.features, vec![(3, "Improve docs".to_owned())]);
        assert_eq!(entry.bugfixes, vec![(2, "Crash on empty input".to_owned())]);
    }

    #[test]
    fn changelog_range_is_half_open() {
        let log = changelog(&sample(), Some("1.0.0"), Some("1.1.0")).unwrap();
        let names: Vec<&str> = log.entries.iter().map(|e| e.release.as_str()).collect();
        assert_eq!(names, vec!["1.1.0"], "from is excluded, to is included");
    }

    #[test]
    fn changelog_rejects_reversed_range() {
        assert_eq!(
            changelog(&sample(), Some("1.1.0"), Some("1.0.0")).unwrap_err(),
            ReportError::InvalidRange { from: "1.1.0".to_owned(), to: "1.0.0".to_owned() }
        );
    }

    #[test]
    fn changelog_equal_bounds_is_empty_range() {
        assert_eq!(
            changelog(&sample(), Some("1.1.0"), Some("1.1.0")).unwrap_err(),
            ReportError::EmptyRange
        );
    }

    #[test]
    fn changelog_render_skips_empty_sections_but_keeps_headings() {
        let records = vec![
            rec("a", &[], ("A", "a@x"), "2015-01-01T10:00:00+01:00", "tag: 1.0.0", "no refs"),
        ];
        let graph = build_graph(records, Vec::new(), &LinkConfig::default()).unwrap();
        let text = render_changelog(&changelog(&graph, None, None).unwrap());
        assert_eq!(text, "# Changelog\n\n## 1.0.0 (2015-01-01 10:00:00+01:00)\n");
    }

    #[test]
    fn renderers_are_deterministic() {
        let g1 = sample();
        let g2 = sample();
        assert_eq!(
            render_overview(&project_overview(&g1)),
            render_overview(&project_overview(&g2))
        );
        assert_eq!(
            render_changelog(&changelog(&g1, None, None).unwrap()),
            render_changelog(&changelog(&g2, None, None).unwrap())
        );
    }

    #[test]
    fn placeholder_issue_subject_appears_in_reports() {
        let records = vec![
            rec("a", &[], ("A", "a@x"), "2015-01-01T10:00:00+01:00", "tag: 1.0.0", "ghost ref #77"),
        ];
        let graph = build_graph(records, Vec::new(), &LinkConfig::default()).unwrap();
        let report = release_report(&graph, "1.0.0").unwrap();
        assert_eq!(report.issues[0].subject, "(unknown)");
        assert_eq!(report.issues[0].kind, IssueKind::Feature);
    }
}
