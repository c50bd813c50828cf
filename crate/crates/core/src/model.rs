//! The provenance metamodel: developers, commits, issues, releases, and the
//! immutable indexed graph that every query operates on.
//!
//! `build_graph` validates everything up front (unique ids, resolvable
//! parents, acyclicity, issue sanity) and applies the linking rules once.
//! After construction the graph never changes, so any number of threads may
//! query it concurrently; the reachability cache uses idempotent
//! `OnceLock` population.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use chrono::{DateTime, FixedOffset};
use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::gitlog::{parse_decorations, RawCommitRecord};
use crate::linking::{classify_issue, extract_issue_refs, is_release_tag, LinkConfig};
use crate::version::{parse_semver, SemVer};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("commit record {index} has an empty id")]
    EmptyCommitId { index: usize },
    #[error("duplicate commit id {0}")]
    DuplicateCommit(CommitId),
    #[error("commit {child} lists unknown parent {parent}")]
    DanglingParent { child: CommitId, parent: CommitId },
    #[error("parent relation contains a cycle through commit {0}")]
    CyclicHistory(CommitId),
    #[error("commit {commit}: {field} is not a valid timestamp: {value:?}")]
    BadTimestamp {
        commit: CommitId,
        field: &'static str,
        value: String,
    },
    #[error("duplicate issue number {0}")]
    DuplicateIssue(u64),
    #[error("issue {number} is invalid: {reason}")]
    InvalidIssue { number: u64, reason: &'static str },
    #[error("release tag {name:?} appears on more than one commit")]
    DuplicateReleaseTag { name: String },
}

/// Opaque commit identifier: a hex hash for real repositories, any unique
/// token in fixtures.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommitId(String);

impl CommitId {
    pub fn new(value: impl Into<String>) -> Self {
        CommitId(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CommitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CommitId {
    fn from(value: &str) -> Self {
        CommitId(value.to_owned())
    }
}

/// A developer identity. The email is stored normalized (trimmed,
/// lowercased) because it is the deduplication key; the display name is the
/// first one seen for that email.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Developer {
    pub name: String,
    pub email: String,
}

impl Developer {
    /// Normalized email, or a name-derived fallback for the rare commits
    /// whose email field is empty.
    pub fn identity_key(name: &str, email: &str) -> String {
        let email = email.trim().to_lowercase();
        if email.is_empty() {
            format!("name:{}", name.trim().to_lowercase())
        } else {
            email
        }
    }

    /// `Name <email>` as shown in reports.
    pub fn display(&self) -> String {
        format!("{} <{}>", self.name, self.email)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IssueKind {
    Feature,
    Bugfix,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IssueKind::Feature => "feature",
            IssueKind::Bugfix => "bugfix",
        })
    }
}

/// A tracked issue. `placeholder` marks numbers referenced by commits but
/// absent from the tracker data; placeholders carry no dates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub number: u64,
    pub subject: String,
    pub author: Option<String>,
    pub created_at: Option<DateTime<FixedOffset>>,
    pub closed_at: Option<DateTime<FixedOffset>>,
    pub labels: BTreeSet<String>,
    pub kind: IssueKind,
    pub placeholder: bool,
}

impl Issue {
    pub fn placeholder(number: u64) -> Self {
        Issue {
            number,
            subject: "(unknown)".to_owned(),
            author: None,
            created_at: None,
            closed_at: None,
            labels: BTreeSet::new(),
            kind: IssueKind::Feature,
            placeholder: true,
        }
    }
}

/// One commit with linking already applied: `issue_refs` holds the extracted
/// issue numbers, `release_tags` the decoration tags recognised as releases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub id: CommitId,
    pub parents: Vec<CommitId>,
    pub author: Developer,
    pub committer: Developer,
    pub author_time: DateTime<FixedOffset>,
    pub commit_time: DateTime<FixedOffset>,
    pub message: String,
    pub decorations: BTreeSet<String>,
    pub issue_refs: BTreeSet<u64>,
    pub release_tags: BTreeSet<String>,
}

/// A release: a tag whose name matches the release pattern. `time` is the
/// tagger date for annotated tags, otherwise the head commit's commit time;
/// the original offset is preserved either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseTag {
    pub name: String,
    pub head: CommitId,
    pub version: SemVer,
    pub time: DateTime<FixedOffset>,
}

/// The immutable project graph. Commits keep their log order; developers,
/// issues and releases are held in sorted maps so iteration is deterministic.
pub struct RepoGraph {
    commits: Vec<Commit>,
    index: HashMap<CommitId, u32>,
    parents_ix: Vec<Vec<u32>>,
    children_ix: Vec<Vec<u32>>,
    developers: BTreeMap<String, Developer>,
    issues: BTreeMap<u64, Issue>,
    releases: BTreeMap<String, ReleaseTag>,
    reach: Vec<OnceLock<FixedBitSet>>,
}

impl fmt::Debug for RepoGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepoGraph")
            .field("commits", &self.commits.len())
            .field("developers", &self.developers.len())
            .field("issues", &self.issues.len())
            .field("releases", &self.releases.len())
            .finish()
    }
}

impl RepoGraph {
    pub fn commit_count(&self) -> usize {
        self.commits.len()
    }

    /// Commits in ingestion (log) order.
    pub fn commits(&self) -> impl Iterator<Item = &Commit> {
        self.commits.iter()
    }

    pub fn commit(&self, id: &CommitId) -> Option<&Commit> {
        self.index.get(id).map(|&i| &self.commits[i as usize])
    }

    pub fn developer_count(&self) -> usize {
        self.developers.len()
    }

    pub fn developers(&self) -> impl Iterator<Item = &Developer> {
        self.developers.values()
    }

    pub fn issue_count(&self) -> usize {
        self.issues.len()
    }

    pub fn issues(&self) -> impl Iterator<Item = &Issue> {
        self.issues.values()
    }

    pub fn issue(&self, number: u64) -> Option<&Issue> {
        self.issues.get(&number)
    }

    pub fn release_count(&self) -> usize {
        self.releases.len()
    }

    pub fn releases(&self) -> impl Iterator<Item = &ReleaseTag> {
        self.releases.values()
    }

    pub fn release(&self, name: &str) -> Option<&ReleaseTag> {
        self.releases.get(name)
    }

    /// Commits that list `id` as a parent.
    pub fn children_of(&self, id: &CommitId) -> Option<impl Iterator<Item = &CommitId>> {
        let &i = self.index.get(id)?;
        Some(
            self.children_ix[i as usize]
                .iter()
                .map(|&c| &self.commits[c as usize].id),
        )
    }

    pub(crate) fn idx(&self, id: &CommitId) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub(crate) fn commit_at(&self, i: u32) -> &Commit {
        &self.commits[i as usize]
    }

    /// Reachability of commit `head` (itself plus everything reachable
    /// through parent edges), computed once per head and cached. `OnceLock`
    /// makes concurrent population idempotent.
    pub(crate) fn reach_bits(&self, head: u32) -> &FixedBitSet {
        self.reach[head as usize].get_or_init(|| {
            let mut bits = FixedBitSet::with_capacity(self.commits.len());
            let mut stack = vec![head];
            bits.insert(head as usize);
            while let Some(c) = stack.pop() {
                for &p in &self.parents_ix[c as usize] {
                    if !bits.contains(p as usize) {
                        bits.insert(p as usize);
                        stack.push(p);
                    }
                }
            }
            bits
        })
    }
}

fn parse_time(
    commit: &CommitId,
    field: &'static str,
    value: &str,
) -> Result<DateTime<FixedOffset>, BuildError> {
    DateTime::parse_from_rfc3339(value).map_err(|_| BuildError::BadTimestamp {
        commit: commit.clone(),
        field,
        value: value.to_owned(),
    })
}

/// Builds the graph without tagger dates: every release time falls back to
/// its head commit's commit time.
pub fn build_graph(
    records: Vec<RawCommitRecord>,
    issues: Vec<Issue>,
    config: &LinkConfig,
) -> Result<RepoGraph, BuildError> {
    build_graph_with_tag_times(records, issues, &BTreeMap::new(), config)
}

/// Builds the graph with tagger dates from a `for-each-ref` pass. Tags
/// absent from `tag_times` (lightweight tags) use the head commit's time.
pub fn build_graph_with_tag_times(
    records: Vec<RawCommitRecord>,
    issues: Vec<Issue>,
    tag_times: &BTreeMap<String, DateTime<FixedOffset>>,
    config: &LinkConfig,
) -> Result<RepoGraph, BuildError> {
    assert!(records.len() < u32::MAX as usize, "commit count exceeds index width");
    let n = records.len();

    let mut index: HashMap<CommitId, u32> = HashMap::with_capacity(n);
    for (i, record) in records.iter().enumerate() {
        if record.id.is_empty() {
            return Err(BuildError::EmptyCommitId { index: i });
        }
        let id = CommitId::new(record.id.as_str());
        if index.insert(id.clone(), i as u32).is_some() {
            return Err(BuildError::DuplicateCommit(id));
        }
    }

    let mut developers: BTreeMap<String, Developer> = BTreeMap::new();
    let mut commits = Vec::with_capacity(n);
    let mut parents_ix: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut release_heads: BTreeMap<String, (u32, SemVer)> = BTreeMap::new();

    for (i, record) in records.into_iter().enumerate() {
        let id = CommitId::new(record.id);
        let mut parents = Vec::with_capacity(record.parent_ids.len());
        for parent in record.parent_ids {
            let pid = CommitId::new(parent);
            if pid == id {
                return Err(BuildError::CyclicHistory(id));
            }
            let Some(&pi) = index.get(&pid) else {
                return Err(BuildError::DanglingParent { child: id, parent: pid });
            };
            if !parents_ix[i].contains(&pi) {
                parents_ix[i].push(pi);
            }
            parents.push(pid);
        }

        let author_time = parse_time(&id, "author_time", &record.author_time)?;
        let commit_time = parse_time(&id, "commit_time", &record.commit_time)?;
        let mut intern = |name: String, email: String| -> Developer {
            let key = Developer::identity_key(&name, &email);
            developers
                .entry(key)
                .or_insert_with(|| Developer {
                    name: name.trim().to_owned(),
                    email: email.trim().to_lowercase(),
                })
                .clone()
        };
        let author = intern(record.author_name, record.author_email);
        let committer = intern(record.committer_name, record.committer_email);

        let decorations = parse_decorations(&record.decorations);
        let issue_refs: BTreeSet<u64> =
            extract_issue_refs(&record.message, config).into_iter().collect();
        let mut release_tags = BTreeSet::new();
        for name in &decorations {
            // Tags matching the release pattern but failing the loose semver
            // parse (e.g. component overflow under a custom pattern) are
            // treated as plain tags, not releases.
            if is_release_tag(name, config) {
                if let Ok(version) = parse_semver(name) {
                    if release_heads.insert(name.clone(), (i as u32, version)).is_some() {
                        return Err(BuildError::DuplicateReleaseTag { name: name.clone() });
                    }
                    release_tags.insert(name.clone());
                }
            }
        }

        commits.push(Commit {
            id,
            parents,
            author,
            committer,
            author_time,
            commit_time,
            message: record.message,
            decorations,
            issue_refs,
            release_tags,
        });
    }

    let mut children_ix: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (child, parents) in parents_ix.iter().enumerate() {
        for &parent in parents {
            children_ix[parent as usize].push(child as u32);
        }
    }

    // Kahn's algorithm over parent edges; leftover nodes sit on a cycle.
    let mut remaining = vec![0usize; n];
    let mut queue: Vec<u32> = Vec::new();
    for i in 0..n {
        remaining[i] = parents_ix[i].len();
        if remaining[i] == 0 {
            queue.push(i as u32);
        }
    }
    let mut processed = 0usize;
    while let Some(i) = queue.pop() {
        processed += 1;
        for &child in &children_ix[i as usize] {
            remaining[child as usize] -= 1;
            if remaining[child as usize] == 0 {
                queue.push(child);
            }
        }
    }
    if processed != n {
        let culprit = (0..n)
            .find(|&i| remaining[i] > 0)
            .expect("some node remains on a cycle");
        return Err(BuildError::CyclicHistory(commits[culprit].id.clone()));
    }

    let mut issue_map: BTreeMap<u64, Issue> = BTreeMap::new();
    for mut issue in issues {
        if issue.number == 0 {
            return Err(BuildError::InvalidIssue {
                number: 0,
                reason: "issue numbers must be positive",
            });
        }
        if let (Some(created), Some(closed)) = (issue.created_at, issue.closed_at) {
            if closed < created {
                return Err(BuildError::InvalidIssue {
                    number: issue.number,
                    reason: "closed before created",
                });
            }
        }
        issue.kind = classify_issue(issue.labels.iter().map(String::as_str), config);
        let number = issue.number;
        if issue_map.insert(number, issue).is_some() {
            return Err(BuildError::DuplicateIssue(number));
        }
    }
    for commit in &commits {
        for &number in &commit.issue_refs {
            issue_map
                .entry(number)
                .or_insert_with(|| Issue::placeholder(number));
        }
    }

    let mut releases = BTreeMap::new();
    for (name, (head_ix, version)) in release_heads {
        let head_commit = &commits[head_ix as usize];
        let time = tag_times
            .get(&name)
            .copied()
            .unwrap_or(head_commit.commit_time);
        releases.insert(
            name.clone(),
            ReleaseTag {
                name,
                head: head_commit.id.clone(),
                version,
                time,
            },
        );
    }

    let reach = (0..n).map(|_| OnceLock::new()).collect();
    Ok(RepoGraph {
        commits,
        index,
        parents_ix,
        children_ix,
        developers,
        issues: issue_map,
        releases,
        reach,
    })
}
