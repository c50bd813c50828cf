//! Commit/issue/release linking rules.
//!
//! Three configurable patterns drive the whole linking layer: one decides
//! whether a commit message references issues at all, one classifies issue
//! labels as bug labels, and one recognises release tag names. The reference
//! *extraction* step is fixed: once a message matches the reference pattern,
//! every maximal `#<digits>` run in it is collected.

use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::model::IssueKind;

/// Messages must match this to be considered issue-referencing at all.
pub const DEFAULT_ISSUE_REF_PATTERN: &str = "^.*#[0-9]+.*";
/// Labels matching this mark an issue as a bug.
pub const DEFAULT_BUG_LABEL_PATTERN: &str = "^bug.*$";
/// Tag names matching this are release tags.
pub const DEFAULT_RELEASE_TAG_PATTERN: &str = r"^v?[0-9]+\.[0-9]+\.[0-9]+(-.+)?$";

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("invalid {role} pattern {pattern:?}: {source}")]
    Invalid {
        role: &'static str,
        pattern: String,
        #[source]
        source: regex::Error,
    },
}

/// Compiled linking patterns. Construction validates all three regexes, so a
/// `LinkConfig` held anywhere downstream is known-good.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    issue_ref: Regex,
    bug_label: Regex,
    release_tag: Regex,
}

impl LinkConfig {
    pub fn new(
        issue_ref_pattern: &str,
        bug_label_pattern: &str,
        release_tag_pattern: &str,
    ) -> Result<Self, PatternError> {
        let compile = |role: &'static str, pattern: &str| {
            Regex::new(pattern).map_err(|source| PatternError::Invalid {
                role,
                pattern: pattern.to_owned(),
                source,
            })
        };
        Ok(LinkConfig {
            issue_ref: compile("issue reference", issue_ref_pattern)?,
            bug_label: compile("bug label", bug_label_pattern)?,
            release_tag: compile("release tag", release_tag_pattern)?,
        })
    }

    pub fn issue_ref_pattern(&self) -> &str {
        self.issue_ref.as_str()
    }

    pub fn bug_label_pattern(&self) -> &str {
        self.bug_label.as_str()
    }

    pub fn release_tag_pattern(&self) -> &str {
        self.release_tag.as_str()
    }
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig::new(
            DEFAULT_ISSUE_REF_PATTERN,
            DEFAULT_BUG_LABEL_PATTERN,
            DEFAULT_RELEASE_TAG_PATTERN,
        )
        .expect("default patterns compile")
    }
}

fn ref_run_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new("#[0-9]+").expect("literal pattern compiles"))
}

/// The presence gate: does the message match the issue reference pattern?
///
/// With the default pattern (`.` does not match newlines, `^` anchors at the
/// start of the message) this effectively looks at the first line only.
pub fn message_references_issues(message: &str, config: &LinkConfig) -> bool {
    config.issue_ref.is_match(message)
}

/// Issue numbers referenced by a commit message, deduplicated and sorted.
///
/// If the message does not match the configured reference pattern the result
/// is empty. Otherwise every maximal `#<digits>` run in the whole message
/// contributes its number; zero and numbers that overflow `u64` are dropped,
/// so results are positive.
pub fn extract_issue_refs(message: &str, config: &LinkConfig) -> Vec<u64> {
    if !message_references_issues(message, config) {
        return Vec::new();
    }
    let mut refs: Vec<u64> = ref_run_regex()
        .find_iter(message)
        .filter_map(|m| m.as_str()[1..].parse::<u64>().ok())
        .filter(|&n| n > 0)
        .collect();
    refs.sort_unstable();
    refs.dedup();
    refs
}

/// An issue is a bugfix iff at least one label matches the bug pattern.
pub fn classify_issue<'a, I>(labels: I, config: &LinkConfig) -> IssueKind
where
    I: IntoIterator<Item = &'a str>,
{
    if labels.into_iter().any(|l| config.bug_label.is_match(l)) {
        IssueKind::Bugfix
    } else {
        IssueKind::Feature
    }
}

/// Whether a tag name denotes a release under the configured pattern.
pub fn is_release_tag(name: &str, config: &LinkConfig) -> bool {
    config.release_tag.is_match(name)
}
