//! Release set algebra over the commit DAG.
//!
//! Everything here is defined by reachability: the history H of a commit is
//! the least fixed point of H_i = {c_i} ∪ ⋃_{c_k ∈ P_i} H_k. A release tag's
//! commit history CH is the history of its head, the issue history IH is the
//! union of issue refs over CH, and the tag history TH holds the tags whose
//! CH is a *strict* subset. CR/IR are what a release delivers exclusively.
//!
//! Because histories are downward closed, CH_k ⊆ CH_j ⟺ head_k ∈ CH_j, which
//! reduces every subset test to two cached bitset membership probes. The
//! equivalence is property-tested against the literal definitions.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::model::{CommitId, RepoGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("unknown commit {0}")]
    UnknownCommit(String),
    #[error("unknown release tag {0:?}")]
    UnknownTag(String),
}

/// A set of commits, kept sorted so every rendering is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommitSet(BTreeSet<CommitId>);

/// A set of issue numbers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IssueSet(BTreeSet<u64>);

/// A set of release tag names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagSet(BTreeSet<String>);

macro_rules! set_api {
    ($name:ident, $elem:ty) => {
        impl $name {
            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn contains(&self, member: &$elem) -> bool {
                self.0.contains(member)
            }

            pub fn iter(&self) -> impl Iterator<Item = &$elem> {
                self.0.iter()
            }

            pub fn into_inner(self) -> BTreeSet<$elem> {
                self.0
            }
        }

        impl From<BTreeSet<$elem>> for $name {
            fn from(members: BTreeSet<$elem>) -> Self {
                $name(members)
            }
        }

        impl FromIterator<$elem> for $name {
            fn from_iter<I: IntoIterator<Item = $elem>>(iter: I) -> Self {
                $name(iter.into_iter().collect())
            }
        }

        impl IntoIterator for $name {
            type Item = $elem;
            type IntoIter = std::collections::btree_set::IntoIter<$elem>;

            fn into_iter(self) -> Self::IntoIter {
                self.0.into_iter()
            }
        }
    };
}

set_api!(CommitSet, CommitId);
set_api!(IssueSet, u64);
set_api!(TagSet, String);

impl RepoGraph {
    fn commit_idx(&self, id: &CommitId) -> Result<u32, QueryError> {
        self.idx(id)
            .ok_or_else(|| QueryError::UnknownCommit(id.to_string()))
    }

    fn release_head_idx(&self, tag: &str) -> Result<u32, QueryError> {
        let release = self
            .release(tag)
            .ok_or_else(|| QueryError::UnknownTag(tag.to_owned()))?;
        Ok(self.idx(&release.head).expect("release heads resolve"))
    }

    fn commit_set_from_bits(&self, bits: &FixedBitSet) -> CommitSet {
        bits.ones().map(|i| self.commit_at(i as u32).id.clone()).collect()
    }

    fn issue_set_from_bits(&self, bits: &FixedBitSet) -> IssueSet {
        bits.ones()
            .flat_map(|i| self.commit_at(i as u32).issue_refs.iter().copied())
            .collect()
    }

    /// CH as bits: reachability of the release head.
    pub(crate) fn ch_bits(&self, tag: &str) -> Result<&FixedBitSet, QueryError> {
        Ok(self.reach_bits(self.release_head_idx(tag)?))
    }

    /// CR as bits: CH minus the commit histories of every tag in TH.
    pub(crate) fn cr_bits(&self, tag: &str) -> Result<FixedBitSet, QueryError> {
        let mut bits = self.ch_bits(tag)?.clone();
        for other in self.tag_history(tag)?.iter() {
            bits.difference_with(self.ch_bits(other).expect("TH members exist"));
        }
        Ok(bits)
    }

    /// H_i: the commit itself plus everything reachable through parents.
    pub fn history(&self, id: &CommitId) -> Result<CommitSet, QueryError> {
        let bits = self.reach_bits(self.commit_idx(id)?);
        Ok(self.commit_set_from_bits(bits))
    }

    /// CH_j: the history of the release head.
    pub fn commit_history(&self, tag: &str) -> Result<CommitSet, QueryError> {
        Ok(self.commit_set_from_bits(self.ch_bits(tag)?))
    }

    /// IH_j: all issue refs across CH_j.
    pub fn issue_history(&self, tag: &str) -> Result<IssueSet, QueryError> {
        Ok(self.issue_set_from_bits(self.ch_bits(tag)?))
    }

    /// TH_j: release tags whose CH is a strict subset of CH_j. Downward
    /// closure turns the subset test into head-membership probes: given
    /// head_k ∈ CH_j, the histories are equal iff head_j ∈ CH_k as well.
    pub fn tag_history(&self, tag: &str) -> Result<TagSet, QueryError> {
        let head_j = self.release_head_idx(tag)?;
        let bits_j = self.reach_bits(head_j);
        let mut result = BTreeSet::new();
        for other in self.releases() {
            if other.name == tag {
                continue;
            }
            let head_k = self.idx(&other.head).expect("release heads resolve");
            if bits_j.contains(head_k as usize)
                && !self.reach_bits(head_k).contains(head_j as usize)
            {
                result.insert(other.name.clone());
            }
        }
        Ok(TagSet(result))
    }

    /// CR_j = CH_j \ ⋃_{t_k ∈ TH_j} CH_k: commits delivered by this release
    /// and no earlier one.
    pub fn commits_released(&self, tag: &str) -> Result<CommitSet, QueryError> {
        let bits = self.cr_bits(tag)?;
        Ok(self.commit_set_from_bits(&bits))
    }

    /// IR_j: issue refs across CR_j.
    pub fn issues_released(&self, tag: &str) -> Result<IssueSet, QueryError> {
        let bits = self.cr_bits(tag)?;
        Ok(self.issue_set_from_bits(&bits))
    }

    /// CH_a \ CH_b.
    pub fn diff_commits(&self, a: &str, b: &str) -> Result<CommitSet, QueryError> {
        let mut bits = self.ch_bits(a)?.clone();
        bits.difference_with(self.ch_bits(b)?);
        Ok(self.commit_set_from_bits(&bits))
    }

    /// IH_a \ IH_b.
    pub fn diff_issues(&self, a: &str, b: &str) -> Result<IssueSet, QueryError> {
        let ih_a = self.issue_history(a)?;
        let ih_b = self.issue_history(b)?;
        Ok(ih_a.iter().filter(|n| !ih_b.contains(n)).copied().collect())
    }

    /// IR_a ∩ IR_b: issues reworked across the two releases.
    pub fn reworked_issues(&self, a: &str, b: &str) -> Result<IssueSet, QueryError> {
        let ir_a = self.issues_released(a)?;
        let ir_b = self.issues_released(b)?;
        Ok(ir_a.iter().filter(|n| ir_b.contains(n)).copied().collect())
    }

    /// The maximal elements of TH_t under the CH-subset order: the releases
    /// this one directly builds on.
    pub fn base_releases(&self, tag: &str) -> Result<TagSet, QueryError> {
        let th = self.tag_history(tag)?;
        let heads: Vec<(&String, u32)> = th
            .iter()
            .map(|name| {
                let release = self.release(name).expect("TH members exist");
                (name, self.idx(&release.head).expect("release heads resolve"))
            })
            .collect();
        let mut result = BTreeSet::new();
        for &(name_k, head_k) in &heads {
            let dominated = heads.iter().any(|&(_, head_m)| {
                head_m != head_k
                    && self.reach_bits(head_m).contains(head_k as usize)
                    && !self.reach_bits(head_k).contains(head_m as usize)
            });
            if !dominated {
                result.insert(name_k.clone());
            }
        }
        Ok(TagSet(result))
    }
}
