//! Semantic-version parsing and precedence ordering for release tag names.
//!
//! Tag names are accepted in the loose form `v?MAJOR.MINOR.PATCH(-PRERELEASE)?`
//! that the default release pattern admits. This is wider than strict SemVer
//! 2.0 (leading zeros and arbitrary prerelease characters are allowed), so the
//! parser and the precedence rules are implemented here instead of relying on
//! a strict parser that would reject such names.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VersionError {
    /// The name does not have the `v?MAJOR.MINOR.PATCH(-PRERELEASE)?` shape.
    #[error("not a release tag: {0:?}")]
    NotAReleaseTag(String),
}

/// A parsed release version: numeric triple plus an optional prerelease part.
///
/// Ordering follows SemVer 2.0 precedence: the triple compares
/// lexicographically, a prerelease version precedes the plain version with the
/// same triple, and prereleases compare identifier by identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemVer {
    pub major: u64,
    pub minor: u64,
    pub patch: u64,
    pub prerelease: Option<String>,
}

impl SemVer {
    pub fn new(major: u64, minor: u64, patch: u64, prerelease: Option<&str>) -> Self {
        SemVer {
            major,
            minor,
            patch,
            prerelease: prerelease.map(str::to_owned),
        }
    }
}

/// Parses a release tag name, stripping an optional leading `v`. Everything
/// after the first `-` is the prerelease part.
pub fn parse_semver(name: &str) -> Result<SemVer, VersionError> {
    let err = || VersionError::NotAReleaseTag(name.to_owned());
    let body = name.strip_prefix('v').unwrap_or(name);
    let (core, prerelease) = match body.split_once('-') {
        Some((core, pre)) if !pre.is_empty() => (core, Some(pre)),
        Some(_) => return Err(err()),
        None => (body, None),
    };
    let mut parts = core.split('.');
    let mut next_num = || {
        parts
            .next()
            .filter(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(err)
    };
    let major = next_num()?;
    let minor = next_num()?;
    let patch = next_num()?;
    if parts.next().is_some() {
        return Err(err());
    }
    Ok(SemVer::new(major, minor, patch, prerelease))
}

impl FromStr for SemVer {
    type Err = VersionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_semver(s)
    }
}

impl fmt::Display for SemVer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)?;
        if let Some(pre) = &self.prerelease {
            write!(f, "-{pre}")?;
        }
        Ok(())
    }
}

impl Ord for SemVer {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.major, self.minor, self.patch)
            .cmp(&(other.major, other.minor, other.patch))
            .then_with(|| match (&self.prerelease, &other.prerelease) {
                (None, None) => Ordering::Equal,
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (Some(a), Some(b)) => cmp_prerelease(a, b),
            })
    }
}

impl PartialOrd for SemVer {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn cmp_prerelease(a: &str, b: &str) -> Ordering {
    let mut left = a.split('.');
    let mut right = b.split('.');
    loop {
        match (left.next(), right.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => match cmp_identifier(x, y) {
                Ordering::Equal => continue,
                other => return other,
            },
        }
    }
}

fn cmp_identifier(x: &str, y: &str) -> Ordering {
    let numeric = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    match (numeric(x), numeric(y)) {
        // Compare digit runs without parsing so arbitrarily long runs work.
        (true, true) => {
            let x = x.trim_start_matches('0');
            let y = y.trim_start_matches('0');
            x.len().cmp(&y.len()).then_with(|| x.cmp(y))
        }
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => x.cmp(y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> SemVer {
        parse_semver(s).unwrap()
    }

    #[test]
    fn parses_prerelease_tag() {
        assert_eq!(v("1.1.0-beta"), SemVer::new(1, 1, 0, Some("beta")));
    }

    #[test]
    fn parses_zero_version_with_v_prefix() {
        assert_eq!(v("v0.0.0"), SemVer::new(0, 0, 0, None));
    }

    #[test]
    fn parses_plain_patch_version() {
        assert_eq!(v("3.0.15"), SemVer::new(3, 0, 15, None));
    }

    #[test]
    fn rejects_non_release_names() {
        for bad in ["nightly-build", "1.0", "1.0.0.0", "1.0.0-", "", "v", "1.0.0+build"] {
            assert!(parse_semver(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn equal_versions_compare_equal() {
        assert_eq!(v("1.0.0").cmp(&v("1.0.0")), Ordering::Equal);
        assert_eq!(v("v1.0.0"), v("1.0.0"));
    }

    #[test]
    fn prerelease_precedes_plain_version() {
        assert!(v("1.1.0-beta") < v("1.1.0"));
    }

    #[test]
    fn patch_numbers_compare_numerically() {
        assert!(v("3.2.1") > v("3.2.0"));
        assert!(v("1.5.0") < v("1.19.0"));
    }

    #[test]
    fn prerelease_precedence_chain() {
        // The canonical ordering chain from the SemVer 2.0 rules.
        let chain = [
            "1.0.0-alpha",
            "1.0.0-alpha.1",
            "1.0.0-alpha.beta",
            "1.0.0-beta",
            "1.0.0-beta.2",
            "1.0.0-beta.11",
            "1.0.0-rc.1",
            "1.0.0",
        ];
        for pair in chain.windows(2) {
            assert!(v(pair[0]) < v(pair[1]), "{} < {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn numeric_identifiers_ignore_leading_zeros() {
        assert_eq!(cmp_prerelease("007", "7"), Ordering::Equal);
        assert!(v("1.0.0-2") < v("1.0.0-10"));
    }
}
