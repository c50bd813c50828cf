//! Provenance export: W3C PROV-N text and a DOT mirror for generic viewers.
//!
//! The mapping: developers become agents, commits become activities (start =
//! end = commit time), issues and releases become entities. Relations:
//! wasAssociatedWith(commit, author), wasInformedBy(child, parent),
//! wasGeneratedBy(issue, addressing commit), wasGeneratedBy(release, CR
//! commit with no issue refs), wasDerivedFrom(release, IR issue) and
//! wasDerivedFrom(release, base release).
//!
//! A scoped export restricts commits to CR(scope), issues to IR(scope),
//! agents to their authors, and releases to scope ∪ base_releases(scope);
//! parent edges are kept only when both endpoints are exported.
//!
//! Both serializations are built from one `Selection`, so the DOT edges
//! mirror the PROV statements by construction, and both are byte-
//! deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{DateTime, FixedOffset, SecondsFormat};
use sha1::{Digest, Sha1};
use thiserror::Error;

use crate::algebra::QueryError;
use crate::model::{Commit, Developer, RepoGraph};

pub const REL_PREFIX: &str = "rel";
pub const REL_NAMESPACE: &str = "https://relprov.dev/ns#";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExportError {
    #[error("unknown release tag {0:?}")]
    UnknownTag(String),
    #[error("invalid qualified name {0:?}")]
    InvalidQualifiedName(String),
    #[error("relation references undeclared identifier {0:?}")]
    UndeclaredIdentifier(String),
}

impl From<QueryError> for ExportError {
    fn from(err: QueryError) -> Self {
        match err {
            QueryError::UnknownTag(name) | QueryError::UnknownCommit(name) => {
                ExportError::UnknownTag(name)
            }
        }
    }
}

/// A PROV-N qualified name, `prefix:local`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QualifiedName {
    pub prefix: String,
    pub local: String,
}

impl QualifiedName {
    pub fn new(prefix: impl Into<String>, local: impl Into<String>) -> Self {
        QualifiedName {
            prefix: prefix.into(),
            local: local.into(),
        }
    }

    fn validate(&self) -> Result<(), ExportError> {
        let name_ok = |s: &str, first_extra: bool| {
            let mut chars = s.chars();
            match chars.next() {
                Some(c) if c.is_ascii_alphabetic() || (first_extra && c == '_') => {}
                _ => return false,
            }
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        };
        if name_ok(&self.prefix, false) && name_ok(&self.local, true) {
            Ok(())
        } else {
            Err(ExportError::InvalidQualifiedName(self.to_string()))
        }
    }
}

impl fmt::Display for QualifiedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.prefix, self.local)
    }
}

/// Replaces everything outside `[A-Za-z0-9_-]` with `_`, which keeps
/// qualified names valid for any tag name or commit id.
fn sanitize(raw: &str) -> String {
    raw.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn commit_qn(id: &str) -> QualifiedName {
    QualifiedName::new(REL_PREFIX, format!("commit_{}", sanitize(id)))
}

fn issue_qn(number: u64) -> QualifiedName {
    QualifiedName::new(REL_PREFIX, format!("issue_{number}"))
}

fn release_qn(name: &str) -> QualifiedName {
    QualifiedName::new(REL_PREFIX, format!("release_{}", sanitize(name)))
}

/// Developer identifiers hash the identity key (normalized email) instead of
/// embedding it, so exports do not leak raw addresses.
fn dev_qn(dev: &Developer) -> QualifiedName {
    let key = Developer::identity_key(&dev.name, &dev.email);
    let digest = Sha1::digest(key.as_bytes());
    let hex: String = digest.iter().take(4).map(|b| format!("{b:02x}")).collect();
    QualifiedName::new(REL_PREFIX, format!("dev_{hex}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Entity {
        id: QualifiedName,
        attrs: Vec<(String, String)>,
    },
    Activity {
        id: QualifiedName,
        start: DateTime<FixedOffset>,
        end: DateTime<FixedOffset>,
    },
    Agent {
        id: QualifiedName,
        attrs: Vec<(String, String)>,
    },
    WasAssociatedWith {
        activity: QualifiedName,
        agent: QualifiedName,
    },
    WasInformedBy {
        informed: QualifiedName,
        informant: QualifiedName,
    },
    WasGeneratedBy {
        entity: QualifiedName,
        activity: QualifiedName,
    },
    WasDerivedFrom {
        generated: QualifiedName,
        used: QualifiedName,
    },
    Used {
        activity: QualifiedName,
        entity: QualifiedName,
    },
}

impl Statement {
    fn declared_id(&self) -> Option<&QualifiedName> {
        match self {
            Statement::Entity { id, .. }
            | Statement::Activity { id, .. }
            | Statement::Agent { id, .. } => Some(id),
            _ => None,
        }
    }

    /// (subject, object, kind rank) for relation ordering.
    fn relation_key(&self) -> Option<(&QualifiedName, &QualifiedName, u8)> {
        match self {
            Statement::WasAssociatedWith { activity, agent } => Some((activity, agent, 0)),
            Statement::WasInformedBy { informed, informant } => Some((informed, informant, 1)),
            Statement::WasGeneratedBy { entity, activity } => Some((entity, activity, 2)),
            Statement::WasDerivedFrom { generated, used } => Some((generated, used, 3)),
            Statement::Used { activity, entity } => Some((activity, entity, 4)),
            Statement::Entity { .. } | Statement::Activity { .. } | Statement::Agent { .. } => {
                None
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProvDocument {
    pub namespaces: BTreeMap<String, String>,
    pub statements: Vec<Statement>,
}

impl ProvDocument {
    pub fn new() -> Self {
        ProvDocument {
            namespaces: BTreeMap::from([(REL_PREFIX.to_owned(), REL_NAMESPACE.to_owned())]),
            statements: Vec::new(),
        }
    }
}

impl Default for ProvDocument {
    fn default() -> Self {
        ProvDocument::new()
    }
}

/// What an export covers: the commits, issues, releases and agents to
/// declare, plus which releases get their CR/IR/base edges attached.
struct Selection<'g> {
    graph: &'g RepoGraph,
    commits: Vec<&'g Commit>,
    commit_ids: BTreeSet<&'g str>,
    issues: Vec<u64>,
    releases: Vec<String>,
    edge_releases: Vec<String>,
    agents: BTreeMap<String, &'g Developer>,
}

impl<'g> Selection<'g> {
    fn new(graph: &'g RepoGraph, scope: Option<&str>) -> Result<Self, ExportError> {
        let (commits, issues, releases, edge_releases) = match scope {
            None => {
                let commits: Vec<&Commit> = graph.commits().collect();
                let issues: Vec<u64> = graph.issues().map(|i| i.number).collect();
                let releases: Vec<String> = graph.releases().map(|r| r.name.clone()).collect();
                (commits, issues, releases.clone(), releases)
            }
            Some(tag) => {
                let cr = graph.commits_released(tag)?;
                let commits: Vec<&Commit> = graph
                    .commits()
                    .filter(|c| cr.contains(&c.id))
                    .collect();
                let issues: Vec<u64> = graph.issues_released(tag)?.into_iter().collect();
                let mut releases: BTreeSet<String> =
                    graph.base_releases(tag)?.into_inner();
                releases.insert(tag.to_owned());
                (commits, issues, releases.into_iter().collect(), vec![tag.to_owned()])
            }
        };
        let commit_ids: BTreeSet<&str> = commits.iter().map(|c| c.id.as_str()).collect();
        let mut agents: BTreeMap<String, &Developer> = BTreeMap::new();
        for commit in &commits {
            let key = Developer::identity_key(&commit.author.name, &commit.author.email);
            agents.entry(key).or_insert(&commit.author);
        }
        Ok(Selection {
            graph,
            commits,
            commit_ids,
            issues,
            releases,
            edge_releases,
            agents,
        })
    }

    /// Relation statements, shared by PROV-N and DOT emission.
    fn relations(&self) -> Vec<Statement> {
        let mut relations = Vec::new();
        for commit in &self.commits {
            relations.push(Statement::WasAssociatedWith {
                activity: commit_qn(commit.id.as_str()),
                agent: dev_qn(&commit.author),
            });
            for parent in &commit.parents {
                if self.commit_ids.contains(parent.as_str()) {
                    relations.push(Statement::WasInformedBy {
                        informed: commit_qn(commit.id.as_str()),
                        informant: commit_qn(parent.as_str()),
                    });
                }
            }
            for &number in &commit.issue_refs {
                relations.push(Statement::WasGeneratedBy {
                    entity: issue_qn(number),
                    activity: commit_qn(commit.id.as_str()),
                });
            }
        }
        for name in &self.edge_releases {
            let release = release_qn(name);
            let cr = self.graph.commits_released(name).expect("release exists");
            for id in cr.iter() {
                let commit = self.graph.commit(id).expect("CR members exist");
                if commit.issue_refs.is_empty() {
                    relations.push(Statement::WasGeneratedBy {
                        entity: release.clone(),
                        activity: commit_qn(id.as_str()),
                    });
                }
            }
            for number in self.graph.issues_released(name).expect("release exists") {
                relations.push(Statement::WasDerivedFrom {
                    generated: release.clone(),
                    used: issue_qn(number),
                });
            }
            for base in self.graph.base_releases(name).expect("release exists") {
                relations.push(Statement::WasDerivedFrom {
                    generated: release.clone(),
                    used: release_qn(&base),
                });
            }
        }
        relations
    }
}

/// Maps the graph (or one release's neighborhood) to a PROV document.
pub fn to_prov(graph: &RepoGraph, scope: Option<&str>) -> Result<ProvDocument, ExportError> {
    let selection = Selection::new(graph, scope)?;
    let mut doc = ProvDocument::new();
    for commit in &selection.commits {
        doc.statements.push(Statement::Activity {
            id: commit_qn(commit.id.as_str()),
            start: commit.commit_time,
            end: commit.commit_time,
        });
    }
    for dev in selection.agents.values() {
        doc.statements.push(Statement::Agent {
            id: dev_qn(dev),
            attrs: vec![("prov:label".to_owned(), dev.name.clone())],
        });
    }
    for &number in &selection.issues {
        let issue = graph.issue(number).expect("selected issues exist");
        doc.statements.push(Statement::Entity {
            id: issue_qn(number),
            attrs: vec![
                ("prov:type".to_owned(), "issue".to_owned()),
                ("prov:label".to_owned(), issue.subject.clone()),
            ],
        });
    }
    for name in &selection.releases {
        doc.statements.push(Statement::Entity {
            id: release_qn(name),
            attrs: vec![("prov:type".to_owned(), "release".to_owned())],
        });
    }
    doc.statements.extend(selection.relations());
    Ok(doc)
}

fn escape_literal(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}

fn format_time(t: &DateTime<FixedOffset>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, false)
}

fn format_attrs(attrs: &[(String, String)]) -> String {
    if attrs.is_empty() {
        return String::new();
    }
    let rendered: Vec<String> = attrs
        .iter()
        .map(|(k, v)| format!("{}=\"{}\"", k, escape_literal(v)))
        .collect();
    format!(", [{}]", rendered.join(", "))
}

fn render_statement(statement: &Statement) -> String {
    match statement {
        Statement::Entity { id, attrs } => format!("entity({id}{})", format_attrs(attrs)),
        Statement::Activity { id, start, end } => {
            format!("activity({id}, {}, {})", format_time(start), format_time(end))
        }
        Statement::Agent { id, attrs } => format!("agent({id}{})", format_attrs(attrs)),
        Statement::WasAssociatedWith { activity, agent } => {
            format!("wasAssociatedWith({activity}, {agent})")
        }
        Statement::WasInformedBy { informed, informant } => {
            format!("wasInformedBy({informed}, {informant})")
        }
        Statement::WasGeneratedBy { entity, activity } => {
            format!("wasGeneratedBy({entity}, {activity})")
        }
        Statement::WasDerivedFrom { generated, used } => {
            format!("wasDerivedFrom({generated}, {used})")
        }
        Statement::Used { activity, entity } => format!("used({activity}, {entity})"),
    }
}

/// Serializes a document: `document` framing, prefix lines, declarations
/// sorted by identifier, then relations sorted by (subject, object).
/// Validates qualified names and declaration-before-use.
pub fn serialize_provn(doc: &ProvDocument) -> Result<String, ExportError> {
    let mut declared: BTreeSet<String> = BTreeSet::new();
    let mut declarations: Vec<&Statement> = Vec::new();
    let mut relations: Vec<&Statement> = Vec::new();
    for statement in &doc.statements {
        if let Some(id) = statement.declared_id() {
            id.validate()?;
            declared.insert(id.to_string());
            declarations.push(statement);
        } else {
            relations.push(statement);
        }
    }
    for statement in &relations {
        let (subject, object, _) = statement.relation_key().expect("relation statements");
        for qn in [subject, object] {
            qn.validate()?;
            if !declared.contains(&qn.to_string()) {
                return Err(ExportError::UndeclaredIdentifier(qn.to_string()));
            }
        }
    }

    declarations.sort_by_key(|s| s.declared_id().expect("declarations").to_string());
    relations.sort_by(|a, b| {
        let (sa, oa, ka) = a.relation_key().expect("relations");
        let (sb, ob, kb) = b.relation_key().expect("relations");
        (sa, oa, ka).cmp(&(sb, ob, kb))
    });

    let mut out = String::from("document\n");
    for (prefix, uri) in &doc.namespaces {
        out.push_str(&format!("prefix {prefix} <{uri}>\n"));
    }
    for statement in declarations.iter().chain(relations.iter()) {
        out.push_str(&render_statement(statement));
        out.push('\n');
    }
    out.push_str("endDocument\n");
    Ok(out)
}

fn dot_quote(raw: &str) -> String {
    format!("\"{}\"", raw.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT mirror of the PROV mapping. Shapes: box=commit, diamond=issue,
/// house=release, ellipse=agent; edges carry the relation name.
pub fn to_dot(graph: &RepoGraph, scope: Option<&str>) -> Result<String, ExportError> {
    let selection = Selection::new(graph, scope)?;

    let mut nodes: Vec<(String, String)> = Vec::new(); // (dot id, attr list)
    for commit in &selection.commits {
        nodes.push((
            commit_qn(commit.id.as_str()).local,
            format!("shape=box, label={}", dot_quote(commit.id.as_str())),
        ));
    }
    for &number in &selection.issues {
        nodes.push((
            issue_qn(number).local,
            format!("shape=diamond, label={}", dot_quote(&format!("#{number}"))),
        ));
    }
    for name in &selection.releases {
        nodes.push((
            release_qn(name).local,
            format!("shape=house, label={}", dot_quote(name)),
        ));
    }
    for dev in selection.agents.values() {
        nodes.push((
            dev_qn(dev).local,
            format!("shape=ellipse, label={}", dot_quote(&dev.name)),
        ));
    }
    nodes.sort();

    let mut edges: Vec<(String, String, &'static str)> = selection
        .relations()
        .iter()
        .map(|statement| {
            let (subject, object, _) = statement.relation_key().expect("relations");
            let label = match statement {
                Statement::WasAssociatedWith { .. } => "wasAssociatedWith",
                Statement::WasInformedBy { .. } => "wasInformedBy",
                Statement::WasGeneratedBy { .. } => "wasGeneratedBy",
                Statement::WasDerivedFrom { .. } => "wasDerivedFrom",
                Statement::Used { .. } => "used",
                _ => unreachable!("declarations filtered"),
            };
            (subject.local.clone(), object.local.clone(), label)
        })
        .collect();
    edges.sort();

    let mut out = String::from("digraph release {\n");
    for (id, attrs) in &nodes {
        out.push_str(&format!("  {} [{}];\n", dot_quote(id), attrs));
    }
    if !nodes.is_empty() && !edges.is_empty() {
        out.push('\n');
    }
    for (from, to, label) in &edges {
        out.push_str(&format!(
            "  {} -> {} [label=\"{}\"];\n",
            dot_quote(from),
            dot_quote(to),
            label
        ));
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gitlog::RawCommitRecord;
    use crate::linking::LinkConfig;
    use crate::model::build_graph;

    fn rec(id: &str, parents: &[&str], author: (&str, &str), decorations: &str, message: &str) -> RawCommitRecord {
        RawCommitRecord {
            id: id.to_owned(),
            parent_ids: parents.iter().map(|p| (*p).to_owned()).collect(),
            author_name: author.0.to_owned(),
            author_email: author.1.to_owned(),
            author_time: "2015-01-01T10:00:00+01:00".to_owned(),
            committer_name: author.0.to_owned(),
            committer_email: author.1.to_owned(),
            commit_time: "2015-01-01T10:00:00+01:00".to_owned(),
            decorations: decorations.to_owned(),
            message: message.to_owned(),
        }
    }

    fn minimal() -> RepoGraph {
        build_graph(
            vec![rec("root1", &[], ("Alice", "alice@x"), "", "start")],
            Vec::new(),
            &LinkConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn empty_document_serializes_to_framing_and_prefix() {
        let text = serialize_provn(&ProvDocument::new()).unwrap();
        assert_eq!(text, "document\nprefix rel <https://relprov.dev/ns#>\nendDocument\n");
    }

    #[test]
    fn minimal_graph_has_one_activity_agent_association() {
        let doc = to_prov(&minimal(), None).unwrap();
        let text = serialize_provn(&doc).unwrap();
        let activity_lines: Vec<&str> =
            text.lines().filter(|l| l.starts_with("activity(")).collect();
        assert_eq!(activity_lines.len(), 1);
        assert_eq!(
            activity_lines[0],
            "activity(rel:commit_root1, 2015-01-01T10:00:00+01:00, 2015-01-01T10:00:00+01:00)"
        );
        assert_eq!(text.lines().filter(|l| l.starts_with("agent(")).count(), 1);
        assert_eq!(
            text.lines().filter(|l| l.starts_with("wasAssociatedWith(")).count(),
            1
        );
        assert!(text.starts_with("document\n"));
        assert!(text.ends_with("endDocument\n"));
    }

    #[test]
    fn unscoped_counts_match_the_graph() {
        let graph = build_graph(
            vec![
                rec("a", &[], ("Alice", "alice@x"), "tag: 1.0.0", "root #1"),
                rec("b", &["a"], ("Bob", "bob@x"), "", "fix #1"),
                rec("c", &["a", "b"], ("Alice", "alice@x"), "tag: 2.0.0", "merge"),
            ],
            Vec::new(),
            &LinkConfig::default(),
        )
        .unwrap();
        let text = serialize_provn(&to_prov(&graph, None).unwrap()).unwrap();
        let count = |prefix: &str| text.lines().filter(|l| l.starts_with(prefix)).count();
        assert_eq!(count("activity("), 3);
        assert_eq!(count("agent("), 2);
        assert_eq!(count("wasAssociatedWith("), 3);
        assert_eq!(count("wasInformedBy("), 3, "sum of parent list lengths");
    }

    #[test]
    fn scope_restricts_to_cr_and_bases() {
        let graph = build_graph(
            vec![
                rec("a", &[], ("Alice", "alice@x"), "tag: 1.0.0", "root"),
                rec("b", &["a"], ("Bob", "bob@x"), "", "work #7"),
                rec("c", &["b"], ("Bob", "bob@x"), "tag: 2.0.0", "finish"),
            ],
            Vec::new(),
            &LinkConfig::default(),
        )
        .unwrap();
        let text = serialize_provn(&to_prov(&graph, Some("2.0.0")).unwrap()).unwrap();
        // CR(2.0.0) = {b, c}; agents = {Bob}; releases = {2.0.0, 1.0.0}
        assert!(text.contains("activity(rel:commit_b,"));
        assert!(text.contains("activity(rel:commit_c,"));
        assert!(!text.contains("activity(rel:commit_a,"));
        assert_eq!(text.lines().filter(|l| l.starts_with("agent(")).count(), 1);
        assert!(text.contains("entity(rel:release_2_0_0,"));
        assert!(text.contains("entity(rel:release_1_0_0,"));
        assert!(text.contains("wasDerivedFrom(rel:release_2_0_0, rel:issue_7)"));
        assert!(text.contains("wasDerivedFrom(rel:release_2_0_0, rel:release_1_0_0)"));
        // c has no refs and sits in CR: attached to the release directly
        assert!(text.contains("wasGeneratedBy(rel:release_2_0_0, rel:commit_c)"));
        assert!(!text.contains("wasGeneratedBy(rel:release_2_0_0, rel:commit_b)"));
        // parent edge b->a is dropped: a is not exported
        assert!(!text.contains("wasInformedBy(rel:commit_b, rel:commit_a)"));
        assert!(text.contains("wasInformedBy(rel:commit_c, rel:commit_b)"));
    }

    #[test]
    fn serialization_is_deterministic() {
        let graph = minimal();
        let a = serialize_provn(&to_prov(&graph, None).unwrap()).unwrap();
        let b = serialize_provn(&to_prov(&graph, None).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn undeclared_identifier_is_rejected() {
        let mut doc = ProvDocument::new();
        doc.statements.push(Statement::WasInformedBy {
            informed: QualifiedName::new("rel", "commit_a"),
            informant: QualifiedName::new("rel", "commit_b"),
        });
        assert!(matches!(
            serialize_provn(&doc),
            Err(ExportError::UndeclaredIdentifier(_))
        ));
    }

    #[test]
    fn invalid_qualified_name_is_rejected() {
        let mut doc = ProvDocument::new();
        doc.statements.push(Statement::Entity {
            id: QualifiedName::new("rel", "9starts-with-digit"),
            attrs: Vec::new(),
        });
        assert!(matches!(
            serialize_provn(&doc),
            Err(ExportError::InvalidQualifiedName(_))
        ));
    }

    #[test]
    fn attr_strings_are_escaped() {
        let mut doc = ProvDocument::new();
        doc.statements.push(Statement::Entity {
            id: QualifiedName::new("rel", "issue_1"),
            attrs: vec![("prov:label".to_owned(), "say \"hi\"\nback\\slash".to_owned())],
        });
        let text = serialize_provn(&doc).unwrap();
        assert!(text.contains(r#"entity(rel:issue_1, [prov:label="say \"hi\"\nback\\slash"])"#));
    }

    #[test]
    fn empty_graph_dot_has_no_nodes() {
        let graph = build_graph(Vec::new(), Vec::new(), &LinkConfig::default()).unwrap();
        assert_eq!(to_dot(&graph, None).unwrap(), "digraph release {\n}\n");
    }

    #[test]
    fn dot_nodes_carry_shapes() {
        let graph = build_graph(
            vec![
                rec("a", &[], ("Alice", "alice@x"), "tag: 1.0.0", "root #3"),
            ],
            Vec::new(),
            &LinkConfig::default(),
        )
        .unwrap();
        let text = to_dot(&graph, None).unwrap();
        assert!(text.contains("\"commit_a\" [shape=box, label=\"a\"];"));
        assert!(text.contains("\"issue_3\" [shape=diamond, label=\"#3\"];"));
        assert!(text.contains("\"release_1_0_0\" [shape=house, label=\"1.0.0\"];"));
        assert!(text.contains("shape=ellipse, label=\"Alice\"];"));
        assert!(text.contains("-> \"commit_a\" [label=\"wasGeneratedBy\"];"));
    }

    #[test]
    fn dev_identifiers_do_not_leak_emails() {
        let text = serialize_provn(&to_prov(&minimal(), None).unwrap()).unwrap();
        assert!(!text.contains("alice@x"));
        assert!(text.contains("agent(rel:dev_"));
    }

    #[test]
    fn unknown_scope_tag_errors() {
        assert!(matches!(
            to_prov(&minimal(), Some("9.9.9")),
            Err(ExportError::UnknownTag(_))
        ));
        assert!(matches!(to_dot(&minimal(), Some("9.9.9")), Err(ExportError::UnknownTag(_))));
    }
}
