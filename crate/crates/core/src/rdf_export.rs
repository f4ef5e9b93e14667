//! URI minting and N-Triples / Turtle serialization of the triple set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::encoding::{decode, encode_segment};
use crate::inference::infer_all;
use crate::markup::{ObjectValue, PageName};
use crate::store::{write_file_atomic, Store, StoreError, Triple, TripleIndex};

/// Page holding `SomeOne: <absolute-uri>` alias lines.
pub const URI_MAP: &str = "UriMap";
pub const EXPORT_NT: &str = "export.nt";
pub const EXPORT_TTL: &str = "export.ttl";
pub const EXPORT_INFERRED_NT: &str = "export.inferred.nt";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("invalid base URI {uri:?}: {reason}")]
    InvalidBase { uri: String, reason: String },
    #[error("URI {uri:?} minted for {page} is not a valid absolute IRI")]
    SerializationFailure { page: PageName, uri: String },
    #[error(transparent)]
    Storage(#[from] StoreError),
}

/// True for an absolute IRI that can be written inside `<...>` in
/// N-Triples without escaping.
pub fn is_valid_iri(s: &str) -> bool {
    let forbidden = |c: char| c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\');
    !s.is_empty() && !s.chars().any(forbidden) && url::Url::parse(s).is_ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UriPolicy {
    base: String,
    aliases: BTreeMap<PageName, String>,
}

impl UriPolicy {
    pub fn new(base: impl Into<String>) -> Result<Self, ExportError> {
        let base = base.into();
        if !base.ends_with('/') {
            return Err(ExportError::InvalidBase { uri: base, reason: "must end with '/'".into() });
        }
        if !is_valid_iri(&base) {
            return Err(ExportError::InvalidBase { uri: base, reason: "not an absolute IRI".into() });
        }
        Ok(UriPolicy { base, aliases: BTreeMap::new() })
    }

    /// Aliases are checked when minted, not here.
    pub fn with_alias(mut self, page: PageName, uri: impl Into<String>) -> Self {
        self.aliases.insert(page, uri.into());
        self
    }

    /// Base policy plus the valid alias lines of the `UriMap` page.
    pub fn from_wiki(base: impl Into<String>, index: &TripleIndex) -> Result<Self, ExportError> {
        let mut policy = UriPolicy::new(base)?;
        let map = PageName::new(URI_MAP).expect("valid name");
        for t in index.subject_triples(&map) {
            let raw = t.object.text().trim();
            let uri = raw.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(raw);
            if is_valid_iri(uri) {
                policy.aliases.insert(t.predicate.clone(), uri.to_string());
            } else {
                tracing::warn!(page = %t.predicate, value = raw, "ignoring UriMap entry that is not an absolute URI");
            }
        }
        Ok(policy)
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn aliases(&self) -> &BTreeMap<PageName, String> {
        &self.aliases
    }

    pub fn mint(&self, page: &PageName) -> String {
        match self.aliases.get(page) {
            Some(alias) => alias.clone(),
            None => format!("{}{}", self.base, encode_segment(page.as_str())),
        }
    }

    /// Inverse of [`mint`](Self::mint).
    pub fn resolve(&self, uri: &str) -> Option<PageName> {
        if let Some((page, _)) = self.aliases.iter().find(|(_, a)| a.as_str() == uri) {
            return Some(page.clone());
        }
        let encoded = uri.strip_prefix(&self.base)?;
        PageName::new(decode(encoded)?).ok()
    }

    fn checked(&self, page: &PageName) -> Result<String, ExportError> {
        let uri = self.mint(page);
        if is_valid_iri(&uri) {
            Ok(uri)
        } else {
            Err(ExportError::SerializationFailure { page: page.clone(), uri })
        }
    }
}

pub fn mint_uri(page: &PageName, policy: &UriPolicy) -> String {
    policy.mint(page)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    NTriples,
    Turtle,
}

impl Format {
    pub fn media_type(self) -> &'static str {
        match self {
            Format::NTriples => "application/n-triples",
            Format::Turtle => "text/turtle",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ntriples" | "n-triples" | "nt" => Ok(Format::NTriples),
            "turtle" | "ttl" => Ok(Format::Turtle),
            other => Err(format!("unknown export format {other:?} (expected ntriples or turtle)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportDocument {
    pub format: Format,
    pub body: String,
    pub triple_count: usize,
    pub includes_inferred: bool,
}

/// Serialized statement; the derived order sorts by subject, predicate,
/// then object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Statement {
    subject: String,
    predicate: String,
    object: String,
}

fn term_for(object: &ObjectValue, policy: &UriPolicy) -> Result<String, ExportError> {
    Ok(match object {
        ObjectValue::PageRef(p) => format!("<{}>", policy.checked(p)?),
        ObjectValue::Literal { lexical, datatype } => {
            let quoted = quote_literal(lexical);
            match datatype.xsd_iri() {
                Some(dt) => format!("{quoted}^^<{dt}>"),
                None => quoted,
            }
        }
    })
}

fn quote_literal(lexical: &str) -> String {
    let mut out = String::with_capacity(lexical.len() + 2);
    out.push('"');
    for c in lexical.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => write!(out, "\\u{:04X}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn statements<'a>(
    triples: impl IntoIterator<Item = &'a Triple>,
    policy: &UriPolicy,
) -> Result<BTreeSet<Statement>, ExportError> {
    triples
        .into_iter()
        .map(|t| {
            Ok(Statement {
                subject: format!("<{}>", policy.checked(&t.subject)?),
                predicate: format!("<{}>", policy.checked(&t.predicate)?),
                object: term_for(&t.object, policy)?,
            })
        })
        .collect()
}

fn serialize(statements: &BTreeSet<Statement>, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::NTriples => {
            for s in statements {
                writeln!(out, "{} {} {} .", s.subject, s.predicate, s.object).unwrap();
            }
        }
        Format::Turtle => {
            let mut current: Option<&str> = None;
            for s in statements {
                if current == Some(s.subject.as_str()) {
                    write!(out, " ;\n    {} {}", s.predicate, s.object).unwrap();
                } else {
                    if current.is_some() {
                        out.push_str(" .\n\n");
                    }
                    write!(out, "{} {} {}", s.subject, s.predicate, s.object).unwrap();
                    current = Some(&s.subject);
                }
            }
            if current.is_some() {
                out.push_str(" .\n");
            }
        }
    }
    out
}

/// Serialize an arbitrary set of triples.
pub fn serialize_triples<'a>(
    triples: impl IntoIterator<Item = &'a Triple>,
    policy: &UriPolicy,
    format: Format,
) -> Result<(String, usize), ExportError> {
    let statements = statements(triples, policy)?;
    Ok((serialize(&statements, format), statements.len()))
}

/// Export the stored triples, optionally followed by the inferred ones.
pub fn export(
    index: &TripleIndex,
    policy: &UriPolicy,
    format: Format,
    include_inferred: bool,
) -> Result<ExportDocument, ExportError> {
    let inferred: Vec<Triple> = if include_inferred {
        infer_all(index).into_iter().map(|i| i.triple).collect()
    } else {
        Vec::new()
    };
    let (body, triple_count) = serialize_triples(index.triples().chain(&inferred), policy, format)?;
    Ok(ExportDocument { format, body, triple_count, includes_inferred: include_inferred })
}

/// Only the inferred triples, as N-Triples.
pub fn export_inferred_only(index: &TripleIndex, policy: &UriPolicy) -> Result<ExportDocument, ExportError> {
    let inferred: Vec<Triple> = infer_all(index).into_iter().map(|i| i.triple).collect();
    let (body, triple_count) = serialize_triples(&inferred, policy, Format::NTriples)?;
    Ok(ExportDocument { format: Format::NTriples, body, triple_count, includes_inferred: true })
}

/// Write `export.nt`, `export.ttl` and `export.inferred.nt` into `dir`.
pub fn write_export_files(index: &TripleIndex, policy: &UriPolicy, dir: &Path) -> Result<(), ExportError> {
    let files = [
        (EXPORT_NT, export(index, policy, Format::NTriples, false)?),
        (EXPORT_TTL, export(index, policy, Format::Turtle, false)?),
        (EXPORT_INFERRED_NT, export_inferred_only(index, policy)?),
    ];
    for (file, doc) in files {
        let tmp = dir.join(format!(".{file}.tmp"));
        write_file_atomic(&tmp, &dir.join(file), doc.body.as_bytes())?;
    }
    Ok(())
}

/// Keep the export files in the store's data directory current after every
/// save. Failures are reported to the store, which logs them.
pub fn install_save_hook(store: &Store, base: &str) -> Result<(), ExportError> {
    UriPolicy::new(base)?;
    let base: Arc<str> = Arc::from(base);
    let dir = store.root().to_path_buf();
    store.on_save(move |index, _page| {
        let policy = UriPolicy::from_wiki(&*base, index)?;
        write_export_files(index, &policy, &dir)?;
        Ok(())
    });
    Ok(())
}
