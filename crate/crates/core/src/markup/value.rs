use std::fmt;
use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::name::{is_wiki_word, PageName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Integer,
    Decimal,
    Date,
}

impl Datatype {
    pub fn as_str(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Integer => "integer",
            Datatype::Decimal => "decimal",
            Datatype::Date => "date",
        }
    }

    /// XML Schema datatype IRI; plain strings carry none.
    pub fn xsd_iri(self) -> Option<&'static str> {
        match self {
            Datatype::String => None,
            Datatype::Integer => Some("http://www.w3.org/2001/XMLSchema#integer"),
            Datatype::Decimal => Some("http://www.w3.org/2001/XMLSchema#decimal"),
            Datatype::Date => Some("http://www.w3.org/2001/XMLSchema#date"),
        }
    }

    pub fn from_xsd_iri(iri: &str) -> Option<Datatype> {
        [Datatype::Integer, Datatype::Decimal, Datatype::Date]
            .into_iter()
            .find(|d| d.xsd_iri() == Some(iri))
    }
}

impl std::str::FromStr for Datatype {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "string" => Ok(Datatype::String),
            "integer" => Ok(Datatype::Integer),
            "decimal" => Ok(Datatype::Decimal),
            "date" => Ok(Datatype::Date),
            other => Err(format!("unknown datatype {other:?}")),
        }
    }
}

/// Object position of a triple: either another page or a typed literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectValue {
    PageRef(PageName),
    Literal { lexical: String, datatype: Datatype },
}

static INTEGER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^-?[0-9]+$").unwrap());
static DECIMAL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^-?[0-9]+\.[0-9]+$").unwrap());
static DATE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[0-9]{4}-[0-9]{2}-[0-9]{2}$").unwrap());

impl ObjectValue {
    pub fn page(name: PageName) -> Self {
        ObjectValue::PageRef(name)
    }

    /// Literal typed by the first matching rule among date, integer, decimal,
    /// falling back to string.
    pub fn literal(lexical: impl Into<String>) -> Self {
        let lexical = lexical.into();
        let datatype = classify_literal(&lexical);
        ObjectValue::Literal { lexical, datatype }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Datatype) -> Self {
        ObjectValue::Literal { lexical: lexical.into(), datatype }
    }

    /// Classify a trimmed property value. A value is a page reference iff it
    /// is a single WikiWord, a single capitalised word (`Hamlet`, `Leipzig`)
    /// or a single `[[...]]` token holding a valid name.
    pub fn classify(raw: &str) -> Self {
        let value = raw.trim();
        if is_wiki_word(value) || is_capitalised_word(value) {
            if let Ok(name) = PageName::new(value) {
                return ObjectValue::PageRef(name);
            }
        }
        if let Some(name) = single_freetext_link(value) {
            return ObjectValue::PageRef(name);
        }
        ObjectValue::literal(value)
    }

    pub fn as_page(&self) -> Option<&PageName> {
        match self {
            ObjectValue::PageRef(p) => Some(p),
            ObjectValue::Literal { .. } => None,
        }
    }

    pub fn datatype(&self) -> Option<Datatype> {
        match self {
            ObjectValue::PageRef(_) => None,
            ObjectValue::Literal { datatype, .. } => Some(*datatype),
        }
    }

    /// Page name or literal lexical form.
    pub fn text(&self) -> &str {
        match self {
            ObjectValue::PageRef(p) => p.as_str(),
            ObjectValue::Literal { lexical, .. } => lexical,
        }
    }
}

impl fmt::Display for ObjectValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectValue::PageRef(p) => write!(f, "[{p}]"),
            ObjectValue::Literal { lexical, datatype: Datatype::String } => write!(f, "{lexical:?}"),
            ObjectValue::Literal { lexical, datatype } => write!(f, "{lexical:?}^^{}", datatype.as_str()),
        }
    }
}

pub fn classify_literal(lexical: &str) -> Datatype {
    if is_date(lexical) {
        Datatype::Date
    } else if INTEGER.is_match(lexical) {
        Datatype::Integer
    } else if DECIMAL.is_match(lexical) {
        Datatype::Decimal
    } else {
        Datatype::String
    }
}

/// `YYYY-MM-DD` naming a real calendar date.
pub fn is_date(lexical: &str) -> bool {
    parse_date(lexical).is_some()
}

pub fn parse_date(lexical: &str) -> Option<NaiveDate> {
    if !DATE.is_match(lexical) {
        return None;
    }
    NaiveDate::parse_from_str(lexical, "%Y-%m-%d").ok()
}

/// One word starting with an upper-case letter, letters and digits only.
pub fn is_capitalised_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_uppercase()) && chars.all(char::is_alphanumeric)
}

fn single_freetext_link(value: &str) -> Option<PageName> {
    let inner = value.strip_prefix("[[")?.strip_suffix("]]")?;
    if inner.contains('[') || inner.contains(']') {
        return None;
    }
    PageName::new(inner.trim()).ok()
}
