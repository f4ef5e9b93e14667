use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of a wiki page. Every page is a concept, and its name doubles as the
/// RDF subject (and predicate, when the page describes a relationship type).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PageName(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvalidPageName {
    #[error("page name is empty")]
    Empty,
    #[error("page name {0:?} contains '/'")]
    Slash(String),
    #[error("page name {0:?} contains a control character")]
    Control(String),
    #[error("page name {0:?} has leading or trailing whitespace")]
    Whitespace(String),
}

impl PageName {
    pub fn new(value: impl Into<String>) -> Result<Self, InvalidPageName> {
        let value = value.into();
        if value.is_empty() {
            return Err(InvalidPageName::Empty);
        }
        if value.contains('/') {
            return Err(InvalidPageName::Slash(value));
        }
        if value.chars().any(char::is_control) {
            return Err(InvalidPageName::Control(value));
        }
        if value.trim() != value {
            return Err(InvalidPageName::Whitespace(value));
        }
        Ok(PageName(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the name is a WikiWord and can therefore be written bare in
    /// source text; every other name needs `[[...]]`.
    pub fn is_wiki_word(&self) -> bool {
        is_wiki_word(&self.0)
    }

    /// How the name is written in wiki source.
    pub fn to_source(&self) -> String {
        if self.is_wiki_word() {
            self.0.clone()
        } else {
            format!("[[{}]]", self.0)
        }
    }
}

/// CamelCase recognizer.
///
/// A WikiWord is an ASCII letter followed by ASCII letters or digits, with at
/// least two upper-case letters and at least one lower-case letter. This
/// admits `HomePage`, `MoinMoin`, `JSPWiki`, `ZWiki` and lowerCamelCase words
/// such as `isAuthorOf`, and rejects acronyms (`HTML`) and ordinary words
/// (`Note`, `knows`).
pub fn is_wiki_word(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    if !s.chars().all(|c| c.is_ascii_alphanumeric()) {
        return false;
    }
    let upper = s.chars().filter(char::is_ascii_uppercase).count();
    let lower = s.chars().filter(char::is_ascii_lowercase).count();
    upper >= 2 && lower >= 1
}

impl fmt::Display for PageName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for PageName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for PageName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for PageName {
    type Error = InvalidPageName;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        PageName::new(value)
    }
}

impl TryFrom<&str> for PageName {
    type Error = InvalidPageName;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        PageName::new(value)
    }
}

impl From<PageName> for String {
    fn from(name: PageName) -> String {
        name.0
    }
}

impl std::str::FromStr for PageName {
    type Err = InvalidPageName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PageName::new(s)
    }
}
