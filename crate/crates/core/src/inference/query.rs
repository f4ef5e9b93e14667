use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use chrono::Datelike;
use thiserror::Error;

use super::{infer_all, INTERESTS_IN};
use crate::markup::{parse_date, Datatype, ObjectValue, PageName};
use crate::store::{Triple, TripleIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparator {
    Eq,
    Ne,
    Lt,
    Gt,
    SameYear,
}

impl Comparator {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Gt => ">",
            Comparator::SameYear => "same-year",
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Comparator {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "=" | "==" => Ok(Comparator::Eq),
            "!=" | "≠" => Ok(Comparator::Ne),
            "<" => Ok(Comparator::Lt),
            ">" => Ok(Comparator::Gt),
            "same-year" => Ok(Comparator::SameYear),
            other => Err(QueryError::UnknownOperator(other.to_string())),
        }
    }
}

/// Right-hand side of a clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Value(ObjectValue),
    /// Every value `subject` has for `predicate` (the clause's own predicate
    /// when `None`). The anchor subject itself is excluded from the clause's
    /// matches, so "born the same year as X" does not return X.
    ValueOf { subject: PageName, predicate: Option<PageName> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub predicate: PageName,
    pub op: Comparator,
    pub operand: Operand,
}

impl Clause {
    pub fn new(predicate: PageName, op: Comparator, operand: Operand) -> Self {
        Clause { predicate, op, operand }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query has no clauses")]
    Empty,
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
    #[error("malformed clause {clause:?}: {reason}")]
    MalformedClause { clause: String, reason: String },
}

impl QueryError {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            QueryError::Empty => "empty_query",
            QueryError::UnknownOperator(_) => "unknown_operator",
            QueryError::MalformedClause { .. } => "malformed_clause",
        }
    }

    fn malformed(clause: &str, reason: impl Into<String>) -> Self {
        QueryError::MalformedClause { clause: clause.to_string(), reason: reason.into() }
    }
}

/// Parse the textual clause grammar:
///
/// ```text
/// query   := clause (';' clause)*
/// clause  := name WS op WS operand
/// op      := '=' | '!=' | '<' | '>' | 'same-year'
/// operand := '@' name ('/' name)?    -- values of another page
///          | '"' text '"'            -- string literal
///          | value                   -- classified like a property value
/// name    := WikiWord | '[[' text ']]'
/// ```
pub fn parse_query(expr: &str) -> Result<Vec<Clause>, QueryError> {
    let clauses: Vec<Clause> = expr
        .split(';')
        .filter(|c| !c.trim().is_empty())
        .map(parse_clause)
        .collect::<Result<_, _>>()?;
    if clauses.is_empty() {
        return Err(QueryError::Empty);
    }
    Ok(clauses)
}

fn parse_clause(text: &str) -> Result<Clause, QueryError> {
    let clause = text.trim();
    let (predicate, rest) = split_name(clause).ok_or_else(|| QueryError::malformed(clause, "missing predicate"))?;
    let predicate = PageName::new(predicate).map_err(|e| QueryError::malformed(clause, e.to_string()))?;
    let rest = rest.trim_start();
    let (op, operand) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
    if op.is_empty() {
        return Err(QueryError::malformed(clause, "missing operator"));
    }
    let op: Comparator = op.parse()?;
    let operand = parse_operand(operand.trim()).map_err(|reason| QueryError::malformed(clause, reason))?;
    Ok(Clause { predicate, op, operand })
}

/// Leading name, bare or bracketed, and the remaining text.
fn split_name(s: &str) -> Option<(&str, &str)> {
    if let Some(inner) = s.strip_prefix("[[") {
        let end = inner.find("]]")?;
        return Some((inner[..end].trim(), &inner[end + 2..]));
    }
    let end = s.find(|c: char| c.is_whitespace() || c == '/').unwrap_or(s.len());
    if end == 0 {
        return None;
    }
    Some((&s[..end], &s[end..]))
}

/// Parse one operand of the textual grammar.
pub fn parse_operand(text: &str) -> Result<Operand, String> {
    if text.is_empty() {
        return Err("missing operand".into());
    }
    if let Some(anchor) = text.strip_prefix('@') {
        let (subject, rest) = split_name(anchor).ok_or("missing page after '@'")?;
        let subject = PageName::new(subject).map_err(|e| e.to_string())?;
        let predicate = match rest.trim() {
            "" => None,
            r => {
                let p = r.strip_prefix('/').ok_or("expected '/predicate' after anchor page")?.trim();
                let p = p.strip_prefix("[[").and_then(|p| p.strip_suffix("]]")).map_or(p, str::trim);
                Some(PageName::new(p).map_err(|e| e.to_string())?)
            }
        };
        return Ok(Operand::ValueOf { subject, predicate });
    }
    if text.len() >= 2 && text.starts_with('"') && text.ends_with('"') {
        return Ok(Operand::Value(ObjectValue::typed(&text[1..text.len() - 1], Datatype::String)));
    }
    Ok(Operand::Value(ObjectValue::classify(text)))
}

/// Exact numeric order of two `-?digits(.digits)?` strings.
pub fn compare_decimal(a: &str, b: &str) -> Option<Ordering> {
    let (neg_a, int_a, frac_a) = split_number(a)?;
    let (neg_b, int_b, frac_b) = split_number(b)?;
    let zero_a = int_a.is_empty() && frac_a.is_empty();
    let zero_b = int_b.is_empty() && frac_b.is_empty();
    let neg_a = neg_a && !zero_a;
    let neg_b = neg_b && !zero_b;
    let magnitude = int_a
        .len()
        .cmp(&int_b.len())
        .then_with(|| int_a.cmp(int_b))
        .then_with(|| frac_a.cmp(frac_b));
    Some(match (neg_a, neg_b) {
        (false, false) => magnitude,
        (true, true) => magnitude.reverse(),
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
    })
}

fn split_number(s: &str) -> Option<(bool, &str, &str)> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.contains('.') && frac.is_empty() {
        return None;
    }
    Some((neg, int.trim_start_matches('0'), frac.trim_end_matches('0')))
}

/// Typed comparison `left op right`. Values of different kinds or
/// datatypes never satisfy any operator.
pub fn compare(left: &ObjectValue, op: Comparator, right: &ObjectValue) -> bool {
    let ordering = match (left, right) {
        (ObjectValue::PageRef(a), ObjectValue::PageRef(b)) => {
            if op == Comparator::SameYear {
                return false;
            }
            a.cmp(b)
        }
        (
            ObjectValue::Literal { lexical: a, datatype: da },
            ObjectValue::Literal { lexical: b, datatype: db },
        ) if da == db => match da {
            Datatype::Date => {
                let (Some(a), Some(b)) = (parse_date(a), parse_date(b)) else {
                    return false;
                };
                if op == Comparator::SameYear {
                    return a.year() == b.year();
                }
                a.cmp(&b)
            }
            _ if op == Comparator::SameYear => return false,
            Datatype::Integer | Datatype::Decimal => match compare_decimal(a, b) {
                Some(o) => o,
                None => return false,
            },
            Datatype::String => a.cmp(b),
        },
        _ => return false,
    };
    match op {
        Comparator::Eq => ordering == Ordering::Equal,
        Comparator::Ne => ordering != Ordering::Equal,
        Comparator::Lt => ordering == Ordering::Less,
        Comparator::Gt => ordering == Ordering::Greater,
        Comparator::SameYear => unreachable!("handled above"),
    }
}

/// Stored plus inferred triples, grouped by predicate.
pub struct Facts {
    by_predicate: HashMap<PageName, Vec<Triple>>,
}

impl Facts {
    pub fn gather(index: &TripleIndex) -> Self {
        let mut by_predicate: HashMap<PageName, Vec<Triple>> = HashMap::new();
        let inferred = infer_all(index);
        for t in index.triples().cloned().chain(inferred.into_iter().map(|i| i.triple)) {
            by_predicate.entry(t.predicate.clone()).or_default().push(t);
        }
        Facts { by_predicate }
    }

    fn with_predicate(&self, predicate: &PageName) -> &[Triple] {
        self.by_predicate.get(predicate).map_or(&[], Vec::as_slice)
    }

    fn values_of<'a>(&'a self, subject: &'a PageName, predicate: &PageName) -> impl Iterator<Item = &'a ObjectValue> {
        self.with_predicate(predicate).iter().filter(move |t| t.subject == *subject).map(|t| &t.object)
    }

    /// Subjects satisfying one clause.
    pub fn matches(&self, clause: &Clause) -> BTreeSet<PageName> {
        let (values, anchor): (Vec<&ObjectValue>, Option<&PageName>) = match &clause.operand {
            Operand::Value(v) => (vec![v], None),
            Operand::ValueOf { subject, predicate } => {
                let pred = predicate.as_ref().unwrap_or(&clause.predicate);
                (self.values_of(subject, pred).collect(), Some(subject))
            }
        };
        self.with_predicate(&clause.predicate)
            .iter()
            .filter(|t| Some(&t.subject) != anchor)
            .filter(|t| values.iter().any(|v| compare(&t.object, clause.op, v)))
            .map(|t| t.subject.clone())
            .collect()
    }

    pub fn query(&self, clauses: &[Clause]) -> Result<BTreeSet<PageName>, QueryError> {
        let (first, rest) = clauses.split_first().ok_or(QueryError::Empty)?;
        let mut result = self.matches(first);
        for clause in rest {
            if result.is_empty() {
                break;
            }
            let next = self.matches(clause);
            result.retain(|s| next.contains(s));
        }
        Ok(result)
    }
}

/// Subjects satisfying every clause over stored and inferred triples.
pub fn conjunctive_query(index: &TripleIndex, clauses: &[Clause]) -> Result<BTreeSet<PageName>, QueryError> {
    if clauses.is_empty() {
        return Err(QueryError::Empty);
    }
    Facts::gather(index).query(clauses)
}

/// People sharing at least one `InterestsIn` object with `person`.
pub fn interest_match(index: &TripleIndex, person: &PageName) -> BTreeSet<PageName> {
    let clause = Clause::new(
        PageName::new(INTERESTS_IN).expect("valid name"),
        Comparator::Eq,
        Operand::ValueOf { subject: person.clone(), predicate: None },
    );
    conjunctive_query(index, &[clause]).expect("one clause is never malformed")
}
