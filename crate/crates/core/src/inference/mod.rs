//! Inference over the triple index: transitive closure of predicates
//! declared transitive on their own page, subproperty lifting along `IsA`
//! hierarchies of relationship types, and typed conjunctive queries.
//!
//! Inferred triples are computed on demand and never written back to pages.

mod query;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::markup::{ObjectValue, PageName};
use crate::store::{Triple, TripleIndex, TriplePattern};

pub use query::{
    compare, compare_decimal, conjunctive_query, interest_match, parse_operand, parse_query, Clause, Comparator, Facts,
    Operand, QueryError,
};

pub const TRANSITIVE: &str = "IsTransitive";
pub const IS_A: &str = "IsA";
pub const INTERESTS_IN: &str = "InterestsIn";
pub const SUBPROPERTY_DEPTH_CAP: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Transitivity,
    Subproperty,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Transitivity => "transitivity",
            Rule::Subproperty => "subproperty",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InferredTriple {
    pub triple: Triple,
    pub rule: Rule,
    /// Shortest path length for transitivity, `IsA` distance for lifting.
    pub depth: usize,
}

/// Behaviour a relationship type declares on its own page:
/// `IsTransitive: Yes` and any number of `IsA: SuperPredicate` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateBehaviour {
    pub predicate: PageName,
    pub transitive: bool,
    pub parents: BTreeSet<PageName>,
}

impl PredicateBehaviour {
    pub fn read(index: &TripleIndex, predicate: &PageName) -> Self {
        let transitive = index.objects(predicate, TRANSITIVE).any(|o| o.text().eq_ignore_ascii_case("yes"));
        let parents = index.objects(predicate, IS_A).filter_map(object_page).collect();
        PredicateBehaviour { predicate: predicate.clone(), transitive, parents }
    }
}

/// Page named by an object, whether written as a reference or as text.
fn object_page(object: &ObjectValue) -> Option<PageName> {
    match object {
        ObjectValue::PageRef(p) => Some(p.clone()),
        ObjectValue::Literal { lexical, .. } => PageName::new(lexical.clone()).ok(),
    }
}

/// Predicates whose page says `IsTransitive: Yes`.
pub fn transitive_predicates(index: &TripleIndex) -> BTreeSet<PageName> {
    let transitive = PageName::new(TRANSITIVE).expect("valid name");
    index
        .predicate_usage(&transitive)
        .into_iter()
        .filter(|t| t.object.text().eq_ignore_ascii_case("yes"))
        .map(|t| t.subject)
        .collect()
}

/// Triples `(a, pred, c)` reachable through a `pred` path of length two or
/// more that are not already stored. Empty unless `pred` is transitive.
pub fn closure(index: &TripleIndex, predicate: &PageName) -> BTreeSet<InferredTriple> {
    if !PredicateBehaviour::read(index, predicate).transitive {
        return BTreeSet::new();
    }
    let mut adjacency: BTreeMap<&PageName, BTreeSet<&PageName>> = BTreeMap::new();
    let usage = index.predicate_usage(predicate);
    for t in &usage {
        if let ObjectValue::PageRef(o) = &t.object {
            adjacency.entry(&t.subject).or_default().insert(o);
        }
    }

    let mut out = BTreeSet::new();
    for (&source, direct) in &adjacency {
        let mut dist: HashMap<&PageName, usize> = HashMap::new();
        let mut queue: VecDeque<&PageName> = VecDeque::new();
        for &n in direct {
            dist.insert(n, 1);
            queue.push_back(n);
        }
        while let Some(node) = queue.pop_front() {
            let d = dist[node];
            for &next in adjacency.get(node).into_iter().flatten() {
                if !dist.contains_key(next) {
                    dist.insert(next, d + 1);
                    queue.push_back(next);
                }
            }
        }
        for (target, depth) in dist {
            if !direct.contains(target) {
                out.insert(InferredTriple {
                    triple: Triple::new(source.clone(), predicate.clone(), ObjectValue::PageRef(target.clone())),
                    rule: Rule::Transitivity,
                    depth,
                });
            }
        }
    }
    out
}

/// Closure of every transitive predicate.
pub fn all_closures(index: &TripleIndex) -> BTreeSet<InferredTriple> {
    transitive_predicates(index).iter().flat_map(|p| closure(index, p)).collect()
}

/// Strict `IsA` ancestors of `predicate` with their distance, cycle-safe and
/// capped at [`SUBPROPERTY_DEPTH_CAP`].
pub fn ancestors(index: &TripleIndex, predicate: &PageName) -> BTreeMap<PageName, usize> {
    let mut seen: BTreeMap<PageName, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([(predicate.clone(), 0usize)]);
    while let Some((current, depth)) = queue.pop_front() {
        if depth >= SUBPROPERTY_DEPTH_CAP {
            continue;
        }
        for parent in PredicateBehaviour::read(index, &current).parents {
            if parent != *predicate && !seen.contains_key(&parent) {
                seen.insert(parent.clone(), depth + 1);
                queue.push_back((parent, depth + 1));
            }
        }
    }
    seen
}

/// For every stored or transitively inferred `(s, p, o)` and every `IsA`
/// ancestor `q` of `p`, the triple `(s, q, o)` when it is not already known.
pub fn subproperty_lift(index: &TripleIndex) -> BTreeSet<InferredTriple> {
    lift_over(index, &all_closures(index))
}

fn lift_over(index: &TripleIndex, closures: &BTreeSet<InferredTriple>) -> BTreeSet<InferredTriple> {
    let known: BTreeSet<&Triple> = index.triples().chain(closures.iter().map(|i| &i.triple)).collect();
    let mut ancestor_cache: HashMap<&PageName, BTreeMap<PageName, usize>> = HashMap::new();
    let mut lifted: BTreeMap<Triple, usize> = BTreeMap::new();

    for t in &known {
        let ancestors = ancestor_cache.entry(&t.predicate).or_insert_with(|| ancestors(index, &t.predicate));
        for (q, depth) in ancestors.iter() {
            let candidate = Triple::new(t.subject.clone(), q.clone(), t.object.clone());
            if known.contains(&candidate) {
                continue;
            }
            lifted.entry(candidate).and_modify(|d| *d = (*d).min(*depth)).or_insert(*depth);
        }
    }
    lifted
        .into_iter()
        .map(|(triple, depth)| InferredTriple { triple, rule: Rule::Subproperty, depth })
        .collect()
}

/// Every inferred triple: all closures plus the subproperty lift.
pub fn infer_all(index: &TripleIndex) -> BTreeSet<InferredTriple> {
    let closures = all_closures(index);
    let lifted = lift_over(index, &closures);
    closures.into_iter().chain(lifted).collect()
}

/// Stored triples matching `pattern` plus inferred ones, tagged.
pub fn query_with_inferred(index: &TripleIndex, pattern: &TriplePattern) -> Vec<(Triple, Option<Rule>)> {
    let mut out: Vec<(Triple, Option<Rule>)> = index.query(pattern).into_iter().map(|t| (t, None)).collect();
    out.extend(
        infer_all(index)
            .into_iter()
            .filter(|i| pattern.matches(&i.triple))
            .map(|i| (i.triple, Some(i.rule))),
    );
    out
}
