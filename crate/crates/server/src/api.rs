//! JSON API consumed by the browser client.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use serde_json::json;
use shawn_core::inference::{conjunctive_query, infer_all, parse_query, Clause, Comparator, Operand, QueryError};
use shawn_core::markup::{Datatype, ObjectValue, PageName};
use shawn_core::navigation::{INSTANCE_OF, TYPE_OF};
use shawn_core::store::{Triple, TripleIndex};

use crate::app::{flag, AppState};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonObject {
    Page { page: PageName },
    Literal { literal: String, datatype: Datatype },
}

impl From<&ObjectValue> for JsonObject {
    fn from(o: &ObjectValue) -> Self {
        match o {
            ObjectValue::PageRef(page) => JsonObject::Page { page: page.clone() },
            ObjectValue::Literal { lexical, datatype } => {
                JsonObject::Literal { literal: lexical.clone(), datatype: *datatype }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JsonTriple {
    pub subject: PageName,
    pub predicate: PageName,
    pub object: JsonObject,
    pub inferred: bool,
}

impl JsonTriple {
    fn new(t: &Triple, inferred: bool) -> Self {
        JsonTriple { subject: t.subject.clone(), predicate: t.predicate.clone(), object: (&t.object).into(), inferred }
    }
}

/// Stored triples; `?inferred=1` appends the inferred ones.
pub async fn triples(State(state): State<AppState>, Query(params): Query<HashMap<String, String>>) -> Json<Vec<JsonTriple>> {
    let index = state.store.snapshot();
    let mut out: Vec<JsonTriple> = index.triples().map(|t| JsonTriple::new(t, false)).collect();
    if params.get("inferred").is_some_and(|v| flag(v)) {
        out.extend(infer_all(&index).iter().map(|i| JsonTriple::new(&i.triple, true)));
    }
    Json(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub predicate: PageName,
    pub value: String,
    pub datatype: Datatype,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: PageName,
    pub types: Vec<PageName>,
    pub attributes: Vec<Attribute>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub source: PageName,
    pub predicate: PageName,
    pub target: PageName,
    pub inferred: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphView {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl GraphView {
    /// Pages as nodes, page-valued triples (stored and inferred) as edges,
    /// literal-valued triples as node attributes.
    pub fn build(index: &TripleIndex) -> Self {
        let mut nodes: BTreeMap<PageName, GraphNode> = BTreeMap::new();
        let node = |nodes: &mut BTreeMap<PageName, GraphNode>, id: &PageName| {
            nodes
                .entry(id.clone())
                .or_insert_with(|| GraphNode { id: id.clone(), types: Vec::new(), attributes: Vec::new() });
        };
        for page in index.list_pages() {
            node(&mut nodes, &page);
        }
        let stored = index.triples().map(|t| (t.clone(), false));
        let inferred = infer_all(index).into_iter().map(|i| (i.triple, true));
        let mut edges = BTreeSet::new();
        for (t, is_inferred) in stored.chain(inferred) {
            node(&mut nodes, &t.subject);
            match &t.object {
                ObjectValue::PageRef(target) => {
                    node(&mut nodes, target);
                    let p = t.predicate.as_str();
                    if !is_inferred && (p == TYPE_OF || p == INSTANCE_OF) {
                        nodes.get_mut(&t.subject).expect("inserted").types.push(target.clone());
                    }
                    edges.insert(GraphEdge {
                        source: t.subject.clone(),
                        predicate: t.predicate.clone(),
                        target: target.clone(),
                        inferred: is_inferred,
                    });
                }
                ObjectValue::Literal { lexical, datatype } => {
                    nodes.get_mut(&t.subject).expect("inserted").attributes.push(Attribute {
                        predicate: t.predicate.clone(),
                        value: lexical.clone(),
                        datatype: *datatype,
                    });
                }
            }
        }
        GraphView { nodes: nodes.into_values().collect(), edges: edges.into_iter().collect() }
    }
}

pub async fn graph(State(state): State<AppState>) -> Json<GraphView> {
    Json(GraphView::build(&state.store.snapshot()))
}

/// Request body of `POST /api/query`: either structured clauses or the
/// textual clause grammar.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryRequest {
    #[serde(default)]
    pub clauses: Option<Vec<JsonClause>>,
    #[serde(default)]
    pub query: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonClause {
    pub predicate: String,
    pub op: String,
    pub value: JsonOperand,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum JsonOperand {
    Page { page: String },
    Literal { literal: String, #[serde(default)] datatype: Option<String> },
    ValueOf { of: String, #[serde(default)] predicate: Option<String> },
}

fn malformed(clause: &str, reason: impl Into<String>) -> QueryError {
    QueryError::MalformedClause { clause: clause.to_string(), reason: reason.into() }
}

impl JsonClause {
    pub fn to_clause(&self) -> Result<Clause, QueryError> {
        let label = format!("{} {}", self.predicate, self.op);
        let name = |s: &str| PageName::new(s).map_err(|e| malformed(&label, e.to_string()));
        let predicate = name(&self.predicate)?;
        let op: Comparator = self.op.parse()?;
        let operand = match &self.value {
            JsonOperand::Page { page } => Operand::Value(ObjectValue::PageRef(name(page)?)),
            JsonOperand::Literal { literal, datatype: None } => Operand::Value(ObjectValue::literal(literal.as_str())),
            JsonOperand::Literal { literal, datatype: Some(dt) } => {
                let dt: Datatype = dt.parse().map_err(|e: String| malformed(&label, e))?;
                Operand::Value(ObjectValue::typed(literal.as_str(), dt))
            }
            JsonOperand::ValueOf { of, predicate } => Operand::ValueOf {
                subject: name(of)?,
                predicate: predicate.as_deref().map(name).transpose()?,
            },
        };
        Ok(Clause::new(predicate, op, operand))
    }
}

pub fn parse_request(body: &[u8]) -> Result<Vec<Clause>, (String, String)> {
    let request: QueryRequest =
        serde_json::from_slice(body).map_err(|e| ("invalid_json".to_string(), e.to_string()))?;
    let clauses = match (request.clauses, request.query) {
        (Some(clauses), None) => {
            if clauses.is_empty() {
                Err(QueryError::Empty)
            } else {
                clauses.iter().map(JsonClause::to_clause).collect()
            }
        }
        (None, Some(text)) => parse_query(&text),
        _ => return Err(("invalid_json".into(), "expected exactly one of `clauses` or `query`".into())),
    };
    clauses.map_err(|e| (e.code().to_string(), e.to_string()))
}

pub async fn query(State(state): State<AppState>, body: Bytes) -> Response {
    match parse_request(&body) {
        Ok(clauses) => {
            let index = state.store.snapshot();
            match conjunctive_query(&index, &clauses) {
                Ok(names) => Json(names.into_iter().collect::<Vec<_>>()).into_response(),
                Err(e) => bad_query(e.code(), &e.to_string()),
            }
        }
        Err((reason, message)) => bad_query(&reason, &message),
    }
}

fn bad_query(reason: &str, message: &str) -> Response {
    (StatusCode::BAD_REQUEST, Json(json!({"error": "malformed_query", "reason": reason, "message": message})))
        .into_response()
}
