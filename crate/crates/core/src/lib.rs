//! Core of a small semantic wiki: every page is a concept, `Predicate: value`
//! lines on a page become triples, and the triples drive navigation,
//! inference and RDF export.

pub mod encoding;
pub mod fixture;
pub mod inference;
pub mod markup;
pub mod navigation;
pub mod rdf_export;
pub mod store;
