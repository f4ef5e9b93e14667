//! HTTP front end for the wiki: page views and editing, listings, RDF export
//! and the JSON API used by the browser client.

pub mod api;
pub mod app;
pub mod views;

pub use app::{router, AppConfig, AppState};

/// Base URI minted for pages when none is configured.
pub const DEFAULT_BASE_URI: &str = "http://localhost:8080/wiki/";
