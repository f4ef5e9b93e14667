//! Page persistence (one plain-text file per page) and the in-memory triple
//! index derived from it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;
use tracing::{debug, warn};

use crate::encoding::{decode, encode_file_stem};
use crate::markup::{parse_page, ObjectValue, PageName, ParsedPage};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: PageName,
    pub predicate: PageName,
    pub object: ObjectValue,
}

impl Triple {
    pub fn new(subject: PageName, predicate: PageName, object: ObjectValue) -> Self {
        Triple { subject, predicate, object }
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] <{}> {}", self.subject, self.predicate, self.object)
    }
}

/// The set of triples a parsed page asserts about itself.
pub fn page_triples(page: &ParsedPage) -> BTreeSet<Triple> {
    page.properties
        .iter()
        .map(|p| Triple::new(page.name.clone(), p.predicate.clone(), p.object.clone()))
        .collect()
}

/// Triple pattern; `None` fields are wildcards.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Option<PageName>,
    pub predicate: Option<PageName>,
    pub object: Option<ObjectValue>,
}

impl TriplePattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn with_subject(mut self, s: PageName) -> Self {
        self.subject = Some(s);
        self
    }

    pub fn with_predicate(mut self, p: PageName) -> Self {
        self.predicate = Some(p);
        self
    }

    pub fn with_object(mut self, o: ObjectValue) -> Self {
        self.object = Some(o);
        self
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.subject.as_ref().is_none_or(|s| *s == t.subject)
            && self.predicate.as_ref().is_none_or(|p| *p == t.predicate)
            && self.object.as_ref().is_none_or(|o| *o == t.object)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SaveReceipt {
    pub triples_added: usize,
    pub triples_removed: usize,
}

/// Triples indexed by subject, predicate and object, plus the raw source of
/// every page. Literal objects are keyed by (datatype, lexical) through
/// `ObjectValue` equality, so object lookups cover both variants.
#[derive(Clone, Debug, Default)]
pub struct TripleIndex {
    by_subject: BTreeMap<PageName, BTreeSet<Triple>>,
    by_predicate: HashMap<PageName, BTreeSet<Triple>>,
    by_object: HashMap<ObjectValue, BTreeSet<Triple>>,
    pages: BTreeMap<PageName, String>,
}

impl TripleIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replace the page's source and every triple it is the subject of.
    pub fn replace_page(&mut self, name: PageName, source: &str) -> SaveReceipt {
        let parsed = parse_page(name, source);
        self.replace_parsed(&parsed, source)
    }

    pub(crate) fn replace_parsed(&mut self, parsed: &ParsedPage, source: &str) -> SaveReceipt {
        let name = &parsed.name;
        let fresh = page_triples(parsed);
        let old = self.by_subject.remove(name).unwrap_or_default();

        let removed: Vec<&Triple> = old.difference(&fresh).collect();
        let added: Vec<&Triple> = fresh.difference(&old).collect();
        for t in &removed {
            remove_from(&mut self.by_predicate, &t.predicate, t);
            remove_from(&mut self.by_object, &t.object, t);
        }
        for t in &added {
            self.by_predicate.entry(t.predicate.clone()).or_default().insert((*t).clone());
            self.by_object.entry(t.object.clone()).or_default().insert((*t).clone());
        }
        let receipt = SaveReceipt { triples_added: added.len(), triples_removed: removed.len() };
        if !fresh.is_empty() {
            self.by_subject.insert(name.clone(), fresh);
        }
        self.pages.insert(name.clone(), source.to_string());
        receipt
    }

    /// Exactly the triples matching every bound field. Uses the most
    /// selective bound index and filters the rest.
    pub fn query(&self, pattern: &TriplePattern) -> BTreeSet<Triple> {
        let candidates: Box<dyn Iterator<Item = &Triple>> = match pattern {
            TriplePattern { subject: Some(s), .. } => Box::new(self.by_subject.get(s).into_iter().flatten()),
            TriplePattern { object: Some(o), .. } => Box::new(self.by_object.get(o).into_iter().flatten()),
            TriplePattern { predicate: Some(p), .. } => Box::new(self.by_predicate.get(p).into_iter().flatten()),
            _ => Box::new(self.triples()),
        };
        candidates.filter(|t| pattern.matches(t)).cloned().collect()
    }

    /// Triples that have `page` as a page-reference object.
    pub fn forwardlink_triples(&self, page: &PageName) -> BTreeSet<Triple> {
        self.query(&TriplePattern::any().with_object(ObjectValue::PageRef(page.clone())))
    }

    /// Every triple using `predicate`.
    pub fn predicate_usage(&self, predicate: &PageName) -> BTreeSet<Triple> {
        self.query(&TriplePattern::any().with_predicate(predicate.clone()))
    }

    pub fn subject_triples(&self, subject: &PageName) -> impl Iterator<Item = &Triple> {
        self.by_subject.get(subject).into_iter().flatten()
    }

    /// Objects of `(subject, predicate, ?)`, in index order.
    pub fn objects<'a>(&'a self, subject: &PageName, predicate: &'a str) -> impl Iterator<Item = &'a ObjectValue> {
        self.subject_triples(subject)
            .filter(move |t| t.predicate.as_str() == predicate)
            .map(|t| &t.object)
    }

    /// All triples in sorted order.
    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.by_subject.values().flatten()
    }

    pub fn triple_count(&self) -> usize {
        self.by_subject.values().map(BTreeSet::len).sum()
    }

    pub fn contains_page(&self, name: &PageName) -> bool {
        self.pages.contains_key(name)
    }

    pub fn source(&self, name: &PageName) -> Option<&str> {
        self.pages.get(name).map(String::as_str)
    }

    pub fn parsed(&self, name: &PageName) -> Option<ParsedPage> {
        self.source(name).map(|s| parse_page(name.clone(), s))
    }

    /// All stored page names, sorted.
    pub fn list_pages(&self) -> Vec<PageName> {
        self.pages.keys().cloned().collect()
    }

    /// Check that the three indexes agree with each other and with a fresh
    /// parse of every stored page.
    pub fn verify_coherence(&self) -> Result<(), String> {
        let subjects: BTreeSet<&Triple> = self.by_subject.values().flatten().collect();
        let predicates: BTreeSet<&Triple> = self.by_predicate.values().flatten().collect();
        let objects: BTreeSet<&Triple> = self.by_object.values().flatten().collect();
        if subjects != predicates {
            return Err("subject and predicate indexes disagree".into());
        }
        if subjects != objects {
            return Err("subject and object indexes disagree".into());
        }
        let misfiled = self.by_subject.iter().any(|(k, ts)| ts.iter().any(|t| t.subject != *k))
            || self.by_predicate.iter().any(|(k, ts)| ts.iter().any(|t| t.predicate != *k))
            || self.by_object.iter().any(|(k, ts)| ts.iter().any(|t| t.object != *k));
        if misfiled {
            return Err("a triple is filed under the wrong key".into());
        }
        for (name, source) in &self.pages {
            let expected = page_triples(&parse_page(name.clone(), source));
            let actual: BTreeSet<Triple> = self.subject_triples(name).cloned().collect();
            if expected != actual {
                return Err(format!("index for {name} does not match its source"));
            }
        }
        if self.by_subject.keys().any(|s| !self.pages.contains_key(s)) {
            return Err("indexed subject without a stored page".into());
        }
        Ok(())
    }
}

fn remove_from<K: std::hash::Hash + Eq + Clone>(map: &mut HashMap<K, BTreeSet<Triple>>, key: &K, t: &Triple) {
    if let Some(set) = map.get_mut(key) {
        set.remove(t);
        if set.is_empty() {
            map.remove(key);
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("storage failure at {}", path.display())]
    Storage {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl StoreError {
    fn at(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
        move |source| StoreError::Storage { path: path.to_path_buf(), source }
    }
}

pub type HookError = Box<dyn std::error::Error + Send + Sync>;
type Hook = Box<dyn Fn(&TripleIndex, &PageName) -> Result<(), HookError> + Send + Sync>;

/// File-backed page store.
///
/// Saves are serialized store-wide; readers work on immutable snapshots so a
/// read never observes a partially applied save.
pub struct Store {
    root: PathBuf,
    pages_dir: PathBuf,
    index: RwLock<Arc<TripleIndex>>,
    writer: Mutex<()>,
    hooks: RwLock<Vec<Hook>>,
}

impl Store {
    /// Open (creating if needed) the data directory `root` and rebuild the
    /// index from `root/pages/*.txt`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Store, StoreError> {
        let root = root.into();
        let pages_dir = root.join("pages");
        fs::create_dir_all(&pages_dir).map_err(StoreError::at(&pages_dir))?;

        let mut index = TripleIndex::new();
        for entry in fs::read_dir(&pages_dir).map_err(StoreError::at(&pages_dir))? {
            let entry = entry.map_err(StoreError::at(&pages_dir))?;
            let path = entry.path();
            let Some(name) = page_name_from_file(&path) else {
                continue;
            };
            let bytes = fs::read(&path).map_err(StoreError::at(&path))?;
            let source = String::from_utf8(bytes)
                .map_err(|e| StoreError::Storage { path: path.clone(), source: io::Error::new(io::ErrorKind::InvalidData, e) })?;
            index.replace_page(name, &source);
        }
        debug!(pages = index.pages.len(), triples = index.triple_count(), "index rebuilt");

        Ok(Store {
            root,
            pages_dir,
            index: RwLock::new(Arc::new(index)),
            writer: Mutex::new(()),
            hooks: RwLock::new(Vec::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn pages_dir(&self) -> &Path {
        &self.pages_dir
    }

    pub fn page_path(&self, name: &PageName) -> PathBuf {
        self.pages_dir.join(format!("{}.txt", encode_file_stem(name.as_str())))
    }

    /// Register a hook run after every committed save, inside the writer
    /// lock. Hook failures are logged and never fail the save.
    pub fn on_save<F>(&self, hook: F)
    where
        F: Fn(&TripleIndex, &PageName) -> Result<(), HookError> + Send + Sync + 'static,
    {
        self.hooks.write().unwrap_or_else(|e| e.into_inner()).push(Box::new(hook));
    }

    /// Consistent read-only view of the current index.
    pub fn snapshot(&self) -> Arc<TripleIndex> {
        self.index.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Atomically replace the page file and the page's triples.
    pub fn save_page(&self, name: &PageName, source: &str) -> Result<SaveReceipt, StoreError> {
        let _writer = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let parsed = parse_page(name.clone(), source);
        self.write_atomic(name, source)?;

        let receipt = {
            let mut guard = self.index.write().unwrap_or_else(|e| e.into_inner());
            Arc::make_mut(&mut guard).replace_parsed(&parsed, source)
        };
        let snapshot = self.snapshot();
        for hook in self.hooks.read().unwrap_or_else(|e| e.into_inner()).iter() {
            if let Err(err) = hook(&snapshot, name) {
                warn!(page = %name, error = ?err, "save hook failed");
            }
        }
        Ok(receipt)
    }

    /// Exact saved source, or `None` for a page never saved.
    pub fn load_page(&self, name: &PageName) -> Result<Option<String>, StoreError> {
        let path = self.page_path(name);
        match fs::read(&path) {
            Ok(bytes) => String::from_utf8(bytes)
                .map(Some)
                .map_err(|e| StoreError::Storage { path, source: io::Error::new(io::ErrorKind::InvalidData, e) }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(StoreError::Storage { path, source: e }),
        }
    }

    pub fn list_pages(&self) -> Vec<PageName> {
        self.snapshot().list_pages()
    }

    fn write_atomic(&self, name: &PageName, source: &str) -> Result<(), StoreError> {
        let path = self.page_path(name);
        let tmp = self.pages_dir.join(format!(".{}.tmp", encode_file_stem(name.as_str())));
        write_file_atomic(&tmp, &path, source.as_bytes())
    }
}

/// Write `bytes` to `tmp`, then rename over `path`.
pub(crate) fn write_file_atomic(tmp: &Path, path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let result = (|| {
        let mut file = fs::File::create(tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(tmp, path)
    })();
    result.map_err(|source| {
        let _ = fs::remove_file(tmp);
        StoreError::Storage { path: path.to_path_buf(), source }
    })
}

/// Page name encoded in a `<percent-encoded name>.txt` file name.
pub fn page_name_from_file(path: &Path) -> Option<PageName> {
    let file = path.file_name()?.to_str()?;
    let stem = file.strip_suffix(".txt")?;
    if stem.starts_with('.') {
        return None;
    }
    PageName::new(decode(stem)?).ok()
}
