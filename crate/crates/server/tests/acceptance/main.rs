//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances and sample
//! sizes are the constants below.

#![allow(clippy::needless_range_loop)]

#[path = "../../../core/tests/support/mod.rs"]
mod support;
#[path = "../common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use rand::Rng;
use regex::Regex;
use shawn_core::inference::{closure, conjunctive_query, infer_all, parse_query, Rule};
use shawn_core::markup::{parse_page, ObjectValue, PageName};
use shawn_core::navigation::{breadcrumbs, forwardlinks_view, BREADCRUMB_DEPTH_CAP};
use shawn_core::rdf_export::{export, Format, UriPolicy};
use shawn_core::store::{page_triples, Store, Triple, TripleIndex};
use shawn_server::AppConfig;
use support::{describe::describe, gen, ntriples, oracle};

const GRAMMAR_TIME_LIMIT: Duration = Duration::from_secs(1);
const EXTRACTION_PAGES: usize = 1_000;
const INDEX_STATES: usize = 200;
const INDEX_MAX_PAGES: usize = 50;
const BREADCRUMB_GRAPHS: usize = 500;
const CLOSURE_TARGET_NODES: usize = 6;
/// Largest size enumerated exhaustively here (self-loops included).
const CLOSURE_EXHAUSTIVE_NODES: usize = 4;
const CLOSURE_SAMPLES_PER_SIZE: usize = 2_000;
const CLOSURE_LARGE_GRAPHS: usize = 100;
const CLOSURE_LARGE_NODES: usize = 15;
const RDF_STORES: usize = 100;
const FUZZ_REQUESTS: usize = 1_000;
const BASE: &str = "http://localhost:8080/wiki/";

struct Outcome {
    pass: bool,
    detail: String,
    /// Failures analysed as out of reach; reported but not fatal.
    known_unattainable: bool,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into(), known_unattainable: false }
}

fn name(s: &str) -> PageName {
    PageName::new(s).unwrap()
}

fn normalise(s: &str) -> String {
    s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n")
}

fn grammar_conformance() -> Outcome {
    let start = Instant::now();
    let described: Vec<String> =
        corpus::CASES.iter().map(|c| describe(&parse_page(name("CorpusPage"), c.source))).collect();
    let elapsed = start.elapsed();
    let mut failures = Vec::new();
    for (case, got) in corpus::CASES.iter().zip(&described) {
        if normalise(got) != normalise(case.expected) {
            failures.push(format!("{}:\n  want {:?}\n  got  {:?}", case.name, case.expected, got));
        }
    }
    let matched = corpus::CASES.len() - failures.len();
    let mut detail = format!("{matched}/{} golden cases in {elapsed:.1?} (limit {GRAMMAR_TIME_LIMIT:?})", corpus::CASES.len());
    for f in &failures {
        detail.push_str("\n    ");
        detail.push_str(f);
    }
    outcome(corpus::CASES.len() == 40 && failures.is_empty() && elapsed < GRAMMAR_TIME_LIMIT, detail)
}

/// Property pairs read straight off the source with the documented regex.
fn regex_pairs(source: &str) -> BTreeSet<(String, String)> {
    let re = Regex::new(r"^([A-Za-z][A-Za-z0-9]*): (.*\S.*)$").unwrap();
    let mut out = BTreeSet::new();
    for line in source.split("\r\n").flat_map(|l| l.split(['\n', '\r'])) {
        if let Some(c) = re.captures(line) {
            if oracle::is_camel_case(&c[1]) {
                let value = c[2].trim();
                let value = value
                    .strip_prefix("[[")
                    .and_then(|v| v.strip_suffix("]]"))
                    .filter(|v| !v.contains('[') && !v.contains(']'))
                    .map_or(value, str::trim);
                out.insert((c[1].to_string(), value.to_string()));
            }
        }
    }
    out
}

fn extraction_faithfulness() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let mut rng = gen::rng(0xFA17);
    let mut mismatches = Vec::new();
    for i in 0..EXTRACTION_PAGES {
        let page = name(&format!("RandomPage{i}"));
        let source = gen::page_source(&mut rng, gen::NAMES);
        let original = parse_page(page.clone(), &source);
        store.save_page(&page, &source).unwrap();
        let loaded = store.load_page(&page).unwrap().unwrap();
        let reparsed = parse_page(page.clone(), &loaded);
        let index = store.snapshot();
        let indexed: BTreeSet<Triple> = index.subject_triples(&page).cloned().collect();
        let pairs: BTreeSet<(String, String)> =
            indexed.iter().map(|t| (t.predicate.to_string(), t.object.text().to_string())).collect();
        if loaded != source || reparsed != original || indexed != page_triples(&reparsed) || pairs != regex_pairs(&source) {
            mismatches.push(i);
        }
    }
    outcome(mismatches.is_empty(), format!("{} of {EXTRACTION_PAGES} pages round-tripped exactly; mismatches at {mismatches:?}", EXTRACTION_PAGES - mismatches.len()))
}

fn index_oracle_equivalence() -> Outcome {
    let mut rng = gen::rng(0x1DE7);
    let mut checks = 0usize;
    let mut bad = Vec::new();
    for state_no in 0..INDEX_STATES {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let state = gen::store_state(&mut rng, INDEX_MAX_PAGES);
        for (n, src) in &state {
            store.save_page(&name(n), src).unwrap();
        }
        // Overwrite some pages to exercise removal.
        for (n, _) in state.iter().take(rng.gen_range(0..5)) {
            store.save_page(&name(n), &gen::page_source(&mut rng, gen::NAMES)).unwrap();
        }
        let index = store.snapshot();
        let mut probes: BTreeSet<PageName> = index.list_pages().into_iter().collect();
        probes.extend(gen::NAMES.iter().chain(gen::PREDICATES).map(|n| name(n)));
        for p in &probes {
            let target = ObjectValue::PageRef(p.clone());
            let forward = oracle::scan(&index, |t| t.object == target);
            let usage = oracle::scan(&index, |t| t.predicate == *p);
            let view: BTreeSet<(PageName, PageName)> = forward.iter().map(|t| (t.subject.clone(), t.predicate.clone())).collect();
            checks += 3;
            if index.forwardlink_triples(p) != forward
                || index.predicate_usage(p) != usage
                || forwardlinks_view(&index, p) != view.into_iter().collect::<Vec<_>>()
            {
                bad.push((state_no, p.to_string()));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checks} lookups over {INDEX_STATES} stores (<= {INDEX_MAX_PAGES} pages) equal the linear scan; mismatches {bad:?}"))
}

fn breadcrumb_safety() -> Outcome {
    let mut rng = gen::rng(0xB1EAD);
    let shape = Regex::new(r"^[^>:]+( > [^>:]+)*( : [^>:]+)?$").unwrap();
    let mut paths = 0usize;
    let mut cyclic = 0usize;
    let mut bad = Vec::new();
    for graph_no in 0..BREADCRUMB_GRAPHS {
        let n = rng.gen_range(2..40);
        let mut edges: Vec<(String, String)> = Vec::new();
        for i in 0..n {
            for _ in 0..rng.gen_range(0..3) {
                edges.push((gen::node_name(i), gen::node_name(rng.gen_range(0..n))));
            }
        }
        // Every graph gets at least one cycle through node 0.
        let len = rng.gen_range(1..n.min(25) + 1);
        for k in 0..len {
            edges.push((gen::node_name(k), gen::node_name((k + 1) % len)));
        }
        cyclic += 1;
        let instances: Vec<(String, String)> =
            (0..rng.gen_range(0..4)).map(|k| (format!("ThingNo{k}"), gen::node_name(rng.gen_range(0..n)))).collect();

        let mut index = TripleIndex::new();
        for i in 0..n {
            let node = gen::node_name(i);
            let src: String = edges.iter().filter(|(c, _)| *c == node).map(|(_, p)| format!("TypeOf: {p}\n")).collect();
            index.replace_page(name(&node), &src);
        }
        for (thing, class) in &instances {
            index.replace_page(name(thing), &format!("InstanceOf: {class}\n"));
        }
        let starts = (0..n).map(gen::node_name).map(|s| (s.clone(), s, None)).chain(instances.iter().map(|(thing, _)| {
            let class = instances.iter().filter(|(t, _)| t == thing).map(|(_, c)| c.clone()).min().unwrap();
            (thing.clone(), class, Some(thing.clone()))
        }));
        for (page, chain_start, tail) in starts {
            paths += 1;
            let path = breadcrumbs(&index, &name(&page));
            let chain: Vec<String> = path.chain.iter().map(|p| p.to_string()).collect();
            let distinct: BTreeSet<&String> = chain.iter().collect();
            let ok = distinct.len() == chain.len()
                && chain.len() <= BREADCRUMB_DEPTH_CAP
                && chain == oracle::breadcrumb_bfs(&edges, &chain_start, BREADCRUMB_DEPTH_CAP)
                && path.instance_tail.as_ref().map(|t| t.to_string()) == tail
                && shape.is_match(&path.to_string());
            if !ok {
                bad.push((graph_no, page));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{paths} paths over {BREADCRUMB_GRAPHS} graphs ({cyclic} with cycles): distinct, <= {BREADCRUMB_DEPTH_CAP}, BFS-equal, well-shaped; failures {bad:?}"),
    )
}

const REL: &str = "LinksTo";

fn closure_agrees(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut index = TripleIndex::new();
    let mut sources = vec![String::new(); n];
    for &(a, b) in edges {
        sources[a].push_str(&format!("{REL}: {}\n", gen::node_name(b)));
    }
    for (i, src) in sources.iter().enumerate() {
        index.replace_page(name(&gen::node_name(i)), src);
    }
    index.replace_page(name(REL), "IsTransitive: Yes\n");

    let reach = oracle::warshall(n, edges);
    let direct: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let mut expected = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if reach[a][b] && !direct.contains(&(a, b)) {
                expected.insert((a, b), oracle::shortest_by_powers(n, edges, a, b).unwrap());
            }
        }
    }
    let id = |p: &PageName| p.as_str()[5..].parse::<usize>().unwrap();
    let got: BTreeMap<(usize, usize), usize> = closure(&index, &name(REL))
        .into_iter()
        .map(|i| ((id(&i.triple.subject), id(i.triple.object.as_page().unwrap())), i.depth))
        .collect();
    got == expected
}

fn transitive_closure() -> Outcome {
    let mut graphs = 0usize;
    let mut bad = 0usize;
    for n in 1..=CLOSURE_EXHAUSTIVE_NODES {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        for mask in 0u64..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
            graphs += 1;
            bad += usize::from(!closure_agrees(n, &edges));
        }
    }
    let exhaustive = graphs;
    let mut rng = gen::rng(0xC105);
    for n in CLOSURE_EXHAUSTIVE_NODES + 1..=CLOSURE_TARGET_NODES {
        for _ in 0..CLOSURE_SAMPLES_PER_SIZE {
            let p = rng.gen_range(0.05..0.6);
            graphs += 1;
            bad += usize::from(!closure_agrees(n, &gen::digraph(&mut rng, n, p)));
        }
    }
    for _ in 0..CLOSURE_LARGE_GRAPHS {
        let p = rng.gen_range(0.03..0.25);
        graphs += 1;
        bad += usize::from(!closure_agrees(CLOSURE_LARGE_NODES, &gen::digraph(&mut rng, CLOSURE_LARGE_NODES, p)));
    }
    let target: u128 = (1..=CLOSURE_TARGET_NODES).map(|n| 1u128 << (n * n)).sum();
    let detail = format!(
        "{graphs} digraphs agree with Warshall: {bad} disagreements. Exhaustive only up to {CLOSURE_EXHAUSTIVE_NODES} nodes \
         ({exhaustive} graphs); {CLOSURE_SAMPLES_PER_SIZE} random graphs per size up to {CLOSURE_TARGET_NODES}; \
         {CLOSURE_LARGE_GRAPHS} random {CLOSURE_LARGE_NODES}-node graphs. Enumerating every digraph up to {CLOSURE_TARGET_NODES} nodes \
         means {target} graphs, which is out of reach"
    );
    // The oracle comparison itself must hold; only the coverage is short.
    Outcome { pass: false, detail, known_unattainable: bad == 0 }
}

fn read_back(doc: &str) -> Result<BTreeSet<Triple>, String> {
    let page = |iri: &str| -> Result<PageName, String> {
        let enc = iri.strip_prefix(BASE).ok_or_else(|| format!("foreign IRI {iri}"))?;
        let raw = ntriples::percent_decode(enc).ok_or("bad escape")?;
        PageName::new(raw).map_err(|e| e.to_string())
    };
    let mut out = BTreeSet::new();
    for s in ntriples::parse(doc)? {
        let object = match s.object {
            ntriples::Term::Iri(iri) => ObjectValue::PageRef(page(&iri)?),
            ntriples::Term::Literal { lexical, datatype, lang: None } => {
                let dt = match datatype.as_deref() {
                    None => "string",
                    Some(d) => d.strip_prefix("http://www.w3.org/2001/XMLSchema#").ok_or("foreign datatype")?,
                };
                ObjectValue::typed(lexical, dt.parse().map_err(|e: String| e)?)
            }
            ntriples::Term::Literal { .. } => return Err("language tag".into()),
        };
        out.insert(Triple::new(page(&s.subject)?, page(&s.predicate)?, object));
    }
    Ok(out)
}

fn rdf_round_trip() -> Outcome {
    let mut rng = gen::rng(0x2DF);
    let policy = UriPolicy::new(BASE).unwrap();
    let mut triples = 0usize;
    let mut bad = Vec::new();
    for store_no in 0..RDF_STORES {
        let state = gen::store_state(&mut rng, 30);
        let mut forward = TripleIndex::new();
        let mut backward = TripleIndex::new();
        for (n, src) in &state {
            forward.replace_page(name(n), src);
        }
        for (n, src) in state.iter().rev() {
            backward.replace_page(name(n), src);
        }
        let stored: BTreeSet<Triple> = forward.triples().cloned().collect();
        triples += stored.len();
        let nt = export(&forward, &policy, Format::NTriples, false).unwrap();
        let isomorphic = read_back(&nt.body).as_ref() == Ok(&stored);
        let deterministic = [Format::NTriples, Format::Turtle].into_iter().all(|f| {
            let a = export(&forward, &policy, f, true).unwrap().body;
            a == export(&forward, &policy, f, true).unwrap().body && a == export(&backward, &policy, f, true).unwrap().body
        });
        if !isomorphic || !deterministic {
            bad.push(store_no);
        }
    }
    outcome(bad.is_empty(), format!("{RDF_STORES} stores, {triples} triples re-read by an independent N-Triples reader; byte-identical re-exports; failures {bad:?}"))
}

async fn demo_fixture() -> Outcome {
    let w = common::demo();
    let index = w.store.snapshot();
    let mut missing = Vec::new();

    let nt = export(&index, &UriPolicy::from_wiki(BASE, &index).unwrap(), Format::NTriples, false).unwrap().body;
    let statement = format!("<{BASE}Shakespeare> <{BASE}isAuthorOf> <{BASE}Hamlet> .");
    if !nt.lines().any(|l| l == statement) {
        missing.push("Shakespeare isAuthorOf Hamlet statement");
    }

    let page = common::get(&w.app, "/wiki/LivesIn").await.body;
    let lives_in: Vec<&Triple> = index.triples().filter(|t| t.predicate.as_str() == "LivesIn").collect();
    let rows = lives_in.iter().all(|t| {
        let o = t.object.as_page().unwrap();
        let row = format!(
            r#"<tr><td><a class="wikilink" href="/wiki/{s}">{s}</a></td><td><a class="wikilink" href="/wiki/LivesIn">LivesIn</a></td><td><a class="wikilink" href="/wiki/{o}">{o}</a></td></tr>"#,
            s = t.subject
        );
        page.contains(&row)
    });
    if lives_in.len() < 4 || !rows {
        missing.push("LivesIn page listing whole triples");
    }

    let acquaintance = infer_all(&index).into_iter().any(|i| {
        i.rule == Rule::Transitivity
            && i.triple.subject.as_str() == "JohnDoe"
            && i.triple.predicate.as_str() == "KnowsPerson"
            && i.triple.object.text() == "MaxMustermann"
    });
    if !acquaintance {
        missing.push("inferred JohnDoe KnowsPerson MaxMustermann");
    }

    let same_year = conjunctive_query(&index, &parse_query("DateOfBirth same-year @Shakespeare").unwrap()).unwrap();
    if same_year.iter().map(|p| p.as_str()).collect::<Vec<_>>() != ["Marlowe"] {
        missing.push("same-year query returning Marlowe");
    }
    outcome(missing.is_empty(), if missing.is_empty() { "export statement, LivesIn triple listing, knows chain, same-year query all reproduced".to_string() } else { format!("missing: {missing:?}") })
}

fn fuzz_name<R: Rng>(rng: &mut R) -> String {
    const PIECES: &[&str] = &[
        "..", "/", "\\", "%", "%2e", "%2f", "%00", ".", "~", "etc", "passwd", "HomePage", " ", "\t", "\u{0}", "ü", "名",
        "😀", "?", "#", "&", "=", "+", ":", "C:", "\u{202e}", "[[", "]]", "<", ">", "\"", "'", "*", "\r\n", ".txt",
    ];
    (0..rng.gen_range(0..7)).map(|_| PIECES[rng.gen_range(0..PIECES.len())]).collect()
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                out.insert(path.clone(), Vec::new());
                stack.push(path);
            } else {
                out.insert(path.clone(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

async fn service_robustness() -> Outcome {
    let sandbox = tempfile::tempdir().unwrap();
    let data = sandbox.path().join("data");
    let outside = sandbox.path().join("outside");
    std::fs::create_dir_all(outside.join("nested")).unwrap();
    std::fs::write(outside.join("secret.txt"), "do not touch").unwrap();
    std::fs::write(outside.join("nested/HomePage.txt"), "decoy").unwrap();

    let store = std::sync::Arc::new(Store::open(&data).unwrap());
    shawn_core::rdf_export::install_save_hook(&store, BASE).unwrap();
    shawn_core::fixture::seed(&store).unwrap();
    // No browser client build: the configured directory does not exist.
    let config = AppConfig { static_dir: Some(sandbox.path().join("webui/dist")), ..AppConfig::default() };
    let app = shawn_server::router(store.clone(), config);
    let outside_before = tree(&outside);

    let allowed = [200u16, 303, 400, 403, 404, 405, 415];
    let mut rng = gen::rng(0x5AFE);
    let mut statuses: BTreeMap<u16, usize> = BTreeMap::new();
    let mut violations = Vec::new();
    let raw_paths = [
        "/wiki/../../outside/secret.txt", "/wiki/..%2F..%2Foutside%2Fsecret.txt", "/wiki/%2e%2e", "/wiki/",
        "/wiki/%00", "/wiki/%ff%fe", "/wiki/..", "/wiki/.", "/wiki/%2F", "/static/../data/pages/HomePage.txt",
        "/static/index.html", "/wiki/HomePage/edit/..", "//etc/passwd", "/wiki/%252e%252e",
    ];
    let mut requests = 0usize;
    for i in 0..FUZZ_REQUESTS {
        let path = if i < raw_paths.len() {
            raw_paths[i].to_string()
        } else {
            let encoded = common::path_encode(&fuzz_name(&mut rng));
            match rng.gen_range(0..3) {
                0 => format!("/wiki/{encoded}"),
                1 => format!("/wiki/{encoded}/edit"),
                _ => format!("/wiki/{}", encoded.replace("%2E", ".").replace("%2F", "/")),
            }
        };
        let request = if rng.gen_bool(0.3) {
            Request::post(path.as_str())
                .header("content-type", "application/x-www-form-urlencoded")
                .body(Body::from(format!("source={}", common::form_encode("FuzzedBy: AcceptanceSuite"))))
        } else {
            Request::get(path.as_str()).body(Body::empty())
        };
        let Ok(request) = request else {
            continue;
        };
        requests += 1;
        let reply = common::send(&app, request).await;
        *statuses.entry(reply.status.as_u16()).or_default() += 1;
        if !allowed.contains(&reply.status.as_u16()) {
            violations.push(format!("{path} -> {}", reply.status));
        }
    }
    let escaped: Vec<PathBuf> = tree(&data)
        .into_keys()
        .filter(|p| {
            let rel = p.strip_prefix(&data).unwrap();
            let top = rel.components().next().unwrap().as_os_str().to_str().unwrap().to_string();
            !(top == "pages" || top.starts_with("export.") || top.starts_with(".export."))
                || (top == "pages" && rel.components().count() > 2)
        })
        .collect();
    let untouched = tree(&outside) == outside_before;
    let sandbox_clean = std::fs::read_dir(sandbox.path()).unwrap().count() == 2;
    let static_missing = common::get(&app, "/static/app.js").await.status == StatusCode::NOT_FOUND;
    let pass = requests == FUZZ_REQUESTS && violations.is_empty() && escaped.is_empty() && untouched && sandbox_clean && static_missing;
    outcome(
        pass,
        format!(
            "{requests} fuzzed requests, statuses {statuses:?} within {allowed:?}; outside tree untouched: {untouched}; \
             stray files {escaped:?}; no browser client build present: {static_missing}; violations {violations:?}"
        ),
    )
}

fn main() {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
    let timed = |f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (o, t.elapsed())
    };
    let results: Vec<(&str, (Outcome, Duration))> = vec![
        ("1 grammar conformance", timed(&grammar_conformance)),
        ("2 triple-extraction faithfulness", timed(&extraction_faithfulness)),
        ("3 index oracle equivalence", timed(&index_oracle_equivalence)),
        ("4 breadcrumb safety", timed(&breadcrumb_safety)),
        ("5 transitive closure", timed(&transitive_closure)),
        ("6 RDF round-trip", timed(&rdf_round_trip)),
        ("7 demo fixture", timed(&|| runtime.block_on(demo_fixture()))),
        ("8 service robustness", timed(&|| runtime.block_on(service_robustness()))),
    ];
    println!("\nacceptance criteria");
    let mut fatal = 0;
    for (label, (o, elapsed)) in &results {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict}  {label} [{elapsed:.1?}]: {}", o.detail);
        if !o.pass && !o.known_unattainable {
            fatal += 1;
        }
    }
    let passed = results.iter().filter(|(_, (o, _))| o.pass).count();
    let known = results.iter().filter(|(_, (o, _))| !o.pass && o.known_unattainable).count();
    println!("{passed}/{} criteria pass; {known} known unattainable; {fatal} unexpected failures\n", results.len());
    if fatal > 0 {
        std::process::exit(1);
    }
}
