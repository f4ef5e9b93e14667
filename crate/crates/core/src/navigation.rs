//! "Where am I" and "where can I go": breadcrumbs, forwardlinks, same-type
//! listings, the GotoBar, and expansion of wiki commands.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use crate::markup::{
    escape, links_in_order, object_html, page_link, parse_page, render_with, CommandName, ObjectValue,
    PageName, ParsedPage, WikiCommand, PROPERTY_TABLE_CLASS,
};
use crate::store::{Triple, TripleIndex, TriplePattern};

pub const TYPE_OF: &str = "TypeOf";
pub const INSTANCE_OF: &str = "InstanceOf";
pub const SIDE_BAR: &str = "SideBar";
pub const GOTO_BAR: &str = "GotoBar";
pub const BREADCRUMB_DEPTH_CAP: usize = 20;

/// Sidebar used when no `SideBar` page exists.
pub const DEFAULT_SIDEBAR: &str = "{{breadcrumbs}}\n{{forwardlinks}}\n{{sametype}}\n";
pub const DEFAULT_GOTO_BAR: [&str; 2] = ["HomePage", "AllPages"];

/// TypeOf ancestry of a page, root first, with the page itself appended
/// after a colon when it is an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BreadcrumbPath {
    pub chain: Vec<PageName>,
    pub instance_tail: Option<PageName>,
}

impl fmt::Display for BreadcrumbPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, page) in self.chain.iter().enumerate() {
            if i > 0 {
                f.write_str(" > ")?;
            }
            f.write_str(page.as_str())?;
        }
        if let Some(tail) = &self.instance_tail {
            write!(f, " : {tail}")?;
        }
        Ok(())
    }
}

impl BreadcrumbPath {
    pub fn to_html(&self, index: &TripleIndex) -> String {
        let link = |p: &PageName| page_link(p, index.contains_page(p));
        let mut out = String::from(r#"<nav class="breadcrumbs">"#);
        out.push_str(&self.chain.iter().map(link).collect::<Vec<_>>().join(" &gt; "));
        if let Some(tail) = &self.instance_tail {
            write!(out, " : {}", link(tail)).unwrap();
        }
        out.push_str("</nav>");
        out
    }
}

/// Everything the navigation surfaces need for one page.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NavContext {
    pub current: PageName,
    pub forwardlinks: BTreeSet<Triple>,
    pub same_type: BTreeSet<PageName>,
    pub goto_links: Vec<PageName>,
}

impl NavContext {
    pub fn build(index: &TripleIndex, current: &PageName) -> Self {
        NavContext {
            current: current.clone(),
            forwardlinks: index.forwardlink_triples(current),
            same_type: same_type(index, current),
            goto_links: goto_bar(index),
        }
    }
}

fn smallest_page_object(index: &TripleIndex, subject: &PageName, predicate: &str) -> Option<PageName> {
    index.objects(subject, predicate).filter_map(ObjectValue::as_page).min().cloned()
}

/// Follow the lexicographically smallest `TypeOf` parent upward, stopping at
/// a parentless page, at the depth cap, or before a page would repeat.
pub fn breadcrumbs(index: &TripleIndex, page: &PageName) -> BreadcrumbPath {
    let (start, instance_tail) = match smallest_page_object(index, page, INSTANCE_OF) {
        Some(class) => (class, Some(page.clone())),
        None => (page.clone(), None),
    };
    let mut chain = vec![start];
    while chain.len() < BREADCRUMB_DEPTH_CAP {
        let current = chain.last().expect("chain starts non-empty");
        match smallest_page_object(index, current, TYPE_OF) {
            Some(parent) if !chain.contains(&parent) => chain.push(parent),
            _ => break,
        }
    }
    chain.reverse();
    BreadcrumbPath { chain, instance_tail }
}

/// `(source, predicate)` for every triple pointing at `page`, sorted.
pub fn forwardlinks_view(index: &TripleIndex, page: &PageName) -> Vec<(PageName, PageName)> {
    let pairs: BTreeSet<(PageName, PageName)> = index
        .forwardlink_triples(page)
        .into_iter()
        .map(|t| (t.subject, t.predicate))
        .collect();
    pairs.into_iter().collect()
}

fn type_objects(index: &TripleIndex, page: &PageName) -> BTreeSet<ObjectValue> {
    index
        .subject_triples(page)
        .filter(|t| t.predicate.as_str() == TYPE_OF || t.predicate.as_str() == INSTANCE_OF)
        .map(|t| t.object.clone())
        .collect()
}

/// Pages sharing at least one `TypeOf` or `InstanceOf` object with `page`.
pub fn same_type(index: &TripleIndex, page: &PageName) -> BTreeSet<PageName> {
    let mut out = BTreeSet::new();
    for object in type_objects(index, page) {
        for t in index.query(&TriplePattern::any().with_object(object)) {
            if t.predicate.as_str() == TYPE_OF || t.predicate.as_str() == INSTANCE_OF {
                out.insert(t.subject);
            }
        }
    }
    out.remove(page);
    out
}

/// Links on the `GotoBar` page in source order, or the defaults when the
/// page does not exist.
pub fn goto_bar(index: &TripleIndex) -> Vec<PageName> {
    let goto = PageName::new(GOTO_BAR).expect("valid name");
    match index.source(&goto) {
        Some(source) => links_in_order(source),
        None => DEFAULT_GOTO_BAR.iter().map(|n| PageName::new(*n).expect("valid name")).collect(),
    }
}

/// Render one command as seen from `current`. An explicit argument replaces
/// `current` for every command except `allpages`.
pub fn expand_command(index: &TripleIndex, command: &WikiCommand, current: &PageName) -> String {
    let target = command.arg.as_ref().unwrap_or(current);
    let link = |p: &PageName| page_link(p, index.contains_page(p));
    let list = |class: &str, items: Vec<String>| {
        let mut out = format!(r#"<ul class="{class}">"#);
        for item in items {
            write!(out, "<li>{item}</li>").unwrap();
        }
        out.push_str("</ul>");
        out
    };

    match command.name {
        CommandName::Forwardlinks => list(
            "forwardlinks",
            forwardlinks_view(index, target)
                .iter()
                .map(|(source, pred)| format!(r#"{} <span class="via">{}</span>"#, link(source), link(pred)))
                .collect(),
        ),
        CommandName::Breadcrumbs => breadcrumbs(index, target).to_html(index),
        CommandName::Triples => triple_table("triples", &index.predicate_usage(target), index),
        CommandName::AllPages => list("allpages", index.list_pages().iter().map(link).collect()),
        CommandName::SameType => list("sametype", same_type(index, target).iter().map(link).collect()),
        CommandName::Properties => {
            let mut out = format!(r#"<table class="{PROPERTY_TABLE_CLASS}"><tbody>"#);
            for t in index.query(&TriplePattern::any().with_subject(target.clone())) {
                let exists = |p: &PageName| index.contains_page(p);
                write!(out, "<tr><th>{}</th><td>{}</td></tr>", link(&t.predicate), object_html(&t.object, &exists))
                    .unwrap();
            }
            out.push_str("</tbody></table>");
            out
        }
    }
}

/// Full subject-predicate-object rows.
pub fn triple_table<'a>(class: &str, triples: impl IntoIterator<Item = &'a Triple>, index: &TripleIndex) -> String {
    let exists = |p: &PageName| index.contains_page(p);
    let mut out = format!(r#"<table class="{}"><tbody>"#, escape(class));
    for t in triples {
        write!(
            out,
            "<tr><td>{}</td><td>{}</td><td>{}</td></tr>",
            page_link(&t.subject, exists(&t.subject)),
            page_link(&t.predicate, exists(&t.predicate)),
            object_html(&t.object, &exists)
        )
        .unwrap();
    }
    out.push_str("</tbody></table>");
    out
}

/// Render `host` with each of its commands evaluated for the viewed page
/// `current`, which differs from the host when the host is the SideBar.
pub fn expand_commands(index: &TripleIndex, host: &ParsedPage, current: &PageName) -> String {
    let exists = |p: &PageName| index.contains_page(p);
    render_with(host, &exists, &mut |cmd| expand_command(index, cmd, current))
}

/// The SideBar page (or the default sidebar) expanded for `current`.
pub fn sidebar_html(index: &TripleIndex, current: &PageName) -> String {
    let name = PageName::new(SIDE_BAR).expect("valid name");
    let host = match index.parsed(&name) {
        Some(parsed) => parsed,
        None => parse_page(name, DEFAULT_SIDEBAR),
    };
    expand_commands(index, &host, current)
}
