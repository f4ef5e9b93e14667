//! Server-side HTML. Output is XHTML-compatible so it can be checked with an
//! XML parser.

use std::fmt::Write;

use axum::http::StatusCode;
use shawn_core::markup::{escape, page_href, page_link, CommandName, PageName};
use shawn_core::navigation::{breadcrumbs, expand_commands, goto_bar, sidebar_html, triple_table};
use shawn_core::store::TripleIndex;

const ALL_PAGES: &str = "AllPages";

fn document(title: &str, header: &str, main: &str, aside: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\"><head><meta charset=\"utf-8\"/>\
         <title>{}</title><link rel=\"stylesheet\" href=\"/static/shawn.css\"/></head><body>\
         <header>{header}</header><main>{main}</main><aside class=\"sidebar\">{aside}</aside></body></html>\n",
        escape(title)
    )
}

/// Top strip of GotoBar links; `AllPages` points at the generated listing.
pub fn goto_strip(index: &TripleIndex) -> String {
    let mut out = String::from(r#"<nav class="gotobar">"#);
    for (i, page) in goto_bar(index).iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if page.as_str() == ALL_PAGES && !index.contains_page(page) {
            write!(out, r#"<a class="wikilink" href="/all">{ALL_PAGES}</a>"#).unwrap();
        } else {
            out.push_str(&page_link(page, index.contains_page(page)));
        }
    }
    out.push_str("</nav>");
    out
}

fn header(index: &TripleIndex, name: &PageName) -> String {
    format!("{}{}", goto_strip(index), breadcrumbs(index, name).to_html(index))
}

pub fn page(index: &TripleIndex, name: &PageName) -> String {
    let parsed = index.parsed(name).expect("caller checked the page exists");
    let mut main = format!("<h1>{}</h1>", escape(name.as_str()));
    main.push_str(&expand_commands(index, &parsed, name));

    // Relationship pages list their usage even when the author forgot to.
    let usage = index.predicate_usage(name);
    let lists_itself = parsed.commands.iter().any(|c| c.name == CommandName::Triples && c.arg.as_ref().is_none_or(|a| a == name));
    if !usage.is_empty() && !lists_itself {
        write!(main, r#"<section class="usage"><h2>Used as a relation</h2>{}</section>"#, triple_table("triples", &usage, index))
            .unwrap();
    }
    write!(main, r#"<p class="actions"><a href="{}/edit">Edit this page</a></p>"#, page_href(name)).unwrap();
    document(name.as_str(), &header(index, name), &main, &sidebar_html(index, name))
}

fn edit_form(name: &PageName, source: &str) -> String {
    // The newline after <textarea> is eaten by HTML parsers, so a source
    // starting with a newline survives the round trip.
    format!(
        "<form method=\"post\" action=\"{}\"><textarea name=\"source\" rows=\"24\" cols=\"80\">\n{}</textarea>\
         <p><button type=\"submit\">Save</button></p></form>",
        page_href(name),
        escape(source)
    )
}

pub fn missing_page(index: &TripleIndex, name: &PageName, readonly: bool) -> String {
    let mut main = format!(
        "<h1>{}</h1><p class=\"missing\">This page does not exist yet. Write a few sentences about it, \
         and add lines like <code>InstanceOf: Person</code> to describe how it relates to other pages.</p>",
        escape(name.as_str())
    );
    if !readonly {
        main.push_str(&edit_form(name, ""));
    }
    document(name.as_str(), &header(index, name), &main, &sidebar_html(index, name))
}

pub fn edit_page(index: &TripleIndex, name: &PageName, source: &str) -> String {
    let main = format!("<h1>Editing {}</h1>{}", escape(name.as_str()), edit_form(name, source));
    document(name.as_str(), &header(index, name), &main, &sidebar_html(index, name))
}

pub fn all_pages(index: &TripleIndex) -> String {
    let mut main = String::from(r#"<h1>All pages</h1><ul class="allpages">"#);
    for page in index.list_pages() {
        write!(main, "<li>{}</li>", page_link(&page, true)).unwrap();
    }
    main.push_str("</ul>");
    document("All pages", &goto_strip(index), &main, "")
}

pub fn error_page(status: StatusCode, message: &str) -> String {
    let title = format!("{} {}", status.as_u16(), status.canonical_reason().unwrap_or(""));
    document(&title, "", &format!("<h1>{}</h1><p>{}</p>", escape(&title), escape(message)), "")
}
