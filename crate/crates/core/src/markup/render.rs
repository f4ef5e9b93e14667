use std::fmt::Write;

use super::inline::Inline;
use super::name::PageName;
use super::parse::{Block, ParsedPage, WikiCommand};
use super::value::ObjectValue;
use crate::encoding::encode_segment;

pub const PROPERTY_TABLE_CLASS: &str = "properties";

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

pub fn page_href(name: &PageName) -> String {
    format!("/wiki/{}", encode_segment(name.as_str()))
}

/// Link to an existing page, or a create-style link to the edit form of a
/// missing one.
pub fn page_link(name: &PageName, exists: bool) -> String {
    let href = page_href(name);
    let text = escape(name.as_str());
    if exists {
        format!(r#"<a class="wikilink" href="{href}">{text}</a>"#)
    } else {
        format!(r#"<a class="wikilink create" href="{href}/edit" title="create this page">{text}</a>"#)
    }
}

pub fn object_html(object: &ObjectValue, resolver: &dyn Fn(&PageName) -> bool) -> String {
    match object {
        ObjectValue::PageRef(p) => page_link(p, resolver(p)),
        ObjectValue::Literal { lexical, datatype } => format!(
            r#"<span class="literal" data-datatype="{}">{}</span>"#,
            datatype.as_str(),
            escape(lexical)
        ),
    }
}

/// Render a parsed page: property table first, then the body. Commands are
/// left as placeholders for the navigation layer to fill in.
pub fn render_html(page: &ParsedPage, resolver: impl Fn(&PageName) -> bool) -> String {
    render_with(page, &resolver, &mut placeholder)
}

/// Render with a caller-supplied expansion for each command.
pub fn render_with(
    page: &ParsedPage,
    resolver: &dyn Fn(&PageName) -> bool,
    commands: &mut dyn FnMut(&WikiCommand) -> String,
) -> String {
    let mut out = String::new();
    if !page.properties.is_empty() {
        write!(out, r#"<table class="{PROPERTY_TABLE_CLASS}"><tbody>"#).unwrap();
        for prop in &page.properties {
            write!(
                out,
                "<tr><th>{}</th><td>{}</td></tr>",
                page_link(&prop.predicate, resolver(&prop.predicate)),
                object_html(&prop.object, resolver)
            )
            .unwrap();
        }
        out.push_str("</tbody></table>\n");
    }
    for block in &page.body {
        match block {
            Block::Heading { level, content } => {
                writeln!(out, "<h{level}>{}</h{level}>", inlines(content, resolver)).unwrap();
            }
            Block::Paragraph(content) => {
                writeln!(out, "<p>{}</p>", inlines(content, resolver)).unwrap();
            }
            Block::UnorderedList(items) => {
                out.push_str("<ul>\n");
                for item in items {
                    writeln!(out, "<li>{}</li>", inlines(item, resolver)).unwrap();
                }
                out.push_str("</ul>\n");
            }
            Block::Command(idx) => {
                out.push_str(&commands(&page.commands[*idx]));
                out.push('\n');
            }
        }
    }
    out
}

fn placeholder(cmd: &WikiCommand) -> String {
    match &cmd.arg {
        Some(arg) => format!(
            r#"<div class="wiki-command" data-command="{}" data-arg="{}"></div>"#,
            cmd.name,
            escape(arg.as_str())
        ),
        None => format!(r#"<div class="wiki-command" data-command="{}"></div>"#, cmd.name),
    }
}

fn inlines(content: &[Inline], resolver: &dyn Fn(&PageName) -> bool) -> String {
    let mut out = String::new();
    for inline in content {
        match inline {
            Inline::Text(t) => out.push_str(&escape(t)),
            Inline::Code(c) => write!(out, "<code>{}</code>", escape(c)).unwrap(),
            Inline::Emphasis(inner) => write!(out, "<em>{}</em>", inlines(inner, resolver)).unwrap(),
            Inline::Strong(inner) => write!(out, "<strong>{}</strong>", inlines(inner, resolver)).unwrap(),
            Inline::WikiLink(name) => out.push_str(&page_link(name, resolver(name))),
            Inline::Url(url) => {
                let url = escape(url);
                write!(out, r#"<a class="external" href="{url}">{url}</a>"#).unwrap();
            }
        }
    }
    out
}
