use std::collections::BTreeSet;

use super::name::{is_wiki_word, PageName};

/// Inline run inside a heading, paragraph or list item.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inline {
    Text(String),
    Code(String),
    Emphasis(Vec<Inline>),
    Strong(Vec<Inline>),
    WikiLink(PageName),
    Url(String),
}

/// Parse a run of inline markup. Total: anything unrecognised is text.
pub fn parse_inline(text: &str) -> Vec<Inline> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut i = 0;
    let bytes = text.as_bytes();

    while i < text.len() {
        let rest = &text[i..];
        let prev = text[..i].chars().next_back();

        if let Some(after) = rest.strip_prefix('`') {
            if let Some(end) = after.find('`') {
                flush(&mut buf, &mut out);
                out.push(Inline::Code(after[..end].to_string()));
                i += end + 2;
                continue;
            }
        } else if rest.starts_with("[[") {
            if let Some((name, len)) = freetext_link(rest) {
                flush(&mut buf, &mut out);
                out.push(Inline::WikiLink(name));
                i += len;
                continue;
            }
        } else if (rest.starts_with("http://") || rest.starts_with("https://"))
            && !prev.is_some_and(char::is_alphanumeric)
        {
            let len = url_len(rest);
            if len > rest.find("://").unwrap() + 3 {
                flush(&mut buf, &mut out);
                out.push(Inline::Url(rest[..len].to_string()));
                i += len;
                continue;
            }
        } else if let Some(after) = rest.strip_prefix("**") {
            if let Some(end) = closing(after, "**") {
                flush(&mut buf, &mut out);
                out.push(Inline::Strong(parse_inline(&after[..end])));
                i += end + 4;
                continue;
            }
        } else if let Some(after) = rest.strip_prefix('*') {
            if let Some(end) = closing(after, "*") {
                flush(&mut buf, &mut out);
                out.push(Inline::Emphasis(parse_inline(&after[..end])));
                i += end + 2;
                continue;
            }
        } else if bytes[i].is_ascii_alphabetic() && !prev.is_some_and(char::is_alphanumeric) {
            let len = rest
                .char_indices()
                .find(|(_, c)| !c.is_alphanumeric())
                .map_or(rest.len(), |(n, _)| n);
            let word = &rest[..len];
            if is_wiki_word(word) {
                flush(&mut buf, &mut out);
                out.push(Inline::WikiLink(PageName::new(word).expect("wiki words are valid names")));
            } else {
                buf.push_str(word);
            }
            i += len;
            continue;
        }

        let c = rest.chars().next().expect("non-empty");
        buf.push(c);
        i += c.len_utf8();
    }
    flush(&mut buf, &mut out);
    out
}

fn flush(buf: &mut String, out: &mut Vec<Inline>) {
    if buf.is_empty() {
        return;
    }
    if let Some(Inline::Text(prev)) = out.last_mut() {
        prev.push_str(buf);
    } else {
        out.push(Inline::Text(buf.clone()));
    }
    buf.clear();
}

/// `[[name]]` at the start of `s`; returns the name and the consumed length.
fn freetext_link(s: &str) -> Option<(PageName, usize)> {
    let body = &s[2..];
    let end = body.find("]]")?;
    let inner = &body[..end];
    if inner.contains('[') || inner.contains(']') {
        return None;
    }
    let name = PageName::new(inner.trim()).ok()?;
    Some((name, end + 4))
}

fn url_len(s: &str) -> usize {
    let mut len = s
        .char_indices()
        .find(|(_, c)| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '`'))
        .map_or(s.len(), |(n, _)| n);
    while let Some(c) = s[..len].chars().next_back() {
        if matches!(c, '.' | ',' | ';' | ':' | '!' | '?' | ')' | '\'' | '*' | ']') {
            len -= c.len_utf8();
        } else {
            break;
        }
    }
    len
}

/// Offset of the delimiter closing an emphasis run. The content must be
/// non-empty and may not begin or end with whitespace.
fn closing(s: &str, delim: &str) -> Option<usize> {
    if s.starts_with(char::is_whitespace) || s.starts_with('*') {
        return None;
    }
    let mut from = 0;
    while let Some(pos) = s[from..].find(delim) {
        let at = from + pos;
        let before = s[..at].chars().next_back();
        let doubled = delim == "*" && s[at + 1..].starts_with('*');
        if at > 0 && !before.is_some_and(char::is_whitespace) && !doubled {
            return Some(at);
        }
        from = at + if doubled { 2 } else { 1 };
    }
    None
}

/// All page references in `text`: CamelCase words outside code spans and
/// URLs, plus every `[[...]]` target.
pub fn extract_links(text: &str) -> BTreeSet<PageName> {
    links_in_order(text).into_iter().collect()
}

/// Like [`extract_links`], in first-appearance order without duplicates.
pub fn links_in_order(text: &str) -> Vec<PageName> {
    let mut out = Vec::new();
    collect_links(&parse_inline(text), &mut out);
    out
}

pub(crate) fn collect_links(inlines: &[Inline], out: &mut Vec<PageName>) {
    for inline in inlines {
        match inline {
            Inline::WikiLink(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            Inline::Emphasis(inner) | Inline::Strong(inner) => collect_links(inner, out),
            Inline::Text(_) | Inline::Code(_) | Inline::Url(_) => {}
        }
    }
}
