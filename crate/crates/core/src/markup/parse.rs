use std::collections::BTreeSet;
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;

use super::inline::{collect_links, parse_inline, Inline};
use super::name::{is_wiki_word, PageName};
use super::value::ObjectValue;

/// Regular expression a property line must match; the predicate capture must
/// additionally be a WikiWord.
pub const PROPERTY_LINE_PATTERN: &str = r"^([A-Za-z][A-Za-z0-9]*): (.*\S.*)$";

/// Regular expression a command line must match.
pub const COMMAND_LINE_PATTERN: &str = r"^\s*\{\{\s*([A-Za-z]+)(?:\s+(.*?))?\s*\}\}\s*$";

static PROPERTY_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(PROPERTY_LINE_PATTERN).unwrap());
static COMMAND_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(COMMAND_LINE_PATTERN).unwrap());
static HEADING: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^(#{1,6})(?:[ \t]+(.*?))?[ \t]*$").unwrap());
static LIST_ITEM: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^[ \t]*-[ \t]+(.*?)[ \t]*$").unwrap());

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyPair {
    pub predicate: PageName,
    pub object: ObjectValue,
    /// 1-based.
    pub source_line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CommandName {
    Forwardlinks,
    Triples,
    Breadcrumbs,
    AllPages,
    SameType,
    Properties,
}

impl CommandName {
    pub const ALL: [CommandName; 6] = [
        CommandName::Forwardlinks,
        CommandName::Triples,
        CommandName::Breadcrumbs,
        CommandName::AllPages,
        CommandName::SameType,
        CommandName::Properties,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::Forwardlinks => "forwardlinks",
            CommandName::Triples => "triples",
            CommandName::Breadcrumbs => "breadcrumbs",
            CommandName::AllPages => "allpages",
            CommandName::SameType => "sametype",
            CommandName::Properties => "properties",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == name)
    }
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WikiCommand {
    pub name: CommandName,
    pub arg: Option<PageName>,
    pub source_line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Heading { level: u8, content: Vec<Inline> },
    Paragraph(Vec<Inline>),
    UnorderedList(Vec<Vec<Inline>>),
    /// Position of `commands[i]` within the body.
    Command(usize),
}

/// What a source line turned into. Exactly one role per line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineRole {
    Property,
    Command,
    Body,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedPage {
    pub name: PageName,
    pub properties: Vec<PropertyPair>,
    pub links: BTreeSet<PageName>,
    pub commands: Vec<WikiCommand>,
    pub body: Vec<Block>,
    pub line_roles: Vec<LineRole>,
}

/// Split on `\r\n`, `\n` or a lone `\r`. A trailing terminator does not start
/// a new line, so `""` has no lines and `"a\n"` has one.
pub fn split_lines(source: &str) -> Vec<&str> {
    let mut lines = Vec::new();
    let mut start = 0;
    let bytes = source.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\n' => {
                lines.push(&source[start..i]);
                i += 1;
                start = i;
            }
            b'\r' => {
                lines.push(&source[start..i]);
                i += if bytes.get(i + 1) == Some(&b'\n') { 2 } else { 1 };
                start = i;
            }
            _ => i += 1,
        }
    }
    if start < source.len() {
        lines.push(&source[start..]);
    }
    lines
}

/// Recognise a property line.
pub fn parse_property_line(line: &str) -> Option<(PageName, ObjectValue)> {
    let caps = PROPERTY_LINE.captures(line)?;
    let predicate = &caps[1];
    if !is_wiki_word(predicate) {
        return None;
    }
    let predicate = PageName::new(predicate).ok()?;
    Some((predicate, ObjectValue::classify(&caps[2])))
}

/// Recognise a command line with a known command name.
pub fn parse_command_line(line: &str) -> Option<(CommandName, Option<PageName>)> {
    let caps = COMMAND_LINE.captures(line)?;
    let name = CommandName::from_name(&caps[1])?;
    let arg = match caps.get(2) {
        None => None,
        Some(m) => {
            let raw = m.as_str().trim();
            let raw = raw
                .strip_prefix("[[")
                .and_then(|r| r.strip_suffix("]]"))
                .map_or(raw, str::trim);
            Some(PageName::new(raw).ok()?)
        }
    };
    Some((name, arg))
}

/// Split wiki source into properties, commands and renderable body blocks.
/// Total: malformed constructs degrade to plain text.
pub fn parse_page(name: PageName, source: &str) -> ParsedPage {
    let lines = split_lines(source);
    let mut properties = Vec::new();
    let mut commands = Vec::new();
    let mut line_roles = Vec::with_capacity(lines.len());
    let mut builder = BlockBuilder::default();

    for (idx, line) in lines.iter().enumerate() {
        let source_line = idx + 1;
        if let Some((predicate, object)) = parse_property_line(line) {
            builder.flush();
            properties.push(PropertyPair { predicate, object, source_line });
            line_roles.push(LineRole::Property);
        } else if let Some((cmd, arg)) = parse_command_line(line) {
            builder.flush();
            builder.blocks.push(Block::Command(commands.len()));
            commands.push(WikiCommand { name: cmd, arg, source_line });
            line_roles.push(LineRole::Command);
        } else {
            builder.line(line);
            line_roles.push(LineRole::Body);
        }
    }
    builder.flush();
    let body = builder.blocks;

    let mut ordered = Vec::new();
    for block in &body {
        match block {
            Block::Heading { content, .. } | Block::Paragraph(content) => collect_links(content, &mut ordered),
            Block::UnorderedList(items) => items.iter().for_each(|item| collect_links(item, &mut ordered)),
            Block::Command(_) => {}
        }
    }
    let mut links: BTreeSet<PageName> = ordered.into_iter().collect();
    links.extend(properties.iter().filter_map(|p| p.object.as_page().cloned()));
    links.extend(commands.iter().filter_map(|c| c.arg.clone()));

    ParsedPage { name, properties, links, commands, body, line_roles }
}

#[derive(Default)]
struct BlockBuilder {
    blocks: Vec<Block>,
    paragraph: Vec<String>,
    list: Vec<String>,
}

impl BlockBuilder {
    fn line(&mut self, line: &str) {
        if line.trim().is_empty() {
            self.flush();
        } else if let Some(caps) = HEADING.captures(line) {
            self.flush();
            let level = caps[1].len() as u8;
            let content = caps.get(2).map_or("", |m| m.as_str());
            self.blocks.push(Block::Heading { level, content: parse_inline(content) });
        } else if let Some(caps) = LIST_ITEM.captures(line) {
            self.flush_paragraph();
            self.list.push(caps[1].to_string());
        } else {
            self.flush_list();
            self.paragraph.push(line.trim_end().to_string());
        }
    }

    fn flush(&mut self) {
        self.flush_paragraph();
        self.flush_list();
    }

    fn flush_paragraph(&mut self) {
        if !self.paragraph.is_empty() {
            let text = self.paragraph.join("\n");
            self.paragraph.clear();
            self.blocks.push(Block::Paragraph(parse_inline(&text)));
        }
    }

    fn flush_list(&mut self) {
        if !self.list.is_empty() {
            let items = self.list.drain(..).map(|item| parse_inline(&item)).collect();
            self.blocks.push(Block::UnorderedList(items));
        }
    }
}
