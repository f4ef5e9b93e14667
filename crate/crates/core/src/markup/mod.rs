//! Wiki markup: page names, property lines, links, commands and the Markdown
//! subset used for page bodies.

mod inline;
mod name;
mod parse;
mod render;
mod value;

pub use inline::{extract_links, links_in_order, parse_inline, Inline};
pub use name::{is_wiki_word, InvalidPageName, PageName};
pub use parse::{
    parse_command_line, parse_page, parse_property_line, split_lines, Block, CommandName, LineRole,
    ParsedPage, PropertyPair, WikiCommand, COMMAND_LINE_PATTERN, PROPERTY_LINE_PATTERN,
};
pub use render::{escape, object_html, page_href, page_link, render_html, render_with, PROPERTY_TABLE_CLASS};
pub use value::{classify_literal, is_capitalised_word, is_date, parse_date, Datatype, ObjectValue};
