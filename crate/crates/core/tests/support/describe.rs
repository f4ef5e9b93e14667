//! Stable one-line-per-field text form of a parsed page, used by the golden
//! grammar corpus.

use shawn_core::markup::{Block, Inline, LineRole, ObjectValue, ParsedPage};

pub fn describe(page: &ParsedPage) -> String {
    let props: Vec<String> = page
        .properties
        .iter()
        .map(|p| format!("{}={}@{}", p.predicate, object(&p.object), p.source_line))
        .collect();
    let links: Vec<String> = page.links.iter().map(|l| l.to_string()).collect();
    let cmds: Vec<String> = page
        .commands
        .iter()
        .map(|c| match &c.arg {
            Some(arg) => format!("{}({})@{}", c.name, arg, c.source_line),
            None => format!("{}@{}", c.name, c.source_line),
        })
        .collect();
    let body: Vec<String> = page.body.iter().map(block).collect();
    let roles: String = page
        .line_roles
        .iter()
        .map(|r| match r {
            LineRole::Property => 'P',
            LineRole::Command => 'C',
            LineRole::Body => 'B',
        })
        .collect();
    format!(
        "props: {}\nlinks: {}\ncmds: {}\nbody: {}\nroles: {}",
        props.join(" | "),
        links.join(", "),
        cmds.join(" | "),
        body.join(" "),
        roles
    )
}

fn object(o: &ObjectValue) -> String {
    match o {
        ObjectValue::PageRef(p) => format!("page:{p}"),
        ObjectValue::Literal { lexical, datatype } => format!("{}:{lexical}", datatype.as_str()),
    }
}

fn block(b: &Block) -> String {
    match b {
        Block::Heading { level, content } => format!("(h{level}{})", inlines(content)),
        Block::Paragraph(content) => format!("(p{})", inlines(content)),
        Block::UnorderedList(items) => {
            let items: Vec<String> = items.iter().map(|i| format!("(li{})", inlines(i))).collect();
            format!("(ul {})", items.join(" "))
        }
        Block::Command(i) => format!("(cmd {i})"),
    }
}

fn inlines(content: &[Inline]) -> String {
    content.iter().map(|i| format!(" {}", inline(i))).collect()
}

fn inline(i: &Inline) -> String {
    match i {
        Inline::Text(t) => format!("{t:?}"),
        Inline::Code(c) => format!("(code {c:?})"),
        Inline::Emphasis(inner) => format!("(em{})", inlines(inner)),
        Inline::Strong(inner) => format!("(strong{})", inlines(inner)),
        Inline::WikiLink(p) => format!("[{p}]"),
        Inline::Url(u) => format!("<{u}>"),
    }
}
