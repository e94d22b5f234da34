//! Parser and serializer for the HTML-subset ground-truth format.
//!
//! The grammar is closed: `h1`, `h2`, `p` (optionally
//! `class="annotation"`), `ul`/`li`, and `span` with `font-family` and
//! `font-size` attributes. Text content recognizes exactly three
//! entities (`&amp;`, `&lt;`, `&gt;`); serialization always escapes
//! those characters, so parse(serialize(doc)) is the identity on any
//! valid document. Inter-tag whitespace is insignificant and text
//! whitespace collapses to single spaces.

use crate::text::ScriptText;

/// Font id assigned to bare text that appears outside a `<span>`.
pub const BARE_TEXT_FONT_ID: &str = "default";
/// Size assigned to bare text that appears outside a `<span>`.
pub const BARE_TEXT_SIZE_PX: u32 = 16;

/// Minimum legal `font-size` attribute value.
pub const MIN_SIZE_PX: u32 = 14;
/// Maximum legal `font-size` attribute value.
pub const MAX_SIZE_PX: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeadingLevel {
    H1,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockRole {
    Header(HeadingLevel),
    Body,
    Annotation,
    ListItem,
}

/// A contiguous styled run of text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub text: ScriptText,
    pub font_id: String,
    pub size_px: u32,
}

/// One structural block of a page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub role: BlockRole,
    pub runs: Vec<Run>,
}

/// A structured page: ordered blocks of styled runs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DocumentSpec {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkupErrorKind {
    UnknownTag(String),
    UnclosedTag(String),
    MismatchedClosingTag { expected: String, found: String },
    IllegalNesting { outer: String, inner: String },
    UnknownAttribute { tag: String, attribute: String },
    MissingAttribute { tag: String, attribute: &'static str },
    InvalidAttribute { attribute: String, value: String },
    AttributeOutOfRange { attribute: String, value: String },
    EmptyBlock(String),
    StrayText,
    EmptyDocument,
    MalformedTag(String),
    UnexpectedEof,
}

impl std::fmt::Display for MarkupErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::UnknownTag(t) => write!(f, "unknown tag <{t}>"),
            Self::UnclosedTag(t) => write!(f, "unclosed tag <{t}>"),
            Self::MismatchedClosingTag { expected, found } => {
                write!(f, "expected </{expected}>, found </{found}>")
            }
            Self::IllegalNesting { outer, inner } => {
                write!(f, "illegal nesting: <{inner}> inside <{outer}>")
            }
            Self::UnknownAttribute { tag, attribute } => {
                write!(f, "unknown attribute '{attribute}' on <{tag}>")
            }
            Self::MissingAttribute { tag, attribute } => {
                write!(f, "missing attribute '{attribute}' on <{tag}>")
            }
            Self::InvalidAttribute { attribute, value } => {
                write!(f, "invalid value '{value}' for attribute '{attribute}'")
            }
            Self::AttributeOutOfRange { attribute, value } => {
                write!(f, "attribute '{attribute}' value '{value}' out of range")
            }
            Self::EmptyBlock(t) => write!(f, "empty block <{t}>"),
            Self::StrayText => write!(f, "text outside a block"),
            Self::EmptyDocument => write!(f, "document has no blocks"),
            Self::MalformedTag(msg) => write!(f, "malformed tag: {msg}"),
            Self::UnexpectedEof => write!(f, "unexpected end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct MarkupError {
    pub line: usize,
    pub col: usize,
    pub kind: MarkupErrorKind,
}

impl DocumentSpec {
    /// Distinct font ids in order of first appearance.
    pub fn fonts_used(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for run in self.blocks.iter().flat_map(|b| &b.runs) {
            if !seen.contains(&run.font_id) {
                seen.push(run.font_id.clone());
            }
        }
        seen
    }

    /// Distinct sizes in order of first appearance.
    pub fn sizes_used(&self) -> Vec<u32> {
        let mut seen = Vec::new();
        for run in self.blocks.iter().flat_map(|b| &b.runs) {
            if !seen.contains(&run.size_px) {
                seen.push(run.size_px);
            }
        }
        seen
    }

    /// Checks the structural invariants serialization relies on.
    pub fn validate(&self) -> Result<(), String> {
        if self.blocks.is_empty() {
            return Err("document has no blocks".into());
        }
        for block in &self.blocks {
            if block.runs.is_empty() {
                return Err("block has no runs".into());
            }
            for run in &block.runs {
                if run.text.is_empty() {
                    return Err("run has empty text".into());
                }
                if run.text.as_str() != collapse_ws(run.text.as_str()) {
                    return Err(format!(
                        "run text is not whitespace-collapsed: {:?}",
                        run.text.as_str()
                    ));
                }
                if !is_valid_font_id(&run.font_id) {
                    return Err(format!("invalid font id {:?}", run.font_id));
                }
                if !(MIN_SIZE_PX..=MAX_SIZE_PX).contains(&run.size_px) {
                    return Err(format!("run size {}px out of range", run.size_px));
                }
            }
        }
        Ok(())
    }
}

pub fn is_valid_font_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Collapses whitespace runs to single spaces and trims the ends.
pub(crate) fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
}

/// Serializes to canonical form: lowercase tags, double-quoted
/// attributes in fixed order, no inter-tag whitespace, every run as an
/// explicit `<span>`. Consecutive list items share one `<ul>`.
pub fn serialize_markup(doc: &DocumentSpec) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < doc.blocks.len() {
        let block = &doc.blocks[i];
        match block.role {
            BlockRole::ListItem => {
                out.push_str("<ul>");
                while i < doc.blocks.len() && doc.blocks[i].role == BlockRole::ListItem {
                    out.push_str("<li>");
                    serialize_runs(&doc.blocks[i].runs, &mut out);
                    out.push_str("</li>");
                    i += 1;
                }
                out.push_str("</ul>");
            }
            role => {
                let (open, close) = match role {
                    BlockRole::Header(HeadingLevel::H1) => ("<h1>", "</h1>"),
                    BlockRole::Header(HeadingLevel::H2) => ("<h2>", "</h2>"),
                    BlockRole::Body => ("<p>", "</p>"),
                    BlockRole::Annotation => ("<p class=\"annotation\">", "</p>"),
                    BlockRole::ListItem => unreachable!(),
                };
                out.push_str(open);
                serialize_runs(&block.runs, &mut out);
                out.push_str(close);
                i += 1;
            }
        }
    }
    out
}

fn serialize_runs(runs: &[Run], out: &mut String) {
    for run in runs {
        out.push_str("<span font-family=\"");
        out.push_str(&run.font_id);
        out.push_str("\" font-size=\"");
        out.push_str(&run.size_px.to_string());
        out.push_str("\">");
        escape_text(run.text.as_str(), out);
        out.push_str("</span>");
    }
}

/// Plain-text projection: runs joined by single spaces, blocks joined
/// by single newlines, no tags.
pub fn extract_plain_text(doc: &DocumentSpec) -> ScriptText {
    let mut out = String::new();
    for (bi, block) in doc.blocks.iter().enumerate() {
        if bi > 0 {
            out.push('\n');
        }
        for (ri, run) in block.runs.iter().enumerate() {
            if ri > 0 {
                out.push(' ');
            }
            out.push_str(run.text.as_str());
        }
    }
    ScriptText::new(&out)
}

/// Parses a markup string into a [`DocumentSpec`].
pub fn parse_markup(s: &str) -> Result<DocumentSpec, MarkupError> {
    Parser::new(s).parse_document()
}

struct Tag {
    name: String,
    attrs: Vec<(String, String)>,
    line: usize,
    col: usize,
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            chars: s.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, kind: MarkupErrorKind) -> MarkupError {
        MarkupError {
            line: self.line,
            col: self.col,
            kind,
        }
    }

    fn err_at(&self, line: usize, col: usize, kind: MarkupErrorKind) -> MarkupError {
        MarkupError { line, col, kind }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn parse_document(&mut self) -> Result<DocumentSpec, MarkupError> {
        let mut blocks = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('<') => {
                    let tag = self.read_tag()?;
                    if tag.name.starts_with('/') {
                        return Err(self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::MismatchedClosingTag {
                                expected: "(none)".into(),
                                found: tag.name[1..].to_string(),
                            },
                        ));
                    }
                    match tag.name.as_str() {
                        "h1" | "h2" | "p" => blocks.push(self.parse_simple_block(tag)?),
                        "ul" => self.parse_list(tag, &mut blocks)?,
                        "li" | "span" => {
                            return Err(self.err_at(
                                tag.line,
                                tag.col,
                                MarkupErrorKind::IllegalNesting {
                                    outer: "document".into(),
                                    inner: tag.name,
                                },
                            ))
                        }
                        _ => {
                            return Err(self.err_at(
                                tag.line,
                                tag.col,
                                MarkupErrorKind::UnknownTag(tag.name),
                            ))
                        }
                    }
                }
                Some(_) => return Err(self.err(MarkupErrorKind::StrayText)),
            }
        }
        if blocks.is_empty() {
            return Err(self.err(MarkupErrorKind::EmptyDocument));
        }
        Ok(DocumentSpec { blocks })
    }

    fn parse_simple_block(&mut self, tag: Tag) -> Result<Block, MarkupError> {
        let role = match tag.name.as_str() {
            "h1" => {
                self.reject_attrs(&tag)?;
                BlockRole::Header(HeadingLevel::H1)
            }
            "h2" => {
                self.reject_attrs(&tag)?;
                BlockRole::Header(HeadingLevel::H2)
            }
            "p" => self.paragraph_role(&tag)?,
            _ => unreachable!(),
        };
        let runs = self.parse_inline_until(&tag)?;
        Ok(Block { role, runs })
    }

    fn paragraph_role(&mut self, tag: &Tag) -> Result<BlockRole, MarkupError> {
        let mut role = BlockRole::Body;
        for (name, value) in &tag.attrs {
            if name != "class" {
                return Err(self.err_at(
                    tag.line,
                    tag.col,
                    MarkupErrorKind::UnknownAttribute {
                        tag: tag.name.clone(),
                        attribute: name.clone(),
                    },
                ));
            }
            if value != "annotation" {
                return Err(self.err_at(
                    tag.line,
                    tag.col,
                    MarkupErrorKind::InvalidAttribute {
                        attribute: name.clone(),
                        value: value.clone(),
                    },
                ));
            }
            role = BlockRole::Annotation;
        }
        Ok(role)
    }

    fn reject_attrs(&mut self, tag: &Tag) -> Result<(), MarkupError> {
        if let Some((name, _)) = tag.attrs.first() {
            return Err(self.err_at(
                tag.line,
                tag.col,
                MarkupErrorKind::UnknownAttribute {
                    tag: tag.name.clone(),
                    attribute: name.clone(),
                },
            ));
        }
        Ok(())
    }

    fn parse_list(&mut self, ul: Tag, blocks: &mut Vec<Block>) -> Result<(), MarkupError> {
        self.reject_attrs(&ul)?;
        let mut items = 0usize;
        loop {
            self.skip_ws();
            match self.peek() {
                None => {
                    return Err(self.err_at(ul.line, ul.col, MarkupErrorKind::UnclosedTag(ul.name)))
                }
                Some('<') => {
                    let tag = self.read_tag()?;
                    if tag.name == "/ul" {
                        if items == 0 {
                            return Err(self.err_at(
                                ul.line,
                                ul.col,
                                MarkupErrorKind::EmptyBlock("ul".into()),
                            ));
                        }
                        return Ok(());
                    }
                    if tag.name == "li" {
                        self.reject_attrs(&tag)?;
                        let runs = self.parse_inline_until(&tag)?;
                        blocks.push(Block {
                            role: BlockRole::ListItem,
                            runs,
                        });
                        items += 1;
                    } else if let Some(found) = tag.name.strip_prefix('/') {
                        return Err(self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::MismatchedClosingTag {
                                expected: "ul".into(),
                                found: found.to_string(),
                            },
                        ));
                    } else {
                        return Err(self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::IllegalNesting {
                                outer: "ul".into(),
                                inner: tag.name,
                            },
                        ));
                    }
                }
                Some(_) => return Err(self.err(MarkupErrorKind::StrayText)),
            }
        }
    }

    /// Parses inline content (text and spans) until the matching close
    /// tag for `open`.
    fn parse_inline_until(&mut self, open: &Tag) -> Result<Vec<Run>, MarkupError> {
        let mut runs = Vec::new();
        loop {
            let text = self.read_text()?;
            let collapsed = collapse_ws(&text);
            if !collapsed.is_empty() {
                runs.push(Run {
                    text: ScriptText::new(&collapsed),
                    font_id: BARE_TEXT_FONT_ID.to_string(),
                    size_px: BARE_TEXT_SIZE_PX,
                });
            }
            match self.peek() {
                None => {
                    return Err(self.err_at(
                        open.line,
                        open.col,
                        MarkupErrorKind::UnclosedTag(open.name.clone()),
                    ))
                }
                Some('<') => {
                    let tag = self.read_tag()?;
                    if let Some(found) = tag.name.strip_prefix('/') {
                        if found == open.name {
                            break;
                        }
                        return Err(self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::MismatchedClosingTag {
                                expected: open.name.clone(),
                                found: found.to_string(),
                            },
                        ));
                    }
                    if tag.name == "span" {
                        runs.push(self.parse_span(tag)?);
                    } else {
                        return Err(self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::IllegalNesting {
                                outer: open.name.clone(),
                                inner: tag.name,
                            },
                        ));
                    }
                }
                Some(_) => unreachable!("read_text stops only at '<' or EOF"),
            }
        }
        if runs.is_empty() {
            return Err(self.err_at(
                open.line,
                open.col,
                MarkupErrorKind::EmptyBlock(open.name.clone()),
            ));
        }
        Ok(runs)
    }

    fn parse_span(&mut self, tag: Tag) -> Result<Run, MarkupError> {
        let mut font_id = None;
        let mut size_px = None;
        for (name, value) in &tag.attrs {
            match name.as_str() {
                "font-family" => {
                    if !is_valid_font_id(value) {
                        return Err(self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::InvalidAttribute {
                                attribute: name.clone(),
                                value: value.clone(),
                            },
                        ));
                    }
                    font_id = Some(value.clone());
                }
                "font-size" => {
                    let px: u32 = value.parse().map_err(|_| {
                        self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::InvalidAttribute {
                                attribute: name.clone(),
                                value: value.clone(),
                            },
                        )
                    })?;
                    if !(MIN_SIZE_PX..=MAX_SIZE_PX).contains(&px) {
                        return Err(self.err_at(
                            tag.line,
                            tag.col,
                            MarkupErrorKind::AttributeOutOfRange {
                                attribute: name.clone(),
                                value: value.clone(),
                            },
                        ));
                    }
                    size_px = Some(px);
                }
                other => {
                    return Err(self.err_at(
                        tag.line,
                        tag.col,
                        MarkupErrorKind::UnknownAttribute {
                            tag: "span".into(),
                            attribute: other.to_string(),
                        },
                    ))
                }
            }
        }
        let font_id = font_id.ok_or_else(|| {
            self.err_at(
                tag.line,
                tag.col,
                MarkupErrorKind::MissingAttribute {
                    tag: "span".into(),
                    attribute: "font-family",
                },
            )
        })?;
        let size_px = size_px.ok_or_else(|| {
            self.err_at(
                tag.line,
                tag.col,
                MarkupErrorKind::MissingAttribute {
                    tag: "span".into(),
                    attribute: "font-size",
                },
            )
        })?;

        let text = self.read_text()?;
        match self.peek() {
            None => {
                return Err(self.err_at(
                    tag.line,
                    tag.col,
                    MarkupErrorKind::UnclosedTag("span".into()),
                ))
            }
            Some('<') => {
                let close = self.read_tag()?;
                if close.name != "/span" {
                    let kind = match close.name.strip_prefix('/') {
                        Some(found) => MarkupErrorKind::MismatchedClosingTag {
                            expected: "span".into(),
                            found: found.to_string(),
                        },
                        None => MarkupErrorKind::IllegalNesting {
                            outer: "span".into(),
                            inner: close.name,
                        },
                    };
                    return Err(self.err_at(close.line, close.col, kind));
                }
            }
            Some(_) => unreachable!(),
        }
        let collapsed = collapse_ws(&text);
        if collapsed.is_empty() {
            return Err(self.err_at(tag.line, tag.col, MarkupErrorKind::EmptyBlock("span".into())));
        }
        Ok(Run {
            text: ScriptText::new(&collapsed),
            font_id,
            size_px,
        })
    }

    /// Reads text up to the next '<' or EOF, decoding the three
    /// recognized entities. A '&' that does not start a recognized
    /// entity is literal.
    fn read_text(&mut self) -> Result<String, MarkupError> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            match c {
                '<' => break,
                '&' => {
                    self.bump();
                    let mut entity = String::new();
                    let mut matched = false;
                    for _ in 0..4 {
                        match self.peek() {
                            Some(';') => {
                                self.bump();
                                matched = true;
                                break;
                            }
                            Some(c) if c.is_ascii_alphabetic() => {
                                entity.push(c);
                                self.bump();
                            }
                            _ => break,
                        }
                    }
                    match (matched, entity.as_str()) {
                        (true, "amp") => out.push('&'),
                        (true, "lt") => out.push('<'),
                        (true, "gt") => out.push('>'),
                        _ => {
                            out.push('&');
                            out.push_str(&entity);
                            if matched {
                                out.push(';');
                            }
                        }
                    }
                }
                c => {
                    out.push(c);
                    self.bump();
                }
            }
        }
        Ok(out)
    }

    /// Reads a `<...>` construct. Closing tags come back with a leading
    /// '/' in the name and no attributes.
    fn read_tag(&mut self) -> Result<Tag, MarkupError> {
        let (line, col) = (self.line, self.col);
        self.bump(); // '<'
        let mut name = String::new();
        if self.peek() == Some('/') {
            name.push('/');
            self.bump();
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            name.push(self.bump().unwrap());
        }
        if name.is_empty() || name == "/" {
            return Err(self.err_at(line, col, MarkupErrorKind::MalformedTag("missing tag name".into())));
        }
        let mut attrs = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('>') => {
                    self.bump();
                    break;
                }
                None => return Err(self.err_at(line, col, MarkupErrorKind::UnexpectedEof)),
                Some(_) if name.starts_with('/') => {
                    return Err(self.err_at(
                        line,
                        col,
                        MarkupErrorKind::MalformedTag("attributes on closing tag".into()),
                    ))
                }
                Some(_) => {
                    let mut attr = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                        attr.push(self.bump().unwrap());
                    }
                    if attr.is_empty() {
                        return Err(self.err_at(
                            line,
                            col,
                            MarkupErrorKind::MalformedTag("expected attribute name".into()),
                        ));
                    }
                    if self.bump() != Some('=') {
                        return Err(self.err_at(
                            line,
                            col,
                            MarkupErrorKind::MalformedTag(format!("'{attr}' missing '='")),
                        ));
                    }
                    if self.bump() != Some('"') {
                        return Err(self.err_at(
                            line,
                            col,
                            MarkupErrorKind::MalformedTag(format!("'{attr}' value must be double-quoted")),
                        ));
                    }
                    let mut value = String::new();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some(c) if c != '<' && c != '>' => value.push(c),
                            _ => {
                                return Err(self.err_at(
                                    line,
                                    col,
                                    MarkupErrorKind::MalformedTag(format!(
                                        "unterminated value for '{attr}'"
                                    )),
                                ))
                            }
                        }
                    }
                    attrs.push((attr, value));
                }
            }
        }
        Ok(Tag {
            name,
            attrs,
            line,
            col,
        })
    }
}
