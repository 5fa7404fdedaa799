//! The `.cdl` diagram description language.
//!
//! A file has up to three sections, in this order:
//!
//! ```text
//! [config]
//! cgap_scale = 1.5
//! colgaps = 1.5;;w"XY"2
//! [grid]
//! A & B & {}
//! {} & C & D
//! [arrows]
//! at (1,2) dir (1,-1) head=h tail=e shaft=- bend=+1 L="f" dL=1 perp=0.5
//! at (2,1) dir (0,1) l="g" short
//! ```
//!
//! `dir (dx,dy)` counts columns to the right and rows upward, so the target
//! of an arrow at `(r,c)` is `(r - dy, c + dx)`.
//!
//! Arrow options follow the macro package's setters: each one is one-shot,
//! so the first occurrence of an option wins and later ones are ignored.

use std::fmt;

use thiserror::Error;

use crate::fixedpoint::{Factor, Sp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub rows: Vec<Vec<Cell>>,
    pub arrows: Vec<ArrowSpec>,
    pub config: DiagramConfig,
}

impl Diagram {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Cell at a 1-based address, `None` for addresses past a short row.
    pub fn cell(&self, row: usize, col: usize) -> Option<&Cell> {
        self.rows.get(row.checked_sub(1)?)?.get(col.checked_sub(1)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    /// Ordinary content; empty text is a vertex.
    Text(String),
    /// `content` displayed centered in a box as wide as `width_of`.
    ChangeWidth { content: String, width_of: String },
    /// A labeled horizontal relation arrow occupying the whole cell.
    Relation(Relation),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heading {
    East,
    West,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub heading: Heading,
    pub above: String,
    pub below: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellAddr {
    pub row: usize,
    pub col: usize,
}

/// Column and row offsets of an arrow; `dy > 0` points up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Offset {
    pub dx: i64,
    pub dy: i64,
}

#[derive(Debug, Clone)]
pub struct ArrowSpec {
    pub at: CellAddr,
    pub dir: Offset,
    pub options: ArrowOptions,
    /// Source line, for diagnostics only; ignored by `==`.
    pub line: usize,
}

impl PartialEq for ArrowSpec {
    fn eq(&self, other: &Self) -> bool {
        self.at == other.at && self.dir == other.dir && self.options == other.options
    }
}

impl Eq for ArrowSpec {}

/// Tail and head letters: `e t h ' ` ( ) s H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tip {
    /// `e`: nothing drawn.
    Blank,
    /// `t`
    Reversed,
    /// `h`
    Head,
    /// `'`
    HarpoonUp,
    /// `` ` ``
    HarpoonDown,
    /// `(`
    HookLeft,
    /// `)`
    HookRight,
    /// `s`: recessed one segment.
    Slip,
    /// `H`: two heads 3pt apart.
    Double,
}

impl Tip {
    pub const ALL: [Tip; 9] = [
        Tip::Blank,
        Tip::Reversed,
        Tip::Head,
        Tip::HarpoonUp,
        Tip::HarpoonDown,
        Tip::HookLeft,
        Tip::HookRight,
        Tip::Slip,
        Tip::Double,
    ];

    pub fn from_letter(c: char) -> Option<Tip> {
        Some(match c {
            'e' => Tip::Blank,
            't' => Tip::Reversed,
            'h' => Tip::Head,
            '\'' => Tip::HarpoonUp,
            '`' => Tip::HarpoonDown,
            '(' => Tip::HookLeft,
            ')' => Tip::HookRight,
            's' => Tip::Slip,
            'H' => Tip::Double,
            _ => return None,
        })
    }

    pub fn letter(self) -> char {
        match self {
            Tip::Blank => 'e',
            Tip::Reversed => 't',
            Tip::Head => 'h',
            Tip::HarpoonUp => '\'',
            Tip::HarpoonDown => '`',
            Tip::HookLeft => '(',
            Tip::HookRight => ')',
            Tip::Slip => 's',
            Tip::Double => 'H',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tip::Blank => "blank",
            Tip::Reversed => "reversed",
            Tip::Head => "head",
            Tip::HarpoonUp => "harpoon-up",
            Tip::HarpoonDown => "harpoon-down",
            Tip::HookLeft => "hook-left",
            Tip::HookRight => "hook-right",
            Tip::Slip => "slip",
            Tip::Double => "double",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShaftStyle {
    /// `0`: phantom arrow, only labels are set.
    None,
    /// `+`
    #[default]
    Solid,
    /// `-`
    Dashed,
    /// `=`
    Double,
}

impl ShaftStyle {
    pub fn from_letter(c: char) -> Option<ShaftStyle> {
        Some(match c {
            '0' => ShaftStyle::None,
            '+' => ShaftStyle::Solid,
            '-' => ShaftStyle::Dashed,
            '=' => ShaftStyle::Double,
            _ => return None,
        })
    }

    pub fn letter(self) -> char {
        match self {
            ShaftStyle::None => '0',
            ShaftStyle::Solid => '+',
            ShaftStyle::Dashed => '-',
            ShaftStyle::Double => '=',
        }
    }
}

/// One option as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrowOption {
    Tail(Tip),
    Head(Tip),
    Shaft(ShaftStyle),
    Bend(i64),
    SrcShift(Factor, Factor),
    TargetShiftExact(Factor, Factor),
    TargetShiftProj(Factor, Factor),
    SourceDx(Factor),
    TargetDx(Factor),
    SourceDy(Factor),
    TargetDy(Factor),
    Perp(Factor),
    LabelAbove(String),
    LabelBelow(String),
    AboveShift(Factor),
    BelowShift(Factor),
    Short,
    NoShort,
}

/// Resolved options. Shifts are factors of `hunit`/`vunit` and are turned
/// into lengths at layout time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArrowOptions {
    pub tail: Option<Tip>,
    pub head: Option<Tip>,
    pub shaft: Option<ShaftStyle>,
    pub bend: Option<i64>,
    pub src_shift: Option<(Factor, Factor)>,
    pub target_shift_exact: Option<(Factor, Factor)>,
    pub target_shift_proj: Option<(Factor, Factor)>,
    pub source_dx: Option<Factor>,
    pub target_dx: Option<Factor>,
    pub source_dy: Option<Factor>,
    pub target_dy: Option<Factor>,
    pub perp: Option<Factor>,
    pub label_above: Option<String>,
    pub label_below: Option<String>,
    pub above_shift: Option<Factor>,
    pub below_shift: Option<Factor>,
    pub short: bool,
    pub noshort: bool,
}

fn first<T>(slot: &mut Option<T>, v: T) {
    if slot.is_none() {
        *slot = Some(v);
    }
}

impl ArrowOptions {
    pub fn from_list<I: IntoIterator<Item = ArrowOption>>(opts: I) -> ArrowOptions {
        let mut o = ArrowOptions::default();
        for opt in opts {
            o.set(opt);
        }
        o
    }

    /// Applies one option; an option already set keeps its first value.
    pub fn set(&mut self, opt: ArrowOption) {
        match opt {
            ArrowOption::Tail(t) => first(&mut self.tail, t),
            ArrowOption::Head(t) => first(&mut self.head, t),
            ArrowOption::Shaft(s) => first(&mut self.shaft, s),
            ArrowOption::Bend(n) => first(&mut self.bend, n),
            ArrowOption::SrcShift(a, b) => first(&mut self.src_shift, (a, b)),
            ArrowOption::TargetShiftExact(a, b) => first(&mut self.target_shift_exact, (a, b)),
            ArrowOption::TargetShiftProj(a, b) => first(&mut self.target_shift_proj, (a, b)),
            ArrowOption::SourceDx(f) => first(&mut self.source_dx, f),
            ArrowOption::TargetDx(f) => first(&mut self.target_dx, f),
            ArrowOption::SourceDy(f) => first(&mut self.source_dy, f),
            ArrowOption::TargetDy(f) => first(&mut self.target_dy, f),
            ArrowOption::Perp(f) => first(&mut self.perp, f),
            ArrowOption::LabelAbove(s) => first(&mut self.label_above, s),
            ArrowOption::LabelBelow(s) => first(&mut self.label_below, s),
            ArrowOption::AboveShift(f) => first(&mut self.above_shift, f),
            ArrowOption::BelowShift(f) => first(&mut self.below_shift, f),
            ArrowOption::Short => {
                if !self.noshort {
                    self.short = true;
                }
            }
            ArrowOption::NoShort => {
                if !self.short {
                    self.noshort = true;
                }
            }
        }
    }

    pub fn shaft_style(&self) -> ShaftStyle {
        self.shaft.unwrap_or_default()
    }

    /// The options in canonical order; `from_list(to_list())` is the identity.
    pub fn to_list(&self) -> Vec<ArrowOption> {
        let mut v = Vec::new();
        if let Some(t) = self.tail {
            v.push(ArrowOption::Tail(t));
        }
        if let Some(t) = self.head {
            v.push(ArrowOption::Head(t));
        }
        if let Some(s) = self.shaft {
            v.push(ArrowOption::Shaft(s));
        }
        if let Some(n) = self.bend {
            v.push(ArrowOption::Bend(n));
        }
        if let Some((a, b)) = self.src_shift {
            v.push(ArrowOption::SrcShift(a, b));
        }
        if let Some((a, b)) = self.target_shift_exact {
            v.push(ArrowOption::TargetShiftExact(a, b));
        }
        if let Some((a, b)) = self.target_shift_proj {
            v.push(ArrowOption::TargetShiftProj(a, b));
        }
        if let Some(f) = self.source_dx {
            v.push(ArrowOption::SourceDx(f));
        }
        if let Some(f) = self.target_dx {
            v.push(ArrowOption::TargetDx(f));
        }
        if let Some(f) = self.source_dy {
            v.push(ArrowOption::SourceDy(f));
        }
        if let Some(f) = self.target_dy {
            v.push(ArrowOption::TargetDy(f));
        }
        if let Some(f) = self.perp {
            v.push(ArrowOption::Perp(f));
        }
        if let Some(s) = &self.label_above {
            v.push(ArrowOption::LabelAbove(s.clone()));
        }
        if let Some(s) = &self.label_below {
            v.push(ArrowOption::LabelBelow(s.clone()));
        }
        if let Some(f) = self.above_shift {
            v.push(ArrowOption::AboveShift(f));
        }
        if let Some(f) = self.below_shift {
            v.push(ArrowOption::BelowShift(f));
        }
        if self.short {
            v.push(ArrowOption::Short);
        }
        if self.noshort {
            v.push(ArrowOption::NoShort);
        }
        v
    }
}

impl fmt::Display for ArrowOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrowOption::Tail(t) => write!(f, "tail={}", t.letter()),
            ArrowOption::Head(t) => write!(f, "head={}", t.letter()),
            ArrowOption::Shaft(s) => write!(f, "shaft={}", s.letter()),
            ArrowOption::Bend(n) => write!(f, "bend={n:+}"),
            ArrowOption::SrcShift(a, b) => write!(f, "ds=({a},{b})"),
            ArrowOption::TargetShiftExact(a, b) => write!(f, "dtX=({a},{b})"),
            ArrowOption::TargetShiftProj(a, b) => write!(f, "dtY=({a},{b})"),
            ArrowOption::SourceDx(x) => write!(f, "dx={x}"),
            ArrowOption::TargetDx(x) => write!(f, "dX={x}"),
            ArrowOption::SourceDy(x) => write!(f, "dy={x}"),
            ArrowOption::TargetDy(x) => write!(f, "dY={x}"),
            ArrowOption::Perp(x) => write!(f, "perp={x}"),
            ArrowOption::LabelAbove(s) => write!(f, "L={}", quote(s)),
            ArrowOption::LabelBelow(s) => write!(f, "l={}", quote(s)),
            ArrowOption::AboveShift(x) => write!(f, "dL={x}"),
            ArrowOption::BelowShift(x) => write!(f, "dl={x}"),
            ArrowOption::Short => f.write_str("short"),
            ArrowOption::NoShort => f.write_str("noshort"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LabelSize {
    #[default]
    Normal,
    Small,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapEntry {
    pub factor: Factor,
    /// The `w"..."` minimum: the gap is at least 15pt plus this snippet's
    /// width at label size.
    pub min_snippet: Option<String>,
}

impl GapEntry {
    pub fn factor(f: Factor) -> GapEntry {
        GapEntry {
            factor: f,
            min_snippet: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramConfig {
    pub cgap_scale: Factor,
    pub rgap_scale: Factor,
    /// First entry is column gap 2.
    pub colgaps: Vec<GapEntry>,
    /// First entry is row gap 1.
    pub rowgaps: Vec<GapEntry>,
    pub label_size: LabelSize,
    pub pre_space: Sp,
    pub post_space: Sp,
    pub margin: Sp,
    /// Minimum width of `@east`/`@west` relation arrows.
    pub minaw: Sp,
    /// The `\;` skip around relation labels.
    pub thickspace: Sp,
}

impl Default for DiagramConfig {
    fn default() -> Self {
        DiagramConfig {
            cgap_scale: Factor::ONE,
            rgap_scale: Factor::ONE,
            colgaps: Vec::new(),
            rowgaps: Vec::new(),
            label_size: LabelSize::Normal,
            pre_space: Sp::ZERO,
            post_space: Sp::ZERO,
            margin: Sp::pt(5),
            minaw: Sp::parse_dimen("11.111pt").expect("constant"),
            thickspace: Sp::parse_dimen("2.78pt").expect("constant"),
        }
    }
}

pub const CONFIG_KEYS: [&str; 10] = [
    "cgap_scale",
    "rgap_scale",
    "colgaps",
    "rowgaps",
    "label_size",
    "pre_space",
    "post_space",
    "margin",
    "minaw",
    "thickspace",
];

impl DiagramConfig {
    /// Sets one `[config]` key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        let dimen = |v: &str| Sp::parse_dimen(v).map_err(|e| e.to_string());
        let factor = |v: &str| v.parse::<Factor>().map_err(|e| e.to_string());
        match key {
            "cgap_scale" => self.cgap_scale = factor(value)?,
            "rgap_scale" => self.rgap_scale = factor(value)?,
            "colgaps" => self.colgaps = parse_gaps(value, GapKind::Col)?,
            "rowgaps" => self.rowgaps = parse_gaps(value, GapKind::Row)?,
            "label_size" => {
                self.label_size = match value {
                    "normal" => LabelSize::Normal,
                    "small" => LabelSize::Small,
                    other => return Err(format!("label_size must be `normal` or `small`, not `{other}`")),
                }
            }
            "pre_space" => self.pre_space = dimen(value)?,
            "post_space" => self.post_space = dimen(value)?,
            "margin" => self.margin = dimen(value)?,
            "minaw" => self.minaw = dimen(value)?,
            "thickspace" => self.thickspace = dimen(value)?,
            other => return Err(format!("unknown config key `{other}`")),
        }
        Ok(())
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "cgap_scale" => self.cgap_scale.to_string(),
            "rgap_scale" => self.rgap_scale.to_string(),
            "colgaps" => gaps_to_string(&self.colgaps),
            "rowgaps" => gaps_to_string(&self.rowgaps),
            "label_size" => match self.label_size {
                LabelSize::Normal => "normal".into(),
                LabelSize::Small => "small".into(),
            },
            "pre_space" => self.pre_space.to_string(),
            "post_space" => self.post_space.to_string(),
            "margin" => self.margin.to_string(),
            "minaw" => self.minaw.to_string(),
            "thickspace" => self.thickspace.to_string(),
            _ => unreachable!("not a config key"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    Col,
    Row,
}

/// Parses a `;`-separated gap list. Each entry is `[<factor>]` or
/// `w"<snippet>"[<factor>]`; an empty factor means 1.0. An empty list
/// yields no entries.
pub fn parse_gaps(text: &str, kind: GapKind) -> Result<Vec<GapEntry>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let what = match kind {
        GapKind::Col => "column gap",
        GapKind::Row => "row gap",
    };
    let mut entries = Vec::new();
    let mut chars = text.char_indices().peekable();
    loop {
        while chars.next_if(|&(_, c)| c == ' ' || c == '\t').is_some() {}
        let mut snippet = None;
        if let Some(&(_, 'w')) = chars.peek() {
            chars.next();
            while chars.next_if(|&(_, c)| c == ' ' || c == '\t').is_some() {}
            match chars.next() {
                Some((_, '"')) => {}
                _ => return Err(format!("{what}: expected `\"` after `w`")),
            }
            snippet = Some(read_quoted_body(&mut chars).ok_or_else(|| format!("{what}: unterminated snippet"))?);
        }
        let mut factor_text = String::new();
        while let Some(&(_, c)) = chars.peek() {
            if c == ';' {
                break;
            }
            factor_text.push(c);
            chars.next();
        }
        let factor_text = factor_text.trim();
        let factor = if factor_text.is_empty() {
            Factor::ONE
        } else {
            factor_text
                .parse::<Factor>()
                .map_err(|e| format!("{what} `{factor_text}`: {e}"))?
        };
        entries.push(GapEntry {
            factor,
            min_snippet: snippet,
        });
        match chars.next() {
            Some((_, ';')) => continue,
            None => break,
            Some(_) => unreachable!(),
        }
    }
    Ok(entries)
}

fn gaps_to_string(gaps: &[GapEntry]) -> String {
    gaps.iter()
        .map(|g| match &g.min_snippet {
            Some(s) => format!("w{}{}", quote(s), g.factor),
            None => g.factor.to_string(),
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Reads up to and including the closing quote; `\"` and `\\` are escapes,
/// any other backslash is kept.
fn read_quoted_body<I: Iterator<Item = (usize, char)>>(chars: &mut std::iter::Peekable<I>) -> Option<String> {
    let mut out = String::new();
    while let Some((_, c)) = chars.next() {
        match c {
            '"' => return Some(out),
            '\\' => match chars.peek() {
                Some(&(_, '"')) | Some(&(_, '\\')) => out.push(chars.next().unwrap().1),
                _ => out.push('\\'),
            },
            c => out.push(c),
        }
    }
    None
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("Invalid {option} option `{letter}`")]
    InvalidOption { option: &'static str, letter: char },
    #[error("unknown arrow option `{0}`")]
    UnknownOption(String),
    #[error("bad config value: {0}")]
    Config(String),
    #[error("arrow source ({row},{col}) is not a cell of the grid")]
    MissingSource { row: usize, col: usize },
}

fn err(line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, col, kind }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    err(line, col, ParseErrorKind::Syntax(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    None,
    Config,
    Grid,
    Arrows,
}

/// Drops a `#` comment that is outside braces and, when `quotes` is set,
/// outside double quotes. Grid cells treat `"` as an ordinary character.
fn strip_comment(line: &str, quotes: bool) -> &str {
    let mut depth = 0i32;
    let mut in_quote = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        if in_quote {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => in_quote = false,
                _ => {}
            }
            continue;
        }
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' => escaped = true,
            '"' if quotes && depth == 0 => in_quote = true,
            '{' => depth += 1,
            '}' => depth -= 1,
            '#' if depth == 0 => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse_diagram(source: &str) -> Result<Diagram, ParseError> {
    let mut section = Section::None;
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut arrows = Vec::new();
    let mut config = DiagramConfig::default();

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw, section != Section::Grid);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        if trimmed.starts_with('[') && trimmed.ends_with(']') {
            let next = match trimmed {
                "[config]" => Section::Config,
                "[grid]" => Section::Grid,
                "[arrows]" => Section::Arrows,
                other => return Err(syntax(line_no, indent + 1, format!("unknown section {other}"))),
            };
            if next <= section {
                return Err(syntax(
                    line_no,
                    indent + 1,
                    format!("section {trimmed} out of order (expected [config], [grid], [arrows])"),
                ));
            }
            section = next;
            continue;
        }
        match section {
            Section::None => {
                return Err(syntax(line_no, indent + 1, "expected a section header"));
            }
            Section::Config => {
                let (key, value) = trimmed
                    .split_once('=')
                    .ok_or_else(|| syntax(line_no, indent + 1, "expected `key = value`"))?;
                let value_col = line.find('=').unwrap() + 2;
                config
                    .set(key.trim(), value)
                    .map_err(|m| err(line_no, value_col, ParseErrorKind::Config(m)))?;
            }
            Section::Grid => parse_grid_line(line, line_no, &mut rows)?,
            Section::Arrows => arrows.push(parse_arrow_line(line, line_no)?),
        }
    }

    let diagram = Diagram { rows, arrows, config };
    for a in &diagram.arrows {
        if diagram.cell(a.at.row, a.at.col).is_none() {
            return Err(err(
                a.line,
                1,
                ParseErrorKind::MissingSource {
                    row: a.at.row,
                    col: a.at.col,
                },
            ));
        }
    }
    Ok(diagram)
}

fn parse_grid_line(line: &str, line_no: usize, rows: &mut Vec<Vec<Cell>>) -> Result<(), ParseError> {
    let mut cells: Vec<Cell> = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let bytes = line.as_bytes();
    let mut i = 0usize;
    let mut row_open = false;
    let mut flush = |cells: &mut Vec<Cell>, text: &str, col: usize, end_row: bool| -> Result<(), ParseError> {
        let cell = parse_cell(text, line_no, col)?;
        cells.push(cell);
        if end_row {
            let row = std::mem::take(cells);
            if !(row.len() == 1 && row[0] == Cell::Text(String::new()) && text.trim().is_empty()) {
                rows.push(row);
            }
        }
        Ok(())
    };
    while i < bytes.len() {
        match bytes[i] {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(syntax(line_no, i + 1, "unbalanced `}`"));
                }
            }
            b'&' if depth == 0 => {
                flush(&mut cells, &line[start..i], start + 1, false)?;
                row_open = true;
                start = i + 1;
            }
            b'\\' if depth == 0 && bytes.get(i + 1) == Some(&b'\\') => {
                flush(&mut cells, &line[start..i], start + 1, true)?;
                row_open = false;
                i += 2;
                start = i;
                continue;
            }
            b'\\' => {
                // skip the escaped character so `\{` and `\&` stay in the cell
                i += 2;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err(syntax(line_no, line.len(), "unbalanced `{`"));
    }
    let rest = &line[start.min(line.len())..];
    if row_open || !rest.trim().is_empty() {
        flush(&mut cells, rest, start + 1, true)?;
    }
    Ok(())
}

fn parse_cell(text: &str, line_no: usize, col: usize) -> Result<Cell, ParseError> {
    let t = text.trim();
    let inner_col = col + (text.len() - text.trim_start().len());
    if let Some(rest) = t.strip_prefix('@') {
        let name_len = rest.bytes().take_while(|b| b.is_ascii_alphabetic()).count();
        let name = &rest[..name_len];
        let args = brace_args(&rest[name_len..])
            .ok_or_else(|| syntax(line_no, inner_col, format!("`@{name}` expects two braced arguments")))?;
        let [a, b] = args;
        return match name {
            "changewidth" => Ok(Cell::ChangeWidth {
                content: a,
                width_of: b,
            }),
            "east" => Ok(Cell::Relation(Relation {
                heading: Heading::East,
                above: a,
                below: b,
            })),
            "west" => Ok(Cell::Relation(Relation {
                heading: Heading::West,
                above: a,
                below: b,
            })),
            _ => Err(syntax(line_no, inner_col, format!("unknown cell form `@{name}`"))),
        };
    }
    Ok(Cell::Text(unbrace(t).to_string()))
}

/// Index of the brace matching the `{` at byte 0.
fn matching_brace(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                i += 2;
                continue;
            }
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
        i += 1;
    }
    None
}

fn unbrace(t: &str) -> &str {
    if t.starts_with('{') && matching_brace(t) == Some(t.len() - 1) {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

fn brace_args(s: &str) -> Option<[String; 2]> {
    let mut rest = s.trim_start();
    let mut out: [String; 2] = Default::default();
    for slot in out.iter_mut() {
        if !rest.starts_with('{') {
            return None;
        }
        let end = matching_brace(rest)?;
        *slot = rest[1..end].to_string();
        rest = rest[end + 1..].trim_start();
    }
    rest.is_empty().then_some(out)
}

struct Scanner<'a> {
    line: &'a str,
    pos: usize,
    line_no: usize,
}

impl<'a> Scanner<'a> {
    fn col(&self) -> usize {
        self.pos + 1
    }

    fn rest(&self) -> &'a str {
        &self.line[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        syntax(self.line_no, self.col(), msg)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.rest().starts_with(kw) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if f(c)) {
            self.bump();
        }
        &self.line[start..self.pos]
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let col = self.col();
        let text = self.take_while(|c| c.is_ascii_digit() || c == '+' || c == '-');
        let digits = text.trim_start_matches(['+', '-']);
        let neg = text.chars().filter(|&c| c == '-').count() % 2 == 1;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(syntax(
                self.line_no,
                col,
                format!("expected an integer, found `{text}`"),
            ));
        }
        let v: i64 = digits
            .parse()
            .map_err(|_| syntax(self.line_no, col, "integer too large"))?;
        Ok(if neg { -v } else { v })
    }

    fn factor(&mut self, stop: &[char]) -> Result<Factor, ParseError> {
        self.skip_ws();
        let col = self.col();
        let text = self.take_while(|c| !c.is_whitespace() && !stop.contains(&c));
        text.parse::<Factor>()
            .map_err(|e| syntax(self.line_no, col, format!("bad factor `{text}`: {e}")))
    }

    fn pair<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<(T, T), ParseError> {
        self.expect('(')?;
        let a = item(self)?;
        self.skip_ws();
        match self.bump() {
            Some(',') | Some(';') => {}
            _ => return Err(self.error("expected `,` or `;`")),
        }
        let b = item(self)?;
        self.expect(')')?;
        Ok((a, b))
    }

    fn quoted(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        if self.peek() != Some('"') {
            return Err(self.error("expected a quoted string"));
        }
        let start_col = self.col();
        self.bump();
        let mut chars = self.rest().char_indices().peekable();
        let body =
            read_quoted_body(&mut chars).ok_or_else(|| syntax(self.line_no, start_col, "unterminated string"))?;
        let consumed = chars.peek().map(|&(i, _)| i).unwrap_or(self.rest().len());
        self.pos += consumed;
        Ok(body)
    }
}

fn parse_arrow_line(line: &str, line_no: usize) -> Result<ArrowSpec, ParseError> {
    let mut s = Scanner { line, pos: 0, line_no };
    s.keyword("at")?;
    let (row, col) = s.pair(|s| s.int())?;
    if row < 1 || col < 1 {
        return Err(syntax(line_no, 1, "cell addresses are 1-based"));
    }
    s.keyword("dir")?;
    let (dx, dy) = s.pair(|s| s.int())?;
    let mut options = ArrowOptions::default();
    loop {
        s.skip_ws();
        if s.peek().is_none() {
            break;
        }
        let col = s.col();
        let key = s.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if key.is_empty() {
            return Err(s.error("expected an option name"));
        }
        let opt = match key {
            "short" => ArrowOption::Short,
            "noshort" => ArrowOption::NoShort,
            _ => {
                if s.peek() != Some('=') {
                    return Err(s.error(format!("expected `=` after `{key}`")));
                }
                s.bump();
                parse_option_value(&mut s, key, col)?
            }
        };
        options.set(opt);
    }
    Ok(ArrowSpec {
        at: CellAddr {
            row: row as usize,
            col: col as usize,
        },
        dir: Offset { dx, dy },
        options,
        line: line_no,
    })
}

fn parse_option_value(s: &mut Scanner<'_>, key: &str, key_col: usize) -> Result<ArrowOption, ParseError> {
    let letter = |s: &mut Scanner<'_>, option: &'static str| -> Result<char, ParseError> {
        let c = s.bump().filter(|c| !c.is_whitespace());
        c.ok_or(err(
            s.line_no,
            s.col(),
            ParseErrorKind::InvalidOption { option, letter: ' ' },
        ))
    };
    Ok(match key {
        "tail" => {
            let c = letter(s, "tail")?;
            ArrowOption::Tail(Tip::from_letter(c).ok_or(err(
                s.line_no,
                s.col() - 1,
                ParseErrorKind::InvalidOption {
                    option: "tail",
                    letter: c,
                },
            ))?)
        }
        "head" => {
            let c = letter(s, "head")?;
            ArrowOption::Head(Tip::from_letter(c).ok_or(err(
                s.line_no,
                s.col() - 1,
                ParseErrorKind::InvalidOption {
                    option: "head",
                    letter: c,
                },
            ))?)
        }
        "shaft" => {
            let c = letter(s, "shaft")?;
            ArrowOption::Shaft(ShaftStyle::from_letter(c).ok_or(err(
                s.line_no,
                s.col() - 1,
                ParseErrorKind::InvalidOption {
                    option: "shaft",
                    letter: c,
                },
            ))?)
        }
        "bend" => ArrowOption::Bend(s.int()?),
        "ds" => {
            let (a, b) = s.pair(|s| s.factor(&[',', ';', ')']))?;
            ArrowOption::SrcShift(a, b)
        }
        "dtX" => {
            let (a, b) = s.pair(|s| s.factor(&[',', ';', ')']))?;
            ArrowOption::TargetShiftExact(a, b)
        }
        "dtY" => {
            let (a, b) = s.pair(|s| s.factor(&[',', ';', ')']))?;
            ArrowOption::TargetShiftProj(a, b)
        }
        "dx" => ArrowOption::SourceDx(s.factor(&[])?),
        "dX" => ArrowOption::TargetDx(s.factor(&[])?),
        "dy" => ArrowOption::SourceDy(s.factor(&[])?),
        "dY" => ArrowOption::TargetDy(s.factor(&[])?),
        "perp" => ArrowOption::Perp(s.factor(&[])?),
        "dL" => ArrowOption::AboveShift(s.factor(&[])?),
        "dl" => ArrowOption::BelowShift(s.factor(&[])?),
        "L" => ArrowOption::LabelAbove(s.quoted()?),
        "l" => ArrowOption::LabelBelow(s.quoted()?),
        other => {
            return Err(err(
                s.line_no,
                key_col,
                ParseErrorKind::UnknownOption(other.to_string()),
            ))
        }
    })
}

fn needs_braces(s: &str) -> bool {
    s.is_empty()
        || s.trim() != s
        || s.starts_with('{')
        || s.starts_with('@')
        || s.contains(['&', '#'])
        || s.contains("\\\\")
}

fn cell_source(c: &Cell) -> String {
    match c {
        Cell::Text(t) if needs_braces(t) => format!("{{{t}}}"),
        Cell::Text(t) => t.clone(),
        Cell::ChangeWidth { content, width_of } => format!("@changewidth{{{content}}}{{{width_of}}}"),
        Cell::Relation(r) => {
            let name = match r.heading {
                Heading::East => "east",
                Heading::West => "west",
            };
            format!("@{name}{{{}}}{{{}}}", r.above, r.below)
        }
    }
}

/// Canonical source text; parsing it yields an equal [`Diagram`].
impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[config]")?;
        for key in CONFIG_KEYS {
            writeln!(f, "{key} = {}", self.config.value_of(key))?;
        }
        writeln!(f, "[grid]")?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell_source).collect();
            writeln!(f, "{}", cells.join(" & "))?;
        }
        writeln!(f, "[arrows]")?;
        for a in &self.arrows {
            write!(f, "at ({},{}) dir ({},{})", a.at.row, a.at.col, a.dir.dx, a.dir.dy)?;
            for o in a.options.to_list() {
                write!(f, " {o}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(s: &str) -> Diagram {
        parse_diagram(s).unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn minimal_diagram() {
        let d = parse("[grid]\nA & B \\\\ C & D\n[arrows]\nat (1,1) dir (1,0)\n");
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.rows[0], vec![Cell::text("A"), Cell::text("B")]);
        assert_eq!(d.rows[1], vec![Cell::text("C"), Cell::text("D")]);
        assert_eq!(d.arrows.len(), 1);
        assert_eq!(d.arrows[0].at, CellAddr { row: 1, col: 1 });
        assert_eq!(d.arrows[0].dir, Offset { dx: 1, dy: 0 });
        assert_eq!(d.arrows[0].options, ArrowOptions::default());
    }

    #[test]
    fn first_option_wins() {
        let d = parse("[grid]\nA\n[arrows]\nat (1,1) dir (0,1) tail=e tail=h L=\"f\" L=\"g\"\n");
        assert_eq!(d.arrows[0].options.tail, Some(Tip::Blank));
        assert_eq!(d.arrows[0].options.label_above.as_deref(), Some("f"));
    }

    #[test]
    fn phantom_shaft() {
        let d = parse("[grid]\nA\n[arrows]\nat (1,1) dir (0,1) shaft=0\n");
        assert_eq!(d.arrows[0].options.shaft_style(), ShaftStyle::None);
    }

    #[test]
    fn short_and_noshort_are_first_wins() {
        let a = ArrowOptions::from_list([ArrowOption::Short, ArrowOption::NoShort]);
        assert!(a.short && !a.noshort);
        let b = ArrowOptions::from_list([ArrowOption::NoShort, ArrowOption::Short]);
        assert!(!b.short && b.noshort);
    }

    #[test]
    fn full_example_parses() {
        let src = r#"
[config]                      # all lines optional
cgap_scale = 1.5
rgap_scale = 1.0
colgaps = 1.5;;w"XY"2
rowgaps = 1;2
label_size = small
pre_space = 5pt
post_space = 0pt
[grid]
A & B & {}
{} & C & D
[arrows]
at (1,2) dir (1,-1) head=h tail=e shaft=- bend=+1 L="f" dL=1 perp=0.5
at (2,1) dir (0,1) l="g" short
at (2,2) dir (1,1) ds=(0.5;-1) dtY=(1,2) head=( tail=`
"#;
        let d = parse(src);
        assert_eq!(d.config.cgap_scale.raw(), 98304);
        assert_eq!(d.config.colgaps.len(), 3);
        assert_eq!(d.config.colgaps[2].min_snippet.as_deref(), Some("XY"));
        assert_eq!(d.config.colgaps[2].factor, Factor::from_int(2));
        assert_eq!(d.config.label_size, LabelSize::Small);
        assert_eq!(d.config.pre_space, Sp::pt(5));
        assert_eq!(d.rows[0][2], Cell::text(""));
        let a = &d.arrows[0].options;
        assert_eq!(a.head, Some(Tip::Head));
        assert_eq!(a.tail, Some(Tip::Blank));
        assert_eq!(a.shaft, Some(ShaftStyle::Dashed));
        assert_eq!(a.bend, Some(1));
        assert_eq!(a.perp, Some(Factor::from_raw(32768)));
        assert!(d.arrows[1].options.short);
        let c = &d.arrows[2].options;
        assert_eq!(c.src_shift, Some((Factor::from_raw(32768), Factor::from_int(-1))));
        assert_eq!(c.head, Some(Tip::HookLeft));
        assert_eq!(c.tail, Some(Tip::HarpoonDown));
    }

    #[test]
    fn gap_lists() {
        let g = parse_gaps("1.5;;2", GapKind::Col).unwrap();
        let fs: Vec<i64> = g.iter().map(|e| e.factor.raw()).collect();
        assert_eq!(fs, vec![98304, 65536, 131072]);
        let w = parse_gaps("w\"XY\"", GapKind::Col).unwrap();
        assert_eq!(
            w,
            vec![GapEntry {
                factor: Factor::ONE,
                min_snippet: Some("XY".into())
            }]
        );
        assert!(parse_gaps("", GapKind::Row).unwrap().is_empty());
        assert!(parse_gaps("1.5;x", GapKind::Row).is_err());
        assert!(parse_gaps("w\"XY", GapKind::Col).is_err());
        assert_eq!(parse_gaps("1;", GapKind::Row).unwrap().len(), 2);
    }

    #[test]
    fn special_cells() {
        let d = parse("[grid]\n@changewidth{WIDE}{XX} & @east{f}{} & @west{a b}{c} & {A & B}\n");
        assert_eq!(
            d.rows[0][0],
            Cell::ChangeWidth {
                content: "WIDE".into(),
                width_of: "XX".into()
            }
        );
        assert!(matches!(&d.rows[0][1], Cell::Relation(r) if r.heading == Heading::East && r.below.is_empty()));
        assert!(matches!(&d.rows[0][2], Cell::Relation(r) if r.heading == Heading::West && r.above == "a b"));
        assert_eq!(d.rows[0][3], Cell::text("A & B"));
    }

    #[test]
    fn ragged_rows_and_trailing_empty_cells() {
        let d = parse("[grid]\nA & B & \nC\n");
        assert_eq!(d.rows[0].len(), 3);
        assert_eq!(d.rows[1].len(), 1);
        assert_eq!(d.col_count(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_diagram("[grid]\nA\n[arrows]\nat (1,1) dir (0,1) tail=x\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert_eq!(e.col, 25);
        assert_eq!(
            e.kind,
            ParseErrorKind::InvalidOption {
                option: "tail",
                letter: 'x'
            }
        );
        assert!(e.to_string().contains("Invalid tail option"));

        let e = parse_diagram("[grid]\nA\n[arrows]\nat (1,1) dir (0,1) wiggle=2\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownOption(_)));

        let e = parse_diagram("[grid]\nA\n[arrows]\nat (2,1) dir (0,1)\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingSource { row: 2, col: 1 });
        assert_eq!(e.line, 4);

        let e = parse_diagram("[grid]\nA\n[arrows]\nat 1,1 dir (0,1)\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));

        let e = parse_diagram("A & B\n").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));

        let e = parse_diagram("[arrows]\n[grid]\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));

        let e = parse_diagram("[config]\ncgap_scale = x\n").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Config(_)));
        assert_eq!(e.line, 2);

        assert!(parse_diagram("[grid]\nA } B\n").is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        let src = "[config]\ncolgaps = w\"a\\\"b\"1.25;3\n[grid]\n{} & {@x} & {{a}b}\n  & q\n[arrows]\nat (1,1) dir (1,-1) L=\"\\alpha\" bend=-3 dtX=(1,-0.5) noshort short\n";
        let d = parse(src);
        assert_eq!(d.rows[0][1], Cell::text("@x"));
        assert_eq!(d.rows[0][2], Cell::text("{a}b"));
        assert_eq!(d.arrows[0].options.label_above.as_deref(), Some("\\alpha"));
        let again = parse(&d.to_string());
        assert_eq!(again, d);
    }

    fn arb_factor() -> impl Strategy<Value = Factor> {
        (-2_000_000i64..2_000_000).prop_map(Factor::from_raw)
    }

    fn arb_text() -> impl Strategy<Value = String> {
        "[A-Za-z0-9\\\\ +\"{}@&#-]{0,6}".prop_filter("balanced braces", |s| {
            // a backslash escapes the next character, as in the parser
            let mut d = 0;
            let mut chars = s.chars();
            while let Some(c) = chars.next() {
                match c {
                    '\\' => {
                        if chars.next().is_none() {
                            return false;
                        }
                    }
                    '{' => d += 1,
                    '}' => {
                        d -= 1;
                        if d < 0 {
                            return false;
                        }
                    }
                    _ => {}
                }
            }
            d == 0
        })
    }

    fn arb_option() -> impl Strategy<Value = ArrowOption> {
        let tip = (0usize..9).prop_map(|i| Tip::ALL[i]);
        prop_oneof![
            tip.clone().prop_map(ArrowOption::Tail),
            tip.prop_map(ArrowOption::Head),
            prop_oneof![
                Just(ShaftStyle::None),
                Just(ShaftStyle::Solid),
                Just(ShaftStyle::Dashed),
                Just(ShaftStyle::Double)
            ]
            .prop_map(ArrowOption::Shaft),
            (-40i64..40).prop_map(ArrowOption::Bend),
            (arb_factor(), arb_factor()).prop_map(|(a, b)| ArrowOption::SrcShift(a, b)),
            (arb_factor(), arb_factor()).prop_map(|(a, b)| ArrowOption::TargetShiftExact(a, b)),
            (arb_factor(), arb_factor()).prop_map(|(a, b)| ArrowOption::TargetShiftProj(a, b)),
            arb_factor().prop_map(ArrowOption::SourceDx),
            arb_factor().prop_map(ArrowOption::TargetDx),
            arb_factor().prop_map(ArrowOption::SourceDy),
            arb_factor().prop_map(ArrowOption::TargetDy),
            arb_factor().prop_map(ArrowOption::Perp),
            "[a-z\\\\\"]{0,4}".prop_map(ArrowOption::LabelAbove),
            "[a-z\\\\\"]{0,4}".prop_map(ArrowOption::LabelBelow),
            arb_factor().prop_map(ArrowOption::AboveShift),
            arb_factor().prop_map(ArrowOption::BelowShift),
            Just(ArrowOption::Short),
            Just(ArrowOption::NoShort),
        ]
    }

    fn arb_diagram() -> impl Strategy<Value = Diagram> {
        let cell = prop_oneof![
            4 => arb_text().prop_map(Cell::Text),
            1 => (arb_text(), arb_text()).prop_map(|(c, w)| Cell::ChangeWidth { content: c, width_of: w }),
            1 => (any::<bool>(), arb_text(), arb_text()).prop_map(|(e, a, b)| Cell::Relation(Relation {
                heading: if e { Heading::East } else { Heading::West },
                above: a,
                below: b,
            })),
        ];
        let rows = prop::collection::vec(prop::collection::vec(cell, 1..4), 1..4);
        let gaps = || {
            prop::collection::vec(
                (arb_factor(), proptest::option::of("[A-Za-z;\"]{0,3}")).prop_map(|(f, s)| GapEntry {
                    factor: f,
                    min_snippet: s,
                }),
                0..3,
            )
        };
        (
            rows,
            gaps(),
            gaps(),
            prop::collection::vec(prop::collection::vec(arb_option(), 0..6), 0..4),
            arb_factor(),
        )
            .prop_map(|(rows, colgaps, rowgaps, opts, scale)| {
                let arrows = opts
                    .into_iter()
                    .enumerate()
                    .map(|(i, o)| ArrowSpec {
                        at: CellAddr { row: 1, col: 1 },
                        dir: Offset {
                            dx: i as i64 - 1,
                            dy: 1,
                        },
                        options: ArrowOptions::from_list(o),
                        line: 0,
                    })
                    .collect();
                Diagram {
                    rows,
                    arrows,
                    config: DiagramConfig {
                        cgap_scale: scale,
                        colgaps,
                        rowgaps,
                        ..Default::default()
                    },
                }
            })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(d in arb_diagram()) {
            let text = d.to_string();
            let parsed = parse_diagram(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(&parsed, &d);
            prop_assert_eq!(parse_diagram(&parsed.to_string()).unwrap(), parsed);
        }

        #[test]
        fn later_duplicates_do_not_matter(opts in prop::collection::vec(arb_option(), 0..10), extra in prop::collection::vec(arb_option(), 0..10)) {
            let base = ArrowOptions::from_list(opts.clone());
            let mut with_dups = opts.clone();
            with_dups.extend(base.to_list());
            with_dups.extend(extra.iter().filter(|e| {
                // only options already decided may be appended
                ArrowOptions::from_list(base.to_list().into_iter().chain([(*e).clone()])) == base
            }).cloned());
            prop_assert_eq!(ArrowOptions::from_list(with_dups), base);
        }
    }
}
