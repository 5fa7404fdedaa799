//! Deterministic text measurement for cell contents and labels.
//!
//! Cell snippets are opaque strings. Their boxes come from a per-codepoint
//! width table plus a fixed ascent and descent, scaled for the two label
//! sizes. The default provider gives every printable character the same
//! width so layouts are reproducible without font files.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixedpoint::{NumberError, Sp};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextMetrics {
    pub width: Sp,
    pub height: Sp,
    pub depth: Sp,
}

impl TextMetrics {
    pub const EMPTY: TextMetrics = TextMetrics {
        width: Sp::ZERO,
        height: Sp::ZERO,
        depth: Sp::ZERO,
    };
}

/// Size class a snippet is set in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Display,
    LabelNormal,
    LabelSmall,
}

/// An exact decimal ratio such as `0.7` (= 7/10).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: i64,
    den: i64,
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Ratio {
        assert!(den > 0 && num >= 0, "ratio must be non-negative");
        Ratio { num, den }
    }

    fn apply(self, x: Sp) -> Sp {
        Sp::from_raw((x.raw() as i128 * self.num as i128 / self.den as i128) as i64)
    }
}

impl FromStr for Ratio {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Ratio, NumberError> {
        let t = s.trim();
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if (int.is_empty() && frac.is_empty())
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || frac.len() > 9
            || int.len() > 6
        {
            return Err(NumberError::Malformed(s.to_string()));
        }
        let den = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().unwrap() };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
        Ok(Ratio::new(int * den + frac, den))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let int = self.num / self.den;
        let frac = self.num % self.den;
        if self.den == 1 {
            return write!(f, "{int}");
        }
        let width = self.den.ilog10() as usize;
        write!(f, "{int}.{frac:0width$}")
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricProvider {
    widths: BTreeMap<char, Sp>,
    default_width: Sp,
    ascent: Sp,
    descent: Sp,
    ratio_normal: Ratio,
    ratio_small: Ratio,
}

impl Default for MetricProvider {
    /// 5pt per printable character, ascent 7pt, descent 2pt; label sizes at
    /// 0.7 and 0.5.
    fn default() -> Self {
        MetricProvider {
            widths: BTreeMap::new(),
            default_width: Sp::pt(5),
            ascent: Sp::pt(7),
            descent: Sp::pt(2),
            ratio_normal: Ratio::new(7, 10),
            ratio_small: Ratio::new(5, 10),
        }
    }
}

impl MetricProvider {
    pub fn uniform(char_width: Sp, ascent: Sp, descent: Sp) -> Self {
        MetricProvider {
            default_width: char_width,
            ascent,
            descent,
            ..Default::default()
        }
    }

    pub fn with_ratios(mut self, normal: Ratio, small: Ratio) -> Self {
        self.ratio_normal = normal;
        self.ratio_small = small;
        self
    }

    pub fn with_width(mut self, c: char, width: Sp) -> Self {
        self.widths.insert(c, width);
        self
    }

    pub fn ascent(&self) -> Sp {
        self.ascent
    }

    pub fn descent(&self) -> Sp {
        self.descent
    }

    fn ratio(&self, size: SizeClass) -> Ratio {
        match size {
            SizeClass::Display => Ratio::ONE,
            SizeClass::LabelNormal => self.ratio_normal,
            SizeClass::LabelSmall => self.ratio_small,
        }
    }

    /// Nominal font size of text set at `size`: 10pt at display size.
    pub fn font_size(&self, size: SizeClass) -> Sp {
        self.ratio(size).apply(Sp::pt(10))
    }

    fn char_width(&self, c: char) -> Sp {
        if c.is_control() {
            return Sp::ZERO;
        }
        self.widths.get(&c).copied().unwrap_or(self.default_width)
    }

    /// Box of `snippet` at `size`. Widths are scaled per character so that
    /// measurement is additive under concatenation.
    pub fn measure(&self, snippet: &str, size: SizeClass) -> TextMetrics {
        if snippet.is_empty() {
            return TextMetrics::EMPTY;
        }
        let r = self.ratio(size);
        TextMetrics {
            width: snippet.chars().map(|c| r.apply(self.char_width(c))).sum(),
            height: r.apply(self.ascent),
            depth: r.apply(self.descent),
        }
    }

    /// Printable characters of `snippet` that fall back to the default width
    /// because an explicit table is loaded and does not list them.
    pub fn missing_glyphs(&self, snippet: &str) -> Vec<char> {
        if self.widths.is_empty() {
            return Vec::new();
        }
        let mut out: Vec<char> = snippet
            .chars()
            .filter(|c| !c.is_control() && !self.widths.contains_key(c))
            .collect();
        out.dedup();
        out
    }

    /// Reads a metrics override file:
    ///
    /// ```text
    /// ascent 458752
    /// descent 2pt
    /// ratio_normal 0.7
    /// ratio_small 0.5
    /// default 327680
    /// U+0041 327680
    /// ```
    ///
    /// Dimensions are integer sp unless suffixed with `pt`. Missing headers
    /// keep the default provider's values.
    pub fn parse(text: &str) -> Result<MetricProvider, MetricsError> {
        let mut p = MetricProvider::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| MetricsError::Syntax { line, msg };
            let mut parts = content.split_whitespace();
            let key = parts.next().unwrap();
            let value = parts.next().ok_or_else(|| err(format!("`{key}` needs a value")))?;
            if let Some(extra) = parts.next() {
                return Err(err(format!("unexpected `{extra}`")));
            }
            let dimen = |v: &str| -> Result<Sp, MetricsError> {
                let d = if v.ends_with("pt") || v.ends_with("sp") {
                    Sp::parse_dimen(v)
                } else {
                    Sp::parse_dimen(&format!("{v}sp"))
                };
                d.map_err(|e| err(e.to_string()))
            };
            match key {
                "ascent" => p.ascent = dimen(value)?,
                "descent" => p.descent = dimen(value)?,
                "default" => p.default_width = dimen(value)?,
                "ratio_normal" => p.ratio_normal = value.parse().map_err(|e: NumberError| err(e.to_string()))?,
                "ratio_small" => p.ratio_small = value.parse().map_err(|e: NumberError| err(e.to_string()))?,
                _ => {
                    let hex = key
                        .strip_prefix("U+")
                        .or_else(|| key.strip_prefix("u+"))
                        .ok_or_else(|| err(format!("unknown entry `{key}`")))?;
                    let cp = u32::from_str_radix(hex, 16)
                        .ok()
                        .and_then(char::from_u32)
                        .ok_or_else(|| err(format!("bad codepoint `{key}`")))?;
                    let w = dimen(value)?;
                    if w < Sp::ZERO {
                        return Err(err(format!("negative width for {key}")));
                    }
                    p.widths.insert(cp, w);
                }
            }
            if p.ascent < Sp::ZERO || p.descent < Sp::ZERO || p.default_width < Sp::ZERO {
                return Err(err("dimensions must be non-negative".into()));
            }
        }
        Ok(p)
    }
}
