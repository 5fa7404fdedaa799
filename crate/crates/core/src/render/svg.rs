use std::fmt::Write;

use super::scene::{Scene, TextRun};
use crate::arrows::{Marker, Stroke};
use crate::dsl::Tip;
use crate::fixedpoint::{Sp, UNITY};

/// `sp` in points, rounded to at most five decimals, trailing zeros trimmed.
pub fn fmt_pt(v: Sp) -> String {
    let raw = v.raw() as i128;
    let scaled = (raw.abs() * 100_000 * 2 + UNITY as i128) / (2 * UNITY as i128);
    let sign = if raw < 0 && scaled != 0 { "-" } else { "" };
    let (int, frac) = (scaled / 100_000, scaled % 100_000);
    if frac == 0 {
        return format!("{sign}{int}");
    }
    let digits = format!("{frac:05}");
    format!("{sign}{int}.{}", digits.trim_end_matches('0'))
}

fn fmt_unit(x: f64) -> String {
    let s = format!("{x:.5}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" => "0".to_owned(),
        _ => s.to_owned(),
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c if c.is_control() => {}
            c => out.push(c),
        }
    }
    out
}

/// Glyph outlines in pt, tip at the origin, pointing along +x.
fn tip_def(t: Tip) -> Option<(&'static str, bool)> {
    Some(match t {
        Tip::Blank => return None,
        Tip::Head | Tip::Slip | Tip::Double => ("M0 0L-5 -2.2L-3.8 0L-5 2.2Z", true),
        Tip::Reversed => ("M-4.6 0L0 -2.2L-1.2 0L0 2.2Z", true),
        Tip::HarpoonUp => ("M0 0L-5 -2.2L-3.8 0Z", true),
        Tip::HarpoonDown => ("M0 0L-5 2.2L-3.8 0Z", true),
        Tip::HookLeft => ("M0 0A1.6 1.6 0 0 1 0 -3.2", false),
        Tip::HookRight => ("M0 0A1.6 1.6 0 0 0 0 3.2", false),
    })
}

fn write_text(out: &mut String, t: &TextRun) {
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="{}">{}</text>"#,
        fmt_pt(t.x),
        fmt_pt(t.baseline),
        fmt_pt(t.font_size),
        escape(&t.content)
    );
}

fn write_stroke(out: &mut String, s: &Stroke) {
    let _ = write!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="{}""#,
        fmt_pt(s.from.x),
        fmt_pt(s.from.y),
        fmt_pt(s.to.x),
        fmt_pt(s.to.y),
        fmt_pt(s.width)
    );
    if !s.dash.is_empty() {
        let dash: Vec<String> = s.dash.iter().map(|&d| fmt_pt(d)).collect();
        let _ = write!(out, r#" stroke-dasharray="{}""#, dash.join(" "));
    }
    out.push_str("/>\n");
}

fn write_marker(out: &mut String, m: &Marker) {
    let (dx, dy) = (m.dir[0] as f64, m.dir[1] as f64);
    let len = (dx * dx + dy * dy).sqrt();
    let (c, s) = if len > 0.0 { (dx / len, dy / len) } else { (1.0, 0.0) };
    let _ = writeln!(
        out,
        r##"<use xlink:href="#tip-{}" transform="matrix({} {} {} {} {} {})"/>"##,
        m.tip.name(),
        fmt_unit(c),
        fmt_unit(s),
        fmt_unit(-s),
        fmt_unit(c),
        fmt_pt(m.at.x),
        fmt_pt(m.at.y)
    );
}

/// SVG 1.1 document for `scene`; user units are points.
pub fn emit_svg(scene: &Scene) -> String {
    let (w, h) = (fmt_pt(scene.canvas.width), fmt_pt(scene.canvas.height));
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" width="{w}pt" height="{h}pt" viewBox="0 0 {w} {h}">"#
    );
    out.push_str("<defs>\n");
    for t in Tip::ALL {
        if let Some((d, filled)) = tip_def(t) {
            let paint = if filled {
                r#"fill="black" stroke="none""#
            } else {
                r#"fill="none" stroke="black" stroke-width="0.4""#
            };
            let _ = writeln!(out, r#"<path id="tip-{}" d="{d}" {paint}/>"#, t.name());
        }
    }
    out.push_str("</defs>\n");
    out.push_str("<g font-family=\"serif\" fill=\"black\">\n");

    out.push_str("<g class=\"cells\">\n");
    for c in &scene.cells {
        if let Some(t) = &c.text {
            write_text(&mut out, t);
        }
    }
    out.push_str("</g>\n<g class=\"shafts\" stroke=\"black\" fill=\"none\">\n");
    for a in &scene.arrows {
        for s in &a.strokes {
            write_stroke(&mut out, s);
        }
    }
    out.push_str("</g>\n<g class=\"markers\">\n");
    for a in &scene.arrows {
        for m in &a.markers {
            write_marker(&mut out, m);
        }
    }
    out.push_str("</g>\n<g class=\"labels\">\n");
    for l in &scene.labels {
        write_text(&mut out, &l.text);
    }
    out.push_str("</g>\n</g>\n</svg>\n");
    out
}
