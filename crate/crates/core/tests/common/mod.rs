#![allow(dead_code)]

use std::path::PathBuf;

use cdlay::arrows::{ArrowKind, Point};
use cdlay::dsl::{parse_diagram, ArrowOption, ShaftStyle, Tip};
use cdlay::fixedpoint::{Factor, Sp};
use cdlay::metrics::MetricProvider;
use cdlay::render::{PlacedArrow, Scene};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn build(src: &str) -> Scene {
    let d = parse_diagram(src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    cdlay::compile(&d, &MetricProvider::default()).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn corpus() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "cdl"))
        .collect();
    files.sort();
    files
}

pub fn metrics_file() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus/metrics.txt")
}

/// A factor with at most two decimals in `-range..=range`.
pub fn factor<R: Rng>(rng: &mut R, range: i64) -> Factor {
    let hundredths = rng.gen_range(-range * 100..=range * 100);
    format!("{:.2}", hundredths as f64 / 100.0).parse().unwrap()
}

pub fn tip<R: Rng>(rng: &mut R) -> Tip {
    *Tip::ALL.choose(rng).unwrap()
}

pub fn option<R: Rng>(rng: &mut R) -> ArrowOption {
    let shafts = [
        ShaftStyle::None,
        ShaftStyle::Solid,
        ShaftStyle::Dashed,
        ShaftStyle::Double,
    ];
    match rng.gen_range(0..18) {
        0 => ArrowOption::Tail(tip(rng)),
        1 => ArrowOption::Head(tip(rng)),
        2 => ArrowOption::Shaft(*shafts.choose(rng).unwrap()),
        3 => ArrowOption::Bend(rng.gen_range(-30..=30)),
        4 => ArrowOption::SrcShift(factor(rng, 3), factor(rng, 3)),
        5 => ArrowOption::TargetShiftExact(factor(rng, 3), factor(rng, 3)),
        6 => ArrowOption::TargetShiftProj(factor(rng, 3), factor(rng, 3)),
        7 => ArrowOption::SourceDx(factor(rng, 3)),
        8 => ArrowOption::TargetDx(factor(rng, 3)),
        9 => ArrowOption::SourceDy(factor(rng, 3)),
        10 => ArrowOption::TargetDy(factor(rng, 3)),
        11 => ArrowOption::Perp(factor(rng, 3)),
        12 => ArrowOption::LabelAbove(label(rng)),
        13 => ArrowOption::LabelBelow(label(rng)),
        14 => ArrowOption::AboveShift(factor(rng, 2)),
        15 => ArrowOption::BelowShift(factor(rng, 2)),
        16 => ArrowOption::Short,
        _ => ArrowOption::NoShort,
    }
}

pub fn option_list<R: Rng>(rng: &mut R, max: usize) -> Vec<ArrowOption> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| option(rng)).collect()
}

fn label<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..5);
    (0..n).map(|_| rng.gen_range(b'a'..=b'z') as char).collect()
}

fn cell<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..8) {
        0 => "{}".to_owned(),
        n => "M".repeat(n),
    }
}

/// A random grid with one diagonal arrow, as `.cdl` text. `extra` is
/// appended to the arrow line.
pub fn diagonal_case<R: Rng>(rng: &mut R, extra: &str) -> String {
    let rows = rng.gen_range(2..=5);
    let cols = rng.gen_range(2..=5);
    let mut src = String::from("[config]\n");
    src.push_str(&format!(
        "cgap_scale = {}\n",
        ["0.5", "1", "1.5", "2"].choose(rng).unwrap()
    ));
    src.push_str(&format!(
        "rgap_scale = {}\n",
        ["0.5", "1", "1.5", "2"].choose(rng).unwrap()
    ));
    src.push_str("[grid]\n");
    for _ in 0..rows {
        let cells: Vec<String> = (0..cols).map(|_| cell(rng)).collect();
        src.push_str(&cells.join(" & "));
        src.push('\n');
    }
    let (r, c) = (rng.gen_range(1..=rows), rng.gen_range(1..=cols));
    let dx = loop {
        let t = rng.gen_range(1..=cols as i64) - c as i64;
        if t != 0 {
            break t;
        }
    };
    let dy = loop {
        let t = r as i64 - rng.gen_range(1..=rows as i64);
        if t != 0 {
            break t;
        }
    };
    src.push_str(&format!("[arrows]\nat ({r},{c}) dir ({dx},{dy}) {extra}\n"));
    src
}

pub fn page(a: &PlacedArrow, p: Point) -> Point {
    Point::new(a.origin.x + p.x, a.origin.y - p.y)
}

/// Checks the tiling of a diagonal arrow laid out without slip tips:
/// pieces have the segment box size, follow each other, and the last one
/// ends exactly at the target height after covering the whole span.
pub fn check_tiling(a: &PlacedArrow) -> Result<(), String> {
    if a.kind != ArrowKind::Diagonal {
        return Err("not a diagonal".into());
    }
    let b = a.seg.ok_or("no segment box")?;
    let segs = &a.segments;
    let first = page(a, a.first);
    let second = page(a, a.second);
    let goal = (first.y - second.y).abs();
    if goal <= Sp::ZERO {
        return if segs.is_empty() {
            Ok(())
        } else {
            Err("pieces on an empty span".into())
        };
    }
    if segs.is_empty() {
        return Err(format!("no pieces for span {goal:?}"));
    }
    if segs[0][0] != first {
        return Err(format!("first piece starts at {:?}, not {:?}", segs[0][0], first));
    }
    for s in segs {
        if (s[1].x - s[0].x).abs() != b.charwd || (s[1].y - s[0].y).abs() != b.charht {
            return Err(format!("piece {s:?} is not {b:?}"));
        }
    }
    for w in segs[..segs.len() - 1].windows(2) {
        if w[0][1] != w[1][0] {
            return Err(format!("gap between {:?} and {:?}", w[0], w[1]));
        }
    }
    let last = segs.last().unwrap();
    if last[1].y != second.y {
        return Err(format!("last piece ends at y {:?}, target {:?}", last[1].y, second.y));
    }
    let covered = b.charht.mul_int(segs.len() as i64).unwrap();
    if covered < goal {
        return Err(format!("{covered:?} covers less than {goal:?}"));
    }
    Ok(())
}
