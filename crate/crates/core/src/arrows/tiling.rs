//! Shaft strokes and tip markers, in the source frame.

use serde::{Deserialize, Serialize};

use super::slope::{getcos, SlopeEntry};
use super::{ArrowError, ArrowGeometry, ArrowKind, Point, SegmentBox};
use crate::dsl::{ShaftStyle, Tip};
use crate::fixedpoint::{ArithError, Sp};

pub const RULE: Sp = Sp::from_raw(26214);
const HALF_RULE: Sp = Sp::from_raw(13107);
const TEN: Sp = Sp::pt(10);
const DOUBLE_TIP_GAP: Sp = Sp::pt(3);

const DIAGONAL_DASH: [Sp; 2] = [Sp::from_raw(218235), Sp::from_raw(218235)];
const H_DASH: [Sp; 6] = [
    Sp::from_raw(109227),
    Sp::from_raw(109226),
    Sp::from_raw(218454),
    Sp::from_raw(109226),
    Sp::from_raw(109227),
    Sp::ZERO,
];
const V_DASH: [Sp; 6] = [
    Sp::from_raw(109445),
    Sp::from_raw(109118),
    Sp::from_raw(218235),
    Sp::from_raw(109117),
    Sp::from_raw(109445),
    Sp::ZERO,
];

/// Box of one shaft piece for slope `s`; the longer side is 10pt.
pub fn segment_box(s: SlopeEntry) -> Result<SegmentBox, ArithError> {
    if s.rise > s.run {
        Ok(SegmentBox {
            charht: TEN,
            charwd: TEN.muldiv(s.run, s.rise)?,
        })
    } else {
        Ok(SegmentBox {
            charwd: TEN,
            charht: TEN.div_int(s.run)?.mul_int(s.rise)?,
        })
    }
}

/// One piece of a tiled diagonal shaft, from its near to its far corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentPlacement {
    pub start: Point,
    pub end: Point,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stroke {
    pub from: Point,
    pub to: Point,
    pub width: Sp,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dash: Vec<Sp>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerRole {
    Head,
    Tail,
}

/// A tip glyph. `at` is the glyph origin and `dir` the way it points,
/// as an integer vector with `y` up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub role: MarkerRole,
    pub tip: Tip,
    pub at: Point,
    pub dir: [i64; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShaftPlan {
    pub strokes: Vec<Stroke>,
    pub markers: Vec<Marker>,
}

/// Progress-space layout of a diagonal shaft: corners of the emitted
/// pieces plus the slot the last piece sits in.
struct Tiling {
    pieces: Vec<(Sp, Sp)>,
    last: (Sp, Sp),
}

fn tile(g: &ArrowGeometry, s: SlopeEntry, b: SegmentBox) -> Result<Tiling, ArithError> {
    let sy = g.flags.sy();
    let mut goal = (g.second.y - g.first.y).mul_int(sy)?;
    let (mut u, mut v) = (Sp::ZERO, Sp::ZERO);
    if g.tail == Some(Tip::Slip) {
        v += b.charht;
        goal -= b.charht;
        u += b.charwd;
    }
    let mut pieces = Vec::new();
    while goal > b.charht {
        pieces.push((u, v));
        u += b.charwd;
        v += b.charht;
        goal -= b.charht;
    }
    let last = if goal > Sp::ZERO {
        let back = (b.charht - goal).div_int(s.rise)?.mul_int(s.run)?;
        let p = (u - back, v - (b.charht - goal));
        pieces.push(p);
        p
    } else {
        pieces.last().copied().unwrap_or((u - b.charwd, v - b.charht))
    };
    Ok(Tiling { pieces, last })
}

fn at_progress(g: &ArrowGeometry, (u, v): (Sp, Sp)) -> Result<Point, ArithError> {
    Ok(Point::new(
        g.first.x + u.mul_int(g.flags.sx())?,
        g.first.y + v.mul_int(g.flags.sy())?,
    ))
}

/// Pieces of a diagonal shaft; empty for phantom and straight arrows.
pub fn tile_shaft(g: &ArrowGeometry) -> Result<Vec<SegmentPlacement>, ArrowError> {
    let (Some(s), Some(b)) = (g.slope, g.seg) else {
        return Ok(Vec::new());
    };
    if g.shaft == ShaftStyle::None {
        return Ok(Vec::new());
    }
    let t = tile(g, s, b)?;
    t.pieces
        .iter()
        .map(|&(u, v)| {
            Ok(SegmentPlacement {
                start: at_progress(g, (u, v))?,
                end: at_progress(g, (u + b.charwd, v + b.charht))?,
            })
        })
        .collect()
}

fn head_tip(g: &ArrowGeometry) -> Option<Tip> {
    match g.head {
        None => Some(Tip::Head),
        Some(Tip::Blank) => None,
        t => t,
    }
}

fn tail_tip(g: &ArrowGeometry) -> Option<Tip> {
    g.tail.filter(|&t| t != Tip::Blank)
}

fn has_markers(g: &ArrowGeometry) -> bool {
    !matches!(g.shaft, ShaftStyle::None | ShaftStyle::Double)
}

fn push_markers(
    out: &mut Vec<Marker>,
    role: MarkerRole,
    tip: Option<Tip>,
    at: Point,
    dir: [i64; 2],
    double_step: Point,
) {
    let Some(tip) = tip else { return };
    out.push(Marker { role, tip, at, dir });
    if tip == Tip::Double {
        let at = Point::new(at.x + double_step.x, at.y + double_step.y);
        out.push(Marker { role, tip, at, dir });
    }
}

fn neg(d: [i64; 2]) -> [i64; 2] {
    [-d[0], -d[1]]
}

fn diagonal_plan(g: &ArrowGeometry, s: SlopeEntry, b: SegmentBox) -> Result<ShaftPlan, ArrowError> {
    let mut plan = ShaftPlan::default();
    if g.shaft == ShaftStyle::None {
        return Ok(plan);
    }
    let (sx, sy) = (g.flags.sx(), g.flags.sy());
    let t = tile(g, s, b)?;
    let pieces = tile_shaft(g)?;
    let offsets: Vec<(Sp, Sp)> = match g.shaft {
        ShaftStyle::Double => {
            let o = getcos(Sp::from_raw(98304), s)?;
            if g.flags.nesw {
                vec![(o.rise, -o.run), (-o.rise, o.run)]
            } else {
                vec![(o.rise, o.run), (-o.rise, -o.run)]
            }
        }
        _ => vec![(Sp::ZERO, Sp::ZERO)],
    };
    let dash = if g.shaft == ShaftStyle::Dashed {
        DIAGONAL_DASH.to_vec()
    } else {
        Vec::new()
    };
    for p in &pieces {
        for &(ox, oy) in &offsets {
            plan.strokes.push(Stroke {
                from: Point::new(p.start.x + ox, p.start.y + oy),
                to: Point::new(p.end.x + ox, p.end.y + oy),
                width: RULE,
                dash: dash.clone(),
            });
        }
    }
    if !has_markers(g) {
        return Ok(plan);
    }
    let dir = [sx * s.run, sy * s.rise];
    let step = getcos(DOUBLE_TIP_GAP, s)?;
    let back = Point::new(step.run.mul_int(-sx)?, step.rise.mul_int(-sy)?);
    let fwd = Point::new(-back.x, -back.y);

    // a slip tip sits one slot beyond the shaft, joined to it by a piece
    let last_end = (t.last.0 + b.charwd, t.last.1 + b.charht);
    let mut head_end = last_end;
    if g.head == Some(Tip::Slip) {
        head_end = (last_end.0 + b.charwd, last_end.1 + b.charht);
        plan.strokes.push(Stroke {
            from: at_progress(g, last_end)?,
            to: at_progress(g, head_end)?,
            width: RULE,
            dash: dash.clone(),
        });
    }
    if g.tail == Some(Tip::Slip) {
        plan.strokes.insert(
            0,
            Stroke {
                from: g.first,
                to: at_progress(g, (b.charwd, b.charht))?,
                width: RULE,
                dash: dash.clone(),
            },
        );
    }
    let head_at = at_progress(g, head_end)?;
    let tail_at = g.first;
    push_markers(&mut plan.markers, MarkerRole::Tail, tail_tip(g), tail_at, neg(dir), fwd);
    push_markers(&mut plan.markers, MarkerRole::Head, head_tip(g), head_at, dir, back);
    Ok(plan)
}

/// Splits `len` into whole `box`es centered in it: `(offset, count)`.
fn leaders(len: Sp, unit: Sp) -> Result<(Sp, i64), ArithError> {
    let q = len.div_int(unit.raw())?.raw();
    let used = unit.mul_int(q)?;
    Ok(((len - used).div_int(2)?, q))
}

fn horizontal_plan(g: &ArrowGeometry, mathaxis: Sp) -> Result<ShaftPlan, ArrowError> {
    let mut plan = ShaftPlan::default();
    if g.shaft == ShaftStyle::None {
        return Ok(plan);
    }
    let east = g.flags.east;
    let left = g.first.x.min(g.second.x);
    let d = (g.second.x - g.first.x).abs();
    let (dx, dxx) = (g.shifts.source_dx, g.shifts.target_dx);
    let (a, z) = if east {
        (left + dx, left + d + dxx)
    } else {
        (left + dxx, left + d + dx)
    };
    let len = z - a;
    if len <= Sp::ZERO {
        return Ok(plan);
    }
    let y = mathaxis + g.perp;
    let hstroke = |x0: Sp, x1: Sp, y: Sp, dash: Vec<Sp>| Stroke {
        from: Point::new(x0, y),
        to: Point::new(x1, y),
        width: RULE,
        dash,
    };
    match g.shaft {
        ShaftStyle::Solid => plan.strokes.push(hstroke(a, z, y, Vec::new())),
        ShaftStyle::Dashed => {
            let (off, q) = leaders(len, TEN)?;
            let x0 = a + off;
            plan.strokes.push(hstroke(x0, x0 + TEN.mul_int(q)?, y, H_DASH.to_vec()));
        }
        ShaftStyle::Double => {
            let (off, q) = leaders(len, TEN)?;
            let x0 = a + off;
            let x1 = x0 + TEN.mul_int(q)?;
            plan.strokes.push(hstroke(x0, x1, y + Sp::pt(1), Vec::new()));
            plan.strokes.push(hstroke(x0, x1, y - Sp::from_raw(91750), Vec::new()));
        }
        ShaftStyle::None => {}
    }
    if has_markers(g) {
        let sx = g.flags.sx();
        let dir = [sx, 0];
        let (tail_x, head_x) = if east { (a, z) } else { (z, a) };
        let gap = DOUBLE_TIP_GAP.mul_int(sx)?;
        push_markers(
            &mut plan.markers,
            MarkerRole::Tail,
            tail_tip(g),
            Point::new(tail_x, y),
            neg(dir),
            Point::new(gap, Sp::ZERO),
        );
        push_markers(
            &mut plan.markers,
            MarkerRole::Head,
            head_tip(g),
            Point::new(head_x, y),
            dir,
            Point::new(-gap, Sp::ZERO),
        );
    }
    Ok(plan)
}

fn vertical_plan(g: &ArrowGeometry) -> Result<ShaftPlan, ArrowError> {
    let mut plan = ShaftPlan::default();
    if g.shaft == ShaftStyle::None {
        return Ok(plan);
    }
    let north = g.flags.north;
    let d = (g.second.y - g.first.y).abs();
    let (dy, dyy) = (g.shifts.source_dy, g.shifts.target_dy);
    let (bottom, top) = if north {
        (g.first.y + dy, g.first.y + d + dyy)
    } else {
        (g.first.y - d - dyy, g.first.y - dy)
    };
    let len = top - bottom;
    if len <= Sp::ZERO {
        return Ok(plan);
    }
    let x = g.perp + HALF_RULE;
    let vstroke = |x: Sp, y0: Sp, y1: Sp, dash: Vec<Sp>| Stroke {
        from: Point::new(x, y0),
        to: Point::new(x, y1),
        width: RULE,
        dash,
    };
    match g.shaft {
        ShaftStyle::Solid => plan.strokes.push(vstroke(x, top, bottom, Vec::new())),
        ShaftStyle::Dashed => {
            let (off, q) = leaders(len, TEN)?;
            let y0 = top - off;
            plan.strokes.push(vstroke(x, y0, y0 - TEN.mul_int(q)?, V_DASH.to_vec()));
        }
        ShaftStyle::Double => {
            let (off, q) = leaders(len, Sp::pt(1))?;
            let y0 = top - off;
            let y1 = y0 - Sp::pt(q);
            plan.strokes.push(vstroke(x, y0, y1, Vec::new()));
            plan.strokes.push(vstroke(x + RULE + Sp::pt(2), y0, y1, Vec::new()));
        }
        ShaftStyle::None => {}
    }
    if has_markers(g) {
        let sy = g.flags.sy();
        let dir = [0, sy];
        let (tail_y, head_y) = if north { (bottom, top) } else { (top, bottom) };
        let gap = DOUBLE_TIP_GAP.mul_int(sy)?;
        push_markers(
            &mut plan.markers,
            MarkerRole::Tail,
            tail_tip(g),
            Point::new(x, tail_y),
            neg(dir),
            Point::new(Sp::ZERO, gap),
        );
        push_markers(
            &mut plan.markers,
            MarkerRole::Head,
            head_tip(g),
            Point::new(x, head_y),
            dir,
            Point::new(Sp::ZERO, -gap),
        );
    }
    Ok(plan)
}

/// Everything drawn for the shaft of `g`, `y` up from the source baseline.
pub fn shaft_plan(g: &ArrowGeometry, mathaxis: Sp) -> Result<ShaftPlan, ArrowError> {
    match (g.flags.kind(), g.slope, g.seg) {
        (ArrowKind::Horizontal, _, _) => horizontal_plan(g, mathaxis),
        (ArrowKind::Vertical, _, _) => vertical_plan(g),
        (ArrowKind::Diagonal, Some(s), Some(b)) => diagonal_plan(g, s, b),
        (ArrowKind::Diagonal, _, _) => Ok(ShaftPlan::default()),
    }
}
