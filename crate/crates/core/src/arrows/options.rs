use super::slope::{bend_index, getcos, quantize_slope, slope_for_index, SlopeEntry};
use super::{tiling, ArrowError, ArrowGeometry, BaseEndpoints, DirectionFlags, Point, Shifts};
use crate::dsl::{ArrowOptions, Tip};
use crate::fixedpoint::{Factor, Sp};
use crate::grid::GridMetrics;

/// `.3`
const THREE_TENTHS: Factor = Factor::from_raw(19661);

fn opt_scale(unit: Sp, f: Option<Factor>) -> Result<Sp, ArrowError> {
    Ok(f.map(|f| unit.scale(f)).transpose()?.unwrap_or(Sp::ZERO))
}

fn pair_scale(gm: &GridMetrics, p: Option<(Factor, Factor)>) -> Result<Option<(Sp, Sp)>, ArrowError> {
    Ok(match p {
        Some((a, b)) => Some((gm.hunit.scale(a)?, gm.vunit.scale(b)?)),
        None => None,
    })
}

fn spans(first: Point, second: Point, f: &DirectionFlags) -> (Sp, Sp) {
    let dy = second.y - first.y;
    let dx = second.x - first.x;
    (if f.north { dy } else { -dy }, if f.east { dx } else { -dx })
}

fn requantize(first: Point, second: Point, f: &DirectionFlags) -> Result<SlopeEntry, ArrowError> {
    let (dy, dx) = spans(first, second, f);
    quantize_slope(dy, dx)
}

/// `y` on the quantized line through `first` at horizontal position `x`.
fn project_y(first: Point, x: Sp, s: SlopeEntry, nesw: bool) -> Result<Sp, ArrowError> {
    let d = x - first.x;
    let d = if nesw { d } else { -d };
    Ok(d.muldiv(s.rise, s.run)? + first.y)
}

fn project_x(first: Point, y: Sp, s: SlopeEntry, nesw: bool) -> Result<Sp, ArrowError> {
    let d = y - first.y;
    let d = if nesw { d } else { -d };
    Ok(d.muldiv(s.run, s.rise)? + first.x)
}

/// Runs the option block on grid endpoints, in the macro's order.
pub(super) fn finish(
    base: BaseEndpoints,
    f: DirectionFlags,
    svertex: bool,
    tvertex: bool,
    tocenter: Sp,
    o: &ArrowOptions,
    gm: &GridMetrics,
) -> Result<ArrowGeometry, ArrowError> {
    let diagonal = !f.horizontal && !f.vertical;
    let shifts = Shifts {
        source_dx: opt_scale(gm.hunit, o.source_dx)?,
        target_dx: opt_scale(gm.hunit, o.target_dx)?,
        source_dy: opt_scale(gm.vunit, o.source_dy)?,
        target_dy: opt_scale(gm.vunit, o.target_dy)?,
        above: opt_scale(gm.hunit, o.above_shift)?,
        below: opt_scale(gm.hunit, o.below_shift)?,
    };
    let perp = opt_scale(gm.hunit.half(), o.perp)?;
    let (tx, ty, bend) = if diagonal {
        (
            pair_scale(gm, o.target_shift_exact)?,
            pair_scale(gm, o.target_shift_proj)?,
            o.bend,
        )
    } else {
        (None, None, None)
    };

    let (mut first, mut second) = (base.first, base.second);
    if let Some((sx, sy)) = pair_scale(gm, o.src_shift)? {
        if !f.vertical {
            first.x += sx;
        }
        if !f.horizontal {
            first.y += sy;
        }
    }

    let mut slope = None;
    if let Some((dx, dy)) = tx {
        second.x += dx;
        second.y += dy;
        slope = Some(requantize(first, second, &f)?);
    } else if let Some((dx, dy)) = ty {
        second.x += dx;
        second.y += dy;
        let s = requantize(first, second, &f)?;
        second.y = project_y(first, second.x, s, f.nesw)?;
        slope = Some(s);
    } else if let Some(bend) = bend {
        let s = requantize(first, second, &f)?;
        let s = slope_for_index(bend_index(s.index, bend, f.nesw) as i64)?;
        if o.target_dy.is_some() {
            second.y += shifts.target_dy;
        } else if o.target_dx.is_some() {
            second.x += shifts.target_dx;
            second.y = project_y(first, second.x, s, f.nesw)?;
        }
        slope = Some(s);
    } else if diagonal {
        slope = Some(requantize(first, second, &f)?);
    }

    let mut seg = None;
    if let (true, Some(s)) = (diagonal, slope) {
        if !svertex {
            let inset = Sp::pt(6).mul_int(s.run)?.div_int(s.rise + s.run)?;
            first.x += if f.east { inset } else { -inset };
            let inset = inset.muldiv(s.rise, s.run)?;
            first.y += if f.north { inset } else { -inset };
        }
        if o.perp.is_some() {
            let step = getcos(perp, s)?;
            first.y += step.run;
            second.y += step.run;
            first.x += if f.nesw { -step.rise } else { step.rise };
        }
        let b = tiling::segment_box(s)?;
        let toward = |d: Sp| if f.north { -d } else { d };
        match o.head {
            Some(Tip::Reversed) => second.y += toward(b.charht.scale(THREE_TENTHS)?),
            Some(Tip::Slip) => second.y += toward(b.charht),
            _ => {}
        }
        if o.tail == Some(Tip::Reversed) {
            let d = b.charht.scale(THREE_TENTHS)?;
            first.x += if f.east { d } else { -d };
        }
        if ty.is_none() && bend.is_some() && o.target_dx.is_none() {
            second.x = project_x(first, second.y, s, f.nesw)?;
        }
        seg = Some(b);
    }
    for p in [first, second] {
        p.x.checked()?;
        p.y.checked()?;
    }

    Ok(ArrowGeometry {
        first,
        second,
        base,
        tocenter,
        slope,
        seg,
        shaft: o.shaft_style(),
        tail: o.tail,
        head: o.head,
        flags: f,
        svertex,
        tvertex,
        perp,
        shifts,
        labels: Vec::new(),
    })
}

/// Applies `o` to geometry from [`compute_endpoints`](super::compute_endpoints).
/// The result depends only on the grid endpoints kept in `g.base`, so
/// applying the same options again changes nothing.
pub fn apply_options(g: &ArrowGeometry, o: &ArrowOptions, gm: &GridMetrics) -> Result<ArrowGeometry, ArrowError> {
    let mut out = finish(g.base, g.flags, g.svertex, g.tvertex, g.tocenter, o, gm)?;
    out.labels = g.labels.clone();
    Ok(out)
}
