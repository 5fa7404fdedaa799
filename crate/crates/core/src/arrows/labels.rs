use super::{ArrowError, ArrowGeometry, ArrowKind, LabelAnchor, LabelSide, Point};
use crate::dsl::{ArrowOptions, ShaftStyle};
use crate::fixedpoint::{glue_share, Sp};
use crate::grid::MATHAXIS;
use crate::metrics::{MetricProvider, SizeClass, TextMetrics};

fn hfil_share(rem: Sp) -> Sp {
    if rem > Sp::ZERO {
        glue_share(rem, 1, 2)
    } else {
        Sp::ZERO
    }
}

struct Ctx<'a> {
    g: &'a ArrowGeometry,
    phantom: bool,
    double: bool,
}

impl Ctx<'_> {
    fn gap(&self, single: Sp, double: Sp) -> Sp {
        if self.double {
            double
        } else {
            single
        }
    }

    fn horizontal(&self, side: LabelSide, m: TextMetrics) -> Result<Point, ArrowError> {
        let g = self.g;
        let east = g.flags.east;
        let left = g.first.x.min(g.second.x);
        let d = (g.second.x - g.first.x).abs();
        let (dx, dxx) = (g.shifts.source_dx, g.shifts.target_dx);
        let (bb, ee) = if east { (dx, -dxx) } else { (dxx, -dx) };
        let (shift, raise) = match side {
            LabelSide::Above => {
                let raise = if self.phantom {
                    Sp::ZERO
                } else {
                    MATHAXIS + m.depth + self.gap(Sp::pt(2), Sp::pt(4))
                };
                (g.shifts.above, raise)
            }
            LabelSide::Below => (g.shifts.below, MATHAXIS - m.height - self.gap(Sp::pt(2), Sp::pt(4))),
        };
        let lead = bb + shift.mul_int(2)?;
        let share = hfil_share(d - (lead + m.width + ee));
        Ok(Point::new(left + lead + share, raise + g.perp))
    }

    fn vertical(&self, side: LabelSide, m: TextMetrics) -> Result<Point, ArrowError> {
        let g = self.g;
        let d = (g.second.y - g.first.y).abs();
        let bottom = if g.flags.north { g.first.y } else { g.first.y - d };
        let shift = match side {
            LabelSide::Above => g.shifts.above,
            LabelSide::Below => g.shifts.below,
        };
        let share = hfil_share(d - m.height - m.depth - shift.mul_int(2)?);
        let baseline = bottom + d - share - m.height;
        let x = match side {
            LabelSide::Above if self.phantom => g.perp - m.width.half(),
            LabelSide::Above => g.perp - Sp::pt(2) - m.width,
            LabelSide::Below => g.perp + self.gap(Sp::from_raw(163840), Sp::from_raw(294912)),
        };
        Ok(Point::new(x, baseline))
    }

    fn diagonal(&self, side: LabelSide, m: TextMetrics) -> Result<Point, ArrowError> {
        let g = self.g;
        let s = g.slope.ok_or(ArrowError::Degenerate)?;
        let nesw = g.flags.nesw;
        let pad = self.gap(Sp::pt(2), Sp::pt(4));
        let boxwd = m.width + pad;
        let mid = Point::new(
            (g.first.x + g.second.x).div_int(2)?,
            (g.first.y + g.second.y).div_int(2)?,
        );
        match side {
            LabelSide::Above => {
                let dl = g.shifts.above;
                let mut x = mid.x + dl;
                let rise = dl.mul_int(s.rise)?.div_int(s.run)?;
                let mut y = if nesw { mid.y + rise } else { mid.y - rise };
                if self.phantom {
                    let off = boxwd.half() + Sp::pt(1);
                    x = if nesw { x + off } else { x - off };
                    y -= m.height.half();
                } else {
                    y += m.depth;
                    if s.index < 6 {
                        y += Sp::pt(2);
                    }
                }
                let left = if nesw { x - boxwd } else { x + pad };
                Ok(Point::new(left, y))
            }
            LabelSide::Below => {
                let dl = g.shifts.below;
                let x = if nesw { mid.x + dl } else { mid.x - dl };
                let mut y = mid.y + dl.mul_int(s.rise)?.div_int(s.run)? - m.height;
                if s.index < 9 {
                    y -= Sp::pt(3);
                }
                let left = if nesw { x + pad } else { x - boxwd };
                Ok(Point::new(left, y))
            }
        }
    }
}

/// Positions the labels of `g`. `label_size` is the diagram's label size;
/// the text above a phantom shaft is set at display size instead.
pub fn label_anchors(
    g: &ArrowGeometry,
    opts: &ArrowOptions,
    label_size: SizeClass,
    provider: &MetricProvider,
) -> Result<Vec<LabelAnchor>, ArrowError> {
    let ctx = Ctx {
        g,
        phantom: g.shaft == ShaftStyle::None,
        double: g.shaft == ShaftStyle::Double,
    };
    let mut out = Vec::new();
    let wanted = [
        (LabelSide::Above, opts.label_above.as_deref()),
        (LabelSide::Below, opts.label_below.as_deref().filter(|_| !ctx.phantom)),
    ];
    for (side, text) in wanted {
        let Some(text) = text.filter(|t| !t.is_empty()) else {
            continue;
        };
        let size = if side == LabelSide::Above && ctx.phantom {
            SizeClass::Display
        } else {
            label_size
        };
        let m = provider.measure(text, size);
        let position = match g.flags.kind() {
            ArrowKind::Horizontal => ctx.horizontal(side, m)?,
            ArrowKind::Vertical => ctx.vertical(side, m)?,
            ArrowKind::Diagonal => ctx.diagonal(side, m)?,
        };
        position.x.checked()?;
        position.y.checked()?;
        out.push(LabelAnchor {
            text: text.to_owned(),
            side,
            position,
            size,
            metrics: m,
        });
    }
    Ok(out)
}
