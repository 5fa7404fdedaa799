use super::{options, ArrowError, ArrowGeometry, BaseEndpoints, DirectionFlags, Point};
use crate::dsl::{ArrowOptions, ArrowSpec};
use crate::fixedpoint::{Factor, Sp};
use crate::grid::GridMetrics;

const EDGE: Sp = Sp::pt(3);
/// Offset of a horizontal arrow's end at a vertex target.
const VERTEX_END: Sp = Sp::from_raw(26214);

/// Endpoints from the grid alone, in the source frame.
pub(super) fn base_endpoints(
    spec: &ArrowSpec,
    gm: &GridMetrics,
) -> Result<(BaseEndpoints, DirectionFlags, bool, bool, Sp), ArrowError> {
    let (r, c) = (spec.at.row as i64, spec.at.col as i64);
    let (xoff, yoff) = (spec.dir.dx, spec.dir.dy);
    let trow = r.checked_sub(yoff).ok_or(ArrowError::Outside)?;
    let tcol = c.checked_add(xoff).ok_or(ArrowError::Outside)?;
    if trow < 1 || trow > gm.rowcount() as i64 || tcol < 1 || tcol > gm.colcount() as i64 {
        return Err(ArrowError::Outside);
    }
    if xoff == 0 && yoff == 0 {
        return Err(ArrowError::Degenerate);
    }
    let (r, c, trow, tcol) = (r as usize, c as usize, trow as usize, tcol as usize);
    let mut f = DirectionFlags::new(xoff, yoff, spec.options.short);

    let w = gm.width(r, c);
    let tocenter = -w.half();
    let svertex = w.is_zero();
    let mut first = Point::default();
    if svertex {
        first = Point::new(Sp::ZERO, gm.mathaxis);
    } else {
        first.x = if f.hshort {
            let sign = Factor::from_raw(if f.east { 32768 } else { -32768 });
            gm.col_width(c).scale(sign)?
        } else if f.east {
            w.half()
        } else {
            (-w).half()
        };
        first.x += match (f.east, f.horizontal) {
            (true, true) | (false, false) => EDGE,
            _ => -EDGE,
        };
        first.y = if f.north {
            gm.height(r, c) + if f.vertical { EDGE } else { Sp::ZERO }
        } else if f.vertical {
            -gm.depth(r, c) - EDGE
        } else {
            Sp::ZERO
        };
    }

    let mut second = first;
    let mut tvertex = false;
    if !f.vertical {
        let half = |x: Sp| if f.east { x.half() } else { (-x).half() };
        let mut sx = half(gm.col_width(c));
        if !f.east {
            sx -= gm.col_gap(c);
        }
        if f.east {
            for k in c + 1..tcol {
                sx += gm.col_width(k) + gm.col_gap(k);
            }
        } else {
            for k in (tcol + 1..c).rev() {
                sx -= gm.col_width(k) + gm.col_gap(k);
            }
        }
        if !f.hshort {
            sx += half(gm.col_width(tcol));
        }
        if f.east {
            sx += gm.col_gap(tcol);
        }
        let tw = gm.width(trow, tcol).half();
        if f.horizontal && tw.is_zero() {
            tvertex = true;
            f.hshort = false;
        }
        if !f.hshort {
            sx += if f.east { -tw } else { tw };
        }
        sx += if tvertex {
            VERTEX_END
        } else if f.east {
            -EDGE
        } else {
            EDGE
        };
        second.x = sx;
    }
    if !f.horizontal {
        let mut sy;
        if f.north {
            sy = gm.row_height(r);
            for k in (trow + 1..r).rev() {
                sy += gm.row_height(k) + gm.row_depth(k) + gm.row_gap(k);
            }
        } else {
            sy = -gm.row_depth(r) - gm.row_gap(r);
            for k in r + 1..trow {
                sy -= gm.row_height(k) + gm.row_depth(k) + gm.row_gap(k);
            }
        }
        let tv = f.vertical && gm.width(trow, c).is_zero();
        if f.north {
            sy += gm.row_gap(trow) + gm.row_depth(trow);
            if tv {
                sy += gm.mathaxis;
            } else {
                sy -= gm.depth(trow, tcol) + EDGE;
            }
        } else {
            sy -= gm.row_height(trow);
            if tv {
                sy += gm.mathaxis;
            } else {
                sy += gm.height(trow, tcol) + EDGE;
            }
        }
        tvertex = tvertex || tv;
        second.y = sy;
    }
    for p in [first, second] {
        p.x.checked()?;
        p.y.checked()?;
    }
    Ok((BaseEndpoints { first, second }, f, svertex, tvertex, tocenter))
}

/// Endpoints, slope, source inset and segment box of an arrow with no
/// options other than `short`.
pub fn compute_endpoints(spec: &ArrowSpec, gm: &GridMetrics) -> Result<ArrowGeometry, ArrowError> {
    let (base, flags, svertex, tvertex, tocenter) = base_endpoints(spec, gm)?;
    let opts = ArrowOptions {
        short: spec.options.short,
        noshort: spec.options.noshort,
        ..Default::default()
    };
    options::finish(base, flags, svertex, tvertex, tocenter, &opts, gm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_diagram;
    use crate::grid::{measure_grid, MATHAXIS};
    use crate::metrics::MetricProvider;

    fn layout(src: &str) -> (ArrowGeometry, GridMetrics) {
        let d = parse_diagram(src).unwrap();
        let gm = measure_grid(&d, &MetricProvider::default()).unwrap();
        (compute_endpoints(&d.arrows[0], &gm).unwrap(), gm)
    }

    fn err(src: &str) -> ArrowError {
        let d = parse_diagram(src).unwrap();
        let gm = measure_grid(&d, &MetricProvider::default()).unwrap();
        compute_endpoints(&d.arrows[0], &gm).unwrap_err()
    }

    #[test]
    fn horizontal_trace() {
        let (g, _) = layout("[grid]\nAAAA & BBBBBB\n[arrows]\nat (1,1) dir (1,0)\n");
        assert_eq!(g.first.x, Sp::pt(13));
        assert_eq!(g.second.x, Sp::pt(47));
        assert_eq!(g.second.y, g.first.y);
        assert!(g.slope.is_none());
        assert_eq!(g.tocenter, -Sp::pt(10));
    }

    #[test]
    fn westward_trace() {
        let (g, _) = layout("[grid]\nAAAA & BBBBBB\n[arrows]\nat (1,2) dir (-1,0)\n");
        // source center to its left edge -15, back 3; target right edge at -15-40
        assert_eq!(g.first.x, -Sp::pt(18));
        assert_eq!(g.second.x, -Sp::pt(52));
    }

    #[test]
    fn vertex_source() {
        let (g, _) = layout("[grid]\n{} & A\nB & C\n[arrows]\nat (1,1) dir (1,-1)\n");
        assert!(g.svertex);
        assert_eq!(g.first, Point::new(Sp::ZERO, MATHAXIS));
    }

    #[test]
    fn vertical_source_edge() {
        let (g, gm) = layout("[grid]\nA\nB\n[arrows]\nat (2,1) dir (0,1)\n");
        assert_eq!(g.first.y, gm.height(2, 1) + Sp::pt(3));
        // row 1 baseline is 10 + 32 + 2 above; target depth 2pt plus 3pt
        assert_eq!(g.second.y, Sp::pt(10) + Sp::pt(32) + Sp::pt(2) - Sp::pt(2) - Sp::pt(3));
        let (g, _) = layout("[grid]\nA\nB\n[arrows]\nat (1,1) dir (0,-1)\n");
        assert_eq!(g.first.y, -Sp::pt(5));
        assert_eq!(
            g.second.y,
            -Sp::pt(2) - Sp::pt(32) - Sp::pt(10) + Sp::pt(10) + Sp::pt(3)
        );
    }

    #[test]
    fn vertical_to_vertex_ends_on_the_axis() {
        let (g, _) = layout("[grid]\nA\n{}\n[arrows]\nat (1,1) dir (0,-1)\n");
        assert!(g.tvertex);
        assert_eq!(g.second.y, -Sp::pt(2) - Sp::pt(32) - Sp::pt(10) + MATHAXIS);
    }

    #[test]
    fn horizontal_to_vertex() {
        let (g, _) = layout("[grid]\nAA & {}\n[arrows]\nat (1,1) dir (1,0)\n");
        assert!(g.tvertex);
        assert_eq!(g.second.x, Sp::pt(5) + Sp::pt(40) + Sp::from_raw(26214));
    }

    #[test]
    fn short_uses_column_edges() {
        let (g, _) = layout("[grid]\nA & BBBB\nCCCC & D\n[arrows]\nat (1,1) dir (1,0) short\n");
        assert!(g.flags.hshort);
        assert_eq!(g.first.x, Sp::pt(13));
        assert_eq!(g.second.x, Sp::pt(10) + Sp::pt(40) - Sp::pt(3));
        let (g, _) = layout("[grid]\nA & BBBB\nCCCC & D\n[arrows]\nat (1,1) dir (1,0)\n");
        assert_eq!(g.first.x, Sp::from_raw(Sp::pt(5).raw() / 2) + Sp::pt(3));
    }

    #[test]
    fn diagonal_inset() {
        let (g, _) = layout("[grid]\n{} & B\nA & {}\n[arrows]\nat (2,1) dir (1,1)\n");
        let s = g.slope.unwrap();
        let inset = Sp::pt(6).mul_int(s.run).unwrap().div_int(s.rise + s.run).unwrap();
        assert_eq!(g.first.x, Sp::from_raw(163840) - Sp::pt(3) + inset);
        assert_eq!(g.first.y, Sp::pt(10) + inset.muldiv(s.rise, s.run).unwrap());
    }

    #[test]
    fn outside_and_degenerate() {
        assert_eq!(
            err("[grid]\nA & B\n[arrows]\nat (1,1) dir (5,0)\n"),
            ArrowError::Outside
        );
        assert_eq!(
            err("[grid]\nA & B\n[arrows]\nat (1,1) dir (0,1)\n"),
            ArrowError::Outside
        );
        assert_eq!(
            err("[grid]\nA & B\n[arrows]\nat (1,1) dir (-1,0)\n"),
            ArrowError::Outside
        );
        assert_eq!(
            err("[grid]\nA & B\n[arrows]\nat (1,1) dir (0,0)\n"),
            ArrowError::Degenerate
        );
    }
}
