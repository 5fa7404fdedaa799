//! Arrow layout relative to the source cell.
//!
//! Coordinates here are in the source frame: `x` is measured from the
//! source cell's center, `y` upward from the source row's baseline.

mod endpoints;
mod labels;
mod options;
pub mod slope;
mod tiling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{ArrowOptions, ArrowSpec, Heading, Relation, ShaftStyle, Tip};
use crate::fixedpoint::{ArithError, Sp};
use crate::grid::GridMetrics;
use crate::metrics::{MetricProvider, SizeClass, TextMetrics};

pub use endpoints::compute_endpoints;
pub use labels::label_anchors;
pub use options::apply_options;
pub use slope::{getcos, quantize_slope, slope_for_index, LineStep, SlopeEntry, SLOPES};
pub use tiling::{segment_box, shaft_plan, tile_shaft, Marker, MarkerRole, SegmentPlacement, ShaftPlan, Stroke};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ArrowError {
    #[error("This arrow points outside the diagram")]
    Outside,
    #[error("degenerate arrow: source and target coincide")]
    Degenerate,
    #[error("slope index {0} is outside 1..=23")]
    SlopeIndex(i64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Point {
    pub x: Sp,
    pub y: Sp,
}

impl Point {
    pub const fn new(x: Sp, y: Sp) -> Point {
        Point { x, y }
    }
}

impl From<[i64; 2]> for Point {
    fn from([x, y]: [i64; 2]) -> Point {
        Point::new(Sp::from_raw(x), Sp::from_raw(y))
    }
}

impl From<Point> for [i64; 2] {
    fn from(p: Point) -> [i64; 2] {
        [p.x.raw(), p.y.raw()]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DirectionFlags {
    pub north: bool,
    pub east: bool,
    pub horizontal: bool,
    pub vertical: bool,
    pub nesw: bool,
    pub hshort: bool,
}

impl DirectionFlags {
    pub fn new(dx: i64, dy: i64, short: bool) -> DirectionFlags {
        let north = dy > 0;
        let east = dx > 0;
        let horizontal = dy == 0;
        DirectionFlags {
            north,
            east,
            horizontal,
            vertical: dx == 0,
            nesw: north == east,
            hshort: horizontal && short,
        }
    }

    /// +1 or -1 along the arrow's horizontal direction.
    pub fn sx(&self) -> i64 {
        if self.east {
            1
        } else {
            -1
        }
    }

    /// +1 or -1 along the arrow's vertical direction.
    pub fn sy(&self) -> i64 {
        if self.north {
            1
        } else {
            -1
        }
    }

    pub fn kind(&self) -> ArrowKind {
        if self.horizontal {
            ArrowKind::Horizontal
        } else if self.vertical {
            ArrowKind::Vertical
        } else {
            ArrowKind::Diagonal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrowKind {
    Horizontal,
    Vertical,
    Diagonal,
}

/// Bounding box of one tiled shaft piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentBox {
    pub charwd: Sp,
    pub charht: Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSide {
    Above,
    Below,
}

/// A placed label: `x` is the left edge and `y` the baseline of its text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAnchor {
    pub text: String,
    pub side: LabelSide,
    pub position: Point,
    pub size: SizeClass,
    pub metrics: TextMetrics,
}

/// Endpoints as computed from the grid, before any option is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseEndpoints {
    pub first: Point,
    pub second: Point,
}

/// Option lengths resolved against `hunit`/`vunit`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Shifts {
    pub source_dx: Sp,
    pub target_dx: Sp,
    pub source_dy: Sp,
    pub target_dy: Sp,
    pub above: Sp,
    pub below: Sp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowGeometry {
    pub first: Point,
    pub second: Point,
    pub base: BaseEndpoints,
    pub tocenter: Sp,
    pub slope: Option<SlopeEntry>,
    pub seg: Option<SegmentBox>,
    pub shaft: ShaftStyle,
    pub tail: Option<Tip>,
    pub head: Option<Tip>,
    pub flags: DirectionFlags,
    pub svertex: bool,
    pub tvertex: bool,
    pub perp: Sp,
    pub shifts: Shifts,
    pub labels: Vec<LabelAnchor>,
}

/// Full layout of one arrow: endpoints, options, labels.
pub fn layout_arrow(
    spec: &ArrowSpec,
    gm: &GridMetrics,
    label_size: SizeClass,
    provider: &MetricProvider,
) -> Result<ArrowGeometry, ArrowError> {
    let g = compute_endpoints(spec, gm)?;
    let mut g = apply_options(&g, &spec.options, gm)?;
    g.labels = label_anchors(&g, &spec.options, label_size, provider)?;
    Ok(g)
}

/// The arrow drawn by an `@east`/`@west` cell of width `width`, in that
/// cell's frame.
pub fn east_west_arrow(r: &Relation, width: Sp, provider: &MetricProvider) -> Result<ArrowGeometry, ArrowError> {
    let tocenter = -width.half();
    let (left, right) = (Point::new(tocenter, Sp::ZERO), Point::new(tocenter + width, Sp::ZERO));
    let east = r.heading == Heading::East;
    let (first, second) = if east { (left, right) } else { (right, left) };
    let flags = DirectionFlags::new(if east { 1 } else { -1 }, 0, false);
    let opts = ArrowOptions {
        label_above: (!r.above.is_empty()).then(|| r.above.clone()),
        label_below: (!r.below.is_empty()).then(|| r.below.clone()),
        ..Default::default()
    };
    let mut g = ArrowGeometry {
        first,
        second,
        base: BaseEndpoints { first, second },
        tocenter,
        slope: None,
        seg: None,
        shaft: ShaftStyle::Solid,
        tail: None,
        head: None,
        flags,
        svertex: false,
        tvertex: false,
        perp: Sp::ZERO,
        shifts: Shifts::default(),
        labels: Vec::new(),
    };
    g.labels = label_anchors(&g, &opts, SizeClass::LabelSmall, provider)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::DiagramConfig;
    use crate::grid::relation_width;

    #[test]
    fn flags() {
        let f = DirectionFlags::new(1, 1, false);
        assert!(f.north && f.east && f.nesw && !f.horizontal && !f.vertical);
        let f = DirectionFlags::new(-1, -1, false);
        assert!(f.nesw);
        let f = DirectionFlags::new(-1, 1, true);
        assert!(!f.nesw && !f.hshort);
        let f = DirectionFlags::new(2, 0, true);
        assert!(f.horizontal && f.hshort && !f.north);
        assert_eq!(DirectionFlags::new(0, -1, false).kind(), ArrowKind::Vertical);
    }

    #[test]
    fn east_west_width_and_direction() {
        let p = MetricProvider::default();
        let cfg = DiagramConfig::default();
        let empty = Relation {
            heading: Heading::East,
            above: String::new(),
            below: String::new(),
        };
        let w = relation_width(&empty, &cfg, &p).unwrap();
        assert_eq!(w, cfg.minaw);
        let g = east_west_arrow(&empty, w, &p).unwrap();
        assert!(g.labels.is_empty());
        assert_eq!(g.second.x - g.first.x, w);

        let west = Relation {
            heading: Heading::West,
            ..empty.clone()
        };
        let gw = east_west_arrow(&west, w, &p).unwrap();
        assert_eq!(gw.first.x - gw.second.x, w);
        assert!(!gw.flags.east);

        let wide = Relation {
            heading: Heading::East,
            above: "XXXXXXXXXX".into(),
            below: String::new(),
        };
        let w2 = relation_width(&wide, &cfg, &p).unwrap();
        assert_eq!(w2, Sp::pt(25) + cfg.thickspace.mul_int(3).unwrap());
        let g2 = east_west_arrow(&wide, w2, &p).unwrap();
        assert_eq!(g2.labels.len(), 1);
        assert_eq!(g2.labels[0].size, SizeClass::LabelSmall);
    }
}
