use serde::{Deserialize, Serialize};

use crate::arrows::{
    east_west_arrow, shaft_plan, tile_shaft, ArrowError, ArrowGeometry, ArrowKind, LabelSide, Marker, Point,
    SegmentBox, Stroke,
};
use crate::dsl::{Cell, Diagram, Heading, ShaftStyle};
use crate::fixedpoint::{glue_share, Sp};
use crate::grid::GridMetrics;
use crate::metrics::{MetricProvider, SizeClass};
use crate::LayoutError;

pub const GEOMETRY_VERSION: u32 = 1;

/// Everything drawn, in absolute sp with the origin at the top left and
/// `y` growing downward.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(rename = "cdlay-geom")]
    pub version: u32,
    pub canvas: Canvas,
    pub cells: Vec<PlacedCell>,
    pub arrows: Vec<PlacedArrow>,
    pub labels: Vec<PlacedLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: Sp,
    pub height: Sp,
    pub margin: Sp,
    pub mathaxis: Sp,
    pub hunit: Sp,
    pub vunit: Sp,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

/// A column box; `gap` is the space before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub x: Sp,
    pub width: Sp,
    pub gap: Sp,
}

/// A row; `gap` is the space after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub baseline: Sp,
    pub height: Sp,
    pub depth: Sp,
    pub gap: Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: Sp,
    pub y: Sp,
    pub width: Sp,
    pub height: Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Text,
    Changewidth,
    East,
    West,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRun {
    pub x: Sp,
    pub baseline: Sp,
    pub font_size: Sp,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedCell {
    pub row: usize,
    pub col: usize,
    pub kind: CellKind,
    pub rect: Rect,
    pub baseline: Sp,
    pub center: Sp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<TextRun>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedArrow {
    /// Source cell `[row, col]`.
    pub at: [usize; 2],
    pub dir: [i64; 2],
    /// Drawn by an `@east`/`@west` cell rather than the arrow list.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub relation: bool,
    pub kind: ArrowKind,
    /// The source frame's origin on the page.
    pub origin: Point,
    /// Endpoints in the source frame, `y` up.
    pub first: Point,
    pub second: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seg: Option<SegmentBox>,
    pub shaft: ShaftStyle,
    pub segments: Vec<[Point; 2]>,
    pub strokes: Vec<Stroke>,
    pub markers: Vec<Marker>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedLabel {
    /// Index into `arrows`.
    pub arrow: usize,
    pub side: LabelSide,
    pub size: SizeClass,
    pub rect: Rect,
    pub text: TextRun,
}

struct Frame {
    origin: Point,
}

impl Frame {
    fn point(&self, p: Point) -> Point {
        Point::new(self.origin.x + p.x, self.origin.y - p.y)
    }

    fn stroke(&self, s: &Stroke) -> Stroke {
        Stroke {
            from: self.point(s.from),
            to: self.point(s.to),
            width: s.width,
            dash: s.dash.clone(),
        }
    }

    fn marker(&self, m: &Marker) -> Marker {
        Marker {
            at: self.point(m.at),
            dir: [m.dir[0], -m.dir[1]],
            ..*m
        }
    }
}

/// Page positions of columns and rows.
pub fn frame(d: &Diagram, gm: &GridMetrics) -> Canvas {
    let cfg = &d.config;
    let m = cfg.margin;
    let mut x = m;
    let columns: Vec<Column> = (0..gm.colcount())
        .map(|j| {
            x += gm.colgap[j];
            let c = Column {
                x,
                width: gm.colwidth[j],
                gap: gm.colgap[j],
            };
            x += gm.colwidth[j];
            c
        })
        .collect();
    let mut y = m + cfg.pre_space;
    let rows: Vec<Row> = (0..gm.rowcount())
        .map(|i| {
            if i > 0 {
                y += gm.rowgap[i];
            }
            y += gm.rowheight[i];
            let r = Row {
                baseline: y,
                height: gm.rowheight[i],
                depth: gm.rowdepth[i],
                gap: gm.rowgap.get(i + 1).copied().unwrap_or(Sp::ZERO),
            };
            y += gm.rowdepth[i];
            r
        })
        .collect();
    Canvas {
        width: x + m,
        height: y + cfg.post_space + m,
        margin: m,
        mathaxis: gm.mathaxis,
        hunit: gm.hunit,
        vunit: gm.vunit,
        columns,
        rows,
    }
}

fn place_arrow(
    g: &ArrowGeometry,
    origin: Point,
    at: [usize; 2],
    dir: [i64; 2],
    relation: bool,
    mathaxis: Sp,
) -> Result<PlacedArrow, ArrowError> {
    let f = Frame { origin };
    let plan = shaft_plan(g, mathaxis)?;
    let segments = tile_shaft(g)?
        .iter()
        .map(|s| [f.point(s.start), f.point(s.end)])
        .collect();
    Ok(PlacedArrow {
        at,
        dir,
        relation,
        kind: g.flags.kind(),
        origin,
        first: g.first,
        second: g.second,
        slope: g.slope.map(|s| s.index),
        seg: g.seg,
        shaft: g.shaft,
        segments,
        strokes: plan.strokes.iter().map(|s| f.stroke(s)).collect(),
        markers: plan.markers.iter().map(|m| f.marker(m)).collect(),
    })
}

fn place_labels(g: &ArrowGeometry, origin: Point, arrow: usize, provider: &MetricProvider, out: &mut Vec<PlacedLabel>) {
    let f = Frame { origin };
    for l in &g.labels {
        let p = f.point(l.position);
        out.push(PlacedLabel {
            arrow,
            side: l.side,
            size: l.size,
            rect: Rect {
                x: p.x,
                y: p.y - l.metrics.height,
                width: l.metrics.width,
                height: l.metrics.height + l.metrics.depth,
            },
            text: TextRun {
                x: p.x,
                baseline: p.y,
                font_size: provider.font_size(l.size),
                content: l.text.clone(),
            },
        });
    }
}

/// Places cells and arrows on the page. `arrows[k]` is the layout of
/// `d.arrows[k]`.
pub fn assemble(
    d: &Diagram,
    gm: &GridMetrics,
    arrows: &[ArrowGeometry],
    provider: &MetricProvider,
) -> Result<Scene, LayoutError> {
    let canvas = frame(d, gm);
    let mut cells = Vec::new();
    let mut placed = Vec::new();
    let mut labels = Vec::new();
    let mut relations = Vec::new();
    let display = provider.font_size(SizeClass::Display);

    for (i, row) in d.rows.iter().enumerate() {
        let baseline = canvas.rows[i].baseline;
        for (j, cell) in row.iter().enumerate() {
            let m = gm.cells[i][j];
            let col = canvas.columns[j];
            let left = col.x + glue_share(col.width - m.width, 1, 2);
            let center = left + m.width - m.width.half();
            let run = |content: &str| {
                (!content.is_empty()).then(|| TextRun {
                    x: left + m.content_offset,
                    baseline,
                    font_size: display,
                    content: content.to_owned(),
                })
            };
            let (kind, text) = match cell {
                Cell::Text(t) => (CellKind::Text, run(t)),
                Cell::ChangeWidth { content, .. } => (CellKind::Changewidth, run(content)),
                Cell::Relation(r) => {
                    relations.push((i + 1, j + 1, r, m.width, Point::new(center, baseline)));
                    let kind = match r.heading {
                        Heading::East => CellKind::East,
                        Heading::West => CellKind::West,
                    };
                    (kind, None)
                }
            };
            cells.push(PlacedCell {
                row: i + 1,
                col: j + 1,
                kind,
                rect: Rect {
                    x: left,
                    y: baseline - m.height,
                    width: m.width,
                    height: m.height + m.depth,
                },
                baseline,
                center,
                text,
            });
        }
    }

    for (k, (spec, g)) in d.arrows.iter().zip(arrows).enumerate() {
        let (r, c) = (spec.at.row, spec.at.col);
        let origin = cells
            .iter()
            .find(|p| p.row == r && p.col == c)
            .map(|p| Point::new(p.center, p.baseline))
            .expect("arrow sources are checked at parse time");
        let a = place_arrow(g, origin, [r, c], [spec.dir.dx, spec.dir.dy], false, gm.mathaxis)
            .map_err(|e| LayoutError::arrow(spec, e))?;
        place_labels(g, origin, k, provider, &mut labels);
        placed.push(a);
    }
    for (row, col, r, width, origin) in relations {
        let err = |source| LayoutError::Relation { row, col, source };
        let g = east_west_arrow(r, width, provider).map_err(err)?;
        let dx = if r.heading == Heading::East { 1 } else { -1 };
        let a = place_arrow(&g, origin, [row, col], [dx, 0], true, gm.mathaxis).map_err(err)?;
        place_labels(&g, origin, placed.len(), provider, &mut labels);
        placed.push(a);
    }

    Ok(Scene {
        version: GEOMETRY_VERSION,
        canvas,
        cells,
        arrows: placed,
        labels,
    })
}
