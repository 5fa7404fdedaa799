//! Measurement pass: cell boxes, row and column extents, resolved gaps.

use serde::{Deserialize, Serialize};

use crate::dsl::{Cell, Diagram, DiagramConfig, GapEntry, LabelSize, Relation};
use crate::fixedpoint::{ArithError, Sp};
use crate::metrics::{MetricProvider, SizeClass, TextMetrics};

/// 90pt / 36.
pub const MATHAXIS: Sp = Sp::from_raw(163840);
pub const STANDARD_CGAP: Sp = Sp::pt(40);
pub const STANDARD_RGAP: Sp = Sp::pt(32);
pub const STRUT_HEIGHT: Sp = Sp::pt(10);
/// Base horizontal option unit, 2pt.
pub const HUNIT: Sp = Sp::pt(2);
/// Base vertical option unit, 1.6pt.
pub const VUNIT: Sp = Sp::from_raw(104858);

/// Minimum gap added to a `w"..."` snippet's width.
const W_GAP_PAD: Sp = Sp::pt(15);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMetrics {
    /// Width the alignment sees.
    pub width: Sp,
    pub height: Sp,
    pub depth: Sp,
    /// Offset of the displayed content from the cell's left edge; nonzero
    /// only for `@changewidth` cells.
    pub content_offset: Sp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMetrics {
    pub cells: Vec<Vec<CellMetrics>>,
    pub rowheight: Vec<Sp>,
    pub rowdepth: Vec<Sp>,
    pub colwidth: Vec<Sp>,
    /// `colgap[j - 1]` is the gap before column `j`.
    pub colgap: Vec<Sp>,
    /// `rowgap[i]` is the gap after row `i`; `rowgap[0]` is 0. The gap after
    /// the last row is never placed and is not stored.
    pub rowgap: Vec<Sp>,
    pub hunit: Sp,
    pub vunit: Sp,
    pub mathaxis: Sp,
}

impl GridMetrics {
    pub fn rowcount(&self) -> usize {
        self.rowheight.len()
    }

    pub fn colcount(&self) -> usize {
        self.colwidth.len()
    }

    /// Metrics of cell `(i, j)`, 1-based; missing cells are all zero.
    pub fn cell(&self, i: usize, j: usize) -> CellMetrics {
        i.checked_sub(1)
            .and_then(|i| self.cells.get(i))
            .and_then(|row| row.get(j.checked_sub(1)?))
            .copied()
            .unwrap_or_default()
    }

    pub fn width(&self, i: usize, j: usize) -> Sp {
        self.cell(i, j).width
    }

    pub fn height(&self, i: usize, j: usize) -> Sp {
        self.cell(i, j).height
    }

    pub fn depth(&self, i: usize, j: usize) -> Sp {
        self.cell(i, j).depth
    }

    pub fn row_height(&self, i: usize) -> Sp {
        self.rowheight[i - 1]
    }

    pub fn row_depth(&self, i: usize) -> Sp {
        self.rowdepth[i - 1]
    }

    pub fn col_width(&self, j: usize) -> Sp {
        self.colwidth[j - 1]
    }

    pub fn col_gap(&self, j: usize) -> Sp {
        self.colgap[j - 1]
    }

    /// Gap after row `i`, for `0 <= i < rowcount`.
    pub fn row_gap(&self, i: usize) -> Sp {
        self.rowgap[i]
    }
}

pub fn label_class(size: LabelSize) -> SizeClass {
    match size {
        LabelSize::Normal => SizeClass::LabelNormal,
        LabelSize::Small => SizeClass::LabelSmall,
    }
}

/// Width of an `@east`/`@west` relation: at least `minaw`, and each label
/// with its three thick spaces at small size.
pub fn relation_width(r: &Relation, cfg: &DiagramConfig, provider: &MetricProvider) -> Result<Sp, ArithError> {
    let pad = cfg.thickspace.mul_int(3)?;
    let above = provider.measure(&r.above, SizeClass::LabelSmall).width + pad;
    let below = provider.measure(&r.below, SizeClass::LabelSmall).width + pad;
    Ok(cfg.minaw.max(above).max(below))
}

/// Vertical extent of a relation: the arrow on the axis with the labels
/// stacked above and below it.
fn relation_extent(r: &Relation, provider: &MetricProvider) -> (Sp, Sp) {
    let gap = Sp::pt(2);
    let mut height = MATHAXIS;
    let mut depth = Sp::ZERO;
    if !r.above.is_empty() {
        let m = provider.measure(&r.above, SizeClass::LabelSmall);
        height = MATHAXIS + m.depth + gap + m.height;
    }
    if !r.below.is_empty() {
        let m = provider.measure(&r.below, SizeClass::LabelSmall);
        depth = depth.max(m.height + gap + m.depth - MATHAXIS);
    }
    (height, depth)
}

/// Box of one cell, strut included.
pub fn measure_cell(cell: &Cell, cfg: &DiagramConfig, provider: &MetricProvider) -> Result<CellMetrics, ArithError> {
    let (shown, width, offset) = match cell {
        Cell::Text(t) => {
            let m = provider.measure(t, SizeClass::Display);
            (m, m.width, Sp::ZERO)
        }
        Cell::ChangeWidth { content, width_of } => {
            let m = provider.measure(content, SizeClass::Display);
            let w = provider.measure(width_of, SizeClass::Display).width;
            (m, w, crate::fixedpoint::glue_share(w - m.width, 1, 2))
        }
        Cell::Relation(r) => {
            let w = relation_width(r, cfg, provider)?;
            let (h, d) = relation_extent(r, provider);
            (
                TextMetrics {
                    width: w,
                    height: h,
                    depth: d,
                },
                w,
                Sp::ZERO,
            )
        }
    };
    Ok(CellMetrics {
        width,
        height: shown.height.max(STRUT_HEIGHT),
        depth: shown.depth.max(Sp::ZERO),
        content_offset: offset,
    })
}

fn resolve_entry(
    entry: Option<&GapEntry>,
    standard: Sp,
    cfg: &DiagramConfig,
    provider: &MetricProvider,
) -> Result<Sp, ArithError> {
    let Some(e) = entry else {
        return Ok(standard);
    };
    let mut gap = standard.scale(e.factor)?;
    if let Some(snippet) = &e.min_snippet {
        let w = W_GAP_PAD + provider.measure(snippet, label_class(cfg.label_size)).width;
        gap = gap.max(w);
    }
    Ok(gap)
}

/// Gap before column `j` (`j >= 1`).
pub fn resolve_colgap(j: usize, cfg: &DiagramConfig, provider: &MetricProvider) -> Result<Sp, ArithError> {
    if j <= 1 {
        return Ok(Sp::ZERO);
    }
    let standard = STANDARD_CGAP.scale(cfg.cgap_scale)?;
    resolve_entry(cfg.colgaps.get(j - 2), standard, cfg, provider)
}

/// Gap after row `i` (`i >= 0`).
pub fn resolve_rowgap(i: usize, cfg: &DiagramConfig, provider: &MetricProvider) -> Result<Sp, ArithError> {
    if i == 0 {
        return Ok(Sp::ZERO);
    }
    let standard = STANDARD_RGAP.scale(cfg.rgap_scale)?;
    resolve_entry(cfg.rowgaps.get(i - 1), standard, cfg, provider)
}

pub fn measure_grid(d: &Diagram, provider: &MetricProvider) -> Result<GridMetrics, ArithError> {
    let cfg = &d.config;
    let cells = d
        .rows
        .iter()
        .map(|row| row.iter().map(|c| measure_cell(c, cfg, provider)).collect())
        .collect::<Result<Vec<Vec<CellMetrics>>, _>>()?;
    let ncols = d.col_count();
    let mut colwidth = vec![Sp::ZERO; ncols];
    let mut rowheight = Vec::with_capacity(cells.len());
    let mut rowdepth = Vec::with_capacity(cells.len());
    for row in &cells {
        let mut h = Sp::ZERO;
        let mut dp = Sp::ZERO;
        for (j, c) in row.iter().enumerate() {
            h = h.max(c.height);
            dp = dp.max(c.depth);
            colwidth[j] = colwidth[j].max(c.width);
        }
        rowheight.push(h);
        rowdepth.push(dp);
    }
    let colgap = (1..=ncols)
        .map(|j| resolve_colgap(j, cfg, provider))
        .collect::<Result<_, _>>()?;
    let rowgap = (0..cells.len())
        .map(|i| resolve_rowgap(i, cfg, provider))
        .collect::<Result<_, _>>()?;
    Ok(GridMetrics {
        cells,
        rowheight,
        rowdepth,
        colwidth,
        colgap,
        rowgap,
        hunit: HUNIT.scale(cfg.cgap_scale)?,
        vunit: VUNIT.scale(cfg.rgap_scale)?,
        mathaxis: MATHAXIS,
    })
}
