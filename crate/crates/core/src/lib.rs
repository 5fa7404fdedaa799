//! Layout compiler for commutative diagrams.
//!
//! A `.cdl` source is parsed into a [`dsl::Diagram`], measured into a
//! [`grid::GridMetrics`], its arrows are laid out on a fixed set of slopes
//! and the result is assembled into a [`render::Scene`] that can be written
//! as SVG or as a JSON geometry dump. All lengths are integer scaled
//! points (1pt = 65536sp).

pub mod arrows;
pub mod cli;
pub mod dsl;
pub mod fixedpoint;
pub mod grid;
pub mod metrics;
pub mod render;

use thiserror::Error;

use arrows::{layout_arrow, ArrowError};
use dsl::{ArrowSpec, CellAddr, Diagram, Offset};
use fixedpoint::ArithError;
use metrics::MetricProvider;
use render::Scene;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("arrow at ({},{}) dir ({},{}): {source}", at.row, at.col, dir.dx, dir.dy)]
    Arrow {
        line: usize,
        at: CellAddr,
        dir: Offset,
        source: ArrowError,
    },
    #[error("relation cell ({row},{col}): {source}")]
    Relation { row: usize, col: usize, source: ArrowError },
    #[error("grid: {0}")]
    Grid(#[from] ArithError),
}

impl LayoutError {
    pub fn arrow(spec: &ArrowSpec, source: ArrowError) -> LayoutError {
        LayoutError::Arrow {
            line: spec.line,
            at: spec.at,
            dir: spec.dir,
            source,
        }
    }

    /// Source line of the offending arrow, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            LayoutError::Arrow { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Measures, lays out and assembles `d`.
pub fn compile(d: &Diagram, provider: &MetricProvider) -> Result<Scene, LayoutError> {
    let gm = grid::measure_grid(d, provider)?;
    let size = grid::label_class(d.config.label_size);
    let arrows = d
        .arrows
        .iter()
        .map(|a| layout_arrow(a, &gm, size, provider).map_err(|e| LayoutError::arrow(a, e)))
        .collect::<Result<Vec<_>, _>>()?;
    render::assemble(d, &gm, &arrows, provider)
}
