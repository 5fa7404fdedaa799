//! Page assembly, SVG output and the geometry dump.

mod dump;
mod scene;
mod svg;

pub use dump::{emit_geometry, parse_geometry, DumpError};
pub use scene::{
    assemble, frame, Canvas, CellKind, Column, PlacedArrow, PlacedCell, PlacedLabel, Rect, Row, Scene, TextRun,
    GEOMETRY_VERSION,
};
pub use svg::{emit_svg, fmt_pt};
