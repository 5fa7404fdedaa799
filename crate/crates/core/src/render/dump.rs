use thiserror::Error;

use super::scene::{Scene, GEOMETRY_VERSION};

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("malformed geometry dump: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported geometry dump version {0}")]
    Version(u32),
}

/// JSON dump of `scene`, keys in a fixed order, all lengths in sp.
pub fn emit_geometry(scene: &Scene) -> String {
    let mut s = serde_json::to_string_pretty(scene).expect("scene serializes");
    s.push('\n');
    s
}

pub fn parse_geometry(text: &str) -> Result<Scene, DumpError> {
    let scene: Scene = serde_json::from_str(text)?;
    if scene.version != GEOMETRY_VERSION {
        return Err(DumpError::Version(scene.version));
    }
    Ok(scene)
}
