//! The `cdlay build` pipeline.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::dsl::parse_diagram;
use crate::metrics::MetricProvider;
use crate::render::{emit_geometry, emit_svg};
use crate::{compile, LayoutError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_LAYOUT: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildRequest {
    pub input: PathBuf,
    /// Required unless `check` is set.
    pub output: Option<PathBuf>,
    pub geometry: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    /// `[config]` overrides, applied after the file's own section.
    pub overrides: Vec<(String, String)>,
    pub check: bool,
}

/// Splits a `--set key=value` argument.
pub fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    Ok((k.trim().to_owned(), v.trim().to_owned()))
}

/// Writes `contents` to a temporary file beside `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Runs one build, reporting diagnostics to `err`. Returns the exit status.
pub fn run(req: &BuildRequest, err: &mut dyn Write) -> i32 {
    match build(req) {
        Ok(()) => EXIT_OK,
        Err((code, msg)) => {
            let _ = writeln!(err, "{msg}");
            code
        }
    }
}

fn build(req: &BuildRequest) -> Result<(), (i32, String)> {
    let name = req.input.display();
    let source = std::fs::read_to_string(&req.input).map_err(|e| (EXIT_IO, format!("{name}: {e}")))?;
    let mut diagram = parse_diagram(&source).map_err(|e| (EXIT_PARSE, format!("{name}:{e}")))?;
    for (key, value) in &req.overrides {
        diagram
            .config
            .set(key, value)
            .map_err(|e| (EXIT_PARSE, format!("--set {key}={value}: {e}")))?;
    }
    let provider = match &req.metrics {
        None => MetricProvider::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| (EXIT_IO, format!("{}: {e}", path.display())))?;
            MetricProvider::parse(&text).map_err(|e| (EXIT_PARSE, format!("{}: {e}", path.display())))?
        }
    };
    let scene = compile(&diagram, &provider).map_err(|e| {
        let msg = match &e {
            LayoutError::Arrow { line, .. } => format!("{name}:{line}:1: {e}"),
            _ => format!("{name}: {e}"),
        };
        (EXIT_LAYOUT, msg)
    })?;
    if req.check {
        return Ok(());
    }
    let output = req
        .output
        .as_ref()
        .ok_or_else(|| (EXIT_USAGE, "an output path is required without --check".to_owned()))?;
    let write = |p: &Path, text: String| write_atomic(p, &text).map_err(|e| (EXIT_IO, format!("{}: {e}", p.display())));
    write(output, emit_svg(&scene))?;
    if let Some(path) = &req.geometry {
        write(path, emit_geometry(&scene))?;
    }
    Ok(())
}
