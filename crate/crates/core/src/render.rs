//! Rendering: DocumentSpec -> Raster through a pluggable adapter.
//!
//! Two adapters exist. [`MockRenderer`] draws deterministic pseudo-glyph
//! rectangles from a hash of the canonical markup; it needs no fonts or
//! external tools and backs every determinism test. [`ExternalToolchain`]
//! shells out to a user-supplied HTML-to-PNG command for real page
//! renders.

use std::path::PathBuf;
use std::process::Command;

use crate::fonts::{FontError, FontRegistry};
use crate::markup::{serialize_markup, DocumentSpec};
use crate::raster::{Raster, RasterError};
use crate::rng::SplitMix64;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("font registry is empty")]
    EmptyRegistry,
    #[error(transparent)]
    Font(#[from] FontError),
    #[error("render tool {tool} exited with {status}: {stderr}")]
    ToolFailed {
        tool: String,
        status: i32,
        stderr: String,
    },
    #[error("cannot launch render tool {tool}: {source}")]
    ToolLaunch {
        tool: String,
        #[source]
        source: std::io::Error,
    },
    #[error("render workspace I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("render output unusable: {0}")]
    Output(#[from] RasterError),
}

pub trait RendererAdapter {
    fn render(&self, doc: &DocumentSpec, registry: &FontRegistry) -> Result<Raster, RenderError>;
    fn name(&self) -> &'static str;
}

/// Renders a document after checking that the registry is non-empty
/// and resolves every font the document references.
pub fn render(
    doc: &DocumentSpec,
    registry: &FontRegistry,
    renderer: &dyn RendererAdapter,
) -> Result<Raster, RenderError> {
    if registry.is_empty() {
        return Err(RenderError::EmptyRegistry);
    }
    registry.require_ids(doc.fonts_used().iter().map(String::as_str))?;
    renderer.render(doc, registry)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xCBF2_9CE4_8422_2325u64;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    hash
}

/// Deterministic stand-in renderer: a fixed-size white page with black
/// word boxes laid out right-to-left, line-wrapped, the whole layout a
/// pure function of the canonical markup string.
#[derive(Debug, Clone, Copy)]
pub struct MockRenderer {
    pub width: u32,
    pub height: u32,
}

impl Default for MockRenderer {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
        }
    }
}

const MOCK_MARGIN: u32 = 16;

impl RendererAdapter for MockRenderer {
    fn render(&self, doc: &DocumentSpec, _registry: &FontRegistry) -> Result<Raster, RenderError> {
        let canonical = serialize_markup(doc);
        let mut rng = SplitMix64::new(fnv1a64(canonical.as_bytes()));
        let mut page = Raster::new(self.width, self.height, [255, 255, 255]);

        let right = self.width - MOCK_MARGIN;
        let mut y = MOCK_MARGIN;
        for block in &doc.blocks {
            let mut x = right;
            let line_height = block.runs.iter().map(|r| r.size_px).max().unwrap_or(16) / 2 + 6;
            for run in &block.runs {
                let glyph_h = (run.size_px / 2).max(4);
                for word in run.text.as_str().split_whitespace() {
                    let chars = word.chars().count() as u32;
                    let glyph_w = (chars * glyph_h / 3).clamp(3, right - MOCK_MARGIN);
                    // ink varies with the hash stream so different
                    // documents disagree in pixel content, not just layout
                    let ink = rng.range_u32(0, 60) as u8;
                    if x < MOCK_MARGIN + glyph_w {
                        x = right;
                        y += line_height;
                    }
                    if y + glyph_h >= self.height - MOCK_MARGIN {
                        break;
                    }
                    for px in (x - glyph_w)..x {
                        for py in y..(y + glyph_h) {
                            page.set(px, py, [ink, ink, ink]);
                        }
                    }
                    x = x.saturating_sub(glyph_w + glyph_h / 2 + 2).max(MOCK_MARGIN);
                }
            }
            y += line_height * 2;
            if y >= self.height - MOCK_MARGIN {
                break;
            }
        }
        Ok(page)
    }

    fn name(&self) -> &'static str {
        "mock"
    }
}

/// Adapter that invokes `command markup_file css_file out_png` in a
/// temp workspace and reads the PNG back. Font files referenced by the
/// document must exist; the generated stylesheet declares them via
/// `@font-face` and maps the markup's span attributes onto CSS.
#[derive(Debug, Clone)]
pub struct ExternalToolchain {
    command: PathBuf,
}

impl ExternalToolchain {
    pub fn new(command: impl Into<PathBuf>) -> Self {
        Self {
            command: command.into(),
        }
    }

    fn stylesheet(&self, doc: &DocumentSpec, registry: &FontRegistry) -> Result<String, FontError> {
        let mut css = String::from(
            "body { direction: rtl; background: #ffffff; margin: 24px; }\n",
        );
        for id in doc.fonts_used() {
            let entry = registry
                .get(&id)
                .ok_or_else(|| FontError::UnknownFont(id.clone()))?;
            if !entry.file_path.is_file() {
                return Err(FontError::MissingFile {
                    id: id.clone(),
                    path: entry.file_path.clone(),
                });
            }
            css.push_str(&format!(
                "@font-face {{ font-family: \"{family}\"; src: url(\"{path}\"); }}\n",
                family = entry.family_name,
                path = entry.file_path.display()
            ));
            css.push_str(&format!(
                "span[font-family=\"{id}\"] {{ font-family: \"{family}\"; }}\n",
                family = entry.family_name
            ));
        }
        for size in doc.sizes_used() {
            css.push_str(&format!(
                "span[font-size=\"{size}\"] {{ font-size: {size}px; }}\n"
            ));
        }
        Ok(css)
    }
}

impl RendererAdapter for ExternalToolchain {
    fn render(&self, doc: &DocumentSpec, registry: &FontRegistry) -> Result<Raster, RenderError> {
        let css = self.stylesheet(doc, registry)?;
        let workspace = tempfile::tempdir()?;
        let markup_file = workspace.path().join("page.html");
        let css_file = workspace.path().join("page.css");
        let out_png = workspace.path().join("page.png");
        std::fs::write(&markup_file, serialize_markup(doc))?;
        std::fs::write(&css_file, css)?;

        let tool = self.command.display().to_string();
        let output = Command::new(&self.command)
            .arg(&markup_file)
            .arg(&css_file)
            .arg(&out_png)
            .output()
            .map_err(|source| RenderError::ToolLaunch {
                tool: tool.clone(),
                source,
            })?;
        if !output.status.success() {
            return Err(RenderError::ToolFailed {
                tool,
                status: output.status.code().unwrap_or(-1),
                stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }
        Ok(Raster::load_png(&out_png)?)
    }

    fn name(&self) -> &'static str {
        "external"
    }
}
