//! Rasterization and command line surface for the Schwarz reflection library.

pub mod app;
pub mod grid;
pub mod output;
pub mod render;

pub use app::run;
pub use grid::GridSpec;
pub use render::{render, Palette, PixelClass, Render, RenderJob, RenderKind, RenderStats};
