//! Template files, CSV reports, SVG pictures and the `template-lab` command line
//! on top of `tlab-core`.

pub mod cli;
pub mod formats;
pub mod svg;

pub use formats::{FormatError, TemplateFile};
