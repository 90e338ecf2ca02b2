//! Configuration, CSV tables, SVG charts and the end-to-end pipeline.

pub mod config;
pub mod pipeline;
pub mod svg;
pub mod tables;

pub use config::{parse_config, ConfigDraft, Origin, RunConfig};
pub use pipeline::{run_pipeline, PipelineOutput};
pub use svg::emit_svg_loglog;
