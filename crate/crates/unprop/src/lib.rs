//! File plumbing, batch execution, benchmarking, and visualization for
//! the unprop augmentation. The algorithm itself lives in `unprop-core`;
//! this crate adds everything that touches the OS: image files, JSON
//! manifests, thread pools, and wall clocks.

pub mod batch;
pub mod bench;
pub mod imgio;
pub mod manifest;
pub mod viz;

/// Version stamped into manifests.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
