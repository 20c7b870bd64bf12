//! File formats and command bodies behind the `rdmpanel` binary.

pub mod commands;
pub mod format;

pub use commands::{exit, CmdOutput};
pub use format::{FormatError, PanelFile, StateFile};
