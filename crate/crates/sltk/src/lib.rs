//! Frame IO, trace output, configuration, canned scenarios and the command
//! line driver around [`sltk_core`].

pub mod config;
pub mod error;
pub mod pnm;
pub mod raw;
pub mod run;
pub mod scenarios;
pub mod scene_file;
pub mod selftest;
pub mod source;
pub mod trace;

pub use config::Config;
pub use error::{Error, Result};
pub use source::{read_frames, FrameSource};
pub use trace::{Format, TraceRecord, TraceWriter};
