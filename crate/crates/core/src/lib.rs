pub mod array;
pub mod cli;
pub mod detect;
pub mod error;
pub mod harness;
pub mod lp;
pub mod music;
pub mod phase;
pub mod seed;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
