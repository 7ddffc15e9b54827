//! File formats, instance generators and the pipeline driver around
//! `bfasp-core`.

pub mod frontend;
pub mod groundfmt;
pub mod pipeline;
pub mod gen;
pub mod random;
