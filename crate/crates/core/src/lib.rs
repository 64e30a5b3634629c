//! Watermarking capacity bounds, linear image transforms and a q-ary codec.

pub mod bounds;
pub mod codec;
pub mod error;
pub mod format;
pub mod geometry;
pub mod lattice;
pub mod robust;
pub mod transforms;

pub use error::{Error, Result};
pub use format::{Image, ImageFormat, PsnrConstraint};
