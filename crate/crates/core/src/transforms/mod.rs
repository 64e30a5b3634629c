//! Image augmentations as explicit affine operators, their quantised
//! application and their singular spectra.

pub mod builders;
mod operator;
pub mod pixelmap;
pub mod svd;

pub use builders::{
    dct8, downsample, idct8, jpeg_filter, linjpeg, per_channel, pixelwise, replicate_channels, rgb_to_ycbcr, tiled,
    upsample, ycbcr_to_rgb,
};
pub use operator::{apply, compose, AffineOperator, Quantizer, Rounding};
pub use pixelmap::{crop_rescale, flip_h, flip_v, rotation, Interpolation, PixelMap};
pub use svd::{decompose, singular_spectrum, singular_spectrum_capped, Decomposition, SingularSpectrum};
