//! Inpainting mask selection.
//!
//! Criteria measure how much the reconstruction error grows when a pixel is
//! dropped from the mask; masks keep either the largest values (thresholding)
//! or a density that follows them (halftoning).

mod criterion;
mod encoders;
mod halftone;
mod select;

pub use criterion::{criterion_stationary, criterion_timedep, h1_criterion, presmooth, CriterionField};
pub use encoders::{
    encode_l2dec, encode_l2inc, encode_l2insta, encode_l2sta, encode_mask, evolve_denoise,
    EncodeResult, InitialState, MaskKind, MaskStrategy,
};
pub use halftone::{
    density_field, floyd_steinberg, halftone_mask, soft_threshold_lhs, soft_threshold_mu, DensityMode,
};
pub use select::{random_mask, threshold_mask};
