//! Convolution inverses of multidimensional discrete filters in weighted
//! sequence algebras, and their use in cardinal spline interpolation.
//!
//! The numerical core is generic over the [`Scalar`] type (`f32`, `f64`);
//! the `*64` aliases below are the usual entry points. B-spline values are
//! computed exactly in rational arithmetic before conversion.

// `!(x > 0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod fft;
pub mod inversion;
pub mod io;
pub mod lattice;
pub mod scalar;
pub mod spectrum;
pub mod splines;
pub mod weights;

pub use error::{Error, Result};
pub use inversion::{
    decay_fit, invert_exact_1d, invert_singular_1d, invert_stable, toeplitz_oracle, DecayModel, DecayReport,
    ExactInverse1D, SlowGrowthSeq,
};
pub use lattice::{convolve, kronecker, weighted_norm, Filter, IndexBox, MultiIndex, NormExponent};
pub use scalar::Scalar;
pub use spectrum::{
    derivative_growth, lemma_bound_check, min_modulus_certified, symbol_eval, ModulusCertificate, Symbol,
};
pub use splines::{
    amalgam_norm, bspline_samples, interpolate, lagrange_kernel_fourier, lagrange_kernel_space, reproduction_check,
    FourierSymbol, Generator, LagrangeKernel,
};
pub use weights::{extended_grs, grs_limit, submultiplicative_check, GrsEstimate, GrsVerdict, Weight};

pub type Filter64 = Filter<f64>;
pub type Filter32 = Filter<f32>;
pub type Weight64 = Weight<f64>;
pub type Weight32 = Weight<f32>;
pub type LagrangeKernel64 = LagrangeKernel<f64>;
pub type ExactInverse1D64 = ExactInverse1D<f64>;
pub type DecayReport64 = DecayReport<f64>;
