//! Cardinal spline interpolation: generators, Lagrange kernels built in space
//! and in frequency, polynomial reproduction and weighted amalgam norms.

mod bspline;
mod generator;
mod interpolate;
mod kernel;
mod reproduction;

pub use bspline::{
    bspline_at_ratio, bspline_exact, bspline_fine_samples, bspline_samples, bspline_symbol, bspline_value,
    MAX_BSPLINE_DEGREE,
};
pub use generator::{BSplineSymbol, FourierSymbol, Generator, GreenPower};
pub use interpolate::{interpolate, Interpolant};
pub use kernel::{
    lagrange_kernel_fourier, lagrange_kernel_space, KernelRoute, LagrangeKernel, DEFAULT_KERNEL_RADIUS,
    DEFAULT_N_TRUNC, DEFAULT_OVERSAMPLING, PERIODIZATION_TOL,
};
pub use reproduction::{amalgam_norm, reproduction_check, unit_cell_grid, AmalgamNorm, ReproductionReport};
