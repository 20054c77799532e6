//! Convolution inverses: a brute-force windowed least-squares oracle, the
//! FFT route for invertible symbols in any dimension, the closed form through
//! symbol zeros in one dimension, and causal slowly increasing inverses when
//! the symbol vanishes on the unit circle.

mod decay;
mod exact;
pub mod roots;
mod singular;
mod stable;
mod toeplitz;

pub use decay::{decay_fit, DecayModel, DecayReport, DECAY_FLOOR, MIN_NONZERO_SAMPLES, MODEL_PREFERENCE};
pub use exact::{invert_exact_1d, ExactInverse1D};
pub use singular::{invert_singular_1d, SlowGrowthSeq, SINGULAR_RESIDUAL_TOL};
pub use stable::{
    inverse_residual, invert_stable, invert_stable_detailed, verification_box, StableInverse, STABLE_MAX_GRID,
    STABLE_MAX_POINTS, STABLE_START_GRID,
};
pub use toeplitz::{toeplitz_oracle, TOEPLITZ_SINGULAR_RATIO};
