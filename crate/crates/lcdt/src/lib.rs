//! Linear canonical Dunkl transform (LCDT) on the real line.
//!
//! The crate provides weighted quadrature for the Dunkl measure
//! `dμ_k(x) = |x|^{2k+1} dx / (2^{k+1} Γ(k+1))`, the forward and inverse
//! LCDT for a matrix `M = (a, b; c, d)` in SL(2, R) with `b != 0`, the
//! associated translation and convolution, a continuous wavelet transform,
//! truncated Calderón reconstruction, and two Tikhonov extremal solvers on
//! the LCDT Sobolev spaces.
//!
//! All numerical types are generic over [`Real`] (`f32` or `f64`). The
//! `*F64` aliases at the crate root name the double precision instances,
//! which is what the validation suite and the CLI use.

pub mod calderon;
pub mod config;
pub mod convolution;
pub mod cwt;
mod engine;
pub mod error;
pub mod transform;
pub mod measure;
pub mod quad;
pub mod extremal;
pub mod sobolev;
pub mod special;
pub mod validate;
pub mod wavelet;

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub use num_complex::Complex;

pub use crate::error::{LcdtError, Result};
pub use crate::transform::{LcdtPlan, SpectralSignal};
pub use crate::measure::{
    mu_inner, mu_norm, pow_ib, CanonicalMatrix, Multiplicity, SampledSignal, ScaleGrid, SpaceGrid,
};
pub use crate::special::KernelContext;
pub use crate::wavelet::{TimeScaleField, Wavelet, WaveletSpec, Window};

/// Floating point scalar the library is generic over.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Default
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

pub type C64 = Complex<f64>;
pub type MultiplicityF64 = Multiplicity<f64>;
pub type CanonicalMatrixF64 = CanonicalMatrix<f64>;
pub type SpaceGridF64 = SpaceGrid<f64>;
pub type ScaleGridF64 = ScaleGrid<f64>;
pub type SampledSignalF64 = SampledSignal<f64>;
pub type SpectralSignalF64 = SpectralSignal<f64>;
pub type KernelContextF64 = KernelContext<f64>;
pub type LcdtPlanF64 = LcdtPlan<f64>;
pub type WaveletF64 = Wavelet<f64>;
pub type TimeScaleFieldF64 = TimeScaleField<f64>;
