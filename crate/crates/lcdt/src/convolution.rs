//! Reflection, chirp modulation, generalized translation and convolution.
//!
//! Translation is realized through its transform-domain symbol
//! `D(T_x f)(λ) = e^{-(i/2)(a/b)x²} E_k(iλ/b, x) D f(λ)`; convolution through
//! `D(f * g) = e^{-(i/2)(d/b)λ²} D f · D g`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{LcdtError, Result};
use crate::measure::SampledSignal;
use crate::quad::CAccum;
use crate::special::{dunkl_kernel, KernelContext};
use crate::transform::{LcdtPlan, SpectralSignal};
use crate::Real;

/// Largest grid accepted by [`convolve_direct`] unless forced.
pub const DIRECT_LIMIT: usize = 513;

/// Coefficient of `x²` in a unit-modulus phase `e^{i rate x²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpRate<T>(T);

impl<T: Real> ChirpRate<T> {
    pub fn new(rate: T) -> Result<Self> {
        if !rate.is_finite() {
            return Err(LcdtError::param("rate", "chirp rate must be finite"));
        }
        Ok(ChirpRate(rate))
    }

    /// `a/b`, the rate of the operator `L_{2a/b}`.
    pub fn of_matrix(ctx: &KernelContext<T>) -> Self {
        ChirpRate(ctx.m.a_over_b())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }
}

/// `P f(x) = f(-x)` on the symmetric grid.
pub fn reflect<T: Real>(f: &SampledSignal<T>) -> SampledSignal<T> {
    let mut v = f.values().to_vec();
    v.reverse();
    SampledSignal::new(f.grid().clone(), v).expect("same length")
}

/// `f(x) e^{i rate x²}`.
pub fn chirp_modulate<T: Real>(f: &SampledSignal<T>, rate: T) -> SampledSignal<T> {
    f.map(|x, v| v * Complex::from_polar(T::one(), rate * x * x))
}

/// Transform-domain symbol of `T^M_{x0}` at `λ`.
pub fn translation_symbol<T: Real>(ctx: &KernelContext<T>, x0: T, lambda: T) -> Complex<T> {
    let m = &ctx.m;
    let chirp = Complex::from_polar(T::one(), -T::lit(0.5) * m.a_over_b() * x0 * x0);
    chirp * dunkl_kernel(ctx.k.value(), lambda / m.b, x0)
}

/// Convolution engine over one square plan.
#[derive(Debug, Clone)]
pub struct Convolver<T> {
    plan: LcdtPlan<T>,
}

/// Convolution output with the energy bookkeeping of the L² identity.
#[derive(Debug, Clone)]
pub struct Convolution<T> {
    pub signal: SampledSignal<T>,
    /// `∫ |D f|² |D g|² dμ_k` on the frequency grid.
    pub spectral_energy: T,
    /// `‖f * g‖²` on the space grid.
    pub grid_energy: T,
}

impl<T: Real> Convolution<T> {
    /// Relative energy missing from the space grid.
    pub fn truncation(&self) -> T {
        if self.spectral_energy == T::zero() {
            return T::zero();
        }
        (self.spectral_energy - self.grid_energy) / self.spectral_energy
    }
}

impl<T: Real> Convolver<T> {
    pub fn new(plan: LcdtPlan<T>) -> Self {
        Convolver { plan }
    }

    #[inline]
    pub fn plan(&self) -> &LcdtPlan<T> {
        &self.plan
    }

    fn check_x0(&self, x0: T) -> Result<()> {
        let xm = self.plan.space().x_max();
        if !x0.is_finite() || x0.abs() > xm {
            return Err(LcdtError::param(
                "x0",
                format!("shift {x0} outside the grid range [-{xm}, {xm}]"),
            ));
        }
        Ok(())
    }

    /// `T^M_{x0} f`.
    pub fn translate(&self, f: &SampledSignal<T>, x0: T) -> Result<SampledSignal<T>> {
        self.check_x0(x0)?;
        let ctx = *self.plan.ctx();
        let g = self.plan.forward(f)?;
        self.plan.inverse(&g.multiply(|l| translation_symbol(&ctx, x0, l)))
    }

    /// `e^{-(i/2)(d/b)λ²} D f · D g`.
    pub fn product_spectrum(
        &self,
        f: &SampledSignal<T>,
        g: &SampledSignal<T>,
    ) -> Result<SpectralSignal<T>> {
        f.check_same_grid(g)?;
        let df = self.plan.forward(f)?;
        let dg = self.plan.forward(g)?;
        let db = self.plan.matrix().d_over_b();
        let half = T::lit(0.5);
        let values = df
            .grid()
            .nodes()
            .iter()
            .zip(df.values().iter().zip(dg.values()))
            .map(|(&l, (a, b))| Complex::from_polar(T::one(), -half * db * l * l) * a * b)
            .collect();
        SpectralSignal::new(df.grid().clone(), values, df.matrix())
    }

    pub fn convolve(&self, f: &SampledSignal<T>, g: &SampledSignal<T>) -> Result<SampledSignal<T>> {
        self.plan.inverse(&self.product_spectrum(f, g)?)
    }

    pub fn convolve_with_report(
        &self,
        f: &SampledSignal<T>,
        g: &SampledSignal<T>,
    ) -> Result<Convolution<T>> {
        let spec = self.product_spectrum(f, g)?;
        let signal = self.plan.inverse(&spec)?;
        let spectral_energy = spec.norm().powi(2);
        let grid_energy = signal.norm().powi(2);
        Ok(Convolution {
            signal,
            spectral_energy,
            grid_energy,
        })
    }

    /// Quadrature of `∫ e^{i(a/b)y²} (T_x f)(-y) g(y) dμ_{k,b}(y)` at every node.
    pub fn convolve_direct(
        &self,
        f: &SampledSignal<T>,
        g: &SampledSignal<T>,
        force: bool,
    ) -> Result<SampledSignal<T>> {
        f.check_same_grid(g)?;
        let grid = self.plan.space().clone();
        if grid.len() > DIRECT_LIMIT && !force {
            return Err(LcdtError::Cost {
                what: "convolve_direct",
                n: grid.len(),
                limit: DIRECT_LIMIT,
            });
        }
        let ctx = *self.plan.ctx();
        let df = self.plan.forward(f)?;
        let ab = ctx.m.a_over_b();
        let pre = self.plan.forward_prefactor();
        let n = grid.len();
        let gw: Vec<Complex<T>> = grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .zip(g.values())
            .map(|((&y, &w), &gv)| gv * Complex::from_polar(w, ab * y * y))
            .collect();
        let out: Vec<Complex<T>> = grid
            .nodes()
            .par_iter()
            .map(|&x| {
                let shifted = self
                    .plan
                    .inverse_values(df.multiply(|l| translation_symbol(&ctx, x, l)).values());
                let mut acc = CAccum::new();
                for (m, w) in gw.iter().enumerate() {
                    acc.add(shifted[n - 1 - m] * w);
                }
                acc.value() * pre
            })
            .collect();
        SampledSignal::new(grid, out)
    }
}

pub fn translate<T: Real>(
    f: &SampledSignal<T>,
    x0: T,
    ctx: &KernelContext<T>,
) -> Result<SampledSignal<T>> {
    Convolver::new(LcdtPlan::square(*ctx, f.grid().clone())?).translate(f, x0)
}

pub fn convolve<T: Real>(
    f: &SampledSignal<T>,
    g: &SampledSignal<T>,
    ctx: &KernelContext<T>,
) -> Result<SampledSignal<T>> {
    Convolver::new(LcdtPlan::square(*ctx, f.grid().clone())?).convolve(f, g)
}

pub fn convolve_direct<T: Real>(
    f: &SampledSignal<T>,
    g: &SampledSignal<T>,
    ctx: &KernelContext<T>,
    force: bool,
) -> Result<SampledSignal<T>> {
    Convolver::new(LcdtPlan::square(*ctx, f.grid().clone())?).convolve_direct(f, g, force)
}
