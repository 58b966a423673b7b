//! Forward and inverse linear canonical Dunkl transform by weighted quadrature.
//!
//! `D f(λ) = (ib)^{-(k+1)} ∫ f(x) E^M_k(λ, x) dμ_k(x)` and
//! `f(x) = (-ib)^{-(k+1)} ∫ D f(λ) E^{M⁻¹}_k(x, λ) dμ_k(λ)`.

use std::sync::Arc;

use num_complex::Complex;

use crate::engine::DunklMatrix;
use crate::error::{LcdtError, Result};
use crate::measure::{pow_ib, CanonicalMatrix, SampledSignal, SpaceGrid};
use crate::special::KernelContext;
use crate::Real;

/// Largest accepted phase increment per grid step.
pub const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_4;

/// Transform-domain samples, tagged with the matrix that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSignal<T> {
    grid: Arc<SpaceGrid<T>>,
    values: Vec<Complex<T>>,
    matrix: CanonicalMatrix<T>,
}

impl<T: Real> SpectralSignal<T> {
    pub fn new(
        grid: Arc<SpaceGrid<T>>,
        values: Vec<Complex<T>>,
        matrix: CanonicalMatrix<T>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LcdtError::GridMismatch(format!(
                "{} values for {} frequency nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(SpectralSignal {
            grid,
            values,
            matrix,
        })
    }

    pub fn from_fn(
        grid: Arc<SpaceGrid<T>>,
        matrix: CanonicalMatrix<T>,
        f: impl Fn(T) -> Complex<T>,
    ) -> Self {
        let values = grid.nodes().iter().map(|&l| f(l)).collect();
        SpectralSignal {
            grid,
            values,
            matrix,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<SpaceGrid<T>> {
        &self.grid
    }
    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }
    #[inline]
    pub fn matrix(&self) -> CanonicalMatrix<T> {
        self.matrix
    }

    /// Pointwise product with a multiplier `m(λ)`.
    pub fn multiply(&self, m: impl Fn(T) -> Complex<T>) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&l, &v)| v * m(l))
            .collect();
        SpectralSignal {
            grid: self.grid.clone(),
            values,
            matrix: self.matrix,
        }
    }

    /// `L²_k` norm over the frequency grid.
    pub fn norm(&self) -> T {
        self.grid
            .integrate(self.values.iter().map(|v| v.norm_sqr()))
            .max(T::zero())
            .sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if !self.grid.same_as(&other.grid) {
            return Err(LcdtError::GridMismatch("spectra on different grids".into()));
        }
        if self.matrix != other.matrix {
            return Err(LcdtError::MatrixMismatch);
        }
        Ok(self
            .grid
            .integrate_complex(self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj())))
    }
}

/// Phase increment per grid step of the chirped kernels, both directions.
pub fn phase_increment<T: Real>(m: &CanonicalMatrix<T>, space: &SpaceGrid<T>, freq: &SpaceGrid<T>) -> f64 {
    let (xm, dx) = (space.x_max().as_f64(), space.delta().as_f64());
    let (lm, dl) = (freq.x_max().as_f64(), freq.delta().as_f64());
    let ab = m.a_over_b().as_f64().abs();
    let db = m.d_over_b().as_f64().abs();
    let ib = 1.0 / m.b.as_f64().abs();
    let fwd = (ab * xm + lm * ib) * dx + db * lm * dl;
    let inv = (db * lm + xm * ib) * dl + ab * xm * dx;
    fwd.max(inv)
}

/// Prepared forward/inverse transform between a space grid and a frequency grid.
#[derive(Debug, Clone)]
pub struct LcdtPlan<T> {
    ctx: KernelContext<T>,
    space: Arc<SpaceGrid<T>>,
    freq: Arc<SpaceGrid<T>>,
    fwd: Arc<DunklMatrix<T>>,
    inv: Arc<DunklMatrix<T>>,
    pre_fwd: Complex<T>,
    pre_inv: Complex<T>,
}

impl<T: Real> LcdtPlan<T> {
    /// Builds the plan, refusing grids that under-resolve the chirps.
    pub fn new(ctx: KernelContext<T>, space: Arc<SpaceGrid<T>>, freq: Arc<SpaceGrid<T>>) -> Result<Self> {
        let inc = phase_increment(&ctx.m, &space, &freq);
        if inc > MAX_PHASE_STEP {
            return Err(LcdtError::Resolution {
                measured: inc,
                bound: MAX_PHASE_STEP,
            });
        }
        Self::new_unchecked(ctx, space, freq)
    }

    /// Builds the plan without the resolution guard.
    pub fn new_unchecked(
        ctx: KernelContext<T>,
        space: Arc<SpaceGrid<T>>,
        freq: Arc<SpaceGrid<T>>,
    ) -> Result<Self> {
        if space.k() != ctx.k || freq.k() != ctx.k {
            return Err(LcdtError::GridMismatch(
                "grid multiplicity differs from the kernel context".into(),
            ));
        }
        let k = ctx.k.value();
        let q = space.delta() * freq.delta() / ctx.m.b;
        let rows_f = freq.half() + 1;
        let rows_s = space.half() + 1;
        let fwd = Arc::new(DunklMatrix::new(k, q, rows_f, rows_s));
        let inv = if rows_f == rows_s {
            fwd.clone()
        } else {
            Arc::new(DunklMatrix::new(k, q, rows_s, rows_f))
        };
        let e = k + T::one();
        let pre_fwd = pow_ib(ctx.m.b, e)?.inv();
        let pre_inv = pow_ib(-ctx.m.b, e)?.inv();
        Ok(LcdtPlan {
            ctx,
            space,
            freq,
            fwd,
            inv,
            pre_fwd,
            pre_inv,
        })
    }

    /// Plan whose frequency grid equals the space grid.
    pub fn square(ctx: KernelContext<T>, grid: Arc<SpaceGrid<T>>) -> Result<Self> {
        Self::new(ctx, grid.clone(), grid)
    }

    #[inline]
    pub fn ctx(&self) -> &KernelContext<T> {
        &self.ctx
    }
    #[inline]
    pub fn space(&self) -> &Arc<SpaceGrid<T>> {
        &self.space
    }
    #[inline]
    pub fn freq(&self) -> &Arc<SpaceGrid<T>> {
        &self.freq
    }
    #[inline]
    pub fn matrix(&self) -> CanonicalMatrix<T> {
        self.ctx.m
    }
    /// `1 / (ib)^{k+1}`.
    #[inline]
    pub fn forward_prefactor(&self) -> Complex<T> {
        self.pre_fwd
    }
    /// `1 / (-ib)^{k+1}`.
    #[inline]
    pub fn inverse_prefactor(&self) -> Complex<T> {
        self.pre_inv
    }

    pub(crate) fn chirp(rate: T, x: T) -> Complex<T> {
        Complex::from_polar(T::one(), T::lit(0.5) * rate * x * x)
    }

    /// `Σ_m E_k(-i λ_j / b, x_m) u_m` on the plan's grids (no chirps, no weights).
    pub(crate) fn dunkl_forward_raw(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        self.fwd.apply(u, -T::one())
    }

    /// `Σ_j E_k(i x_m / b, λ_j) v_j` on the plan's grids.
    pub(crate) fn dunkl_inverse_raw(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        self.inv.apply(v, T::one())
    }

    /// True when the frequency grid is the space grid.
    pub fn is_square(&self) -> bool {
        Arc::ptr_eq(&self.fwd, &self.inv) && self.space.same_as(&self.freq)
    }

    /// `Σ_m E_k(sign · i y_j / b, x_m) u_m` with `y`, `x` both on the (shared) grid.
    pub(crate) fn square_kernel(&self, u: &[Complex<T>], sign: T) -> Vec<Complex<T>> {
        debug_assert!(self.is_square());
        self.fwd.apply(u, sign)
    }

    /// Forward transform of raw samples on the space grid.
    pub fn forward_values(&self, f: &[Complex<T>]) -> Vec<Complex<T>> {
        let ab = self.ctx.m.a_over_b();
        let db = self.ctx.m.d_over_b();
        let u: Vec<Complex<T>> = f
            .iter()
            .zip(self.space.nodes())
            .zip(self.space.weights())
            .map(|((v, &x), &w)| v * Self::chirp(ab, x) * w)
            .collect();
        self.dunkl_forward_raw(&u)
            .into_iter()
            .zip(self.freq.nodes())
            .map(|(y, &l)| y * Self::chirp(db, l) * self.pre_fwd)
            .collect()
    }

    /// Inverse transform of raw samples on the frequency grid.
    pub fn inverse_values(&self, g: &[Complex<T>]) -> Vec<Complex<T>> {
        let ab = self.ctx.m.a_over_b();
        let db = self.ctx.m.d_over_b();
        let v: Vec<Complex<T>> = g
            .iter()
            .zip(self.freq.nodes())
            .zip(self.freq.weights())
            .map(|((v, &l), &w)| v * Self::chirp(-db, l) * w)
            .collect();
        self.dunkl_inverse_raw(&v)
            .into_iter()
            .zip(self.space.nodes())
            .map(|(y, &x)| y * Self::chirp(-ab, x) * self.pre_inv)
            .collect()
    }

    pub fn forward(&self, f: &SampledSignal<T>) -> Result<SpectralSignal<T>> {
        if !f.grid().same_as(&self.space) {
            return Err(LcdtError::GridMismatch("signal is not on the plan's space grid".into()));
        }
        SpectralSignal::new(self.freq.clone(), self.forward_values(f.values()), self.ctx.m)
    }

    pub fn inverse(&self, g: &SpectralSignal<T>) -> Result<SampledSignal<T>> {
        if g.matrix() != self.ctx.m {
            return Err(LcdtError::MatrixMismatch);
        }
        if !g.grid().same_as(&self.freq) {
            return Err(LcdtError::GridMismatch(
                "spectrum is not on the plan's frequency grid".into(),
            ));
        }
        SampledSignal::new(self.space.clone(), self.inverse_values(g.values()))
    }

    pub fn spectral_zeros(&self) -> SpectralSignal<T> {
        SpectralSignal::from_fn(self.freq.clone(), self.ctx.m, |_| {
            Complex::new(T::zero(), T::zero())
        })
    }

    /// `| ‖D f‖ - ‖f‖ | / ‖f‖`.
    pub fn plancherel_residual(&self, f: &SampledSignal<T>) -> Result<T> {
        let nf = f.norm();
        if nf == T::zero() {
            return Err(LcdtError::Degenerate("zero signal".into()));
        }
        let nd = self.forward(f)?.norm();
        Ok((nd - nf).abs() / nf)
    }

    /// `|⟨f, g⟩ - ⟨D f, D g⟩| / (‖f‖ ‖g‖)`.
    pub fn parseval_residual(&self, f: &SampledSignal<T>, g: &SampledSignal<T>) -> Result<T> {
        let (nf, ng) = (f.norm(), g.norm());
        if nf == T::zero() || ng == T::zero() {
            return Err(LcdtError::Degenerate("zero signal".into()));
        }
        let lhs = crate::measure::mu_inner(f, g)?;
        let rhs = self.forward(f)?.inner(&self.forward(g)?)?;
        Ok((lhs - rhs).norm() / (nf * ng))
    }

    /// `‖D⁻¹ D f - f‖ / ‖f‖`.
    pub fn roundtrip_error(&self, f: &SampledSignal<T>) -> Result<T> {
        let back = self.inverse(&self.forward(f)?)?;
        back.rel_error(f)
    }
}

/// One-off forward transform.
pub fn lcdt_forward<T: Real>(
    f: &SampledSignal<T>,
    ctx: &KernelContext<T>,
    freq_grid: Arc<SpaceGrid<T>>,
) -> Result<SpectralSignal<T>> {
    LcdtPlan::new(*ctx, f.grid().clone(), freq_grid)?.forward(f)
}

/// One-off inverse transform.
pub fn lcdt_inverse<T: Real>(
    g: &SpectralSignal<T>,
    ctx: &KernelContext<T>,
    space_grid: Arc<SpaceGrid<T>>,
) -> Result<SampledSignal<T>> {
    LcdtPlan::new(*ctx, space_grid, g.grid().clone())?.inverse(g)
}

/// Closed-form transform of `e^{-x²/2}`:
/// `(ib)^{-(k+1)} e^{(i/2)(d/b)λ²} (2A)^{-(k+1)} e^{-λ²/(4 A b²)}`, `A = 1/2 - i a/(2b)`.
pub fn gaussian_transform<T: Real>(ctx: &KernelContext<T>, lambda: T) -> Complex<T> {
    let m = &ctx.m;
    let e = ctx.k.value() + T::one();
    let half = T::lit(0.5);
    let a2 = Complex::new(half, -half * m.a / m.b);
    let two_a = a2 * T::lit(2.0);
    let pre = pow_ib(m.b, e).expect("b != 0").inv();
    let chirp = Complex::from_polar(T::one(), half * m.d_over_b() * lambda * lambda);
    let gauss = (-(Complex::new(lambda * lambda, T::zero()) / (a2 * T::lit(4.0) * m.b * m.b))).exp();
    pre * chirp * two_a.powc(Complex::new(-e, T::zero())) * gauss
}
