//! The continuous wavelet transform `Φ^M_ψ` and its global identities.
//!
//! Fast path, per scale `α`:
//! `Φ(α, β) = α^{k+1} e^{(i/2)(a/b)β²} (ib)^{-(k+1)}
//!            ∫ D̃f(λ) e^{(i/2)(d/b)α²λ²} W(αλ) E_k(-iλβ/b) dμ_k(λ)`
//! with `D̃f = e^{-(i/2)(d/b)λ²} D f`. For `α > 1` the β grid is stretched and
//! the λ grid compressed by the same power of two `s >= α`, which keeps the
//! product `Δβ Δλ` and therefore the kernel matrix unchanged.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::convolution::Convolver;
use crate::error::{LcdtError, Result};
use crate::measure::{SampledSignal, ScaleGrid, SpaceGrid};
use crate::quad::{lagrange_uniform, CAccum};
use crate::transform::{LcdtPlan, SpectralSignal, MAX_PHASE_STEP};
use crate::wavelet::Wavelet;
use crate::Real;

/// Largest grid accepted by the direct CWT unless forced.
pub const DIRECT_LIMIT: usize = 513;

/// Interpolation order for spectra resampled on compressed grids.
const RESAMPLE_ORDER: usize = 10;

/// Coefficients `Φ(α_i, β)` for every scale of a [`ScaleGrid`].
///
/// Row `i` lives on the base space grid stretched by `stretch[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScaleField<T> {
    scales: ScaleGrid<T>,
    grid: Arc<SpaceGrid<T>>,
    stretch: Vec<T>,
    values: Vec<Vec<Complex<T>>>,
}

impl<T: Real> TimeScaleField<T> {
    pub fn new(
        scales: ScaleGrid<T>,
        grid: Arc<SpaceGrid<T>>,
        stretch: Vec<T>,
        values: Vec<Vec<Complex<T>>>,
    ) -> Result<Self> {
        if stretch.len() != scales.len()
            || values.len() != scales.len()
            || values.iter().any(|r| r.len() != grid.len())
        {
            return Err(LcdtError::GridMismatch("field shape differs from its grids".into()));
        }
        if values.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LcdtError::Degenerate("non-finite wavelet coefficient".into()));
        }
        Ok(TimeScaleField {
            scales,
            grid,
            stretch,
            values,
        })
    }

    #[inline]
    pub fn scales(&self) -> &ScaleGrid<T> {
        &self.scales
    }
    #[inline]
    pub fn grid(&self) -> &Arc<SpaceGrid<T>> {
        &self.grid
    }
    #[inline]
    pub fn stretch(&self) -> &[T] {
        &self.stretch
    }
    #[inline]
    pub fn values(&self) -> &[Vec<Complex<T>>] {
        &self.values
    }

    /// Position `β` of entry `(i, j)`.
    #[inline]
    pub fn beta(&self, i: usize, j: usize) -> T {
        self.grid.nodes()[j] * self.stretch[i]
    }

    /// `μ_k` weight of entry `(i, j)`.
    #[inline]
    pub fn beta_weight(&self, i: usize, j: usize) -> T {
        let p = T::lit(2.0) * self.grid.k().value() + T::lit(2.0);
        self.grid.weights()[j] * self.stretch[i].powf(p)
    }

    fn check_layout(&self, other: &Self) -> Result<()> {
        if self.scales != other.scales || !self.grid.same_as(&other.grid) || self.stretch != other.stretch {
            return Err(LcdtError::GridMismatch("fields on different time-scale grids".into()));
        }
        Ok(())
    }

    /// `∫∫ Φ conj(Ψ) dν_k` over the truncated grids.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_layout(other)?;
        let mut acc = CAccum::new();
        for i in 0..self.values.len() {
            let mut row = CAccum::new();
            for j in 0..self.grid.len() {
                row.add(self.values[i][j] * other.values[i][j].conj() * self.beta_weight(i, j));
            }
            acc.add(row.value() * self.scales.nu_weights()[i]);
        }
        Ok(acc.value())
    }

    pub fn norm_sqr(&self) -> T {
        self.inner(self).expect("same layout").re
    }

    /// `‖self - reference‖_ν / ‖reference‖_ν`.
    pub fn rel_distance(&self, reference: &Self) -> Result<T> {
        self.check_layout(reference)?;
        let diff = TimeScaleField {
            values: self
                .values
                .iter()
                .zip(&reference.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
            ..self.clone()
        };
        let r = reference.norm_sqr();
        if r == T::zero() {
            return Err(LcdtError::Degenerate("zero reference field".into()));
        }
        Ok((diff.norm_sqr() / r).sqrt())
    }

    /// Same layout with every coefficient replaced by zero.
    pub fn zeros_like(&self) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        TimeScaleField {
            values: vec![vec![z; self.grid.len()]; self.values.len()],
            ..self.clone()
        }
    }
}

/// Both sides of a global identity and their normalized gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck<T> {
    pub lhs: Complex<T>,
    pub rhs: Complex<T>,
    pub residual: T,
}

/// Power-of-two stretch `s >= α` for `α > 1`, else 1.
pub fn stretch_for<T: Real>(alpha: T) -> T {
    if alpha <= T::one() {
        T::one()
    } else {
        T::lit(2.0).powf(alpha.log2().ceil())
    }
}

/// CWT engine over a square plan: the β grid is the space grid.
#[derive(Debug, Clone)]
pub struct Cwt<T> {
    conv: Convolver<T>,
}

impl<T: Real> Cwt<T> {
    pub fn new(plan: LcdtPlan<T>) -> Result<Self> {
        if !plan.is_square() {
            return Err(LcdtError::GridMismatch(
                "the wavelet transform needs equal space and frequency grids".into(),
            ));
        }
        Ok(Cwt {
            conv: Convolver::new(plan),
        })
    }

    #[inline]
    pub fn plan(&self) -> &LcdtPlan<T> {
        self.conv.plan()
    }
    #[inline]
    pub fn convolver(&self) -> &Convolver<T> {
        &self.conv
    }

    pub fn wavelet(&self, spec: crate::wavelet::WaveletSpec) -> Result<Wavelet<T>> {
        Wavelet::new(spec, self.plan())
    }

    fn k1(&self) -> T {
        self.plan().ctx().k.value() + T::one()
    }

    fn stretches(&self, scales: &ScaleGrid<T>, stretch: bool) -> Vec<T> {
        scales
            .scales()
            .iter()
            .map(|&a| if stretch { stretch_for(a) } else { T::one() })
            .collect()
    }

    /// Phase increment per λ step of `e^{(i/2)(d/b)α²λ²}` over the band where
    /// `W(αλ)` is not negligible.
    fn check_scale(&self, alpha: T, s: T, psi: &Wavelet<T>) -> Result<()> {
        let grid = self.plan().freq();
        let db = self.plan().matrix().d_over_b().abs().as_f64();
        let (a, s) = (alpha.as_f64(), s.as_f64());
        let band = (grid.x_max().as_f64() / s).min(psi.spec().window.support() / a);
        let inc = db * a * a * band * grid.delta().as_f64() / s;
        if inc > MAX_PHASE_STEP {
            return Err(LcdtError::Resolution {
                measured: inc,
                bound: MAX_PHASE_STEP,
            });
        }
        Ok(())
    }

    /// `D̃f = e^{-(i/2)(d/b)λ²} D f` on the frequency grid.
    fn dechirped_spectrum(&self, f: &SampledSignal<T>) -> Result<Vec<Complex<T>>> {
        let df = self.plan().forward(f)?;
        let db = self.plan().matrix().d_over_b();
        Ok(df
            .grid()
            .nodes()
            .iter()
            .zip(df.values())
            .map(|(&l, v)| v * LcdtPlan::chirp(-db, l))
            .collect())
    }

    /// Base-grid values resampled on the grid compressed by `s`.
    fn compress(&self, values: &[Complex<T>], s: T) -> Vec<Complex<T>> {
        if s == T::one() {
            return values.to_vec();
        }
        let grid = self.plan().freq();
        let (x0, h) = (-grid.x_max(), grid.delta());
        grid.nodes()
            .iter()
            .map(|&l| {
                lagrange_uniform(values, x0, h, l / s, RESAMPLE_ORDER)
                    .unwrap_or(Complex::new(T::zero(), T::zero()))
            })
            .collect()
    }

    /// Compressed-grid values spread back to the base grid (zero outside).
    fn expand(&self, values: &[Complex<T>], s: T) -> Vec<Complex<T>> {
        if s == T::one() {
            return values.to_vec();
        }
        let grid = self.plan().freq();
        let (x0, h) = (-grid.x_max() / s, grid.delta() / s);
        grid.nodes()
            .iter()
            .map(|&l| {
                lagrange_uniform(values, x0, h, l, RESAMPLE_ORDER)
                    .unwrap_or(Complex::new(T::zero(), T::zero()))
            })
            .collect()
    }

    /// One row `Φ(α, s x_j)` from the dechirped spectrum of `f`.
    fn row(&self, dft: &[Complex<T>], psi: &Wavelet<T>, alpha: T, s: T) -> Vec<Complex<T>> {
        let plan = self.plan();
        let grid = plan.freq();
        let m = plan.matrix();
        let (ab, db) = (m.a_over_b(), m.d_over_b());
        let p = s.powf(-(T::lit(2.0) * grid.k().value() + T::lit(2.0)));
        let comp = self.compress(dft, s);
        let g: Vec<Complex<T>> = grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .zip(&comp)
            .map(|((&l, &w), v)| {
                let lc = l / s;
                v * LcdtPlan::chirp(db * alpha * alpha, lc) * psi.window(alpha * lc) * (w * p)
            })
            .collect();
        let pre = plan.forward_prefactor() * alpha.powf(self.k1());
        plan.square_kernel(&g, -T::one())
            .into_iter()
            .zip(plan.space().nodes())
            .map(|(y, &x)| y * LcdtPlan::chirp(ab, s * x) * pre)
            .collect()
    }

    fn transform(
        &self,
        f: &SampledSignal<T>,
        psi: &Wavelet<T>,
        scales: &ScaleGrid<T>,
        stretch: bool,
    ) -> Result<TimeScaleField<T>> {
        let st = self.stretches(scales, stretch);
        for (&a, &s) in scales.scales().iter().zip(&st) {
            self.check_scale(a, s, psi)?;
        }
        let dft = self.dechirped_spectrum(f)?;
        let values: Vec<Vec<Complex<T>>> = scales
            .scales()
            .par_iter()
            .zip(st.par_iter())
            .map(|(&a, &s)| self.row(&dft, psi, a, s))
            .collect();
        TimeScaleField::new(scales.clone(), self.plan().space().clone(), st, values)
    }

    /// Fast transform on stretched β grids.
    pub fn cwt(
        &self,
        f: &SampledSignal<T>,
        psi: &Wavelet<T>,
        scales: &ScaleGrid<T>,
    ) -> Result<TimeScaleField<T>> {
        self.transform(f, psi, scales, true)
    }

    /// Fast transform with every β row on the space grid itself.
    pub fn cwt_unstretched(
        &self,
        f: &SampledSignal<T>,
        psi: &Wavelet<T>,
        scales: &ScaleGrid<T>,
    ) -> Result<TimeScaleField<T>> {
        self.transform(f, psi, scales, false)
    }

    /// `(ib)^{-(k+1)} ⟨f, ψ^M_{α,β}⟩` by quadrature, with `ψ^M_α` from the
    /// dilation formula and `T^M_β` applied per β.
    pub fn cwt_direct(
        &self,
        f: &SampledSignal<T>,
        psi: &Wavelet<T>,
        scales: &ScaleGrid<T>,
        force: bool,
    ) -> Result<TimeScaleField<T>> {
        let plan = self.plan();
        let grid = plan.space().clone();
        if grid.len() > DIRECT_LIMIT && !force {
            return Err(LcdtError::Cost {
                what: "cwt_direct",
                n: grid.len(),
                limit: DIRECT_LIMIT,
            });
        }
        let ctx = *plan.ctx();
        let fw: Vec<Complex<T>> = f
            .values()
            .iter()
            .zip(grid.weights())
            .map(|(v, &w)| v * w)
            .collect();
        let pre = plan.forward_prefactor();
        let k1 = self.k1();
        let mut values = Vec::with_capacity(scales.len());
        for &alpha in scales.scales() {
            let d = psi.dilate(alpha, plan)?;
            let dd = plan.forward(&d)?;
            let scale = alpha.powf(k1);
            let row: Vec<Complex<T>> = grid
                .nodes()
                .par_iter()
                .map(|&beta| {
                    let member = plan.inverse_values(
                        dd.multiply(|l| crate::convolution::translation_symbol(&ctx, beta, l))
                            .values(),
                    );
                    let mut acc = CAccum::new();
                    for (m, v) in member.iter().zip(&fw) {
                        acc.add(v * m.conj());
                    }
                    acc.value() * scale * pre
                })
                .collect();
            values.push(row);
        }
        TimeScaleField::new(scales.clone(), grid, vec![T::one(); scales.len()], values)
    }

    /// Transform of the synthesis integral
    /// `∫∫ Φ(α,β) φ^M_{α,β} dν_k`, assembled per scale in the λ domain.
    pub fn synthesis_spectrum(
        &self,
        field: &TimeScaleField<T>,
        phi: &Wavelet<T>,
    ) -> Result<SpectralSignal<T>> {
        let plan = self.plan();
        if !field.grid().same_as(plan.space()) {
            return Err(LcdtError::GridMismatch("field is not on the plan's grid".into()));
        }
        let m = plan.matrix();
        let (ab, db) = (m.a_over_b(), m.d_over_b());
        let k1 = self.k1();
        let p2 = T::lit(2.0) * k1;
        let rows: Vec<Vec<Complex<T>>> = (0..field.scales().len())
            .into_par_iter()
            .map(|i| {
                let alpha = field.scales().scales()[i];
                let s = field.stretch()[i];
                let ps = s.powf(p2);
                let u: Vec<Complex<T>> = plan
                    .space()
                    .nodes()
                    .iter()
                    .zip(plan.space().weights())
                    .zip(&field.values()[i])
                    .map(|((&x, &w), v)| v * LcdtPlan::chirp(-ab, s * x) * (w * ps))
                    .collect();
                let z = plan.square_kernel(&u, T::one());
                let a: Vec<Complex<T>> = plan
                    .freq()
                    .nodes()
                    .iter()
                    .zip(z)
                    .map(|(&l, zj)| {
                        let lc = l / s;
                        zj * LcdtPlan::chirp(-db * (alpha * alpha - T::one()), lc)
                            * phi.window(alpha * lc)
                            * alpha.powf(k1)
                    })
                    .collect();
                let nu = field.scales().nu_weights()[i];
                self.expand(&a, s).into_iter().map(|v| v * nu).collect()
            })
            .collect();
        let n = plan.freq().len();
        let values = (0..n)
            .map(|j| {
                let mut acc = CAccum::new();
                for r in &rows {
                    acc.add(r[j]);
                }
                acc.value()
            })
            .collect();
        SpectralSignal::new(plan.freq().clone(), values, m)
    }

    /// `f = ((-ib)^{k+1} C_{ψ,φ})^{-1} ∫∫ Φ φ^M_{α,β} dν_k`.
    pub fn cwt_inverse(
        &self,
        field: &TimeScaleField<T>,
        phi: &Wavelet<T>,
        c_cross: Complex<T>,
    ) -> Result<SampledSignal<T>> {
        if !(c_cross.norm() > T::lit(1e-300)) || !c_cross.re.is_finite() {
            return Err(LcdtError::Degenerate("cross constant vanishes".into()));
        }
        let spec = self.synthesis_spectrum(field, phi)?;
        let factor = self.plan().inverse_prefactor() / c_cross;
        let scaled = spec.multiply(|_| factor);
        self.plan().inverse(&scaled)
    }

    /// `∫∫ |Φf|² dν_k` against `C_ψ ‖f‖²`.
    pub fn plancherel(
        &self,
        f: &SampledSignal<T>,
        psi: &Wavelet<T>,
        scales: &ScaleGrid<T>,
    ) -> Result<IdentityCheck<T>> {
        let nf = f.norm();
        if nf == T::zero() {
            return Err(LcdtError::Degenerate("zero signal".into()));
        }
        let field = self.cwt(f, psi, scales)?;
        let lhs = Complex::new(field.norm_sqr(), T::zero());
        let rhs = Complex::new(T::lit(psi.constant()) * nf * nf, T::zero());
        Ok(IdentityCheck {
            lhs,
            rhs,
            residual: (lhs - rhs).norm() / rhs.norm(),
        })
    }

    /// `∫∫ Φ_ψ f conj(Φ_φ g) dν_k` against `C_{ψ,φ} ⟨f, g⟩`, normalized by
    /// `|C_{ψ,φ}| ‖f‖ ‖g‖`.
    pub fn orthogonality(
        &self,
        f: &SampledSignal<T>,
        g: &SampledSignal<T>,
        psi: &Wavelet<T>,
        phi: &Wavelet<T>,
        c_cross: T,
        scales: &ScaleGrid<T>,
    ) -> Result<IdentityCheck<T>> {
        let (nf, ng) = (f.norm(), g.norm());
        if nf == T::zero() || ng == T::zero() {
            return Err(LcdtError::Degenerate("zero signal".into()));
        }
        let a = self.cwt(f, psi, scales)?;
        let b = self.cwt(g, phi, scales)?;
        let lhs = a.inner(&b)?;
        let rhs = crate::measure::mu_inner(f, g)? * c_cross;
        Ok(IdentityCheck {
            lhs,
            rhs,
            residual: (lhs - rhs).norm() / (c_cross.abs() * nf * ng),
        })
    }
}
