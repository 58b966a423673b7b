//! Wavelet windows, admissibility constants and the families `ψ^M_α`, `ψ^M_{α,β}`.
//!
//! A wavelet is specified by its transform `D^M_k ψ = W`, an even real window,
//! and materialized on the space grid by the inverse transform.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::convolution::Convolver;
use crate::error::{LcdtError, Result};
use crate::measure::SampledSignal;
use crate::quad::{cubic_uniform, PanelRule};
use crate::transform::{LcdtPlan, SpectralSignal};
use crate::Real;

pub use crate::cwt::TimeScaleField;

/// Limits of the `ln α` range used for admissibility integrals.
const LOG_ALPHA_RANGE: (f64, f64) = (-27.631_021_115_928_547, 27.631_021_115_928_547);

/// Even real window `W`, the transform of the wavelet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Window {
    /// `u² e^{-u²}`
    Hermite2,
    /// `u⁴ e^{-u²}`
    Hermite4,
    /// Samples of `W` on `u = j · u_max / (len - 1)`, zero beyond `u_max`.
    Table { u_max: f64, values: Vec<f64> },
}

impl Window {
    pub fn eval<T: Real>(&self, u: T) -> T {
        let u = u.abs();
        match self {
            Window::Hermite2 => u * u * (-u * u).exp(),
            Window::Hermite4 => {
                let u2 = u * u;
                u2 * u2 * (-u2).exp()
            }
            Window::Table { u_max, values } => {
                let uf = u.as_f64();
                if uf > *u_max {
                    return T::zero();
                }
                let h = u_max / (values.len() - 1) as f64;
                let cv: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
                T::lit(cubic_uniform(&cv, 0.0, h, uf).map_or(0.0, |c| c.re))
            }
        }
    }

    /// Closed-form `∫₀^∞ W(u)² du/u` where one is known.
    pub fn analytic_constant(&self) -> Option<f64> {
        match self {
            Window::Hermite2 => Some(0.125),
            Window::Hermite4 => Some(0.1875),
            Window::Table { .. } => None,
        }
    }

    /// Largest `u` at which the window exceeds `1e-15` of its peak.
    pub fn support(&self) -> f64 {
        match self {
            Window::Table { u_max, .. } => *u_max,
            Window::Hermite2 => 6.5,
            Window::Hermite4 => 7.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Window::Table { u_max, values } = self {
            if values.len() < 4 || !(*u_max > 0.0) || !u_max.is_finite() {
                return Err(LcdtError::param(
                    "window",
                    "table needs at least 4 samples and a positive finite u_max",
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(LcdtError::param("window", "table has non-finite samples"));
            }
            let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak == 0.0 {
                return Err(LcdtError::param("window", "table is identically zero"));
            }
            if values[0].abs() > 1e-12 * peak {
                return Err(LcdtError::param("window", "W(0) must vanish"));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Window::Hermite2 => "hermite2",
            Window::Hermite4 => "hermite4",
            Window::Table { .. } => "table",
        }
    }
}

/// Window plus its admissibility constant when known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub window: Window,
    pub analytic_c: Option<f64>,
}

impl WaveletSpec {
    pub fn new(window: Window) -> Result<Self> {
        window.validate()?;
        let analytic_c = window.analytic_constant();
        Ok(WaveletSpec { window, analytic_c })
    }

    pub fn hermite2() -> Self {
        Self::new(Window::Hermite2).expect("valid")
    }

    pub fn hermite4() -> Self {
        Self::new(Window::Hermite4).expect("valid")
    }
}

/// `∫₀^∞ W1(λα) W2(λα) dα/α` for a single `λ != 0`.
fn scale_integral(w1: &Window, w2: &Window, lambda: f64) -> f64 {
    let l = lambda.abs();
    let (lo, mut hi) = LOG_ALPHA_RANGE;
    // no contribution beyond the window support
    hi = hi.min((w1.support().min(w2.support()) / l).ln());
    if hi <= lo {
        return 0.0;
    }
    let rule = PanelRule::with_width(lo, hi, 0.25, 16);
    rule.integrate(|t| {
        let u = l * t.exp();
        w1.eval(u) * w2.eval(u)
    })
}

/// Admissibility constant with its per-`λ` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub value: f64,
    pub per_lambda: Vec<(f64, f64)>,
    /// Largest relative deviation of a per-`λ` value from the mean.
    pub max_rel_deviation: f64,
}

/// Default `λ` samples for the independence check.
pub const LAMBDA_SAMPLES: [f64; 4] = [0.3, 1.0, 3.0, -2.0];

/// Relative `λ`-dependence above which a window is rejected.
pub const LAMBDA_TOLERANCE: f64 = 1e-4;

fn constant_table(w1: &Window, w2: &Window, lambdas: &[f64]) -> Result<Admissibility> {
    w1.validate()?;
    w2.validate()?;
    if lambdas.is_empty() || lambdas.iter().any(|l| *l == 0.0 || !l.is_finite()) {
        return Err(LcdtError::param("lambda_samples", "need finite nonzero samples"));
    }
    let per_lambda: Vec<(f64, f64)> = lambdas
        .iter()
        .map(|&l| (l, scale_integral(w1, w2, l)))
        .collect();
    let value = per_lambda.iter().map(|p| p.1).sum::<f64>() / per_lambda.len() as f64;
    if !value.is_finite() {
        return Err(LcdtError::Degenerate("scale integral diverges".into()));
    }
    let max_rel_deviation = per_lambda
        .iter()
        .map(|p| (p.1 - value).abs() / value.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if max_rel_deviation > LAMBDA_TOLERANCE {
        return Err(LcdtError::Degenerate(format!(
            "scale integral depends on λ (relative spread {max_rel_deviation:e})"
        )));
    }
    Ok(Admissibility {
        value,
        per_lambda,
        max_rel_deviation,
    })
}

/// `C_ψ = ∫₀^∞ |W(λα)|² dα/α`.
pub fn admissibility(spec: &WaveletSpec, lambdas: &[f64]) -> Result<Admissibility> {
    let a = constant_table(&spec.window, &spec.window, lambdas)?;
    if !(a.value > 0.0) {
        return Err(LcdtError::Degenerate("admissibility constant vanishes".into()));
    }
    Ok(a)
}

/// `C_{ψ,φ} = ∫₀^∞ W1(λα) conj(W2(λα)) dα/α`; real for real windows.
pub fn cross_admissibility(
    psi: &WaveletSpec,
    phi: &WaveletSpec,
    lambdas: &[f64],
) -> Result<Admissibility> {
    let a = constant_table(&psi.window, &phi.window, lambdas)?;
    if a.value.abs() < 1e-300 {
        return Err(LcdtError::Degenerate("cross admissibility constant vanishes".into()));
    }
    Ok(a)
}

/// Wavelet materialized on a plan's grids.
#[derive(Debug, Clone)]
pub struct Wavelet<T> {
    spec: WaveletSpec,
    samples: SampledSignal<T>,
    spectral: SpectralSignal<T>,
    /// `ψ(x) e^{(i/2)(a/b)x²}`, smooth and chirp-free.
    dechirped: Vec<Complex<T>>,
    constant: f64,
}

impl<T: Real> Wavelet<T> {
    pub fn new(spec: WaveletSpec, plan: &LcdtPlan<T>) -> Result<Self> {
        let constant = admissibility(&spec, &LAMBDA_SAMPLES)?.value;
        let w = spec.window.clone();
        let spectral = SpectralSignal::from_fn(plan.freq().clone(), plan.matrix(), |l| {
            Complex::new(w.eval(l), T::zero())
        });
        let samples = plan.inverse(&spectral)?;
        let ab = plan.matrix().a_over_b();
        let dechirped = samples
            .grid()
            .nodes()
            .iter()
            .zip(samples.values())
            .map(|(&x, v)| v * LcdtPlan::chirp(ab, x))
            .collect();
        Ok(Wavelet {
            spec,
            samples,
            spectral,
            dechirped,
            constant,
        })
    }

    #[inline]
    pub fn spec(&self) -> &WaveletSpec {
        &self.spec
    }
    #[inline]
    pub fn samples(&self) -> &SampledSignal<T> {
        &self.samples
    }
    #[inline]
    pub fn spectral(&self) -> &SpectralSignal<T> {
        &self.spectral
    }
    /// Numerical admissibility constant.
    #[inline]
    pub fn constant(&self) -> f64 {
        self.constant
    }

    #[inline]
    pub fn window(&self, u: T) -> T {
        self.spec.window.eval(u)
    }

    /// `ψ^M_α(x) = α^{-(2k+2)} e^{-(i/2)(a/b)(1 - α^{-2})x²} ψ(x/α)`, by cubic
    /// interpolation of the chirp-free part of `ψ`.
    pub fn dilate(&self, alpha: T, plan: &LcdtPlan<T>) -> Result<SampledSignal<T>> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(LcdtError::param("alpha", format!("scale {alpha} must be positive")));
        }
        let grid = self.samples.grid().clone();
        if alpha < T::one() {
            // points mapped outside the grid are dropped; require decay there
            let peak = self.dechirped.iter().fold(T::zero(), |m, v| m.max(v.norm()));
            let edge = self.dechirped[0].norm().max(self.dechirped[grid.len() - 1].norm());
            if edge > T::lit(1e-4) * peak {
                return Err(LcdtError::Degenerate(format!(
                    "wavelet has not decayed at the grid edge (relative {:e})",
                    (edge / peak).as_f64()
                )));
            }
        }
        let ab = plan.matrix().a_over_b();
        let p = alpha.powf(-(T::lit(2.0) * grid.k().value() + T::lit(2.0)));
        let (x0, h) = (-grid.x_max(), grid.delta());
        let values = grid
            .nodes()
            .iter()
            .map(|&x| {
                let chi = cubic_uniform(&self.dechirped, x0, h, x / alpha)
                    .unwrap_or(Complex::new(T::zero(), T::zero()));
                chi * LcdtPlan::chirp(-ab, x) * p
            })
            .collect();
        SampledSignal::new(grid, values)
    }

    /// Transform of `ψ^M_α` predicted in closed form: `e^{(i/2)(d/b)λ²(1-α²)} W(αλ)`.
    pub fn dilate_spectrum(&self, alpha: T, lambda: T, plan: &LcdtPlan<T>) -> Complex<T> {
        let db = plan.matrix().d_over_b();
        LcdtPlan::chirp(db * (T::one() - alpha * alpha), lambda) * self.window(alpha * lambda)
    }

    /// `ψ^M_{α,β} = α^{k+1} T^M_β ψ^M_α`, translation done spectrally.
    pub fn family_member(
        &self,
        alpha: T,
        beta: T,
        conv: &Convolver<T>,
    ) -> Result<SampledSignal<T>> {
        let d = self.dilate(alpha, conv.plan())?;
        let k1 = self.samples.grid().k().value() + T::one();
        Ok(conv.translate(&d, beta)?.scale(Complex::new(alpha.powf(k1), T::zero())))
    }

    /// Transform of `ψ^M_{α,β}` in closed form:
    /// `α^{k+1} e^{-(i/2)((a/b)β² + (d/b)((λα)² - λ²))} E_k(iλ/b, β) W(λα)`.
    pub fn family_spectrum(&self, alpha: T, beta: T, lambda: T, plan: &LcdtPlan<T>) -> Complex<T> {
        let ctx = plan.ctx();
        let k1 = ctx.k.value() + T::one();
        let db = ctx.m.d_over_b();
        let la = lambda * alpha;
        let phase = -T::lit(0.5) * (ctx.m.a_over_b() * beta * beta + db * (la * la - lambda * lambda));
        Complex::from_polar(alpha.powf(k1), phase)
            * crate::special::dunkl_kernel(ctx.k.value(), lambda / ctx.m.b, beta)
            * self.window(la)
    }
}
