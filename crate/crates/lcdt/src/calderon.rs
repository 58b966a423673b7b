//! Truncated Calderón reproducing formula `f^{ε,δ}`.
//!
//! On the transform side `D(f^{ε,δ}) = K_{ε,δ} D f` with
//! `K_{ε,δ}(λ) = C_{ψ,φ}^{-1} ∫_ε^δ conj(W1(λα)) W2(λα) dα/α`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::cwt::Cwt;
use crate::error::{LcdtError, Result};
use crate::measure::{SampledSignal, ScaleGrid};
use crate::quad::PanelRule;
use crate::wavelet::{cross_admissibility, Wavelet, WaveletSpec, LAMBDA_SAMPLES};
use crate::Real;

/// Largest grid accepted by the direct reconstruction unless forced.
pub const DIRECT_LIMIT: usize = 513;

/// Scale window `0 < ε < δ < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalderonWindow {
    epsilon: f64,
    delta: f64,
}

impl CalderonWindow {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !(delta > epsilon) || !delta.is_finite() {
            return Err(LcdtError::param(
                "window",
                format!("need 0 < epsilon < delta < inf, got ({epsilon}, {delta})"),
            ));
        }
        Ok(CalderonWindow { epsilon, delta })
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `self` contains `inner`.
    pub fn contains(&self, inner: &CalderonWindow) -> bool {
        self.epsilon <= inner.epsilon && self.delta >= inner.delta
    }
}

/// One multiplier value. `at_origin` marks `λ = 0`, where the value is set to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Multiplier {
    pub value: Complex<f64>,
    pub at_origin: bool,
}

/// Wavelet pair with its cross constant.
#[derive(Debug, Clone)]
pub struct Pair {
    pub psi: WaveletSpec,
    pub phi: WaveletSpec,
    pub c_cross: f64,
}

impl Pair {
    pub fn new(psi: WaveletSpec, phi: WaveletSpec) -> Result<Self> {
        let c_cross = cross_admissibility(&psi, &phi, &LAMBDA_SAMPLES)?.value;
        Ok(Pair { psi, phi, c_cross })
    }

    pub fn single(psi: WaveletSpec) -> Result<Self> {
        Self::new(psi.clone(), psi)
    }

    /// `sqrt(C_ψ C_φ) / |C_{ψ,φ}|`.
    pub fn multiplier_bound(&self) -> Result<f64> {
        let a = cross_admissibility(&self.psi, &self.psi, &LAMBDA_SAMPLES)?.value;
        let b = cross_admissibility(&self.phi, &self.phi, &LAMBDA_SAMPLES)?.value;
        Ok((a * b).sqrt() / self.c_cross.abs())
    }

    /// `K_{ε,δ}(λ)`, with the panel rule of the admissibility integral in `ln α`.
    pub fn multiplier(&self, win: &CalderonWindow, lambda: f64) -> Multiplier {
        if lambda == 0.0 {
            return Multiplier {
                value: Complex::new(0.0, 0.0),
                at_origin: true,
            };
        }
        let (w1, w2) = (&self.psi.window, &self.phi.window);
        let l = lambda.abs();
        let lo = win.epsilon.ln();
        let hi = win
            .delta
            .ln()
            .min((w1.support().min(w2.support()) / l).ln());
        let value = if hi <= lo {
            0.0
        } else {
            PanelRule::with_width(lo, hi, 0.25, 16).integrate(|t| {
                let u = l * t.exp();
                w1.eval(u) * w2.eval(u)
            }) / self.c_cross
        };
        Multiplier {
            value: Complex::new(value, 0.0),
            at_origin: false,
        }
    }
}

pub fn k_multiplier(
    psi: &WaveletSpec,
    phi: &WaveletSpec,
    win: &CalderonWindow,
    lambda: f64,
) -> Result<Multiplier> {
    Ok(Pair::new(psi.clone(), phi.clone())?.multiplier(win, lambda))
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub delta: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
}

impl Sweep {
    pub fn non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].rel_error <= w[0].rel_error)
    }
}

/// Reconstruction engine over a CWT engine.
#[derive(Debug, Clone)]
pub struct Calderon<T> {
    cwt: Cwt<T>,
}

impl<T: Real> Calderon<T> {
    pub fn new(cwt: Cwt<T>) -> Self {
        Calderon { cwt }
    }

    #[inline]
    pub fn cwt(&self) -> &Cwt<T> {
        &self.cwt
    }

    /// `K_{ε,δ}` on the frequency grid, with the number of `λ = 0` nodes.
    pub fn multiplier_table(&self, pair: &Pair, win: &CalderonWindow) -> (Vec<Complex<T>>, usize) {
        let m: Vec<Multiplier> = self
            .cwt
            .plan()
            .freq()
            .nodes()
            .par_iter()
            .map(|l| pair.multiplier(win, l.as_f64()))
            .collect();
        let origin = m.iter().filter(|v| v.at_origin).count();
        let values = m
            .into_iter()
            .map(|v| Complex::new(T::lit(v.value.re), T::lit(v.value.im)))
            .collect();
        (values, origin)
    }

    /// `f^{ε,δ} = D^{-1}(K_{ε,δ} D f)`.
    pub fn reconstruct_spectral(
        &self,
        f: &SampledSignal<T>,
        pair: &Pair,
        win: &CalderonWindow,
    ) -> Result<SampledSignal<T>> {
        let plan = self.cwt.plan();
        let df = plan.forward(f)?;
        let (k, _) = self.multiplier_table(pair, win);
        let values = df.values().iter().zip(&k).map(|(a, b)| a * b).collect();
        plan.inverse(&crate::transform::SpectralSignal::new(
            df.grid().clone(),
            values,
            df.matrix(),
        )?)
    }

    /// Literal double sum `Σ_α Σ_β Φ_ψ f(α,β) φ_{α,β} ν_α w_β` over `m`
    /// log-spaced scales in `[ε, δ]`, with `Φ_ψ f` by quadrature.
    pub fn reconstruct_direct(
        &self,
        f: &SampledSignal<T>,
        pair: &Pair,
        win: &CalderonWindow,
        m: usize,
        force: bool,
    ) -> Result<SampledSignal<T>> {
        let plan = self.cwt.plan();
        let grid = plan.space().clone();
        if grid.len() > DIRECT_LIMIT && !force {
            return Err(LcdtError::Cost {
                what: "reconstruct_direct",
                n: grid.len(),
                limit: DIRECT_LIMIT,
            });
        }
        let psi = Wavelet::new(pair.psi.clone(), plan)?;
        let phi = Wavelet::new(pair.phi.clone(), plan)?;
        let scales = ScaleGrid::new(grid.k(), T::lit(win.epsilon), T::lit(win.delta), m)?;
        let field = self.cwt.cwt_direct(f, &psi, &scales, true)?;
        let conv = self.cwt.convolver();
        let n = grid.len();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (i, &alpha) in scales.scales().iter().enumerate() {
            let nu = scales.nu_weights()[i];
            let row: Vec<Vec<Complex<T>>> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let c = field.values()[i][j] * (field.beta_weight(i, j) * nu);
                    phi.family_member(alpha, field.beta(i, j), conv)
                        .map(|g| g.values().iter().map(|v| v * c).collect())
                })
                .collect::<Result<_>>()?;
            for r in row {
                for (o, v) in out.iter_mut().zip(r) {
                    *o += v;
                }
            }
        }
        let factor = plan.inverse_prefactor() / Complex::new(T::lit(pair.c_cross), T::zero());
        SampledSignal::new(grid, out.into_iter().map(|v| v * factor).collect())
    }

    /// Relative `L²` error of `f^{ε,δ}` along nested windows.
    pub fn convergence_sweep(
        &self,
        f: &SampledSignal<T>,
        pair: &Pair,
        windows: &[CalderonWindow],
    ) -> Result<Sweep> {
        if windows.is_empty() {
            return Err(LcdtError::param("windows", "need at least one window"));
        }
        if windows.windows(2).any(|w| !w[1].contains(&w[0])) {
            return Err(LcdtError::param("windows", "windows must be nested and widening"));
        }
        let rows = windows
            .par_iter()
            .map(|win| {
                let rec = self.reconstruct_spectral(f, pair, win)?;
                Ok(SweepRow {
                    epsilon: win.epsilon,
                    delta: win.delta,
                    rel_error: rec.rel_error(f)?.as_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sweep { rows })
    }
}
