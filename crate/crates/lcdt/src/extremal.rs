//! Tikhonov extremal functions for the wavelet transform and the LCDT.
//!
//! With `w(λ) = (1+λ²)^s`:
//! `D f*_{ρ,g} = D(Φ†g) / (ρ w + C_ψ)`, which for `g = Φ f` is `C_ψ/(ρ w + C_ψ) D f`;
//! `D h*_{ρ,g} = g / (1 + ρ w)`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::cwt::{Cwt, TimeScaleField};
use crate::error::{LcdtError, Result};
use crate::measure::SampledSignal;
use crate::quad::CAccum;
use crate::sobolev::{check_kernel_order, spectral_norm, weight, SobolevParams};
use crate::special::dunkl_kernel;
use crate::transform::{LcdtPlan, SpectralSignal};
use crate::wavelet::Wavelet;
use crate::Real;

/// Largest grid accepted by the literal `Q` evaluation unless forced.
pub const DIRECT_LIMIT: usize = 513;

/// `C/(ρ(1+λ²)^s + C)`.
pub fn cwt_filter<T: Real>(params: &SobolevParams, c_psi: f64, lambda: T) -> T {
    let c = T::lit(c_psi);
    c / (T::lit(params.rho) * weight(params.s, lambda) + c)
}

/// `1/(1 + ρ(1+λ²)^s)`.
pub fn lcdt_filter<T: Real>(params: &SobolevParams, lambda: T) -> T {
    T::one() / (T::one() + T::lit(params.rho) * weight(params.s, lambda))
}

fn check(params: &SobolevParams, plan: &LcdtPlan<impl Real>) -> Result<()> {
    check_kernel_order(params.s, plan.ctx().k.value().as_f64())
}

/// `f*_{ρ,g}` from arbitrary coefficients: per-scale spectral assembly of
/// `Φ†g` followed by the resolvent `1/(ρ w + C_ψ)`.
pub fn extremal_cwt<T: Real>(
    g: &TimeScaleField<T>,
    params: &SobolevParams,
    psi: &Wavelet<T>,
    cwt: &Cwt<T>,
) -> Result<SampledSignal<T>> {
    let plan = cwt.plan();
    check(params, plan)?;
    let syn = cwt.synthesis_spectrum(g, psi)?;
    let pre = plan.inverse_prefactor();
    let (rho, c, s) = (T::lit(params.rho), T::lit(psi.constant()), params.s);
    plan.inverse(&syn.multiply(|l| pre / (rho * weight(s, l) + c)))
}

/// `f*_{ρ,g}(y) = Σ_α Σ_β g(α,β) Q_{ρ,ψ}(α,β,y) ν_α w_β` with
/// `Q = (-ib)^{-(2k+2)} α^{k+1} e^{-(i/2)(a/b)(β²+y²)}
///      ∫ e^{-(i/2)(d/b)α²λ²} E_k(iλy/b) E_k(iλβ/b) W(λα) / (ρ w + C_ψ) dμ_k`,
/// by direct quadrature.
pub fn extremal_cwt_direct<T: Real>(
    g: &TimeScaleField<T>,
    params: &SobolevParams,
    psi: &Wavelet<T>,
    cwt: &Cwt<T>,
    force: bool,
) -> Result<SampledSignal<T>> {
    let plan = cwt.plan();
    check(params, plan)?;
    let grid = plan.space().clone();
    let n = grid.len();
    if n > DIRECT_LIMIT && !force {
        return Err(LcdtError::Cost {
            what: "extremal_cwt_direct",
            n,
            limit: DIRECT_LIMIT,
        });
    }
    if !g.grid().same_as(&grid) {
        return Err(LcdtError::GridMismatch("field is not on the plan's grid".into()));
    }
    let ctx = *plan.ctx();
    let k = ctx.k.value();
    let (ab, db, b) = (ctx.m.a_over_b(), ctx.m.d_over_b(), ctx.m.b);
    let half = T::lit(0.5);
    let k1 = k + T::one();
    let pre = plan.inverse_prefactor() * plan.inverse_prefactor();
    let freq = plan.freq();
    let (rho, c, s) = (T::lit(params.rho), T::lit(psi.constant()), params.s);
    let resolvent: Vec<T> = freq
        .nodes()
        .iter()
        .zip(freq.weights())
        .map(|(&l, &w)| w / (rho * weight(s, l) + c))
        .collect();
    // e(y, λ) = E_k(iλy/b)
    let ey: Vec<Vec<Complex<T>>> = grid
        .nodes()
        .par_iter()
        .map(|&y| freq.nodes().iter().map(|&l| dunkl_kernel(k, l / b, y)).collect())
        .collect();
    let scales = g.scales();
    let rows: Vec<Vec<Complex<T>>> = (0..scales.len())
        .into_par_iter()
        .map(|i| {
            let alpha = scales.scales()[i];
            // G(λ) = Σ_β g w_β e^{-(i/2)(a/b)β²} E_k(iλβ/b)
            let mut gl = vec![Complex::new(T::zero(), T::zero()); freq.len()];
            for j in 0..n {
                let beta = g.beta(i, j);
                let coef = g.values()[i][j]
                    * g.beta_weight(i, j)
                    * Complex::from_polar(T::one(), -half * ab * beta * beta);
                if coef == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                for (l, &lam) in freq.nodes().iter().enumerate() {
                    gl[l] += coef * dunkl_kernel(k, lam / b, beta);
                }
            }
            let cl: Vec<Complex<T>> = freq
                .nodes()
                .iter()
                .zip(&resolvent)
                .zip(&gl)
                .map(|((&l, &r), &gv)| {
                    Complex::from_polar(r * psi.window(l * alpha), -half * db * alpha * alpha * l * l)
                        * gv
                })
                .collect();
            let scale = pre * alpha.powf(k1) * scales.nu_weights()[i];
            ey.iter()
                .map(|row| {
                    let mut acc = CAccum::new();
                    for (e, v) in row.iter().zip(&cl) {
                        acc.add(e * v);
                    }
                    acc.value() * scale
                })
                .collect()
        })
        .collect();
    let values = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(m, &y)| {
            let mut acc = CAccum::new();
            for r in &rows {
                acc.add(r[m]);
            }
            acc.value() * Complex::from_polar(T::one(), -half * ab * y * y)
        })
        .collect();
    SampledSignal::new(grid, values)
}

/// `f*_{ρ,Φf} = D^{-1}(C_ψ/(ρ w + C_ψ) D f)`.
pub fn extremal_cwt_spectral<T: Real>(
    f: &SampledSignal<T>,
    params: &SobolevParams,
    c_psi: f64,
    plan: &LcdtPlan<T>,
) -> Result<SampledSignal<T>> {
    check(params, plan)?;
    let df = plan.forward(f)?;
    plan.inverse(&df.multiply(|l| Complex::new(cwt_filter(params, c_psi, l), T::zero())))
}

/// `h*_{ρ,g} = D^{-1}(g/(1 + ρ w))`.
pub fn extremal_lcdt<T: Real>(
    g: &SpectralSignal<T>,
    params: &SobolevParams,
    plan: &LcdtPlan<T>,
) -> Result<SampledSignal<T>> {
    check(params, plan)?;
    plan.inverse(&g.multiply(|l| Complex::new(lcdt_filter(params, l), T::zero())))
}

/// `h*_{ρ,g}(y) = ∫ g(λ) E^{M⁻¹}(y,λ)/(1 + ρ w(λ)) dμ_{k,-b}(λ)`, pointwise.
pub fn extremal_lcdt_integral<T: Real>(
    g: &SpectralSignal<T>,
    params: &SobolevParams,
    plan: &LcdtPlan<T>,
) -> Result<SampledSignal<T>> {
    check(params, plan)?;
    if !g.grid().same_as(plan.freq()) {
        return Err(LcdtError::GridMismatch("g is not on the frequency grid".into()));
    }
    let ctx = *plan.ctx();
    let pre = plan.inverse_prefactor();
    let freq = plan.freq();
    let gw: Vec<Complex<T>> = freq
        .nodes()
        .iter()
        .zip(freq.weights())
        .zip(g.values())
        .map(|((&l, &w), &v)| v * (w * lcdt_filter(params, l)))
        .collect();
    let values = plan
        .space()
        .nodes()
        .par_iter()
        .map(|&y| {
            let mut acc = CAccum::new();
            for (&l, v) in freq.nodes().iter().zip(&gw) {
                acc.add(ctx.kernel_inv(y, l) * v);
            }
            acc.value() * pre
        })
        .collect();
    SampledSignal::new(plan.space().clone(), values)
}

/// `(D^M)* g = D^{-1}((1+λ²)^{-s} g)`, the adjoint from `L²_k` into `W^s`.
pub fn adjoint_lcdt<T: Real>(
    g: &SpectralSignal<T>,
    s: f64,
    plan: &LcdtPlan<T>,
) -> Result<SampledSignal<T>> {
    plan.inverse(&g.multiply(|l| Complex::new(T::one() / weight(s, l), T::zero())))
}

/// `ρ‖u‖²_{W^s} + ‖Φ(f - u)‖²`, with `‖Φ v‖² = C_ψ ‖v‖²`.
pub fn cwt_objective<T: Real>(
    u: &SampledSignal<T>,
    f: &SampledSignal<T>,
    params: &SobolevParams,
    c_psi: f64,
    plan: &LcdtPlan<T>,
) -> Result<T> {
    let du = plan.forward(u)?;
    let dr = plan.forward(&f.sub(u)?)?;
    let r = dr.norm();
    Ok(T::lit(params.rho) * spectral_norm(&du, params.s).powi(2) + T::lit(c_psi) * r * r)
}

/// `ρ‖u‖²_{W^s} + ‖g - D u‖²`.
pub fn lcdt_objective<T: Real>(
    u: &SampledSignal<T>,
    g: &SpectralSignal<T>,
    params: &SobolevParams,
    plan: &LcdtPlan<T>,
) -> Result<T> {
    let du = plan.forward(u)?;
    let diff = SpectralSignal::new(
        du.grid().clone(),
        g.values().iter().zip(du.values()).map(|(a, b)| a - b).collect(),
        du.matrix(),
    )?;
    let r = diff.norm();
    Ok(T::lit(params.rho) * spectral_norm(&du, params.s).powi(2) + r * r)
}
