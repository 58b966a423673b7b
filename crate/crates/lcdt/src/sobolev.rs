//! Sobolev spaces `W^s_{k,M}`, the constant `C_s` and the reproducing kernels
//! `K_s` and `R^M_{ρ,ψ}`.
//!
//! Kernel sections are given by their transforms,
//! `D K_s(·,y)(λ) = (ib)^{-(k+1)} E^M(λ,y) (1+λ²)^{-s}` and
//! `D R(·,y)(λ) = (ib)^{-(k+1)} E^M(λ,y) / (ρ(1+λ²)^s + C_ψ)`.
//! Pointwise values are λ-integrals with an asymptotic tail.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LcdtError, Result};
use crate::measure::{Multiplicity, SampledSignal};
use crate::quad::{lagrange_uniform, PanelRule};
use crate::special::{dunkl_kernel, gamma, KernelContext};
use crate::transform::{LcdtPlan, SpectralSignal};
use crate::Real;

type C64 = Complex<f64>;

/// Smoothness order and regularization weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevParams {
    pub s: f64,
    pub rho: f64,
}

impl SobolevParams {
    pub fn new(s: f64, rho: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(LcdtError::param("s", "smoothness must be finite"));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(LcdtError::param("rho", format!("rho = {rho} must be positive")));
        }
        Ok(SobolevParams { s, rho })
    }
}

/// Kernels need `∫ (1+λ²)^{-s} dμ_k < ∞`, i.e. `s > k + 1`.
pub fn check_kernel_order(s: f64, k: f64) -> Result<()> {
    if !(s > k + 1.0) || !s.is_finite() {
        return Err(LcdtError::param(
            "s",
            format!("kernel needs s > k + 1 = {}, got {s}", k + 1.0),
        ));
    }
    Ok(())
}

/// `(1+λ²)^s`.
#[inline]
pub fn weight<T: Real>(s: f64, lambda: T) -> T {
    (T::one() + lambda * lambda).powf(T::lit(s))
}

/// `∫ (1+λ²)^s D f conj(D g) dμ_k` on the frequency grid.
pub fn spectral_inner<T: Real>(
    df: &SpectralSignal<T>,
    dg: &SpectralSignal<T>,
    s: f64,
) -> Result<Complex<T>> {
    df.multiply(|l| Complex::new(weight(s, l), T::zero())).inner(dg)
}

pub fn spectral_norm<T: Real>(df: &SpectralSignal<T>, s: f64) -> T {
    df.grid()
        .integrate(
            df.grid()
                .nodes()
                .iter()
                .zip(df.values())
                .map(|(&l, v)| weight(s, l) * v.norm_sqr()),
        )
        .max(T::zero())
        .sqrt()
}

pub fn sobolev_inner<T: Real>(
    f: &SampledSignal<T>,
    g: &SampledSignal<T>,
    s: f64,
    plan: &LcdtPlan<T>,
) -> Result<Complex<T>> {
    spectral_inner(&plan.forward(f)?, &plan.forward(g)?, s)
}

pub fn sobolev_norm<T: Real>(f: &SampledSignal<T>, s: f64, plan: &LcdtPlan<T>) -> Result<T> {
    Ok(spectral_norm(&plan.forward(f)?, s))
}

/// `C_s = (|b|^{-(2k+2)} ∫ (1+λ²)^{-s} dμ_k)^{1/2}`: panels in `ln λ` up to
/// `L = 1e3` plus the binomial series of the tail.
pub fn constant_cs(s: f64, k: f64, b: f64) -> Result<f64> {
    check_kernel_order(s, k)?;
    if !(b != 0.0) || !b.is_finite() {
        return Err(LcdtError::param("b", "b must be finite and nonzero"));
    }
    let e = 2.0 * k + 2.0;
    let l: f64 = 1e3;
    let head = PanelRule::with_width(-60.0, l.ln(), 0.25, 16)
        .integrate(|t| (e * t).exp() * (1.0 + (2.0 * t).exp()).powf(-s));
    // (1+λ²)^{-s} = λ^{-2s} Σ_j binom(-s, j) λ^{-2j}
    let mut tail = 0.0;
    let mut c = 1.0;
    for j in 0..40 {
        let p = 2.0 * s + 2.0 * j as f64 - e;
        let term = c * l.powf(-p) / p;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
        c *= -(s + j as f64) / (j as f64 + 1.0);
    }
    let norm = 2f64.powf(k + 1.0) * gamma(k + 1.0);
    Ok((2.0 * (head + tail) / norm / b.abs().powf(e)).sqrt())
}

/// Radial weight of a kernel, as a function of `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelKind {
    /// `(1+λ²)^{-s}`
    Ks { s: f64 },
    /// `1 / (ρ(1+λ²)^s + c)`
    Rrho { s: f64, rho: f64, c: f64 },
}

impl KernelKind {
    fn eval(&self, lambda: C64) -> C64 {
        let w = (C64::new(1.0, 0.0) + lambda * lambda).powf(self.s());
        match *self {
            KernelKind::Ks { .. } => w.inv(),
            KernelKind::Rrho { rho, c, .. } => (w * rho + c).inv(),
        }
    }

    pub fn s(&self) -> f64 {
        match *self {
            KernelKind::Ks { s } | KernelKind::Rrho { s, .. } => s,
        }
    }

    /// Spectral multiplier at real `λ`.
    pub fn multiplier<T: Real>(&self, lambda: T) -> T {
        T::lit(self.eval(C64::new(lambda.as_f64(), 0.0)).re)
    }

    /// Radius beyond which the weight is analytic in the first quadrant.
    fn analytic_radius(&self) -> f64 {
        match *self {
            KernelKind::Ks { .. } => 0.0,
            KernelKind::Rrho { s, rho, c } => 2.0 * (1.0 + (c / rho).powf(1.0 / s)).sqrt(),
        }
    }
}

/// `A = Γ(k+1) 2^k sqrt(2/π)`: `E_k(iz) ~ A |z|^{-(k+1/2)} e^{i(z - sgn(z)(k/2+1/4)π)}`.
fn asymptotic_amplitude(k: f64) -> f64 {
    gamma(k + 1.0) * 2f64.powf(k) * (2.0 / std::f64::consts::PI).sqrt()
}

/// `∫_P^∞ h(u) e^{iωu} du` for `ω > 0`, on the ray `u = P + iv/ω`.
fn ray_integral(h: &dyn Fn(C64) -> C64, p: f64, omega: f64) -> C64 {
    let rule = PanelRule::with_width(0.0, 50.0, 0.5, 16);
    let mut acc = C64::new(0.0, 0.0);
    for (&v, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += h(C64::new(p, v / omega)) * ((-v).exp() * w);
    }
    C64::i() / omega * C64::from_polar(1.0, omega * p) * acc
}

/// `∫_U^∞ h(u) e^{iωu} du`, `h` real on the real axis.
fn tail_integral(h: &dyn Fn(C64) -> C64, u: f64, omega: f64) -> C64 {
    if omega == 0.0 {
        // u = U/t
        let rule = PanelRule::graded(1.0, 40, 16);
        let mut acc = 0.0;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            acc += h(C64::new(u / t, 0.0)).re * u / (t * t) * w;
        }
        return C64::new(acc, 0.0);
    }
    let w = omega.abs();
    let start = u.max(4.0 / w);
    let mut j = ray_integral(h, start, w);
    if start > u {
        let rule = PanelRule::with_width(u.ln(), start.ln(), 0.1, 16);
        for (&t, &q) in rule.nodes.iter().zip(&rule.weights) {
            let x = t.exp();
            j += h(C64::new(x, 0.0)) * C64::from_polar(x * q, w * x);
        }
    }
    if omega < 0.0 {
        j.conj()
    } else {
        j
    }
}

/// `2 ∫_0^∞ Re[E_k(iux) E_k(-iuy)] w(|b|u) dμ_k(u)`.
fn radial_integral(k: f64, x: f64, y: f64, b: f64, kind: &KernelKind) -> f64 {
    let norm = 2f64.powf(k + 1.0) * gamma(k + 1.0);
    let e = 2.0 * k + 1.0;
    let bb = b.abs();
    let wt = |u: C64| kind.eval(u * bb);
    let nonzero: Vec<f64> = [x, y].iter().copied().filter(|v| *v != 0.0).collect();
    let small = nonzero.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let mut cut = 100f64.max(kind.analytic_radius() / bb);
    if small.is_finite() {
        cut = cut.max((30.0 / small).min(2e4));
    }
    let h = (1.5 / (x.abs() + y.abs()).max(1e-300)).min(0.5);
    let f = |u: f64| {
        let p = dunkl_kernel(k, u, x) * dunkl_kernel(k, -u, y);
        p.re * wt(C64::new(u, 0.0)).re * u.powf(e)
    };
    let head = PanelRule::graded(h, 12, 16).integrate(f) + PanelRule::with_width(h, cut, h, 16).integrate(f);

    let a = asymptotic_amplitude(k);
    let phi = (0.5 * k + 0.25) * std::f64::consts::PI;
    let m = nonzero.len() as f64;
    let amp = nonzero
        .iter()
        .fold(1.0, |acc, v| acc * a * v.abs().powf(-(k + 0.5)));
    let q = e - m * (k + 0.5);
    let (omega, dphi) = match (x != 0.0, y != 0.0) {
        (true, true) => (x - y, (x.signum() - y.signum()) * phi),
        (true, false) => (x, x.signum() * phi),
        (false, true) => (-y, -y.signum() * phi),
        (false, false) => (0.0, 0.0),
    };
    let ht = |u: C64| wt(u) * u.powf(q) * amp;
    let tail = (C64::from_polar(1.0, -dphi) * tail_integral(&ht, cut, omega)).re;
    2.0 * (head + tail) / norm
}

/// Pointwise kernel value `|b|^{-(2k+2)} ∫ conj(E^M(λ,x)) E^M(λ,y) w(λ) dμ_k(λ)`.
pub fn kernel_value(x: f64, y: f64, kind: &KernelKind, ctx: &KernelContext<f64>) -> Result<C64> {
    let k = ctx.k.value();
    check_kernel_order(kind.s(), k)?;
    if !x.is_finite() || !y.is_finite() {
        return Err(LcdtError::param("x", "kernel nodes must be finite"));
    }
    let core = radial_integral(k, x, y, ctx.m.b, kind);
    Ok(C64::from_polar(core, 0.5 * ctx.m.a_over_b() * (y * y - x * x)))
}

/// `K_s(x, y)`, the reproducing kernel of `W^s_{k,M}`.
pub fn kernel_ks(x: f64, y: f64, s: f64, ctx: &KernelContext<f64>) -> Result<C64> {
    kernel_value(x, y, &KernelKind::Ks { s }, ctx)
}

/// `R^M_{ρ,ψ}(x, y)` for a wavelet with admissibility constant `c_psi`.
pub fn kernel_rrho(
    x: f64,
    y: f64,
    params: &SobolevParams,
    c_psi: f64,
    ctx: &KernelContext<f64>,
) -> Result<C64> {
    kernel_value(
        x,
        y,
        &KernelKind::Rrho {
            s: params.s,
            rho: params.rho,
            c: c_psi,
        },
        ctx,
    )
}

/// Kernel values on a product of node sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTable {
    pub kind: KernelKind,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `values[i][j] = kernel(xs[i], ys[j])`
    pub values: Vec<Vec<(f64, f64)>>,
}

impl KernelTable {
    pub fn new(xs: &[f64], ys: &[f64], kind: KernelKind, ctx: &KernelContext<f64>) -> Result<Self> {
        check_kernel_order(kind.s(), ctx.k.value())?;
        let values = xs
            .par_iter()
            .map(|&x| {
                ys.iter()
                    .map(|&y| kernel_value(x, y, &kind, ctx).map(|v| (v.re, v.im)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelTable {
            kind,
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            values,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (re, im) = self.values[i][j];
        C64::new(re, im)
    }

    /// Largest `|K(x,y) - conj(K(y,x))|` over node pairs present in both axes.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, x) in self.xs.iter().enumerate() {
            for (j, y) in self.ys.iter().enumerate() {
                let (Some(i2), Some(j2)) = (
                    self.xs.iter().position(|v| v == y),
                    self.ys.iter().position(|v| v == x),
                ) else {
                    continue;
                };
                worst = worst.max((self.get(i, j) - self.get(i2, j2).conj()).norm());
            }
        }
        worst
    }
}

/// Transform of a kernel section `kernel(·, y)` on the frequency grid.
pub fn section_spectrum<T: Real>(y: T, kind: &KernelKind, plan: &LcdtPlan<T>) -> SpectralSignal<T> {
    let ctx = *plan.ctx();
    let fp = plan.forward_prefactor();
    SpectralSignal::from_fn(plan.freq().clone(), plan.matrix(), |l| {
        fp * ctx.kernel(l, y) * kind.multiplier(l)
    })
}

/// `kernel(·, y)` on the space grid.
pub fn section<T: Real>(y: T, kind: &KernelKind, plan: &LcdtPlan<T>) -> Result<SampledSignal<T>> {
    check_kernel_order(kind.s(), plan.ctx().k.value().as_f64())?;
    plan.inverse(&section_spectrum(y, kind, plan))
}

/// Value of a sampled signal at `y` by order-10 Lagrange interpolation.
pub fn sample_at<T: Real>(f: &SampledSignal<T>, y: T) -> Result<Complex<T>> {
    let g = f.grid();
    lagrange_uniform(f.values(), -g.x_max(), g.delta(), y, 10)
        .ok_or_else(|| LcdtError::param("y", format!("{y} outside the grid")))
}

/// `|⟨f, K_s(·,y)⟩_{W^s} - f(y)| / ‖f‖_{W^s}`.
pub fn reproducing_check<T: Real>(
    f: &SampledSignal<T>,
    y: T,
    s: f64,
    plan: &LcdtPlan<T>,
) -> Result<T> {
    check_kernel_order(s, plan.ctx().k.value().as_f64())?;
    let df = plan.forward(f)?;
    let norm = spectral_norm(&df, s);
    if norm == T::zero() {
        return Ok(T::zero());
    }
    let ky = section_spectrum(y, &KernelKind::Ks { s }, plan);
    let lhs = spectral_inner(&df, &ky, s)?;
    Ok((lhs - sample_at(f, y)?).norm() / norm)
}

/// The two sides of an inequality `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bound {
    pub lhs: f64,
    pub rhs: f64,
}

impl Bound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// `‖R(·,y)‖_{W^s} <= C_s/ρ`, `‖Φ R(·,y)‖ <= C_s/√ρ`, `‖Φ*Φ R(·,y)‖_{W^s} <= C_s`,
/// with `‖Φ u‖² = C_ψ ‖u‖²` and `Φ*Φ = C_ψ (1+λ²)^{-s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RrhoBounds {
    pub sobolev: Bound,
    pub analysis: Bound,
    pub normal: Bound,
}

pub fn rrho_bounds<T: Real>(
    y: T,
    params: &SobolevParams,
    c_psi: f64,
    plan: &LcdtPlan<T>,
) -> Result<RrhoBounds> {
    let k = plan.ctx().k.value().as_f64();
    let cs = constant_cs(params.s, k, plan.matrix().b.as_f64())?;
    let kind = KernelKind::Rrho {
        s: params.s,
        rho: params.rho,
        c: c_psi,
    };
    let r = section_spectrum(y, &kind, plan);
    let s = params.s;
    let normal = r.multiply(|l| Complex::new(T::lit(c_psi) / weight(s, l), T::zero()));
    Ok(RrhoBounds {
        sobolev: Bound {
            lhs: spectral_norm(&r, s).as_f64(),
            rhs: cs / params.rho,
        },
        analysis: Bound {
            lhs: c_psi.sqrt() * r.norm().as_f64(),
            rhs: cs / params.rho.sqrt(),
        },
        normal: Bound {
            lhs: spectral_norm(&normal, s).as_f64(),
            rhs: cs,
        },
    })
}

/// Relative `W^s` residual of `(ρI + Φ*Φ) R(·,y) = K_s(·,y)`, with `Φ*Φ`
/// assembled from the per-λ scale integral `scale_integral(λ)`.
pub fn rrho_identity_residual<T: Real>(
    y: T,
    params: &SobolevParams,
    c_psi: f64,
    scale_integral: impl Fn(f64) -> f64 + Sync,
    plan: &LcdtPlan<T>,
) -> Result<T> {
    let s = params.s;
    check_kernel_order(s, plan.ctx().k.value().as_f64())?;
    let r = section_spectrum(
        y,
        &KernelKind::Rrho {
            s,
            rho: params.rho,
            c: c_psi,
        },
        plan,
    );
    let ks = section_spectrum(y, &KernelKind::Ks { s }, plan);
    let lhs = r.multiply(|l| {
        let c = scale_integral(l.as_f64());
        Complex::new(T::lit(params.rho) + T::lit(c) / weight(s, l), T::zero())
    });
    let diff = SpectralSignal::new(
        ks.grid().clone(),
        lhs.values().iter().zip(ks.values()).map(|(a, b)| a - b).collect(),
        ks.matrix(),
    )?;
    Ok(spectral_norm(&diff, s) / spectral_norm(&ks, s))
}

/// The embedding bound `|f(y)| <= C_s ‖f‖_{W^s}` at `y`.
pub fn embedding_bound<T: Real>(
    f: &SampledSignal<T>,
    y: T,
    s: f64,
    plan: &LcdtPlan<T>,
) -> Result<Bound> {
    let k: Multiplicity<T> = plan.ctx().k;
    let cs = constant_cs(s, k.value().as_f64(), plan.matrix().b.as_f64())?;
    Ok(Bound {
        lhs: sample_at(f, y)?.norm().as_f64(),
        rhs: cs * sobolev_norm(f, s, plan)?.as_f64(),
    })
}
