//! The validation suite behind `lcdt validate`.
//!
//! Every check runs sequentially on the configured multiplicity, matrix,
//! grid, wavelets and signal; oracle comparisons use small grids of their
//! own. The report is a deterministic function of the configuration.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calderon::{k_multiplier, Calderon, CalderonWindow};
use crate::config::Setup;
use crate::convolution::Convolver;
use crate::cwt::Cwt;
use crate::extremal::*;
use crate::measure::{pow_ib, CanonicalMatrix, Multiplicity, SampledSignal, ScaleGrid, SpaceGrid};
use crate::sobolev::*;
use crate::special::{dunkl_kernel, KernelContext};
use crate::transform::{gaussian_transform, LcdtPlan};
use crate::wavelet::{admissibility, cross_admissibility, WaveletSpec, LAMBDA_SAMPLES};
use crate::{LcdtError, Result, C64};

type Signal = SampledSignal<f64>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check_name: String,
    /// `None` when the check could not be evaluated.
    pub measured: Option<f64>,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

#[derive(Clone, Copy)]
enum Cmp {
    Le,
    Lt,
}

#[derive(Default)]
struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn record(&mut self, name: &str, cmp: Cmp, bound: f64, m: Result<f64>) {
        let measured = m.ok().filter(|v| !v.is_nan());
        let pass = match (measured, cmp) {
            (Some(v), Cmp::Le) => v <= bound,
            (Some(v), Cmp::Lt) => v < bound,
            (None, _) => false,
        };
        self.checks.push(Check {
            check_name: name.to_string(),
            measured,
            bound,
            pass,
        });
    }

    fn le(&mut self, name: &str, bound: f64, m: Result<f64>) {
        self.record(name, Cmp::Le, bound, m);
    }

    fn lt(&mut self, name: &str, bound: f64, m: Result<f64>) {
        self.record(name, Cmp::Lt, bound, m);
    }

    fn finish(self) -> Report {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        Report {
            failed: self.checks.len() - passed,
            passed,
            checks: self.checks,
        }
    }
}

fn gauss(grid: &Arc<SpaceGrid<f64>>, c: f64, w: f64) -> Signal {
    SampledSignal::from_real_fn(grid.clone(), move |x| (-(x - c) * (x - c) / (2.0 * w * w)).exp())
}

fn random_signal(grid: &Arc<SpaceGrid<f64>>, rng: &mut ChaCha8Rng) -> Result<Signal> {
    let mut f = SampledSignal::zeros(grid.clone());
    for _ in 0..3 {
        let c = rng.gen_range(-2.0..2.0);
        let w = rng.gen_range(0.8..1.5);
        let a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        f = f.add(&gauss(grid, c, w).scale(a))?;
    }
    Ok(f)
}

fn sup_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Largest step `v[i+1] - v[i]`; negative iff strictly decreasing.
fn max_step(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
}

/// Square `n = 257` plan for O(n²) oracles. When the configured chirps are
/// too fast for that grid, the chirp-free matrix `(0, b; -1/b, 0)` with the
/// same `b` is used instead.
fn oracle_plan(ctx: KernelContext<f64>, x_max: f64) -> Result<LcdtPlan<f64>> {
    let grid = SpaceGrid::shared(ctx.k, x_max, 257)?;
    match LcdtPlan::square(ctx, grid.clone()) {
        Err(LcdtError::Resolution { .. }) => {
            let b = ctx.m.b;
            let m = CanonicalMatrix::new(0.0, b, -1.0 / b, 0.0)?;
            LcdtPlan::square(KernelContext::new(ctx.k, m), grid)
        }
        r => r,
    }
}

/// Scale grid with the same log density as `base` on `[α_min/w, α_max·w]`.
fn widened(base: &ScaleGrid<f64>, k: Multiplicity<f64>, w: f64) -> Result<ScaleGrid<f64>> {
    let (lo, hi) = (base.alpha_min() / w, base.alpha_max() * w);
    let range0 = (base.alpha_max() / base.alpha_min()).ln();
    let m = ((base.len() as f64) * (hi / lo).ln() / range0).ceil() as usize;
    ScaleGrid::new(k, lo, hi, m)
}

/// Runs the full suite.
pub fn run(setup: &Setup) -> Report {
    let mut s = Suite::default();
    measure_checks(&mut s, setup);
    transform_checks(&mut s, setup);
    convolution_checks(&mut s, setup);
    wavelet_checks(&mut s, setup);
    let cwt = Cwt::new(setup.plan.clone());
    match cwt {
        Ok(cwt) => {
            cwt_checks(&mut s, setup, &cwt);
            calderon_checks(&mut s, setup, &cwt);
            sobolev_checks(&mut s, setup);
            extremal_checks(&mut s, setup, &cwt);
        }
        Err(e) => s.le("cwt.engine", 0.0, Err(e)),
    }
    s.finish()
}

fn measure_checks(s: &mut Suite, st: &Setup) {
    let k = st.config.k;
    let g = &st.grid;
    s.le("measure.gaussian_moment", 1e-10, {
        let v = g.integrate(g.nodes().iter().map(|x| (-x * x).exp()));
        let want = 2f64.powf(-(k + 1.0));
        Ok((v - want).abs() / want)
    });
    s.le("measure.pow_ib_product", 1e-13, (|| {
        let b = st.plan.matrix().b;
        let e = k + 1.0;
        let p = pow_ib(b, e)? * pow_ib(-b, e)?;
        let want = b.abs().powf(2.0 * e);
        Ok((p - want).norm() / want)
    })());
    s.le("special.kernel_bounded", 1e-12, {
        let mut worst = 0.0f64;
        for i in 0..41 {
            let t = -20.0 + i as f64;
            for j in 0..41 {
                let x = -10.0 + 0.5 * j as f64;
                worst = worst.max(dunkl_kernel(k, t, x).norm() - 1.0);
            }
        }
        Ok(worst.max(0.0))
    });
    s.le("special.fourier_reduction", 1e-14, {
        let mut worst = 0.0f64;
        for i in 0..41 {
            let t = -10.0 + 0.5 * i as f64;
            for x in [-3.7, -0.2, 0.0, 1.3, 6.1] {
                let want = C64::from_polar(1.0, t * x);
                worst = worst.max((dunkl_kernel(-0.5, t, x) - want).norm());
            }
        }
        Ok(worst)
    });
    s.le("special.inverse_kernel_symmetry", 1e-12, {
        let ctx = st.ctx();
        let mut worst = 0.0f64;
        for &l in &[-7.5, -1.0, 0.0, 0.4, 3.3] {
            for &x in &[-4.0, -0.6, 0.0, 2.2, 5.0] {
                let inv = ctx.m.inverse();
                let back = KernelContext::new(ctx.k, inv);
                worst = worst.max((ctx.kernel(l, x).conj() - back.kernel(x, l)).norm());
            }
        }
        Ok(worst)
    });
}

fn transform_checks(s: &mut Suite, st: &Setup) {
    let plan = &st.plan;
    let f = &st.signal;
    let g = gauss(plan.space(), -0.7, 0.9);
    s.le("lcdt.plancherel", 1e-6, plan.plancherel_residual(f));
    s.le("lcdt.roundtrip", 1e-6, plan.roundtrip_error(f));
    s.le("lcdt.parseval", 1e-6, plan.parseval_residual(f, &g));
    s.le("lcdt.gaussian_pair", 1e-6, (|| {
        let unit = gauss(plan.space(), 0.0, 1.0);
        let d = plan.forward(&unit)?;
        let want: Vec<C64> = plan
            .freq()
            .nodes()
            .iter()
            .map(|&l| gaussian_transform(plan.ctx(), l))
            .collect();
        Ok(sup_diff(d.values(), &want) / sup(&want))
    })());
    s.le("lcdt.linearity", 1e-12, (|| {
        let a = C64::new(0.3, -1.2);
        let lhs = plan.forward(&f.add(&g.scale(a))?)?;
        let df = plan.forward(f)?;
        let dg = plan.forward(&g)?;
        let rhs: Vec<C64> = df.values().iter().zip(dg.values()).map(|(x, y)| x + a * y).collect();
        Ok(sup_diff(lhs.values(), &rhs) / sup(&rhs))
    })());
}

fn convolution_checks(s: &mut Suite, st: &Setup) {
    let cv = Convolver::new(st.plan.clone());
    let f = &st.signal;
    let g = gauss(&st.grid, -0.5, 1.2);
    s.le("convolution.l2_identity", 1e-6, cv.convolve_with_report(f, &g).map(|c| c.truncation().abs()));
    s.le("convolution.commutes", 1e-12, (|| {
        let a = cv.convolve(f, &g)?;
        let b = cv.convolve(&g, f)?;
        Ok(a.sub(&b)?.sup_norm() / a.sup_norm().max(1.0))
    })());
    s.le("convolution.zero_shift", 1e-6, (|| {
        let t = cv.translate(f, 0.0)?;
        Ok(t.sub(f)?.sup_norm() / f.sup_norm().max(f64::MIN_POSITIVE))
    })());
    s.le("convolution.direct_oracle", 1e-4, (|| {
        let plan = oracle_plan(*st.ctx(), 5.0)?;
        let grid = plan.space().clone();
        let cv = Convolver::new(plan);
        let a = gauss(&grid, 0.4, 0.8);
        let b = gauss(&grid, -0.3, 1.0);
        let fast = cv.convolve(&a, &b)?;
        cv.convolve_direct(&a, &b, false)?.rel_error(&fast)
    })());
}

fn wavelet_checks(s: &mut Suite, st: &Setup) {
    let h2 = WaveletSpec::hermite2();
    let h4 = WaveletSpec::hermite4();
    s.le("wavelet.constant_hermite2", 1e-8, admissibility(&h2, &LAMBDA_SAMPLES).map(|a| (a.value - 0.125).abs()));
    s.le("wavelet.constant_hermite4", 1e-8, admissibility(&h4, &LAMBDA_SAMPLES).map(|a| (a.value - 0.1875).abs()));
    s.le(
        "wavelet.constant_cross",
        1e-8,
        cross_admissibility(&h2, &h4, &LAMBDA_SAMPLES).map(|a| (a.value - 0.125).abs()),
    );
    let lambdas = [0.05, 0.3, 1.0, 3.0, 20.0, -2.0];
    s.le(
        "wavelet.lambda_independence",
        1e-6,
        cross_admissibility(&st.psi, &st.phi, &lambdas).map(|a| a.max_rel_deviation),
    );
}

fn cwt_checks(s: &mut Suite, st: &Setup, cwt: &Cwt<f64>) {
    let f = &st.signal;
    let k = st.plan.ctx().k;
    let wavelets = cwt.wavelet(st.psi.clone()).and_then(|p| Ok((p, cwt.wavelet(st.phi.clone())?)));
    let (psi, phi) = match wavelets {
        Ok(w) => w,
        Err(e) => return s.le("cwt.wavelets", 0.0, Err(e)),
    };
    let c = st.pair.c_cross;
    let g2 = gauss(&st.grid, -0.7, 0.9);
    s.le("cwt.plancherel", 2e-2, cwt.plancherel(f, &psi, &st.scales).map(|r| r.residual));
    s.le(
        "cwt.orthogonality",
        2e-2,
        cwt.orthogonality(f, &g2, &psi, &phi, c, &st.scales).map(|r| r.residual),
    );
    s.le("cwt.inversion", 2e-2, (|| {
        let g = cwt.cwt(f, &psi, &st.scales)?;
        cwt.cwt_inverse(&g, &phi, C64::new(c, 0.0))?.rel_error(f)
    })());
    s.lt("cwt.plancherel_decreasing", 0.0, (|| {
        let mut r = Vec::new();
        for w in [1.0, 10.0, 100.0] {
            r.push(cwt.plancherel(f, &psi, &widened(&st.scales, k, w)?)?.residual);
        }
        Ok(max_step(&r))
    })());
    s.le("cwt.direct_oracle", 1e-4, (|| {
        let plan = oracle_plan(*st.ctx(), 10.0)?;
        let grid = plan.space().clone();
        let small = Cwt::new(plan)?;
        let psi = small.wavelet(st.psi.clone())?;
        let sg = ScaleGrid::new(k, 0.25, 1.0, 8)?;
        let a = gauss(&grid, 0.5, 1.0);
        let fast = small.cwt_unstretched(&a, &psi, &sg)?;
        small.cwt_direct(&a, &psi, &sg, false)?.rel_distance(&fast)
    })());
}

fn calderon_checks(s: &mut Suite, st: &Setup, cwt: &Cwt<f64>) {
    let pair = &st.pair;
    s.le("calderon.multiplier", 1e-6, (|| {
        let win = CalderonWindow::new(1e-4, 1e4)?;
        let mut worst = 0.0f64;
        for i in 0..=40 {
            let l = 0.05 * 400f64.powf(i as f64 / 40.0);
            for l in [l, -l] {
                worst = worst.max((k_multiplier(&pair.psi, &pair.phi, &win, l)?.value - 1.0).norm());
            }
        }
        Ok(worst)
    })());
    let cal = Calderon::new(cwt.clone());
    let sweep = cal.convergence_sweep(&st.signal, pair, &st.windows);
    s.le("calderon.sweep_monotone", 1e-12, match &sweep {
        Ok(sw) => Ok(max_step(&sw.rows.iter().map(|r| r.rel_error).collect::<Vec<_>>()).max(0.0)),
        Err(e) => Err(e.clone()),
    });
    s.le("calderon.sweep_final", 1e-3, match &sweep {
        Ok(sw) => Ok(sw.rows.last().map_or(f64::NAN, |r| r.rel_error)),
        Err(e) => Err(e.clone()),
    });
    s.le("calderon.direct_oracle", 2e-3, (|| {
        let plan = oracle_plan(*st.ctx(), 10.0)?;
        let grid = plan.space().clone();
        let small = Calderon::new(Cwt::new(plan)?);
        let win = CalderonWindow::new(0.25, 1.5)?;
        let a = gauss(&grid, 0.5, 1.0);
        let fast = small.reconstruct_spectral(&a, pair, &win)?;
        small.reconstruct_direct(&a, pair, &win, 32, false)?.rel_error(&fast)
    })());
}

fn cs_closed(s: f64, k: f64, b: f64) -> f64 {
    use crate::special::ln_gamma;
    let l = ln_gamma(s - k - 1.0) - ln_gamma(s) - (k + 1.0) * 2f64.ln() - (2.0 * k + 2.0) * b.abs().ln();
    (0.5 * l).exp()
}

fn sobolev_checks(s: &mut Suite, st: &Setup) {
    let k = st.config.k;
    let sv = st.config.sobolev.s;
    let plan = &st.plan;
    let ctx = st.ctx();
    let b = plan.matrix().b;
    let c = st.pair.c_cross;
    s.le("sobolev.cs_closed_form", 1e-8, constant_cs(sv, k, b).map(|v| (v / cs_closed(sv, k, b) - 1.0).abs()));
    s.le("sobolev.cs_fourier_value", 1e-6, {
        let want = (PI / (2.0 * PI).sqrt()).sqrt();
        constant_cs(1.0, -0.5, 1.0).map(|v| (v - want).abs())
    });
    s.le("sobolev.ks_fourier_closed_form", 1e-4, (|| {
        let fc = KernelContext::from_values(-0.5, 0.0, 1.0, -1.0, 0.0)?;
        let mut worst = 0.0f64;
        for i in 0..25 {
            let x = -3.0 + 0.25 * i as f64;
            for y in [-3.0, -0.4, 0.0, 1.1, 3.0] {
                let want = (PI / 2.0).sqrt() * (-(x - y).abs()).exp();
                worst = worst.max((kernel_ks(x, y, 1.0, &fc)? - want).norm());
            }
        }
        Ok(worst)
    })());
    s.le("sobolev.reproducing", 1e-4, (|| {
        let mut worst = 0.0f64;
        for y in [0.0, 1.5, -3.0] {
            worst = worst.max(reproducing_check(&st.signal, y, sv, plan)?);
        }
        Ok(worst)
    })());
    s.le("sobolev.ks_hermitian", 1e-12, (|| {
        let xs = [-2.0, -0.5, 0.0, 0.8, 2.5];
        Ok(KernelTable::new(&xs, &xs, KernelKind::Ks { s: sv }, ctx)?.hermitian_defect())
    })());
    s.le("sobolev.embedding", 1.0, embedding_bound(&st.signal, 0.3, sv, plan).map(|b| b.lhs / b.rhs));
    s.le("sobolev.rrho_identity", 1e-4, (|| {
        let wide = CalderonWindow::new(1e-12, 1e12)?;
        let pair = &st.pair;
        let integral = |l: f64| {
            let m = pair.multiplier(&wide, l);
            if m.at_origin {
                c
            } else {
                c * m.value.re
            }
        };
        let params = SobolevParams::new(sv, 0.1)?;
        let mut worst = 0.0f64;
        for y in [0.0, 1.5, -3.0] {
            worst = worst.max(rrho_identity_residual(y, &params, c, integral, plan)?);
        }
        Ok(worst)
    })());
    let bounds: Result<Vec<RrhoBounds>> = (|| {
        let mut out = Vec::new();
        for rho in [1e-3, 1.0, 1e3] {
            let params = SobolevParams::new(sv, rho)?;
            for y in [0.0, 1.5, -3.0] {
                out.push(rrho_bounds(y, &params, c, plan)?);
            }
        }
        Ok(out)
    })();
    let ratio = |f: fn(&RrhoBounds) -> Bound| -> Result<f64> {
        match &bounds {
            Ok(v) => Ok(v.iter().map(|b| {
                let b = f(b);
                b.lhs / b.rhs
            })
            .fold(0.0, f64::max)),
            Err(e) => Err(e.clone()),
        }
    };
    s.le("sobolev.rrho_bound_sobolev", 1.0, ratio(|b| b.sobolev));
    s.le("sobolev.rrho_bound_analysis", 1.0, ratio(|b| b.analysis));
    s.le("sobolev.rrho_bound_normal", 1.0, ratio(|b| b.normal));
    s.le("sobolev.rrho_large_rho_limit", 1e-3, (|| {
        let params = SobolevParams::new(sv, 1e6)?;
        let mut worst = 0.0f64;
        for (x, y) in [(0.0, 0.0), (0.7, -1.2), (-2.0, 1.0)] {
            let r = kernel_rrho(x, y, &params, c, ctx)? * 1e6;
            worst = worst.max((r - kernel_ks(x, y, sv, ctx)?).norm());
        }
        Ok(worst)
    })());
}

fn extremal_checks(s: &mut Suite, st: &Setup, cwt: &Cwt<f64>) {
    let plan = &st.plan;
    let k = st.config.k;
    let sv = st.config.sobolev.s;
    let b = plan.matrix().b;
    let f = &st.signal;
    let mut rhos = st.rhos.clone();
    rhos.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let psi = match cwt.wavelet(st.psi.clone()) {
        Ok(p) => p,
        Err(e) => return s.le("extremal.wavelet", 0.0, Err(e)),
    };
    let c = psi.constant();
    let g = cwt.cwt(f, &psi, &st.scales);
    s.le("extremal.q_kernel_oracle", 1e-3, (|| {
        let small = oracle_plan(*st.ctx(), 5.0)?;
        let grid = small.space().clone();
        let small = Cwt::new(small)?;
        let psi = small.wavelet(st.psi.clone())?;
        let sg = ScaleGrid::new(plan.ctx().k, 1e-1, 1e1, 24)?;
        let g = small.cwt(&gauss(&grid, 0.5, 1.0), &psi, &sg)?;
        let p = SobolevParams::new(sv, 1e-2)?;
        let fast = extremal_cwt(&g, &p, &psi, &small)?;
        extremal_cwt_direct(&g, &p, &psi, &small, false)?.rel_error(&fast)
    })());
    let solutions = (|| {
        let g = g.as_ref().map_err(|e| e.clone())?;
        let mut out = Vec::new();
        for &rho in &rhos {
            let p = SobolevParams::new(sv, rho)?;
            out.push((rho, extremal_cwt(g, &p, &psi, cwt)?, extremal_cwt_spectral(f, &p, c, plan)?));
        }
        Ok((g.norm_sqr().sqrt(), out))
    })();
    let solutions: Result<(f64, Vec<(f64, Signal, Signal)>)> = solutions;
    s.le("extremal.two_path", 1e-3, (|| {
        let (_, sol) = solutions.as_ref().map_err(|e| e.clone())?;
        let mut worst = 0.0f64;
        for (_, a, b) in sol {
            worst = worst.max(a.rel_error(b)?);
        }
        Ok(worst)
    })());
    s.le("extremal.pointwise_bound", 1.0, (|| {
        let (gn, sol) = solutions.as_ref().map_err(|e| e.clone())?;
        let mut worst = 0.0f64;
        for (rho, a, _) in sol {
            worst = worst.max(a.sup_norm() / (constant_cs(sv, k, b)? / rho.sqrt() * gn));
        }
        Ok(worst)
    })());
    let gaps = (|| {
        let (_, sol) = solutions.as_ref().map_err(|e| e.clone())?;
        sol.iter().map(|(_, _, fs)| Ok(fs.sub(f)?.sup_norm())).collect::<Result<Vec<f64>>>()
    })();
    s.lt("extremal.rho_sweep_monotone", 0.0, gaps.as_ref().map(|v| max_step(v)).map_err(|e: &LcdtError| e.clone()));
    s.le("extremal.rho_sweep_final", 1e-2, gaps.as_ref().map(|v| *v.last().unwrap_or(&f64::NAN)).map_err(|e| e.clone()));
    s.le("extremal.gap_bound", 1.0, (|| {
        let fw = sobolev_norm(f, sv, plan)?;
        let mut worst = 0.0f64;
        for &rho in &rhos {
            let p = SobolevParams::new(sv, rho)?;
            let fs = extremal_cwt_spectral(f, &p, c, plan)?;
            let kind = KernelKind::Rrho { s: sv, rho, c };
            for j in (0..st.grid.len()).step_by(64) {
                let y = st.grid.nodes()[j];
                let rn = spectral_norm(&section_spectrum(y, &kind, plan), sv);
                let gap = (f.values()[j] - fs.values()[j]).norm();
                worst = worst.max(gap / (rho * fw * rn + 1e-14));
            }
        }
        Ok(worst)
    })());
    let df = plan.forward(f);
    s.le("extremal.lcdt_two_path", 1e-6, (|| {
        let df = df.as_ref().map_err(|e| e.clone())?;
        let p = SobolevParams::new(sv, rhos[rhos.len() / 2])?;
        extremal_lcdt(df, &p, plan)?.rel_error(&extremal_lcdt_integral(df, &p, plan)?)
    })());
    let h_errors = (|| {
        let df = df.as_ref().map_err(|e| e.clone())?;
        let gn = df.norm();
        let mut errs = Vec::new();
        let mut energy = 0.0f64;
        for &rho in &rhos {
            let p = SobolevParams::new(sv, rho)?;
            let h = extremal_lcdt(df, &p, plan)?;
            errs.push(h.sub(f)?.norm());
            let hw = sobolev_norm(&h, sv, plan)?;
            energy = energy.max(rho * hw * hw / (gn * gn / 4.0));
        }
        Ok((errs, energy))
    })();
    s.lt(
        "extremal.lcdt_rho_monotone",
        0.0,
        h_errors.as_ref().map(|(e, _)| max_step(e)).map_err(|e: &LcdtError| e.clone()),
    );
    s.le("extremal.lcdt_energy_bound", 1.0, h_errors.as_ref().map(|(_, e)| *e).map_err(|e| e.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(st.config.seed);
    s.le("extremal.adjoint_zero_order", 1e-12, (|| {
        let df = df.as_ref().map_err(|e| e.clone())?;
        adjoint_lcdt(df, 0.0, plan)?.rel_error(&plan.inverse(df)?)
    })());
    s.le("extremal.adjointness", 1e-6, (|| {
        let mut worst = 0.0f64;
        for _ in 0..4 {
            let u = random_signal(&st.grid, &mut rng)?;
            let v = plan.forward(&random_signal(&st.grid, &mut rng)?)?;
            let lhs = plan.forward(&u)?.inner(&v)?;
            let rhs = sobolev_inner(&u, &adjoint_lcdt(&v, sv, plan)?, sv, plan)?;
            worst = worst.max((lhs - rhs).norm() / lhs.norm().max(1.0));
        }
        Ok(worst)
    })());
    s.le("extremal.adjoint_filter", 1e-5, (|| {
        // the weighted spectrum has e^{-|x|} tails; a wider grid keeps them
        let wide = SpaceGrid::shared(plan.ctx().k, 20.0, 4097)?;
        let wp = LcdtPlan::square(*plan.ctx(), wide.clone())?;
        let df = wp.forward(&gauss(&wide, 0.5, 1.0))?;
        let back = wp.forward(&adjoint_lcdt(&df, sv, &wp)?)?;
        let want = df.multiply(|l| C64::new(1.0 / weight(sv, l), 0.0));
        Ok(sup_diff(back.values(), want.values()) / sup(df.values()))
    })());
    let p = SobolevParams::new(sv, 1e-2);
    let optimality = |which: u8, rng: &mut ChaCha8Rng| -> Result<f64> {
        let p = p.clone()?;
        let df = df.as_ref().map_err(|e| e.clone())?;
        let (u, j0) = if which == 0 {
            let u = extremal_cwt_spectral(f, &p, c, plan)?;
            let j = cwt_objective(&u, f, &p, c, plan)?;
            (u, j)
        } else {
            let u = extremal_lcdt(df, &p, plan)?;
            let j = lcdt_objective(&u, df, &p, plan)?;
            (u, j)
        };
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..20 {
            let v = random_signal(&st.grid, rng)?;
            for t in [1e-2, -1e-2, 1e-3, -1e-3] {
                let w = u.add(&v.scale(C64::new(t, 0.0)))?;
                let j = if which == 0 {
                    cwt_objective(&w, f, &p, c, plan)?
                } else {
                    lcdt_objective(&w, df, &p, plan)?
                };
                worst = worst.max(j0 - j);
            }
        }
        Ok(worst)
    };
    s.le("extremal.tikhonov_cwt", 0.0, optimality(0, &mut rng));
    s.le("extremal.tikhonov_lcdt", 0.0, optimality(1, &mut rng));
    s.le("extremal.analysis_bounded", 1.0 + 2e-2, (|| {
        let g = g.as_ref().map_err(|e| e.clone())?;
        Ok(g.norm_sqr().sqrt() / (c.sqrt() * sobolev_norm(f, sv, plan)?))
    })());
    s.le("extremal.norm_equivalence", 1.0, (|| {
        let g = g.as_ref().map_err(|e| e.clone())?;
        let fw = sobolev_norm(f, sv, plan)?;
        let mut worst = 0.0f64;
        for &rho in &rhos {
            let mixed = (rho * fw * fw + g.norm_sqr()).sqrt();
            worst = worst.max(rho.sqrt() * fw / mixed).max(mixed / ((rho + c).sqrt() * fw));
        }
        Ok(worst)
    })());
}
