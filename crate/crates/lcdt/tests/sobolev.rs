use std::f64::consts::PI;
use std::sync::Arc;

use lcdt::calderon::{CalderonWindow, Pair};
use lcdt::sobolev::*;
use lcdt::special::gamma;
use lcdt::*;

const DUNKL: [f64; 4] = [0.0, -1.0, 1.0, 0.0];
const CHIRPED: [f64; 4] = [1.0, 1.0, 0.5, 1.5];

fn ctx(k: f64, m: [f64; 4]) -> KernelContextF64 {
    KernelContext::from_values(k, m[0], m[1], m[2], m[3]).unwrap()
}

fn plan(k: f64, m: [f64; 4], x_max: f64, n: usize) -> (LcdtPlanF64, Arc<SpaceGridF64>) {
    let grid = SpaceGrid::shared(Multiplicity::new(k).unwrap(), x_max, n).unwrap();
    (LcdtPlan::square(ctx(k, m), grid.clone()).unwrap(), grid)
}

fn gauss(grid: &Arc<SpaceGridF64>, c: f64, w: f64) -> SampledSignalF64 {
    SampledSignal::from_real_fn(grid.clone(), move |x| (-(x - c) * (x - c) / (2.0 * w * w)).exp())
}

/// `∫ (1+λ²)^{-s} |λ|^{2k+1} dλ / (2^{k+1}Γ(k+1)) = Γ(s-k-1) / (2^{k+1} Γ(s))`.
fn cs_closed(s: f64, k: f64, b: f64) -> f64 {
    (gamma(s - k - 1.0) / (2f64.powf(k + 1.0) * gamma(s)) / b.abs().powf(2.0 * k + 2.0)).sqrt()
}

#[test]
fn cs_fourier_value() {
    let want = (PI / (2.0 * PI).sqrt()).sqrt();
    assert!((constant_cs(1.0, -0.5, 1.0).unwrap() - want).abs() <= 1e-6);
    assert!((want - 1.1195).abs() < 1e-4);
}

#[test]
fn cs_matches_closed_form() {
    for k in [-0.5, 0.0, 0.7, 1.0, 3.0] {
        for ds in [0.3, 1.0, 2.5] {
            for b in [1.0, -0.4, 2.0] {
                let s = k + 1.0 + ds;
                let got = constant_cs(s, k, b).unwrap();
                let want = cs_closed(s, k, b);
                assert!((got / want - 1.0).abs() < 1e-10, "k={k} s={s} b={b}");
            }
        }
    }
}

#[test]
fn cs_order_and_scaling() {
    for k in [-0.5, 0.0, 1.0] {
        assert!(constant_cs(k + 1.0, k, 1.0).is_err());
        assert!(constant_cs((k + 1.0) / 2.0, k, 1.0).is_err());
        let near = constant_cs(k + 1.01, k, 1.0).unwrap();
        let far = constant_cs(k + 2.0, k, 1.0).unwrap();
        assert!(near > far);
        let one = constant_cs(k + 2.0, k, 1.0).unwrap();
        let two = constant_cs(k + 2.0, k, -2.0).unwrap();
        assert!((two / one - 2f64.powf(-(k + 1.0))).abs() < 1e-12);
    }
}

#[test]
fn sobolev_inner_reduces_to_l2_at_zero() {
    let (p, grid) = plan(0.0, CHIRPED, 10.0, 1025);
    let f = gauss(&grid, 0.5, 1.0);
    let g = gauss(&grid, -0.5, 0.7).scale(C64::new(0.3, 1.0));
    let a = sobolev_inner(&f, &g, 0.0, &p).unwrap();
    let b = mu_inner(&f, &g).unwrap();
    assert!((a - b).norm() <= 1e-8 * b.norm());
}

#[test]
fn sobolev_norm_grows_with_order() {
    let (p, grid) = plan(1.0, DUNKL, 12.0, 1025);
    let f = gauss(&grid, 0.5, 1.0);
    let mut last = 0.0;
    for s in [-1.0, 0.0, 0.5, 1.0, 2.0, 3.5] {
        let n = sobolev_norm(&f, s, &p).unwrap();
        assert!(n >= last);
        last = n;
    }
}

#[test]
fn embedding_bound_holds() {
    for k in [-0.5, 0.0, 1.0] {
        let (p, grid) = plan(k, CHIRPED, 12.0, 2049);
        let f = gauss(&grid, 0.5, 1.0).add(&gauss(&grid, -2.0, 0.4)).unwrap();
        for y in [-3.0, 0.0, 0.5, 1.5, 7.0] {
            let b = embedding_bound(&f, y, k + 1.5, &p).unwrap();
            assert!(b.holds(), "k={k} y={y} {b:?}");
        }
    }
}

#[test]
fn ks_fourier_closed_form() {
    let c = ctx(-0.5, DUNKL);
    let mut worst = 0.0f64;
    for i in 0..25 {
        let x = -3.0 + 0.25 * i as f64;
        for y in [-3.0, -0.4, 0.0, 1.1, 3.0] {
            if (x - y).abs() > 6.0 {
                continue;
            }
            let want = (PI / 2.0).sqrt() * (-(x - y).abs()).exp();
            worst = worst.max((kernel_ks(x, y, 1.0, &c).unwrap() - want).norm());
        }
    }
    assert!(worst <= 1e-4, "{worst:e}");
}

#[test]
fn ks_agrees_with_section_and_is_hermitian() {
    for k in [0.0, 1.0] {
        let s = k + 2.0;
        let (p, _) = plan(k, CHIRPED, 12.0, 2049);
        let c = ctx(k, CHIRPED);
        let col = section(-1.3, &KernelKind::Ks { s }, &p).unwrap();
        for x in [-2.0, 0.0, 0.7, 3.0] {
            let a = kernel_ks(x, -1.3, s, &c).unwrap();
            let b = kernel_ks(-1.3, x, s, &c).unwrap();
            assert!((a - b.conj()).norm() < 1e-14);
            // the section truncates the algebraic tail at λ = 12
            assert!((a - sample_at(&col, x).unwrap()).norm() < 1e-4, "k={k} x={x}");
        }
    }
    let t = KernelTable::new(&[-1.0, 0.0, 2.0], &[-1.0, 0.0, 2.0], KernelKind::Ks { s: 2.0 }, &ctx(0.0, CHIRPED))
        .unwrap();
    assert!(t.hermitian_defect() < 1e-14);
}

#[test]
fn ks_section_norm_bounded_by_cs() {
    for k in [-0.5, 0.0, 1.0] {
        for m in [DUNKL, CHIRPED] {
            let (p, _) = plan(k, m, 12.0, 2049);
            let s = k + 1.5;
            let cs = constant_cs(s, k, m[1]).unwrap();
            for y in [0.0, 1.5, -3.0] {
                let n = spectral_norm(&section_spectrum(y, &KernelKind::Ks { s }, &p), s);
                assert!(n <= cs, "k={k} y={y} {n} > {cs}");
            }
        }
    }
}

#[test]
fn kernels_reject_low_order() {
    let c = ctx(0.0, DUNKL);
    assert!(kernel_ks(0.0, 1.0, 0.75, &c).is_err());
    let p = SobolevParams::new(1.0, 1.0).unwrap();
    assert!(kernel_rrho(0.0, 1.0, &p, 0.125, &c).is_err());
    assert!(SobolevParams::new(2.0, 0.0).is_err());
    assert!(SobolevParams::new(f64::NAN, 1.0).is_err());
}

#[test]
fn reproducing_property() {
    for k in [-0.5, 0.0] {
        for m in [DUNKL, CHIRPED] {
            let (p, grid) = plan(k, m, 12.0, 2049);
            let f = gauss(&grid, 0.5, 1.0);
            for y in [0.0, 1.5, -3.0] {
                let r = reproducing_check(&f, y, 2.0, &p).unwrap();
                assert!(r <= 1e-4, "k={k} y={y} {r:e}");
            }
            let z = SampledSignal::zeros(grid);
            assert_eq!(reproducing_check(&z, 1.5, 2.0, &p).unwrap(), 0.0);
        }
    }
}

#[test]
fn reproducing_residual_shrinks_with_refinement() {
    // narrow signal so the coarse grid is visibly under-resolved
    for k in [-0.5, 0.0] {
        let mut last = f64::INFINITY;
        for n in [513, 1025, 2049] {
            let (p, grid) = plan(k, DUNKL, 12.0, n);
            let f = gauss(&grid, 0.3, 0.12);
            let r = reproducing_check(&f, 0.0, 2.0, &p).unwrap();
            assert!(r <= last, "k={k} n={n} {r:e} > {last:e}");
            last = r;
        }
    }
}

#[test]
fn rrho_operator_identity() {
    let pair = Pair::single(WaveletSpec::hermite2()).unwrap();
    let wide = CalderonWindow::new(1e-12, 1e12).unwrap();
    for k in [-0.5, 0.0, 1.0] {
        let (p, _) = plan(k, CHIRPED, 12.0, 2049);
        let params = SobolevParams::new(k + 2.0, 0.1).unwrap();
        let c = pair.c_cross;
        let integral = |l: f64| {
            let m = pair.multiplier(&wide, l);
            if m.at_origin { c } else { c * m.value.re }
        };
        for y in [0.0, 1.5, -3.0] {
            let r = rrho_identity_residual(y, &params, c, integral, &p).unwrap();
            assert!(r <= 1e-4, "k={k} y={y} {r:e}");
        }
    }
}

#[test]
fn rrho_bounds_hold() {
    for k in [-0.5, 0.0, 1.0] {
        for m in [DUNKL, CHIRPED] {
            let (p, _) = plan(k, m, 12.0, 2049);
            for rho in [1e-3, 1.0, 1e3] {
                let params = SobolevParams::new(k + 1.5, rho).unwrap();
                for y in [0.0, 2.0] {
                    let b = rrho_bounds(y, &params, 0.125, &p).unwrap();
                    assert!(b.sobolev.holds() && b.analysis.holds() && b.normal.holds(), "{b:?}");
                }
            }
        }
    }
}

#[test]
fn rrho_tends_to_ks_for_large_rho() {
    let c = ctx(0.0, CHIRPED);
    let params = SobolevParams::new(2.0, 1e6).unwrap();
    for (x, y) in [(0.0, 0.0), (0.5, -1.0), (2.0, 3.0)] {
        let r = kernel_rrho(x, y, &params, 0.125, &c).unwrap() * 1e6;
        let ks = kernel_ks(x, y, 2.0, &c).unwrap();
        assert!((r - ks).norm() <= 1e-3 * ks.norm().max(1e-3), "({x},{y})");
    }
}

#[test]
fn rrho_pointwise_matches_section() {
    let (p, _) = plan(1.0, DUNKL, 12.0, 2049);
    // steep weight: the section is cut at λ = 12
    let params = SobolevParams::new(4.0, 0.5).unwrap();
    let kind = KernelKind::Rrho { s: 4.0, rho: 0.5, c: 0.125 };
    let col = section(0.8, &kind, &p).unwrap();
    let c = ctx(1.0, DUNKL);
    for x in [-1.0, 0.0, 0.8, 2.5] {
        let v = kernel_rrho(x, 0.8, &params, 0.125, &c).unwrap();
        let d = (v - sample_at(&col, x).unwrap()).norm();
        assert!(d < 1e-5, "x={x} {d:e} {v}");
    }
}
