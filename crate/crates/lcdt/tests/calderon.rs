use std::sync::Arc;

use lcdt::calderon::*;
use lcdt::cwt::Cwt;
use lcdt::*;

const DUNKL: [f64; 4] = [0.0, -1.0, 1.0, 0.0];
const CHIRPED: [f64; 4] = [1.0, 1.0, 0.5, 1.5];

fn engine(k: f64, m: [f64; 4], x_max: f64, n: usize) -> (Calderon<f64>, Arc<SpaceGridF64>) {
    let grid = SpaceGrid::shared(Multiplicity::new(k).unwrap(), x_max, n).unwrap();
    let ctx = KernelContext::from_values(k, m[0], m[1], m[2], m[3]).unwrap();
    let cwt = Cwt::new(LcdtPlan::square(ctx, grid.clone()).unwrap()).unwrap();
    (Calderon::new(cwt), grid)
}

fn gauss(grid: &Arc<SpaceGridF64>) -> SampledSignalF64 {
    SampledSignal::from_real_fn(grid.clone(), |x| (-(x - 0.5) * (x - 0.5) / 2.0).exp())
}

fn win(e: f64, d: f64) -> CalderonWindow {
    CalderonWindow::new(e, d).unwrap()
}

fn nested() -> Vec<CalderonWindow> {
    [1e-1, 1e-2, 1e-3, 1e-4].iter().map(|&e| win(e, 1.0 / e)).collect()
}

#[test]
fn multiplier_is_one_on_wide_window() {
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    // head ∫_0^{1e-4} 8u³e^{-2u²}du ≈ 2e-16, tail beyond u = 1e4 is zero
    let k = p.multiplier(&win(1e-4, 1e4), 1.0);
    assert!(!k.at_origin);
    assert!((k.value.re - 1.0).abs() <= 1e-9 && k.value.im == 0.0);
}

#[test]
fn multiplier_respects_bound() {
    for (psi, phi) in [
        (WaveletSpec::hermite2(), WaveletSpec::hermite2()),
        (WaveletSpec::hermite2(), WaveletSpec::hermite4()),
        (WaveletSpec::hermite4(), WaveletSpec::hermite4()),
    ] {
        let p = Pair::new(psi, phi).unwrap();
        let bound = p.multiplier_bound().unwrap();
        for w in nested().into_iter().chain([win(0.5, 2.0), win(1e-12, 1e12)]) {
            for l in [1e-3, 0.07, 0.5, 1.0, 2.5, -4.0, 9.0] {
                let k = p.multiplier(&w, l).value.norm();
                assert!(k > 0.0 && k <= bound * (1.0 + 1e-12), "λ={l} {k} > {bound}");
            }
        }
    }
    let eq = Pair::single(WaveletSpec::hermite2()).unwrap().multiplier_bound().unwrap();
    assert!((eq - 1.0).abs() < 1e-12);
}

#[test]
fn multiplier_grows_with_window() {
    let p = Pair::single(WaveletSpec::hermite4()).unwrap();
    for l in [0.01, 0.3, 1.0, -3.0] {
        let mut last = 0.0;
        for w in nested() {
            let k = p.multiplier(&w, l).value.re;
            assert!(k >= last - 1e-14 && k <= 1.0 + 1e-12);
            last = k;
        }
    }
}

#[test]
fn multiplier_at_origin_is_flagged() {
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let k = p.multiplier(&win(0.1, 10.0), 0.0);
    assert!(k.at_origin && k.value.norm() == 0.0);
    let k = k_multiplier(&WaveletSpec::hermite2(), &WaveletSpec::hermite4(), &win(0.1, 10.0), 1.0)
        .unwrap();
    assert!(!k.at_origin && k.value.re > 0.0);
}

#[test]
fn window_validation() {
    assert!(CalderonWindow::new(0.0, 1.0).is_err());
    assert!(CalderonWindow::new(2.0, 1.0).is_err());
    assert!(CalderonWindow::new(1.0, 1.0).is_err());
    assert!(CalderonWindow::new(1.0, f64::INFINITY).is_err());
}

#[test]
fn multiplier_tends_to_one_on_grid() {
    let (cal, _) = engine(0.0, CHIRPED, 12.0, 2049);
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let nodes = cal.cwt().plan().freq().nodes().to_vec();
    let mut last: Option<Vec<f64>> = None;
    for w in nested() {
        let (k, origin) = cal.multiplier_table(&p, &w);
        assert_eq!(origin, 1);
        let d: Vec<f64> = k.iter().map(|v| (v - 1.0).norm()).collect();
        if let Some(prev) = &last {
            for (j, (a, b)) in d.iter().zip(prev).enumerate() {
                if nodes[j] != 0.0 {
                    assert!(a <= &(b + 1e-14));
                }
            }
        }
        last = Some(d);
    }
    let last = last.unwrap();
    let off = nodes.iter().zip(&last).filter(|(l, _)| **l != 0.0).map(|(_, d)| *d);
    assert!(off.fold(0.0, f64::max) < 1e-9);
}

#[test]
fn spectral_identity_holds() {
    // the grid must hold f^{ε,δ}, whose spread grows with δ
    let (cal, grid) = engine(1.0, DUNKL, 20.0, 4097);
    let p = Pair::new(WaveletSpec::hermite2(), WaveletSpec::hermite4()).unwrap();
    let f = gauss(&grid);
    let w = win(0.3, 1.5);
    let rec = cal.reconstruct_spectral(&f, &p, &w).unwrap();
    let plan = cal.cwt().plan();
    let lhs = plan.forward(&rec).unwrap();
    let (k, _) = cal.multiplier_table(&p, &w);
    let df = plan.forward(&f).unwrap();
    let rhs = SpectralSignal::new(
        df.grid().clone(),
        df.values().iter().zip(&k).map(|(a, b)| a * b).collect(),
        df.matrix(),
    )
    .unwrap();
    let diff: f64 = lhs
        .values()
        .iter()
        .zip(rhs.values())
        .zip(df.grid().weights())
        .map(|((a, b), w)| (a - b).norm_sqr() * w)
        .sum::<f64>()
        .sqrt();
    assert!(diff / rhs.norm() <= 1e-6, "{diff:e}");
}

fn limit_error(k: f64, m: [f64; 4]) -> f64 {
    let (cal, grid) = engine(k, m, 12.0, 2049);
    let f = gauss(&grid);
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    cal.reconstruct_spectral(&f, &p, &win(1e-4, 1e4)).unwrap().rel_error(&f).unwrap()
}

#[test]
fn wide_window_reconstructs() {
    for k in [0.0, 1.0] {
        for m in [DUNKL, CHIRPED] {
            let e = limit_error(k, m);
            assert!(e <= 1e-3, "k={k} m={m:?} {e:e}");
        }
    }
}

#[test]
#[ignore = "k = -1/2: the flat measure gives weight to the band |λ| < 1/δ where K stays small; measured ~1.4e-2 to 1.7e-2"]
fn wide_window_reconstructs_fourier_order() {
    for m in [DUNKL, CHIRPED] {
        let e = limit_error(-0.5, m);
        assert!(e <= 1e-3, "m={m:?} {e:e}");
    }
}

#[test]
fn empty_window_gives_nothing() {
    let (cal, grid) = engine(0.0, DUNKL, 12.0, 1025);
    let f = gauss(&grid);
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let rec = cal.reconstruct_spectral(&f, &p, &win(1.0, 1.0 + 1e-12)).unwrap();
    assert!(rec.norm() <= 1e-9 * f.norm());
}

#[test]
fn reconstruction_is_linear() {
    let (cal, grid) = engine(0.0, CHIRPED, 10.0, 1025);
    let f = gauss(&grid);
    let g = SampledSignal::from_real_fn(grid.clone(), |x| x * (-x * x).exp());
    let p = Pair::new(WaveletSpec::hermite4(), WaveletSpec::hermite2()).unwrap();
    let w = win(0.2, 5.0);
    let c = C64::new(1.5, -0.25);
    let lhs = cal.reconstruct_spectral(&f.scale(c).add(&g).unwrap(), &p, &w).unwrap();
    let rhs = cal
        .reconstruct_spectral(&f, &p, &w)
        .unwrap()
        .scale(c)
        .add(&cal.reconstruct_spectral(&g, &p, &w).unwrap())
        .unwrap();
    assert!(lhs.rel_error(&rhs).unwrap() < 1e-12);
}

#[test]
fn direct_matches_spectral() {
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let w = win(0.25, 1.5);
    for k in [-0.5, 0.0] {
        let (cal, grid) = engine(k, DUNKL, 10.0, 257);
        let f = gauss(&grid);
        let a = cal.reconstruct_spectral(&f, &p, &w).unwrap();
        let b = cal.reconstruct_direct(&f, &p, &w, 32, false).unwrap();
        let e = b.rel_error(&a).unwrap();
        assert!(e <= 2e-3, "k={k} {e:e}");
    }
}

#[test]
fn direct_of_zero_is_zero() {
    let (cal, grid) = engine(0.0, DUNKL, 10.0, 257);
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let z = SampledSignal::zeros(grid);
    let rec = cal.reconstruct_direct(&z, &p, &win(0.5, 2.0), 4, false).unwrap();
    assert_eq!(rec.sup_norm(), 0.0);
}

#[test]
fn direct_has_cost_guard() {
    let (cal, grid) = engine(0.0, DUNKL, 12.0, 1025);
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let r = cal.reconstruct_direct(&gauss(&grid), &p, &win(0.5, 2.0), 4, false);
    assert!(matches!(r, Err(LcdtError::Cost { .. })));
}

#[test]
fn narrow_window_attenuates() {
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    for k in [-0.5, 0.0] {
        let (cal, grid) = engine(k, DUNKL, 10.0, 257);
        let f = gauss(&grid);
        let rec = cal.reconstruct_direct(&f, &p, &win(0.5, 2.0), 16, false).unwrap();
        assert!(rec.norm() < f.norm());
    }
}

#[test]
fn sweep_decreases_to_tolerance() {
    for m in [DUNKL, CHIRPED] {
        let (cal, grid) = engine(0.0, m, 12.0, 2049);
        let f = gauss(&grid);
        let s = cal
            .convergence_sweep(&f, &Pair::single(WaveletSpec::hermite2()).unwrap(), &nested())
            .unwrap();
        assert!(s.rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error), "{s:?}");
        assert!(s.rows.last().unwrap().rel_error <= 1e-3);

        let pair = Pair::new(WaveletSpec::hermite2(), WaveletSpec::hermite4()).unwrap();
        let s = cal.convergence_sweep(&f, &pair, &nested()).unwrap();
        // past the roundoff floor only non-increase is meaningful
        assert!(s.rows.windows(2).all(|w| w[1].rel_error <= w[0].rel_error.max(1e-10)));
        assert!(s.rows.last().unwrap().rel_error <= 1e-3);
    }
}

#[test]
fn sweep_of_one_window_is_one_reconstruction() {
    let (cal, grid) = engine(1.0, CHIRPED, 10.0, 1025);
    let f = gauss(&grid);
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let w = win(0.05, 20.0);
    let s = cal.convergence_sweep(&f, &p, &[w]).unwrap();
    let e = cal.reconstruct_spectral(&f, &p, &w).unwrap().rel_error(&f).unwrap();
    assert_eq!(s.rows.len(), 1);
    assert_eq!(s.rows[0].rel_error, e);
    assert!(s.non_increasing());
}

#[test]
fn sweep_rejects_unnested_windows() {
    let (cal, grid) = engine(0.0, DUNKL, 10.0, 257);
    let p = Pair::single(WaveletSpec::hermite2()).unwrap();
    let r = cal.convergence_sweep(&gauss(&grid), &p, &[win(0.01, 100.0), win(0.1, 1000.0)]);
    assert!(r.is_err());
    assert!(cal.convergence_sweep(&gauss(&grid), &p, &[]).is_err());
}
