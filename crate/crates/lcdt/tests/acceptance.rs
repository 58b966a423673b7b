//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every rig configuration (k ∈ {−1/2, 0, 1}, two matrices, x_max = 12,
//! n = 2049) goes through the validation suite; criteria collect the
//! relevant checks across the rig. Transform reductions are compared with
//! pointwise quadratures written out here.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::time::Instant;

use lcdt::config::{load_str, Setup};
use lcdt::special::dunkl_kernel;
use lcdt::validate::{self, Check, Report};
use lcdt::*;

const KS: [f64; 3] = [-0.5, 0.0, 1.0];
const MATRICES: [[f64; 4]; 2] = [[0.0, -1.0, 1.0, 0.0], [1.0, 1.0, 0.5, 1.5]];

struct Rig {
    k: f64,
    m: [f64; 4],
    setup: Setup,
    report: Report,
}

fn config_text(k: f64, m: [f64; 4]) -> String {
    // the Sobolev order must exceed k + 1
    let s = if k >= 1.0 { 3.0 } else { 2.0 };
    format!(
        r#"{{"k": {k}, "matrix": [{}, {}, {}, {}], "grid": {{"x_max": 12.0, "n": 2049}}, "sobolev": {{"s": {s}}}}}"#,
        m[0], m[1], m[2], m[3]
    )
}

fn setup(k: f64, m: [f64; 4]) -> Setup {
    load_str(&config_text(k, m), Path::new(".")).expect("rig config is valid")
}

struct Outcome {
    pass: bool,
    detail: String,
}

/// Collects the named checks over the rig: passes iff each passes, and
/// reports the first failure or the worst ratio to the bound.
fn from_checks(rigs: &[Rig], names: &[&str]) -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    for r in rigs {
        for c in r.report.checks.iter().filter(|c| names.contains(&c.check_name.as_str())) {
            count += 1;
            if !c.pass {
                failures.push(describe(r, c));
            }
        }
    }
    if count == 0 {
        return Outcome {
            pass: false,
            detail: "no matching checks".into(),
        };
    }
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: format!("{count} checks"),
        }
    } else {
        Outcome {
            pass: false,
            detail: format!("{}/{count} failed: {}", failures.len(), failures.join("; ")),
        }
    }
}

fn describe(r: &Rig, c: &Check) -> String {
    let m = c.measured.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
    format!("{} k={} M={:?} measured {m} bound {:.1e}", c.check_name, r.k, r.m, c.bound)
}

fn merge(parts: Vec<Outcome>) -> Outcome {
    let pass = parts.iter().all(|o| o.pass);
    let detail = parts.into_iter().map(|o| o.detail).collect::<Vec<_>>().join(" | ");
    Outcome { pass, detail }
}

fn bounded(label: &str, worst: f64, bound: f64) -> Outcome {
    Outcome {
        pass: worst <= bound,
        detail: format!("{label} {worst:.3e} (bound {bound:.0e})"),
    }
}

/// `(−i)^{-(k+1)} Σ w_m E_k(iλ, x_m) f_m` with pointwise kernel values.
fn dunkl_quadrature(k: f64, grid: &SpaceGridF64, f: &[C64]) -> Vec<C64> {
    let pre = C64::from_polar(1.0, FRAC_PI_2 * (k + 1.0));
    grid.nodes()
        .iter()
        .map(|&l| {
            let mut s = C64::new(0.0, 0.0);
            for ((&x, &w), v) in grid.nodes().iter().zip(grid.weights()).zip(f) {
                s += dunkl_kernel(k, l, x) * v * w;
            }
            pre * s
        })
        .collect()
}

/// Trapezoid rule for `(2π i b)^{-1/2} ∫ e^{(i/2)(dλ²+ax²)/b - iλx/b} f(x) dx`.
fn lct_quadrature(m: [f64; 4], xs: &[f64], f: &[C64]) -> Vec<C64> {
    let [a, b, _, d] = m;
    let n = xs.len();
    let h = xs[1] - xs[0];
    let pre = C64::from_polar(b.abs().sqrt(), b.signum() * PI / 4.0).inv() / (2.0 * PI).sqrt();
    xs.iter()
        .map(|&l| {
            let mut s = C64::new(0.0, 0.0);
            for (j, (&x, v)) in xs.iter().zip(f).enumerate() {
                let w = if j == 0 || j == n - 1 { 0.5 * h } else { h };
                s += C64::from_polar(w, 0.5 * (d * l * l + a * x * x) / b - l * x / b) * v;
            }
            pre * s
        })
        .collect()
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn reductions(rigs: &[Rig]) -> Outcome {
    let sig = |x: f64| C64::from_polar((-(x - 0.5).powi(2) / 1.5).exp(), 0.4 * x);
    let mut lct = 0.0f64;
    let mut dunkl = 0.0f64;
    for r in rigs {
        let plan = &r.setup.plan;
        let grid = plan.space();
        let f = SampledSignal::from_fn(grid.clone(), sig);
        let got = plan.forward(&f).expect("forward");
        if r.k == -0.5 {
            lct = lct.max(max_diff(got.values(), &lct_quadrature(r.m, grid.nodes(), f.values())));
        }
        if r.m == MATRICES[0] {
            dunkl = dunkl.max(max_diff(got.values(), &dunkl_quadrature(r.k, grid, f.values())));
        }
    }
    merge(vec![
        bounded("lct", lct, 1e-10),
        bounded("dunkl", dunkl, 1e-12),
        from_checks(rigs, &["lcdt.gaussian_pair"]),
    ])
}

fn determinism(setup: &Setup) -> Outcome {
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(|| validate::run(setup).to_json())
    };
    let a = in_pool(1);
    let b = in_pool(4);
    let c = in_pool(4);
    Outcome {
        pass: a == b && b == c,
        detail: format!("{} bytes; 1 vs 4 workers {}, repeat {}", a.len(), a == b, b == c),
    }
}

fn main() {
    let t0 = Instant::now();
    let mut rigs = Vec::new();
    for k in KS {
        for m in MATRICES {
            let setup = setup(k, m);
            let report = validate::run(&setup);
            rigs.push(Rig { k, m, setup, report });
        }
    }
    let criteria: Vec<(&str, Outcome)> = vec![
        ("AC1 unitarity", from_checks(&rigs, &["lcdt.plancherel", "lcdt.parseval"])),
        ("AC2 inversion", from_checks(&rigs, &["lcdt.roundtrip"])),
        ("AC3 classical reductions", reductions(&rigs)),
        (
            "AC4 convolution",
            from_checks(&rigs, &["convolution.direct_oracle", "convolution.l2_identity"]),
        ),
        (
            "AC5 admissibility",
            from_checks(
                &rigs,
                &[
                    "wavelet.constant_hermite2",
                    "wavelet.constant_hermite4",
                    "wavelet.constant_cross",
                    "wavelet.lambda_independence",
                ],
            ),
        ),
        (
            "AC6 wavelet transform",
            from_checks(
                &rigs,
                &[
                    "cwt.plancherel",
                    "cwt.orthogonality",
                    "cwt.inversion",
                    "cwt.plancherel_decreasing",
                    "cwt.direct_oracle",
                ],
            ),
        ),
        (
            "AC7 Calderon",
            from_checks(
                &rigs,
                &[
                    "calderon.multiplier",
                    "calderon.sweep_monotone",
                    "calderon.sweep_final",
                    "calderon.direct_oracle",
                ],
            ),
        ),
        (
            "AC8 Sobolev kernel",
            from_checks(
                &rigs,
                &["sobolev.ks_fourier_closed_form", "sobolev.reproducing", "sobolev.cs_fourier_value"],
            ),
        ),
        (
            "AC9 extremal solvers",
            from_checks(
                &rigs,
                &[
                    "extremal.two_path",
                    "extremal.q_kernel_oracle",
                    "extremal.lcdt_two_path",
                    "extremal.pointwise_bound",
                    "extremal.rho_sweep_monotone",
                    "extremal.rho_sweep_final",
                    "extremal.lcdt_energy_bound",
                ],
            ),
        ),
        (
            "AC10 kernel bounds",
            from_checks(
                &rigs,
                &[
                    "sobolev.rrho_bound_sobolev",
                    "sobolev.rrho_bound_analysis",
                    "sobolev.rrho_bound_normal",
                ],
            ),
        ),
        ("AC11 determinism", determinism(&rigs[3].setup)),
    ];
    let mut failed = 0;
    for (name, o) in &criteria {
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        criteria.len() - failed,
        t0.elapsed().as_secs_f64()
    );
}
