use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lcdt::calderon::Calderon;
use lcdt::config::{self, OutputFormat, Setup};
use lcdt::cwt::Cwt;
use lcdt::extremal::extremal_cwt;
use lcdt::sobolev::{constant_cs, KernelKind, KernelTable};
use lcdt::validate;
use lcdt::LcdtError;

/// Largest grid size accepted without `--force-large`.
const LARGE_N: usize = 8193;

#[derive(Parser)]
#[command(name = "lcdt", version, about = "Linear canonical Dunkl transform toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the validation suite and write a JSON report.
    Validate(Common),
    /// Forward transform of the configured signal: lambda, re, im, abs.
    Transform(Common),
    /// Wavelet coefficients: alpha, beta, re, im, abs.
    Cwt(Common),
    /// Calderón convergence sweep: epsilon, delta, l2_error.
    Calderon(Common),
    /// Extremal reconstruction from the wavelet coefficients: y, re, im.
    Extremal(Common),
    /// Sobolev and resolvent kernels on a coarse sub-grid.
    Kernels(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accept grids larger than 8193 points.
    #[arg(long)]
    force_large: bool,
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<LcdtError> for Failure {
    fn from(e: LcdtError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Decimal with 17 significant digits; parses back to the same double.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut s = self.columns.join(",");
                s.push('\n');
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(|&v| num(v)).collect();
                    let _ = writeln!(s, "{}", cells.join(","));
                }
                s
            }
            OutputFormat::Json => {
                let v = json!({ "columns": self.columns, "rows": self.rows });
                serde_json::to_string_pretty(&v).expect("serializable") + "\n"
            }
        }
    }
}

fn load(c: &Common) -> Result<Setup, Failure> {
    let setup = config::load(&c.config).map_err(|e| Failure::Usage(e.to_string()))?;
    for w in &setup.warnings {
        eprintln!("warning: {w}");
    }
    let n = setup.plan.space().len().max(setup.plan.freq().len());
    if n > LARGE_N && !c.force_large {
        return Err(Failure::Usage(format!(
            "grid with n = {n} exceeds {LARGE_N}; pass --force-large to run it"
        )));
    }
    Ok(setup)
}

/// `--out`, else the config's output path (relative to the config file),
/// else `<command>.<ext>` in the working directory.
fn out_path(c: &Common, setup: &Setup, stem: &str, ext: &str) -> PathBuf {
    if let Some(p) = &c.out {
        return p.clone();
    }
    match &setup.config.output.path {
        Some(p) => c.config.parent().unwrap_or(Path::new(".")).join(p),
        None => PathBuf::from(format!("{stem}.{ext}")),
    }
}

fn ext(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn write_table(c: &Common, setup: &Setup, stem: &str, t: &Table) -> Result<PathBuf, Failure> {
    let f = setup.config.output.format;
    let p = out_path(c, setup, stem, ext(f));
    std::fs::write(&p, t.render(f))?;
    Ok(p)
}

fn cmd_validate(c: &Common) -> Result<(), Failure> {
    let setup = load(c)?;
    let report = validate::run(&setup);
    let p = out_path(c, &setup, "validate", "json");
    std::fs::write(&p, report.to_json())?;
    eprintln!(
        "{} checks, {} passed, {} failed; report at {}",
        report.checks.len(),
        report.passed,
        report.failed,
        p.display()
    );
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cmd_transform(c: &Common) -> Result<(), Failure> {
    let setup = load(c)?;
    let d = setup.plan.forward(&setup.signal)?;
    let rows = setup
        .plan
        .freq()
        .nodes()
        .iter()
        .zip(d.values())
        .map(|(&l, v)| vec![l, v.re, v.im, v.norm()])
        .collect();
    let t = Table {
        columns: &["lambda", "re", "im", "abs"],
        rows,
    };
    write_table(c, &setup, "transform", &t)?;
    Ok(())
}

fn cmd_cwt(c: &Common) -> Result<(), Failure> {
    let setup = load(c)?;
    let cwt = Cwt::new(setup.plan.clone())?;
    let psi = cwt.wavelet(setup.psi.clone())?;
    let g = cwt.cwt(&setup.signal, &psi, &setup.scales)?;
    let mut rows = Vec::new();
    for (i, (&a, row)) in setup.scales.scales().iter().zip(g.values()).enumerate() {
        for (j, v) in row.iter().enumerate() {
            rows.push(vec![a, g.beta(i, j), v.re, v.im, v.norm()]);
        }
    }
    let t = Table {
        columns: &["alpha", "beta", "re", "im", "abs"],
        rows,
    };
    write_table(c, &setup, "cwt", &t)?;
    Ok(())
}

fn cmd_calderon(c: &Common) -> Result<(), Failure> {
    let setup = load(c)?;
    let cal = Calderon::new(Cwt::new(setup.plan.clone())?);
    let sweep = cal.convergence_sweep(&setup.signal, &setup.pair, &setup.windows)?;
    let rows = sweep
        .rows
        .iter()
        .map(|r| vec![r.epsilon, r.delta, r.rel_error])
        .collect();
    let t = Table {
        columns: &["epsilon", "delta", "l2_error"],
        rows,
    };
    write_table(c, &setup, "calderon", &t)?;
    Ok(())
}

/// Solves for every configured ρ; the data file holds the smallest-ρ
/// reconstruction, the sidecar the per-ρ diagnostics.
fn cmd_extremal(c: &Common) -> Result<(), Failure> {
    let setup = load(c)?;
    let plan = &setup.plan;
    let cwt = Cwt::new(plan.clone())?;
    let psi = cwt.wavelet(setup.psi.clone())?;
    let f = &setup.signal;
    let g = cwt.cwt(f, &psi, &setup.scales)?;
    let gn = g.norm_sqr().sqrt();
    let s = setup.config.sobolev.s;
    let cs = constant_cs(s, setup.config.k, plan.matrix().b)?;
    let mut rhos = setup.rhos.clone();
    rhos.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut per_rho = Vec::new();
    let mut last = None;
    for &rho in &rhos {
        let p = setup.sobolev(rho);
        let fs = extremal_cwt(&g, &p, &psi, &cwt)?;
        let bound = cs / rho.sqrt() * gn;
        per_rho.push(json!({
            "rho": rho,
            "sup_norm": fs.sup_norm(),
            "theorem_bound": bound,
            "theorem_bound_holds": fs.sup_norm() <= bound,
            "sup_gap": fs.sub(f)?.sup_norm(),
            "l2_gap": fs.sub(f)?.norm(),
        }));
        last = Some(fs);
    }
    let fs = last.expect("at least one rho");
    let rows = plan
        .space()
        .nodes()
        .iter()
        .zip(fs.values())
        .map(|(&y, v)| vec![y, v.re, v.im])
        .collect();
    let t = Table {
        columns: &["y", "re", "im"],
        rows,
    };
    let p = write_table(c, &setup, "extremal", &t)?;
    let side = json!({
        "s": s,
        "c_psi": psi.constant(),
        "c_s": cs,
        "coefficient_norm": gn,
        "written_rho": rhos[rhos.len() - 1],
        "per_rho": per_rho,
    });
    std::fs::write(
        p.with_extension("sidecar.json"),
        serde_json::to_string_pretty(&side).expect("serializable") + "\n",
    )?;
    Ok(())
}

/// `K_s` and `R` (at the first configured ρ) on every 64th grid node.
fn cmd_kernels(c: &Common) -> Result<(), Failure> {
    let setup = load(c)?;
    let xs: Vec<f64> = setup.grid.nodes().iter().step_by(64).copied().collect();
    let s = setup.config.sobolev.s;
    let rho = setup.rhos[0];
    let ctx = setup.ctx();
    let ks = KernelTable::new(&xs, &xs, KernelKind::Ks { s }, ctx)?;
    let r = KernelTable::new(
        &xs,
        &xs,
        KernelKind::Rrho {
            s,
            rho,
            c: setup.pair.c_cross,
        },
        ctx,
    )?;
    let mut rows = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in xs.iter().enumerate() {
            let (a, b) = (ks.get(i, j), r.get(i, j));
            rows.push(vec![x, y, a.re, a.im, b.re, b.im]);
        }
    }
    let t = Table {
        columns: &["x", "y", "ks_re", "ks_im", "r_re", "r_im"],
        rows,
    };
    write_table(c, &setup, "kernels", &t)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Command::Validate(c) => cmd_validate(c),
        Command::Transform(c) => cmd_transform(c),
        Command::Cwt(c) => cmd_cwt(c),
        Command::Calderon(c) => cmd_calderon(c),
        Command::Extremal(c) => cmd_extremal(c),
        Command::Kernels(c) => cmd_kernels(c),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
