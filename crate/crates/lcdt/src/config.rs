//! JSON run configuration shared by the validation suite and the CLI.
//!
//! Every field has a default, so `{}` is a complete configuration. Load
//! errors carry the line of the offending key in the source document.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calderon::{CalderonWindow, Pair};
use crate::measure::{CanonicalMatrix, Multiplicity, SampledSignal, ScaleGrid, SpaceGrid};
use crate::sobolev::SobolevParams;
use crate::special::KernelContext;
use crate::transform::LcdtPlan;
use crate::wavelet::{WaveletSpec, Window};
use crate::{LcdtError, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub k: f64,
    pub matrix: [f64; 4],
    pub grid: GridConfig,
    pub freq_grid: Option<FreqGridConfig>,
    pub scales: ScalesConfig,
    pub wavelet: WaveletConfig,
    pub sobolev: SobolevConfig,
    pub tikhonov: TikhonovConfig,
    pub calderon: CalderonConfig,
    pub signal: SignalConfig,
    pub output: OutputConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: 0.0,
            matrix: [1.0, 1.0, 0.5, 1.5],
            grid: GridConfig::default(),
            freq_grid: None,
            scales: ScalesConfig::default(),
            wavelet: WaveletConfig::default(),
            sobolev: SobolevConfig::default(),
            tikhonov: TikhonovConfig::default(),
            calderon: CalderonConfig::default(),
            signal: SignalConfig::default(),
            output: OutputConfig::default(),
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_max: f64,
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            x_max: 12.0,
            n: 2049,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreqGridConfig {
    pub lambda_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalesConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub m: usize,
}

impl Default for ScalesConfig {
    fn default() -> Self {
        ScalesConfig {
            alpha_min: 1e-2,
            alpha_max: 1e2,
            m: 64,
        }
    }
}

/// Window names are `hermite2`, `hermite4`; anything else is read as the
/// path of a CSV table `u, W(u)` on a uniform grid starting at `u = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletConfig {
    pub window: String,
    pub synthesis_window: Option<String>,
}

impl Default for WaveletConfig {
    fn default() -> Self {
        WaveletConfig {
            window: "hermite2".into(),
            synthesis_window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolevConfig {
    pub s: f64,
}

impl Default for SobolevConfig {
    fn default() -> Self {
        SobolevConfig { s: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TikhonovConfig {
    pub rho: Option<f64>,
    pub rho_list: Option<Vec<f64>>,
}

impl Default for TikhonovConfig {
    fn default() -> Self {
        TikhonovConfig {
            rho: None,
            rho_list: Some(vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]),
        }
    }
}

impl TikhonovConfig {
    pub fn values(&self) -> Vec<f64> {
        match (&self.rho, &self.rho_list) {
            (Some(r), _) => vec![*r],
            (None, Some(l)) => l.clone(),
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalderonConfig {
    pub epsilon_list: Vec<f64>,
    pub delta_list: Vec<f64>,
}

impl Default for CalderonConfig {
    fn default() -> Self {
        CalderonConfig {
            epsilon_list: vec![0.5, 0.2, 0.1, 1e-2, 1e-3, 1e-4],
            delta_list: vec![2.0, 5.0, 10.0, 1e2, 1e3, 1e4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalName {
    Gaussian,
    Hermite,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalParams {
    pub center: f64,
    pub width: f64,
    /// Hermite degree.
    pub order: u32,
}

impl Default for SignalParams {
    fn default() -> Self {
        SignalParams {
            center: 0.5,
            width: 1.0,
            order: 2,
        }
    }
}

/// `gaussian`: `exp(-(x-c)²/(2w²))`; `hermite`: `H_n((x-c)/w)` times that
/// Gaussian; `table`: CSV `x, re, im` at `path`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    pub name: SignalName,
    pub params: SignalParams,
    pub path: Option<String>,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig {
            name: SignalName::Gaussian,
            params: SignalParams::default(),
            path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            path: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Load or validation failure, located in the config text when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}: {}", self.field, self.message),
            None => write!(f, "config: {}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Line of the last key in `path`, searching each key after the previous one.
/// Falls back to the deepest key found.
pub fn locate(text: &str, path: &[&str]) -> Option<usize> {
    let mut pos = 0;
    let mut found = None;
    for key in path {
        let pat = format!("\"{key}\"");
        match text[pos..].find(&pat) {
            Some(i) => {
                pos += i;
                found = Some(pos);
                pos += pat.len();
            }
            None => break,
        }
    }
    found.map(|p| text[..p].matches('\n').count() + 1)
}

/// Everything the pipelines need, built from a validated config.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: RunConfig,
    pub plan: LcdtPlan<f64>,
    pub grid: Arc<SpaceGrid<f64>>,
    pub scales: ScaleGrid<f64>,
    pub psi: WaveletSpec,
    pub phi: WaveletSpec,
    pub pair: Pair,
    pub rhos: Vec<f64>,
    pub windows: Vec<CalderonWindow>,
    pub signal: SampledSignal<f64>,
    pub warnings: Vec<String>,
}

impl Setup {
    pub fn sobolev(&self, rho: f64) -> SobolevParams {
        SobolevParams::new(self.config.sobolev.s, rho).expect("validated at load")
    }

    pub fn ctx(&self) -> &KernelContext<f64> {
        self.plan.ctx()
    }
}

struct Loader<'a> {
    text: &'a str,
    base: PathBuf,
}

impl Loader<'_> {
    fn err(&self, path: &[&str], message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: locate(self.text, path),
            field: path.join("."),
            message: message.into(),
        }
    }

    fn lib(&self, path: &[&str], e: LcdtError) -> ConfigError {
        self.err(path, e.to_string())
    }

    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn window(&self, field: &[&str], name: &str) -> Result<WaveletSpec, ConfigError> {
        match name {
            "hermite2" => return Ok(WaveletSpec::hermite2()),
            "hermite4" => return Ok(WaveletSpec::hermite4()),
            _ => {}
        }
        let path = self.resolve(name);
        let rows = read_csv(&path, 2).map_err(|m| self.err(field, m))?;
        if rows.len() < 4 {
            return Err(self.err(field, format!("{}: need at least 4 rows", path.display())));
        }
        let h = rows[1][0] - rows[0][0];
        let uniform = rows
            .iter()
            .enumerate()
            .all(|(j, r)| (r[0] - rows[0][0] - j as f64 * h).abs() <= 1e-9 * h.abs().max(1.0));
        if rows[0][0] != 0.0 || !(h > 0.0) || !uniform {
            return Err(self.err(
                field,
                format!("{}: window table must start at u = 0 on a uniform grid", path.display()),
            ));
        }
        let u_max = rows[rows.len() - 1][0];
        let values = rows.iter().map(|r| r[1]).collect();
        WaveletSpec::new(Window::Table { u_max, values }).map_err(|e| self.lib(field, e))
    }

    fn signal(&self, c: &RunConfig, grid: &Arc<SpaceGrid<f64>>) -> Result<(SampledSignal<f64>, Vec<String>), ConfigError> {
        let p = &c.signal.params;
        if c.signal.name != SignalName::Table {
            if !(p.width > 0.0 && p.width.is_finite()) {
                return Err(self.err(&["signal", "params", "width"], "width must be positive and finite"));
            }
            if !p.center.is_finite() {
                return Err(self.err(&["signal", "params", "center"], "center must be finite"));
            }
        }
        let (ctr, w) = (p.center, p.width);
        let gauss = move |x: f64| (-(x - ctr) * (x - ctr) / (2.0 * w * w)).exp();
        match c.signal.name {
            SignalName::Gaussian => Ok((SampledSignal::from_real_fn(grid.clone(), gauss), Vec::new())),
            SignalName::Hermite => {
                let n = p.order;
                Ok((
                    SampledSignal::from_real_fn(grid.clone(), move |x| hermite(n, (x - ctr) / w) * gauss(x)),
                    Vec::new(),
                ))
            }
            SignalName::Table => {
                let Some(path) = &c.signal.path else {
                    return Err(self.err(&["signal", "name"], "table signal needs a path"));
                };
                let path = self.resolve(path);
                let rows = read_csv(&path, 3).map_err(|m| self.err(&["signal", "path"], m))?;
                if rows.len() < 4 {
                    return Err(self.err(&["signal", "path"], format!("{}: need at least 4 rows", path.display())));
                }
                if let Some(j) = rows.windows(2).position(|w| !(w[1][0] > w[0][0])) {
                    return Err(self.err(
                        &["signal", "path"],
                        format!("{}: x not strictly increasing at data row {}", path.display(), j + 2),
                    ));
                }
                let mut warnings = Vec::new();
                let peak = rows.iter().map(|r| r[1].hypot(r[2])).fold(0.0, f64::max);
                let edge = rows[0][1].hypot(rows[0][2]).max(rows[rows.len() - 1][1].hypot(rows[rows.len() - 1][2]));
                if edge > 1e-6 * peak {
                    warnings.push(format!(
                        "signal table has not decayed at its ends (|f| = {edge:e} of peak {peak:e}); values outside the table are set to zero"
                    ));
                }
                let (x0, x1) = (rows[0][0], rows[rows.len() - 1][0]);
                if x0 > -grid.x_max() || x1 < grid.x_max() {
                    warnings.push(format!(
                        "signal table covers [{x0}, {x1}], narrower than the grid [-{0}, {0}]",
                        grid.x_max()
                    ));
                }
                let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
                let vs: Vec<C64> = rows.iter().map(|r| C64::new(r[1], r[2])).collect();
                Ok((
                    SampledSignal::from_fn(grid.clone(), |x| cubic_interp(&xs, &vs, x)),
                    warnings,
                ))
            }
        }
    }
}

/// Physicists' Hermite polynomial.
fn hermite(n: u32, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for j in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Four-point Lagrange interpolation on increasing nodes; zero outside.
fn cubic_interp(xs: &[f64], vs: &[C64], x: f64) -> C64 {
    let n = xs.len();
    if x < xs[0] || x > xs[n - 1] {
        return C64::new(0.0, 0.0);
    }
    let i = xs.partition_point(|&t| t <= x).clamp(2, n - 2);
    let lo = i - 2;
    let mut out = C64::new(0.0, 0.0);
    for a in lo..lo + 4 {
        let mut l = 1.0;
        for b in lo..lo + 4 {
            if a != b {
                l *= (x - xs[b]) / (xs[a] - xs[b]);
            }
        }
        out += vs[a] * l;
    }
    out
}

/// Numeric CSV rows with at least `cols` columns; a non-numeric first line is
/// taken as a header.
fn read_csv(path: &Path, cols: usize) -> Result<Vec<Vec<f64>>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) if r.len() >= cols && r.iter().all(|v| v.is_finite()) => rows.push(r),
            Ok(_) => return Err(format!("{} line {}: expected {cols} finite columns", path.display(), i + 1)),
            Err(_) if rows.is_empty() && i == 0 => continue,
            Err(_) => return Err(format!("{} line {}: not a number", path.display(), i + 1)),
        }
    }
    Ok(rows)
}

/// Parses `text` and re-validates every precondition of the pipelines.
/// Relative paths resolve against `base`.
pub fn load_str(text: &str, base: &Path) -> Result<Setup, ConfigError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        line: Some(e.line()),
        field: "json".into(),
        message: e.to_string(),
    })?;
    build(config, text, base)
}

pub fn load(path: &Path) -> Result<Setup, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        field: "file".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    load_str(&text, path.parent().unwrap_or(Path::new(".")))
}

fn build(c: RunConfig, text: &str, base: &Path) -> Result<Setup, ConfigError> {
    let ld = Loader {
        text,
        base: base.to_path_buf(),
    };
    let k = Multiplicity::new(c.k).map_err(|e| ld.lib(&["k"], e))?;
    let [a, b, cc, d] = c.matrix;
    let m = CanonicalMatrix::new(a, b, cc, d).map_err(|e| ld.lib(&["matrix"], e))?;
    let grid = SpaceGrid::shared(k, c.grid.x_max, c.grid.n).map_err(|e| ld.lib(&["grid"], e))?;
    let freq = match &c.freq_grid {
        Some(f) => SpaceGrid::shared(k, f.lambda_max, f.n).map_err(|e| ld.lib(&["freq_grid"], e))?,
        None => grid.clone(),
    };
    let ctx = KernelContext::new(k, m);
    let plan = LcdtPlan::new(ctx, grid.clone(), freq.clone()).map_err(|e| {
        let at: &[&str] = if c.freq_grid.is_some() { &["freq_grid"] } else { &["grid"] };
        ld.lib(at, e)
    })?;
    let scales = ScaleGrid::new(k, c.scales.alpha_min, c.scales.alpha_max, c.scales.m)
        .map_err(|e| ld.lib(&["scales"], e))?;
    let psi = ld.window(&["wavelet", "window"], &c.wavelet.window)?;
    let phi = match &c.wavelet.synthesis_window {
        Some(w) => ld.window(&["wavelet", "synthesis_window"], w)?,
        None => psi.clone(),
    };
    let pair = Pair::new(psi.clone(), phi.clone()).map_err(|e| ld.lib(&["wavelet"], e))?;
    let s = c.sobolev.s;
    if !s.is_finite() || s <= c.k + 1.0 {
        return Err(ld.err(
            &["sobolev", "s"],
            format!("sobolev order too small: s = {s} must exceed k + 1 = {}", c.k + 1.0),
        ));
    }
    if c.tikhonov.rho.is_some() && c.tikhonov.rho_list.is_some() {
        return Err(ld.err(&["tikhonov"], "give either rho or rho_list, not both"));
    }
    let rhos = c.tikhonov.values();
    if rhos.is_empty() {
        return Err(ld.err(&["tikhonov"], "need rho or a non-empty rho_list"));
    }
    for &r in &rhos {
        SobolevParams::new(s, r).map_err(|e| ld.lib(&["tikhonov"], e))?;
    }
    let cal = &c.calderon;
    if cal.epsilon_list.len() != cal.delta_list.len() || cal.epsilon_list.is_empty() {
        return Err(ld.err(
            &["calderon"],
            "epsilon_list and delta_list must be non-empty and of equal length",
        ));
    }
    let windows = cal
        .epsilon_list
        .iter()
        .zip(&cal.delta_list)
        .map(|(&e, &d)| CalderonWindow::new(e, d))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ld.lib(&["calderon"], e))?;
    if windows.windows(2).any(|w| !w[1].contains(&w[0])) {
        return Err(ld.err(&["calderon"], "windows must be nested and widening"));
    }
    let (signal, warnings) = ld.signal(&c, &grid)?;
    Ok(Setup {
        config: c,
        plan,
        grid,
        scales,
        psi,
        phi,
        pair,
        rhos,
        windows,
        signal,
        warnings,
    })
}

impl RunConfig {
    /// Validates this config as if loaded from its own pretty JSON.
    pub fn setup(&self, base: &Path) -> Result<Setup, ConfigError> {
        let text = serde_json::to_string_pretty(self).expect("serializable");
        build(self.clone(), &text, base)
    }
}
