//! Summation, Gauss–Legendre rules and uniform-grid interpolation.

use num_complex::Complex;

use crate::Real;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Accum<T> {
    pub fn new() -> Self {
        Accum {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated accumulator for complex values (componentwise).
#[derive(Debug, Clone, Copy, Default)]
pub struct CAccum<T> {
    re: Accum<T>,
    im: Accum<T>,
}

impl<T: Real> CAccum<T> {
    pub fn new() -> Self {
        CAccum {
            re: Accum::new(),
            im: Accum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex<T> {
        Complex::new(self.re.value(), self.im.value())
    }
}

pub fn sum<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    let mut acc = Accum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

pub fn csum<T: Real>(zs: impl IntoIterator<Item = Complex<T>>) -> Complex<T> {
    let mut acc = CAccum::new();
    for z in zs {
        acc.add(z);
    }
    acc.value()
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule: `panels` equal panels on [a, b], `order` points each.
#[derive(Debug, Clone)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        PanelRule { nodes, weights }
    }

    /// Panels of width at most `max_width` covering [a, b].
    pub fn with_width(a: f64, b: f64, max_width: f64, order: usize) -> Self {
        let panels = (((b - a) / max_width).ceil() as usize).max(1);
        Self::new(a, b, panels, order)
    }

    /// Geometrically graded panels on [0, b] refining toward 0, for integrands
    /// with a power singularity at the origin.
    pub fn graded(b: f64, levels: usize, order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut edges = vec![0.0];
        for l in (0..levels).rev() {
            edges.push(b / 2f64.powi(l as i32));
        }
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let h = hi - lo;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(lo + 0.5 * h * (1.0 + x));
                weights.push(0.5 * h * w);
            }
        }
        PanelRule { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        sum(self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)))
    }
}

/// Lagrange interpolation of uniformly sampled data.
///
/// `values[j]` sits at `x0 + j*h`. Uses the `order` nodes nearest to `x`.
/// Returns `None` when `x` lies outside the sampled range.
pub fn lagrange_uniform<T: Real>(
    values: &[Complex<T>],
    x0: T,
    h: T,
    x: T,
    order: usize,
) -> Option<Complex<T>> {
    let n = values.len();
    let last = x0 + h * T::lit((n - 1) as f64);
    let tol = h * T::lit(1e-9);
    if x < x0 - tol || x > last + tol || n == 0 {
        return None;
    }
    let order = order.min(n).max(1);
    let s = (x - x0) / h;
    let nearest = s.round().to_isize().unwrap_or(0);
    if (s - T::lit(nearest as f64)).abs() < T::lit(1e-12) {
        return Some(values[nearest.clamp(0, n as isize - 1) as usize]);
    }
    let left = s.floor().to_isize().unwrap_or(0) - (order as isize - 1) / 2;
    let start = left.clamp(0, (n - order) as isize) as usize;
    let mut acc = CAccum::new();
    for j in 0..order {
        let xj = T::lit((start + j) as f64);
        let mut l = T::one();
        for i in 0..order {
            if i != j {
                let xi = T::lit((start + i) as f64);
                l *= (s - xi) / (xj - xi);
            }
        }
        acc.add(values[start + j] * l);
    }
    Some(acc.value())
}

/// Cubic (four point) interpolation on a uniform grid.
pub fn cubic_uniform<T: Real>(values: &[Complex<T>], x0: T, h: T, x: T) -> Option<Complex<T>> {
    lagrange_uniform(values, x0, h, x, 4)
}
