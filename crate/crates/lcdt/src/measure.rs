//! Grids, weighted quadrature for `μ_k` and `ν_k`, branch conventions and inner products.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{LcdtError, Result};
use crate::quad::{CAccum, Accum};
use crate::special::{gamma, zeta_neg};
use crate::Real;

/// Multiplicity parameter `k >= -1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity<T>(T);

impl<T: Real> Multiplicity<T> {
    pub fn new(k: T) -> Result<Self> {
        if !k.is_finite() || k < T::lit(-0.5) {
            return Err(LcdtError::param("multiplicity", format!("k = {k} < -1/2")));
        }
        Ok(Multiplicity(k))
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// Exponent `2k + 1` of the density `|x|^{2k+1}`.
    #[inline]
    pub fn beta(self) -> T {
        T::lit(2.0) * self.0 + T::one()
    }

    /// Normalization `2^{k+1} Γ(k+1)`.
    pub fn normalization(self) -> T {
        let k = self.0.as_f64();
        T::lit(2f64.powf(k + 1.0) * gamma(k + 1.0))
    }

    /// True at `k = -1/2`, where the Dunkl kernel reduces to the exponential.
    #[inline]
    pub fn is_fourier(self) -> bool {
        self.0 == T::lit(-0.5)
    }
}

/// `M = (a, b; c, d)` in SL(2, R) with `b != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMatrix<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> CanonicalMatrix<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(LcdtError::param("matrix", "non-finite entry"));
        }
        if b == T::zero() {
            return Err(LcdtError::param("matrix", "b = 0 is not supported"));
        }
        let det = a * d - b * c;
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
        if (det - T::one()).abs() > tol {
            return Err(LcdtError::param(
                "matrix",
                format!("determinant ad - bc = {det} differs from 1"),
            ));
        }
        Ok(CanonicalMatrix { a, b, c, d })
    }

    /// `(0, -1; 1, 0)`: no chirps, the plain Dunkl transform.
    pub fn dunkl() -> Self {
        CanonicalMatrix {
            a: T::zero(),
            b: -T::one(),
            c: T::one(),
            d: T::zero(),
        }
    }

    pub fn inverse(&self) -> Self {
        CanonicalMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Chirp rate `a/b` of the space variable.
    #[inline]
    pub fn a_over_b(&self) -> T {
        self.a / self.b
    }

    /// Chirp rate `d/b` of the frequency variable.
    #[inline]
    pub fn d_over_b(&self) -> T {
        self.d / self.b
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Principal branch of `(ib)^e`: `|b|^e exp(iπ e sign(b)/2)`.
pub fn pow_ib<T: Real>(b: T, e: T) -> Result<Complex<T>> {
    if b == T::zero() {
        return Err(LcdtError::param("b", "pow_ib requires b != 0"));
    }
    let arg = T::FRAC_PI_2() * e * b.signum();
    Ok(Complex::from_polar(b.abs().powf(e), arg))
}

/// Uniform symmetric grid on `[-x_max, x_max]` with `μ_k` quadrature weights.
///
/// The weights are trapezoid weights times the density. For `k > -1/2` the
/// density has a `|x|^{2k+1}` kink at the origin; the first two terms of the
/// generalized Euler–Maclaurin error, `ζ(-β-j) G^{(j)}(0) Δ^{β+j+1} / j!` for
/// `j = 0, 2` with `β = 2k+1` and `G(x) = φ(x) + φ(-x)`, are removed using
/// values of `G` at `Δ, 2Δ, 3Δ`, so the origin keeps weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGrid<T> {
    k: Multiplicity<T>,
    x_max: T,
    n: usize,
    delta: T,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> SpaceGrid<T> {
    pub fn new(k: Multiplicity<T>, x_max: T, n: usize) -> Result<Self> {
        if !(x_max > T::zero()) || !x_max.is_finite() {
            return Err(LcdtError::param("grid", format!("x_max = {x_max} must be positive")));
        }
        if n < 3 || n.is_multiple_of(2) {
            return Err(LcdtError::param("grid", format!("n = {n} must be odd and >= 3")));
        }
        let half = (n - 1) / 2;
        let delta = x_max / T::lit(half as f64);
        let nodes: Vec<T> = (0..n)
            .map(|j| {
                let s = j as isize - half as isize;
                if s == 0 {
                    T::zero()
                } else {
                    delta * T::lit(s as f64)
                }
            })
            .collect();

        let kf = k.value().as_f64();
        let beta = 2.0 * kf + 1.0;
        let norm = 2f64.powf(kf + 1.0) * gamma(kf + 1.0);
        let dl = delta.as_f64();
        let mut w: Vec<f64> = (0..n)
            .map(|j| {
                let s = j as isize - half as isize;
                let trap = if j == 0 || j == n - 1 { 0.5 * dl } else { dl };
                let r = (s.unsigned_abs() as f64) * dl;
                if s == 0 {
                    if beta == 0.0 {
                        trap / norm
                    } else {
                        0.0
                    }
                } else {
                    trap * r.powf(beta) / norm
                }
            })
            .collect();
        if beta > 0.0 && half >= 4 {
            let scale = dl.powf(beta + 1.0) / norm;
            let c0 = zeta_neg(beta) * scale;
            let c2 = zeta_neg(beta + 2.0) * scale;
            // G(0) ≈ (15 G1 - 6 G2 + G3)/10, Δ² G''(0)/2 ≈ (16 G2 - 13 G1 - 3 G3)/24
            let stencil = [
                1.5 * c0 - 13.0 / 24.0 * c2,
                -0.6 * c0 + 16.0 / 24.0 * c2,
                0.1 * c0 - 3.0 / 24.0 * c2,
            ];
            for side in [-1isize, 1] {
                for (m, s) in stencil.iter().enumerate() {
                    w[(half as isize + (m as isize + 1) * side) as usize] -= s;
                }
            }
        } else if beta > 0.0 && half >= 2 {
            let c = zeta_neg(beta) * dl.powf(beta + 1.0) / norm;
            for side in [-1isize, 1] {
                w[(half as isize + side) as usize] -= 4.0 / 3.0 * c;
                w[(half as isize + 2 * side) as usize] += c / 3.0;
            }
        }
        let weights = w.into_iter().map(T::lit).collect();
        Ok(SpaceGrid {
            k,
            x_max,
            n,
            delta,
            nodes,
            weights,
        })
    }

    pub fn shared(k: Multiplicity<T>, x_max: T, n: usize) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(k, x_max, n)?))
    }

    #[inline]
    pub fn k(&self) -> Multiplicity<T> {
        self.k
    }
    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }
    #[inline]
    pub fn delta(&self) -> T {
        self.delta
    }
    /// Number of nodes strictly on one side of the origin.
    #[inline]
    pub fn half(&self) -> usize {
        (self.n - 1) / 2
    }
    #[inline]
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }
    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Same multiplicity, extent and node count.
    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n && self.x_max == other.x_max && self.k == other.k
    }

    /// Quadrature of a sampled function against `μ_k`.
    pub fn integrate(&self, values: impl IntoIterator<Item = T>) -> T {
        let mut acc = Accum::new();
        for (v, w) in values.into_iter().zip(&self.weights) {
            acc.add(v * *w);
        }
        acc.value()
    }

    pub fn integrate_complex(&self, values: impl IntoIterator<Item = Complex<T>>) -> Complex<T> {
        let mut acc = CAccum::new();
        for (v, w) in values.into_iter().zip(&self.weights) {
            acc.add(v * *w);
        }
        acc.value()
    }

    /// The same node layout stretched by `s`: nodes `s x_j`, weights `s^{2k+2} w_j`.
    pub fn stretched(&self, s: T) -> Self {
        let p = s.powf(T::lit(2.0) * self.k.value() + T::lit(2.0));
        SpaceGrid {
            k: self.k,
            x_max: self.x_max * s,
            n: self.n,
            delta: self.delta * s,
            nodes: self.nodes.iter().map(|x| *x * s).collect(),
            weights: self.weights.iter().map(|w| *w * p).collect(),
        }
    }
}

/// Log-spaced scales with midpoint-in-log weights for `dα/α^{2k+3}`.
///
/// Scale `i` sits at the centre of the `i`-th of `m` equal cells of
/// `[ln α_min, ln α_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid<T> {
    alpha_min: T,
    alpha_max: T,
    log_step: T,
    scales: Vec<T>,
    nu_weights: Vec<T>,
}

impl<T: Real> ScaleGrid<T> {
    pub fn new(k: Multiplicity<T>, alpha_min: T, alpha_max: T, m: usize) -> Result<Self> {
        if !(alpha_min > T::zero()) || !(alpha_max > alpha_min) || !alpha_max.is_finite() {
            return Err(LcdtError::param(
                "scales",
                format!("need 0 < alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"),
            ));
        }
        if m == 0 {
            return Err(LcdtError::param("scales", "m must be positive"));
        }
        let l0 = alpha_min.ln();
        let h = (alpha_max.ln() - l0) / T::lit(m as f64);
        let p = T::lit(2.0) * k.value() + T::lit(2.0);
        let scales: Vec<T> = (0..m)
            .map(|i| (l0 + h * (T::lit(i as f64) + T::lit(0.5))).exp())
            .collect();
        let nu_weights = scales.iter().map(|a| h * a.powf(-p)).collect();
        Ok(ScaleGrid {
            alpha_min,
            alpha_max,
            log_step: h,
            scales,
            nu_weights,
        })
    }

    #[inline]
    pub fn alpha_min(&self) -> T {
        self.alpha_min
    }
    #[inline]
    pub fn alpha_max(&self) -> T {
        self.alpha_max
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.scales.len()
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
    #[inline]
    pub fn scales(&self) -> &[T] {
        &self.scales
    }
    /// Weights approximating `∫_cell dα/α^{2k+3}`.
    #[inline]
    pub fn nu_weights(&self) -> &[T] {
        &self.nu_weights
    }
    /// Cell width in `ln α`, the weight for `dα/α`.
    #[inline]
    pub fn log_step(&self) -> T {
        self.log_step
    }
}

/// Complex samples of a function on a [`SpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal<T> {
    grid: Arc<SpaceGrid<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SampledSignal<T> {
    pub fn new(grid: Arc<SpaceGrid<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LcdtError::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(LcdtError::param("signal", "non-finite sample"));
        }
        Ok(SampledSignal { grid, values })
    }

    pub fn from_fn(grid: Arc<SpaceGrid<T>>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        SampledSignal { grid, values }
    }

    pub fn from_real_fn(grid: Arc<SpaceGrid<T>>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |x| Complex::new(f(x), T::zero()))
    }

    pub fn zeros(grid: Arc<SpaceGrid<T>>) -> Self {
        let values = vec![Complex::new(T::zero(), T::zero()); grid.len()];
        SampledSignal { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<SpaceGrid<T>> {
        &self.grid
    }
    #[inline]
    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }
    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(LcdtError::GridMismatch("signals live on different grids".into()))
        }
    }

    pub fn map(&self, f: impl Fn(T, Complex<T>) -> Complex<T>) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        SampledSignal {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|_, v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SampledSignal {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn norm(&self) -> T {
        mu_norm(self)
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Relative `L²_k` distance `‖self - other‖ / ‖other‖`.
    pub fn rel_error(&self, reference: &Self) -> Result<T> {
        let d = self.sub(reference)?.norm();
        let r = reference.norm();
        if r == T::zero() {
            return Err(LcdtError::Degenerate("reference has zero norm".into()));
        }
        Ok(d / r)
    }
}

/// `Σ f_j conj(g_j) w_j`.
pub fn mu_inner<T: Real>(f: &SampledSignal<T>, g: &SampledSignal<T>) -> Result<Complex<T>> {
    f.check_same_grid(g)?;
    Ok(f
        .grid
        .integrate_complex(f.values.iter().zip(&g.values).map(|(a, b)| a * b.conj())))
}

/// `sqrt(Re ⟨f, f⟩_μ)`.
pub fn mu_norm<T: Real>(f: &SampledSignal<T>) -> T {
    f.grid
        .integrate(f.values.iter().map(|v| v.norm_sqr()))
        .max(T::zero())
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(k: f64, x_max: f64, n: usize) -> SpaceGrid<f64> {
        SpaceGrid::new(Multiplicity::new(k).unwrap(), x_max, n).unwrap()
    }

    #[test]
    fn three_point_fourier_grid() {
        let g = grid(-0.5, 1.0, 3);
        assert_eq!(g.nodes(), &[-1.0, 0.0, 1.0]);
        let s = (2.0 * std::f64::consts::PI).sqrt();
        for (w, t) in g.weights().iter().zip([0.5, 1.0, 0.5]) {
            assert!((w - t / s).abs() < 1e-15);
        }
    }

    #[test]
    fn origin_weight_vanishes_for_positive_density_exponent() {
        for k in [0.0, 0.3, 1.0] {
            let g = grid(k, 5.0, 101);
            assert_eq!(g.weights()[50], 0.0);
            assert!(g.weights().iter().all(|w| *w >= 0.0));
        }
    }

    #[test]
    fn weights_symmetric() {
        let g = grid(1.3, 7.0, 301);
        let w = g.weights();
        for j in 0..g.len() {
            assert_eq!(w[j], w[g.len() - 1 - j]);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let k = Multiplicity::new(0.0).unwrap();
        assert!(SpaceGrid::new(k, 1.0, 10).is_err());
        assert!(SpaceGrid::new(k, 0.0, 11).is_err());
        assert!(Multiplicity::new(-0.6).is_err());
        assert!(CanonicalMatrix::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(CanonicalMatrix::new(1.0, 1.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn matrix_inverse_is_involution() {
        let m = CanonicalMatrix::new(1.0, 1.0, 0.5, 1.5).unwrap();
        assert_eq!(m.inverse().inverse(), m);
        let i = m.inverse();
        assert_eq!((i.a, i.b, i.c, i.d), (1.5, -1.0, -0.5, 1.0));
    }

    #[test]
    fn pow_ib_branch() {
        let v = pow_ib(1.0, 1.0).unwrap();
        assert!((v - Complex::new(0.0, 1.0)).norm() < 1e-15);
        let v = pow_ib(-1.0, 0.5).unwrap();
        let want = Complex::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!((v - want).norm() < 1e-15);
        assert!(pow_ib(0.0, 1.0).is_err());
    }

    #[test]
    fn scale_weights_integrate_power() {
        // ∫_1^e dα/α^{2k+3} for k = 0: (1 - e^{-2})/2
        let k = Multiplicity::new(0.0).unwrap();
        let s = ScaleGrid::new(k, 1.0, std::f64::consts::E, 400).unwrap();
        let total: f64 = s.nu_weights().iter().sum();
        let want = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((total - want).abs() < 1e-5);
    }
}
