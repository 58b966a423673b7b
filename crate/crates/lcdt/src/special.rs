//! Normalized Bessel functions, the rank-one Dunkl kernel and the LCDT kernels.
//!
//! The normalized Bessel function is `j_ν(z) = Γ(ν+1) (2/z)^ν J_ν(z)`, and the
//! Dunkl kernel at imaginary spectral argument is
//! `E_k(it, x) = j_k(tx) + i tx/(2k+2) j_{k+1}(tx)`.
//!
//! Evaluation uses the power series for `|z| <= 15` and Hankel's asymptotic
//! expansion for the base orders in [-1/2, 1/2) followed by upward recurrence
//! beyond that. Internal arithmetic is `f64` for every scalar type.

use num_complex::Complex;

use crate::error::Result;
use crate::measure::{CanonicalMatrix, Multiplicity};
use crate::Real;

/// Switch point between the power series and the asymptotic branch.
pub const SERIES_LIMIT: f64 = 15.0;

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Riemann zeta for real `s > 1`, by Euler–Maclaurin summation.
pub fn zeta_gt1(s: f64) -> f64 {
    assert!(s > 1.0, "zeta_gt1 requires s > 1");
    const N: usize = 12;
    // B_2j / (2j)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let mut acc = crate::quad::Accum::<f64>::new();
    for n in 1..N {
        acc.add((n as f64).powf(-s));
    }
    let nf = N as f64;
    acc.add(nf.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * nf.powf(-s));
    let mut rising = s;
    let mut pow = nf.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        acc.add(b * rising * pow);
        let j2 = 2.0 * j as f64;
        rising *= (s + j2 + 1.0) * (s + j2 + 2.0);
        pow /= nf * nf;
    }
    acc.value()
}

/// Riemann zeta at a negative argument `-beta`, `beta > 0`, via the reflection formula.
pub fn zeta_neg(beta: f64) -> f64 {
    use std::f64::consts::PI;
    let s = 1.0 + beta;
    2.0 * (2.0 * PI).powf(-s) * (-PI * beta / 2.0).sin() * gamma(s) * zeta_gt1(s)
}

fn series_normalized(nu: f64, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut acc = crate::quad::Accum::<f64>::new();
    acc.add(1.0);
    for m in 1..400 {
        let mf = m as f64;
        term *= q / (mf * (nu + mf));
        acc.add(term);
        if term.abs() < 1e-18 * acc.value().abs().max(1e-300) && mf > 0.25 * z.abs() {
            break;
        }
    }
    acc.value()
}

fn hankel_j(nu: f64, z: f64) -> f64 {
    use std::f64::consts::PI;
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0f64;
    let mut prev = f64::INFINITY;
    for n in 1..80 {
        let odd = (2 * n - 1) as f64;
        let next = t * (mu - odd * odd) / (8.0 * n as f64 * z);
        if next == 0.0 {
            break;
        }
        if next.abs() >= prev {
            break;
        }
        t = next;
        prev = t.abs();
        let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if n % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        if t.abs() < 1e-17 {
            break;
        }
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// `(J_k(z), J_{k+1}(z))` for `z > SERIES_LIMIT` and `k + 1 < z`.
fn bessel_pair_large(k: f64, z: f64) -> (f64, f64) {
    let steps = (k + 0.5).floor();
    let nu0 = k - steps;
    let mut jm = hankel_j(nu0, z);
    let mut j = hankel_j(nu0 + 1.0, z);
    let mut nu = nu0 + 1.0;
    for _ in 0..steps as usize {
        let next = 2.0 * nu / z * j - jm;
        jm = j;
        j = next;
        nu += 1.0;
    }
    (jm, j)
}

/// `(j_k(z), z j_{k+1}(z) / (2k+2))`, the even and odd parts of `E_k(i·, ·)`.
pub fn bessel_pair_f64(k: f64, z: f64) -> (f64, f64) {
    if z == 0.0 {
        return (1.0, 0.0);
    }
    if k == -0.5 {
        return (z.cos(), z.sin());
    }
    let a = z.abs();
    if a <= SERIES_LIMIT || k + 1.0 >= a {
        let even = series_normalized(k, a);
        let odd = a / (2.0 * k + 2.0) * series_normalized(k + 1.0, a);
        return (even, odd * z.signum());
    }
    let (jk, jk1) = bessel_pair_large(k, a);
    let scale = (ln_gamma(k + 1.0) + k * (2.0 / a).ln()).exp();
    (scale * jk, scale * jk1 * z.signum())
}

pub fn bessel_j_norm_f64(k: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    if k == -0.5 {
        return z.cos();
    }
    let a = z.abs();
    if a <= SERIES_LIMIT || k >= a {
        return series_normalized(k, a);
    }
    let jk = if k + 1.0 < a {
        bessel_pair_large(k, a).0
    } else {
        bessel_pair_large(k - 1.0, a).1
    };
    (ln_gamma(k + 1.0) + k * (2.0 / a).ln()).exp() * jk
}

/// Normalized Bessel function `j_k(z)`; even in `z`, `j_k(0) = 1`.
pub fn bessel_j_norm<T: Real>(k: T, z: T) -> T {
    T::lit(bessel_j_norm_f64(k.as_f64(), z.as_f64()))
}

/// Bessel function of the first kind `J_ν(z)` for `z >= 0`, `ν >= -1/2`.
pub fn bessel_j_f64(nu: f64, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let prefactor = ((0.5 * z).ln() * nu - ln_gamma(nu + 1.0)).exp();
    prefactor * bessel_j_norm_f64(nu, z)
}

/// Rank-one Dunkl kernel `E_k(it, x)`.
pub fn dunkl_kernel<T: Real>(k: T, t: T, x: T) -> Complex<T> {
    let (e, o) = bessel_pair_f64(k.as_f64(), (t * x).as_f64());
    Complex::new(T::lit(e), T::lit(o))
}

/// Multiplicity and matrix shared by all kernel evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContext<T> {
    pub k: Multiplicity<T>,
    pub m: CanonicalMatrix<T>,
}

impl<T: Real> KernelContext<T> {
    pub fn new(k: Multiplicity<T>, m: CanonicalMatrix<T>) -> Self {
        KernelContext { k, m }
    }

    pub fn from_values(k: T, a: T, b: T, c: T, d: T) -> Result<Self> {
        Ok(KernelContext {
            k: Multiplicity::new(k)?,
            m: CanonicalMatrix::new(a, b, c, d)?,
        })
    }

    /// Forward kernel `E^M_k(λ, x) = e^{(i/2)(dλ² + ax²)/b} E_k(-iλ/b, x)`.
    pub fn kernel(&self, lambda: T, x: T) -> Complex<T> {
        lcdt_kernel(self, lambda, x)
    }

    /// Inverse kernel `E^{M⁻¹}_k(x, λ) = e^{-(i/2)(ax² + dλ²)/b} E_k(ix/b, λ)`.
    pub fn kernel_inv(&self, x: T, lambda: T) -> Complex<T> {
        lcdt_kernel_inv(self, x, lambda)
    }
}

pub fn lcdt_kernel<T: Real>(ctx: &KernelContext<T>, lambda: T, x: T) -> Complex<T> {
    let m = &ctx.m;
    let half = T::lit(0.5);
    let phase = half * (m.d * lambda * lambda + m.a * x * x) / m.b;
    Complex::from_polar(T::one(), phase) * dunkl_kernel(ctx.k.value(), -lambda / m.b, x)
}

pub fn lcdt_kernel_inv<T: Real>(ctx: &KernelContext<T>, x: T, lambda: T) -> Complex<T> {
    let m = &ctx.m;
    let half = T::lit(0.5);
    let phase = -half * (m.a * x * x + m.d * lambda * lambda) / m.b;
    Complex::from_polar(T::one(), phase) * dunkl_kernel(ctx.k.value(), x / m.b, lambda)
}
