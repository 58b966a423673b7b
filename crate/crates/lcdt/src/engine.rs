//! Dense Dunkl kernel matrices between two symmetric uniform grids.
//!
//! With output nodes `j Δ_out` and input nodes `m Δ_in`, the kernel
//! `E_k(± i y/b, x)` depends only on the integer product `j m` through
//! `q = Δ_out Δ_in / b`. Only the quadrant `j, m >= 0` is stored, as the even
//! part `C = j_k(|q| j m)` and the odd part `S = |q| j m/(2k+2) j_{k+1}(|q| j m)`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::quad::Accum;
use crate::special::bessel_pair_f64;
use crate::Real;

#[derive(Debug)]
pub(crate) struct DunklMatrix<T> {
    rows: usize,
    cols: usize,
    q_sign: T,
    even: Vec<T>,
    odd: Vec<T>,
}

impl<T: Real> DunklMatrix<T> {
    /// `rows`, `cols`: nodes on one side of the origin, including the origin.
    pub fn new(k: T, q: T, rows: usize, cols: usize) -> Self {
        let kf = k.as_f64();
        let aq = q.abs().as_f64();
        let mut even = vec![T::zero(); rows * cols];
        let mut odd = vec![T::zero(); rows * cols];
        even.par_chunks_mut(cols)
            .zip(odd.par_chunks_mut(cols))
            .enumerate()
            .for_each(|(r, (e_row, o_row))| {
                for m in 0..cols {
                    let z = aq * (r * m) as f64;
                    let (e, o) = bessel_pair_f64(kf, z);
                    e_row[m] = T::lit(e);
                    o_row[m] = T::lit(o);
                }
            });
        DunklMatrix {
            rows,
            cols,
            q_sign: q.signum(),
            even,
            odd,
        }
    }

    /// `y_j = Σ_m E(sign · i y_j / b, x_m) u_m` for `sign = ±1`.
    ///
    /// `u` has `2 cols - 1` entries, the result `2 rows - 1`.
    pub fn apply(&self, u: &[Complex<T>], sign: T) -> Vec<Complex<T>> {
        let ch = self.cols - 1;
        assert_eq!(u.len(), 2 * ch + 1);
        let zero = Complex::new(T::zero(), T::zero());
        let mut ue = vec![zero; self.cols];
        let mut uo = vec![zero; self.cols];
        ue[0] = u[ch];
        for m in 1..self.cols {
            ue[m] = u[ch + m] + u[ch - m];
            uo[m] = u[ch + m] - u[ch - m];
        }
        let s = sign * self.q_sign;
        let rh = self.rows - 1;
        let parts: Vec<(Complex<T>, Complex<T>)> = (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let e_row = &self.even[r * self.cols..(r + 1) * self.cols];
                let o_row = &self.odd[r * self.cols..(r + 1) * self.cols];
                let (mut er, mut ei, mut or, mut oi) =
                    (Accum::new(), Accum::new(), Accum::new(), Accum::new());
                for m in 0..self.cols {
                    er.add(e_row[m] * ue[m].re);
                    ei.add(e_row[m] * ue[m].im);
                    or.add(o_row[m] * uo[m].re);
                    oi.add(o_row[m] * uo[m].im);
                }
                (
                    Complex::new(er.value(), ei.value()),
                    Complex::new(or.value(), oi.value()),
                )
            })
            .collect();
        let mut y = vec![zero; 2 * rh + 1];
        for (r, (ae, ao)) in parts.into_iter().enumerate() {
            // i * s * ao
            let odd = Complex::new(-ao.im, ao.re) * s;
            y[rh + r] = ae + odd;
            if r > 0 {
                y[rh - r] = ae - odd;
            }
        }
        y
    }
}
