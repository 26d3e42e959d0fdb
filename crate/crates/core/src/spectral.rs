//! Spatial derivatives of recorded fields.
//!
//! Training targets use spectral differentiation on the periodic unit
//! interval, which keeps label noise at roundoff level for resolved modes.
//! Reflective-boundary trajectories fall back to a fourth-order central
//! difference with parity ghost cells.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::grid::{fill_ghosts, Boundary, Parity, NG};
use crate::scalar::Scalar;

/// Derivative of a periodic grid function on `[0, 1]` sampled at `n` cell
/// centers, computed through the discrete Fourier transform.
pub fn spectral_derivative<S: Scalar>(u: &[S]) -> Vec<S> {
    let n = u.len();
    assert!(n >= 2, "spectral derivative needs at least two samples");
    let mut planner = FftPlanner::<S>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex<S>> = u.iter().map(|&x| Complex::new(x, S::zero())).collect();
    fft.process(&mut buf);

    let two_pi = S::of(2.0) * S::PI();
    for (k, c) in buf.iter_mut().enumerate() {
        // Signed wavenumber on the unit interval; the Nyquist bin of a real
        // signal carries no usable derivative information and is zeroed.
        let freq = if 2 * k < n {
            S::of_usize(k)
        } else if 2 * k == n {
            S::zero()
        } else {
            -S::of_usize(n - k)
        };
        let omega = two_pi * freq;
        *c = Complex::new(-omega * c.im, omega * c.re);
    }
    ifft.process(&mut buf);

    let scale = S::one() / S::of_usize(n);
    buf.iter().map(|c| c.re * scale).collect()
}

/// Fourth-order central difference with ghost cells filled by the boundary
/// rule; used where the field is not periodic.
pub fn central4_derivative<S: Scalar>(
    u: &[S],
    dx: S,
    boundary: Boundary,
    parity: Parity,
) -> Vec<S> {
    let n = u.len();
    let mut buf = vec![S::zero(); n + 2 * NG];
    buf[NG..NG + n].copy_from_slice(u);
    fill_ghosts(&mut buf, boundary, parity);
    let c = S::one() / (S::of(12.0) * dx);
    (0..n)
        .map(|j| {
            let i = j + NG;
            (buf[i - 2] - S::of(8.0) * buf[i - 1] + S::of(8.0) * buf[i + 1] - buf[i + 2]) * c
        })
        .collect()
}

/// Picks the derivative rule matching the trajectory's boundary condition.
pub fn field_derivative<S: Scalar>(u: &[S], dx: S, boundary: Boundary, moment_order: usize) -> Vec<S> {
    match boundary {
        Boundary::Periodic => spectral_derivative(u),
        Boundary::Reflective => central4_derivative(u, dx, boundary, Parity::of_moment(moment_order)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivative_of_sine_is_exact() {
        let n = 128;
        let u: Vec<f64> = (0..n)
            .map(|j| {
                let x = (j as f64 + 0.5) / n as f64;
                (2.0 * std::f64::consts::PI * x).sin()
            })
            .collect();
        let d = spectral_derivative(&u);
        for (j, dv) in d.iter().enumerate() {
            let x = (j as f64 + 0.5) / n as f64;
            let exact = 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).cos();
            assert!((dv - exact).abs() < 1e-10, "at {x}: {dv} vs {exact}");
        }
    }

    #[test]
    fn spectral_derivative_of_constant_vanishes() {
        let d = spectral_derivative(&vec![3.25f64; 64]);
        for dv in d {
            assert!(dv.abs() < 1e-12);
        }
    }

    #[test]
    fn central_derivative_converges_at_fourth_order() {
        let err = |n: usize| -> f64 {
            let dx = 1.0 / n as f64;
            let u: Vec<f64> = (0..n)
                .map(|j| {
                    let x = (j as f64 + 0.5) * dx;
                    (2.0 * std::f64::consts::PI * x).sin()
                })
                .collect();
            let d = central4_derivative(&u, dx, Boundary::Periodic, Parity::Even);
            (0..n)
                .map(|j| {
                    let x = (j as f64 + 0.5) * dx;
                    let exact = 2.0 * std::f64::consts::PI
                        * (2.0 * std::f64::consts::PI * x).cos();
                    (d[j] - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        let order = (err(32) / err(64)).log2();
        assert!(order > 3.8, "observed order {order}");
    }
}
