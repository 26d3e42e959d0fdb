//! Third-order strong-stability-preserving Runge–Kutta time stepping
//! (Shu–Osher form).

use crate::scalar::Scalar;

/// Reusable stage storage for [`ssp_rk3_step`].
#[derive(Debug, Clone)]
pub struct RkScratch<S> {
    stage: Vec<S>,
    rhs: Vec<S>,
}

impl<S: Scalar> RkScratch<S> {
    pub fn new(len: usize) -> Self {
        RkScratch {
            stage: vec![S::zero(); len],
            rhs: vec![S::zero(); len],
        }
    }
}

/// Advances `u` by one SSP-RK3 step of size `dt`:
///
/// ```text
/// u1 = u + dt L(u)
/// u2 = 3/4 u + 1/4 u1 + 1/4 dt L(u1)
/// u  = 1/3 u + 2/3 u2 + 2/3 dt L(u2)
/// ```
pub fn ssp_rk3_step<S: Scalar, F>(u: &mut [S], dt: S, scratch: &mut RkScratch<S>, mut rhs: F)
where
    F: FnMut(&[S], &mut [S]),
{
    let n = u.len();
    assert_eq!(scratch.stage.len(), n);

    rhs(u, &mut scratch.rhs);
    for i in 0..n {
        scratch.stage[i] = u[i] + dt * scratch.rhs[i];
    }

    rhs(&scratch.stage, &mut scratch.rhs);
    let (c34, c14) = (S::of(0.75), S::of(0.25));
    for i in 0..n {
        scratch.stage[i] = c34 * u[i] + c14 * (scratch.stage[i] + dt * scratch.rhs[i]);
    }

    rhs(&scratch.stage, &mut scratch.rhs);
    let (c13, c23) = (S::of(1.0 / 3.0), S::of(2.0 / 3.0));
    for i in 0..n {
        u[i] = c13 * u[i] + c23 * (scratch.stage[i] + dt * scratch.rhs[i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integrates y' = -y to t = 1 with n steps and returns the error.
    fn decay_error(n: usize) -> f64 {
        let dt = 1.0 / n as f64;
        let mut y = vec![1.0f64];
        let mut scratch = RkScratch::new(1);
        for _ in 0..n {
            ssp_rk3_step(&mut y, dt, &mut scratch, |u, out| out[0] = -u[0]);
        }
        (y[0] - (-1.0f64).exp()).abs()
    }

    #[test]
    fn observed_order_at_least_2_9() {
        let (e1, e2, e3) = (decay_error(10), decay_error(20), decay_error(40));
        let o1 = (e1 / e2).log2();
        let o2 = (e2 / e3).log2();
        assert!(o1 >= 2.9 && o2 >= 2.9, "orders {o1}, {o2}");
    }

    #[test]
    fn exact_for_constant_rhs() {
        let mut y = vec![2.0f64];
        let mut scratch = RkScratch::new(1);
        ssp_rk3_step(&mut y, 0.5, &mut scratch, |_, out| out[0] = 3.0);
        assert!((y[0] - 3.5).abs() < 1e-15);
    }
}
