//! Filter source of the FP_N system.

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Filter strength and per-moment damping exponents of the FP_N source
/// `-nu L m`, `L = diag(l_0..l_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec<S> {
    pub nu: S,
    pub l: Vec<S>,
}

/// Damping exponents `l_k = log ρ(k/(N+1)) / log ρ(N/(N+1))` with the
/// fourth-order filter function `ρ(η) = 1 / (1 + η^4)`, so `l_0 = 0` and
/// `l_N = 1`.
pub fn fpn_damping<S: Scalar>(n: usize, nu: S) -> Result<FilterSpec<S>> {
    if n < 1 {
        return invalid("fpn_damping: order must be at least 1");
    }
    if nu < S::zero() {
        return invalid("fpn_damping: filter strength must be nonnegative");
    }
    let np1 = S::of_usize(n + 1);
    // log rho(eta) = -ln(1 + eta^4)
    let log_rho = |eta: S| -> S { -(S::one() + eta.powi(4)).ln() };
    let denom = log_rho(S::of_usize(n) / np1);
    let l = (0..=n)
        .map(|k| log_rho(S::of_usize(k) / np1) / denom)
        .collect();
    Ok(FilterSpec { nu, l })
}
