//! Exact gradient closure of the free-streaming limit with isotropic
//! initial data.
//!
//! In monomial moments the closure reads, for `k >= 3`,
//!
//! ```text
//! ∂x n_{k+1} = (1+(-1)^k)/2 ∂x n_1 + (1-(-1)^k)/2 ∂x n_2
//!            + [(k+1) n_k - (1+(-1)^k)/2 n_0 - (1-(-1)^k) n_1] / (3 n_2 - n_0)
//!              · (∂x n_3 - ∂x n_1).
//! ```
//!
//! The derivation divides by `3 n_2 - n_0`, which vanishes at isotropic
//! states, so evaluation is guarded by [`singular_eps`].

use crate::basis::legendre_monomial_rows;
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Relative factor of the singular-denominator guard.
pub const SINGULAR_EPS_FACTOR: f64 = 1e-8;

/// Guard threshold for the denominator `3 n_2 - n_0` at a state with
/// density `n_0`.
pub fn singular_eps<S: Scalar>(n0: S) -> S {
    S::of(SINGULAR_EPS_FACTOR) * n0.abs().max(S::one())
}

/// Evaluates the exact free-streaming closure for `∂x n_{k+1}` from
/// monomial moments `n` and their spatial gradients `dn` at one point.
pub fn exact_fs_gradient<S: Scalar>(n: &[S], dn: &[S], k: usize) -> Result<S> {
    if k < 3 {
        return invalid(format!("exact_fs_gradient: k = {k}, the closure holds for k >= 3"));
    }
    if n.len() < k + 1 {
        return invalid("exact_fs_gradient: moment vector shorter than k + 1");
    }
    if dn.len() < 4 {
        return invalid("exact_fs_gradient: gradients must cover n_0..n_3");
    }
    let denom = S::of(3.0) * n[2] - n[0];
    let eps = singular_eps(n[0]);
    if denom.abs() <= eps {
        return Err(Error::SingularClosure {
            denom: denom.as_f64(),
            eps: eps.as_f64(),
        });
    }
    let even = if k % 2 == 0 { S::one() } else { S::zero() };
    let odd2 = if k % 2 == 0 { S::zero() } else { S::of(2.0) };
    let q = ((S::of_usize(k) + S::one()) * n[k] - even * n[0] - odd2 * n[1]) / denom;
    Ok(even * dn[1] + (S::one() - even) * dn[2] + q * (dn[3] - dn[1]))
}

/// The same closure lifted to Legendre moments, as coefficients over
/// `∂x m_0..∂x m_N`: per node, `∂x m_{N+1} = sum_i c_i(m) ∂x m_i`.
///
/// Everything linear is precomputed: `L` maps Legendre moments (and their
/// gradients) to monomial ones, and the last Legendre-coefficient row maps
/// the closed monomial gradient back.
#[derive(Debug, Clone)]
pub struct FreeStreamingClosure<S> {
    order: usize,
    /// Conversion matrix: n_j = sum_i conv[j][i] m_i for j, i <= N.
    conv: Vec<Vec<S>>,
    /// (1/2) D[N+1][i] for i <= N.
    base: Vec<S>,
    /// (1/2) D[N+1][N+1].
    scale: S,
}

impl<S: Scalar> FreeStreamingClosure<S> {
    pub fn new(order: usize) -> Result<Self> {
        if order < 3 {
            return invalid("free-streaming closure needs order N >= 3");
        }
        let rows = legendre_monomial_rows::<S>(order + 1);
        // Columns of the Legendre -> monomial map, one unit vector at a time.
        let mut conv = vec![vec![S::zero(); order + 1]; order + 1];
        for i in 0..=order {
            let mut unit = vec![S::zero(); order + 1];
            unit[i] = S::one();
            let n = crate::basis::legendre_to_monomial(&unit);
            for (j, &v) in n.iter().enumerate() {
                conv[j][i] = v;
            }
        }
        let half = S::of(0.5);
        // m_{N+1} = (1/2) sum_j D[N+1][j] n_j, so the resolved part of its
        // gradient routes each dn_j back to the Legendre gradients as well.
        let base = (0..=order)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..=order {
                    acc = acc + rows[order + 1][j] * conv[j][i];
                }
                half * acc
            })
            .collect();
        let scale = half * rows[order + 1][order + 1];
        Ok(FreeStreamingClosure {
            order,
            conv,
            base,
            scale,
        })
    }

    /// Fills `out` with the coefficients `c_0..c_N` at the Legendre state `m`.
    pub fn gradient_coeffs(&self, m: &[S], out: &mut [S]) -> Result<()> {
        let order = self.order;
        if m.len() != order + 1 || out.len() != order + 1 {
            return invalid("free-streaming closure: state width mismatch");
        }
        let dot = |row: &[S]| -> S { row.iter().zip(m).map(|(&a, &b)| a * b).sum() };
        let n0 = dot(&self.conv[0]);
        let n1 = dot(&self.conv[1]);
        let n2 = dot(&self.conv[2]);
        let nk = dot(&self.conv[order]);
        let denom = S::of(3.0) * n2 - n0;
        let eps = singular_eps(n0);
        if denom.abs() <= eps {
            return Err(Error::SingularClosure {
                denom: denom.as_f64(),
                eps: eps.as_f64(),
            });
        }
        let even = if order % 2 == 0 { S::one() } else { S::zero() };
        let odd2 = if order % 2 == 0 { S::zero() } else { S::of(2.0) };
        let q = ((S::of_usize(order) + S::one()) * nk - even * n0 - odd2 * n1) / denom;
        // dn_{N+1} = (even - q) dn_1 + (1 - even) dn_2 + q dn_3 in monomial
        // gradients, each of which is conv-row dot the Legendre gradients.
        let w1 = even - q;
        let w2 = S::one() - even;
        for i in 0..=order {
            let dn_comb =
                w1 * self.conv[1][i] + w2 * self.conv[2][i] + q * self.conv[3][i];
            out[i] = self.base[i] + self.scale * dn_comb;
        }
        Ok(())
    }
}
