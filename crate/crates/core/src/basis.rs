//! Legendre polynomials, Gauss–Legendre quadrature and moment projections.
//!
//! Two moment conventions are used throughout the crate, matching the two
//! ways the angular variable is integrated:
//!
//! * Legendre moments `m_k = (1/2) ∫ f P_k(v) dv` (with the 1/2 prefactor);
//! * monomial moments `n_k = ∫ f v^k dv` (no prefactor).
//!
//! Both describe the same angular field and [`convert_basis`] maps between
//! them exactly through the monomial expansion of the Legendre polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Evaluates the Legendre polynomial `P_k(v)` by the Bonnet three-term
/// recursion.
pub fn legendre_eval<S: Scalar>(k: usize, v: S) -> S {
    legendre_pair(k, v).0
}

/// Evaluates `(P_k(v), P_k'(v))` in one recursion sweep.
///
/// The derivative uses `(v^2 - 1) P_k' = k (v P_k - P_{k-1})`, with the
/// closed-form limit `P_k'(±1) = (±1)^{k+1} k (k+1) / 2` at the endpoints.
pub fn legendre_pair<S: Scalar>(k: usize, v: S) -> (S, S) {
    if k == 0 {
        return (S::one(), S::zero());
    }
    let mut p_prev = S::one();
    let mut p = v;
    for j in 1..k {
        let jf = S::of_usize(j);
        let next = ((S::of(2.0) * jf + S::one()) * v * p - jf * p_prev) / (jf + S::one());
        p_prev = p;
        p = next;
    }
    let kf = S::of_usize(k);
    let denom = v * v - S::one();
    let dp = if denom.abs() < S::of(1e-14) {
        let magnitude = kf * (kf + S::one()) / S::of(2.0);
        if v > S::zero() || k % 2 == 1 {
            magnitude
        } else {
            -magnitude
        }
    } else {
        kf * (v * p - p_prev) / denom
    };
    (p, dp)
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature<S> {
    /// Angle cosines, strictly increasing, all in (-1, 1).
    pub nodes: Vec<S>,
    /// Positive weights summing to 2.
    pub weights: Vec<S>,
}

impl<S: Scalar> Quadrature<S> {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates a function sampled at the nodes.
    pub fn integrate(&self, values: &[S]) -> S {
        self.weights
            .iter()
            .zip(values)
            .map(|(&w, &f)| w * f)
            .sum()
    }

    /// Angular mean `(1/2) ∫ f dv` of a sampled function.
    pub fn mean(&self, values: &[S]) -> S {
        S::of(0.5) * self.integrate(values)
    }

    /// Index of the node at `-v_q`. Gauss–Legendre nodes are symmetric, so
    /// mirroring an ordinate is an index flip.
    pub fn mirror(&self, q: usize) -> usize {
        self.order() - 1 - q
    }
}

/// Builds the `n`-point Gauss–Legendre rule by Newton iteration on `P_n`
/// with Chebyshev initial guesses (tolerance 1e-15, at most 100 iterations).
pub fn gauss_legendre<S: Scalar>(n: usize) -> Result<Quadrature<S>> {
    if n == 0 {
        return invalid("gauss_legendre: order must be at least 1");
    }
    let tol = S::of(1e-15).max(S::epsilon() * S::of(4.0));
    let mut nodes = vec![S::zero(); n];
    let mut weights = vec![S::zero(); n];
    // Roots come in +/- pairs; solve for the non-negative half and mirror.
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like guess for the (n-i)-th root in decreasing order.
        let theta = S::PI() * (S::of_usize(i) + S::of(0.75)) / (S::of_usize(n) + S::of(0.5));
        let mut x = theta.cos();
        if 2 * i + 1 == n {
            x = S::zero(); // middle root of an odd-order polynomial
        }
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            let step = p / d;
            x = x - step;
            if step.abs() <= tol {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = S::of(2.0) / ((S::one() - x * x) * dp * dp);
        let hi = n - 1 - i;
        nodes[hi] = x;
        weights[hi] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    Ok(Quadrature { nodes, weights })
}

/// Which polynomial family a moment vector is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisTag {
    Legendre,
    Monomial,
}

/// Moments `m_0..m_N` (Legendre) or `n_0..n_N` (monomial) of an angular
/// field at one spatial location.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<S> {
    pub values: Vec<S>,
    pub basis: BasisTag,
}

impl<S: Scalar> MomentVector<S> {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }
}

/// Projects an angular slice (sampled at the quadrature nodes) onto moments
/// of order `0..=order`.
///
/// Legendre moments carry the 1/2 prefactor, monomial moments do not. The
/// quadrature order must be at least `order + 1` for the projection to be
/// exact on polynomial data.
pub fn project_moments<S: Scalar>(
    f: &[S],
    quad: &Quadrature<S>,
    order: usize,
    basis: BasisTag,
) -> Result<MomentVector<S>> {
    if f.len() != quad.order() {
        return invalid(format!(
            "project_moments: field has {} samples but the quadrature has {} nodes",
            f.len(),
            quad.order()
        ));
    }
    let mut values = Vec::with_capacity(order + 1);
    match basis {
        BasisTag::Legendre => {
            for k in 0..=order {
                let s: S = quad
                    .nodes
                    .iter()
                    .zip(&quad.weights)
                    .zip(f)
                    .map(|((&v, &w), &fv)| w * fv * legendre_eval(k, v))
                    .sum();
                values.push(S::of(0.5) * s);
            }
        }
        BasisTag::Monomial => {
            let mut powers: Vec<S> = vec![S::one(); quad.order()];
            for _k in 0..=order {
                let s: S = quad
                    .weights
                    .iter()
                    .zip(f)
                    .zip(&powers)
                    .map(|((&w, &fv), &p)| w * fv * p)
                    .sum();
                values.push(s);
                for (p, &v) in powers.iter_mut().zip(&quad.nodes) {
                    *p = *p * v;
                }
            }
        }
    }
    Ok(MomentVector { values, basis })
}

/// Coefficient rows of the Legendre polynomials in the monomial basis:
/// `P_k(v) = sum_j rows[k][j] v^j`. Row `k` has `order + 1` entries.
pub fn legendre_monomial_rows<S: Scalar>(order: usize) -> Vec<Vec<S>> {
    let n = order + 1;
    let mut rows = vec![vec![S::zero(); n]; n];
    rows[0][0] = S::one();
    if order >= 1 {
        rows[1][1] = S::one();
    }
    for k in 1..order {
        let kf = S::of_usize(k);
        let a = (S::of(2.0) * kf + S::one()) / (kf + S::one());
        let b = kf / (kf + S::one());
        // P_{k+1} = a v P_k - b P_{k-1}
        let (head, tail) = rows.split_at_mut(k + 1);
        let next = &mut tail[0];
        for j in 0..=k {
            next[j + 1] = next[j + 1] + a * head[k][j];
        }
        for j in 0..=k {
            next[j] = next[j] - b * head[k - 1][j];
        }
    }
    rows
}

/// Converts Legendre moments to monomial moments in place of the
/// factor-of-1/2 convention difference: solves `(1/2) D n = m` for `n`,
/// where `D` holds the monomial coefficients of the Legendre polynomials.
pub fn legendre_to_monomial<S: Scalar>(m: &[S]) -> Vec<S> {
    let order = m.len() - 1;
    let rows = legendre_monomial_rows::<S>(order);
    // D is lower triangular with nonzero diagonal; forward substitution.
    let mut n = vec![S::zero(); order + 1];
    for k in 0..=order {
        let mut acc = S::of(2.0) * m[k];
        for j in 0..k {
            acc = acc - rows[k][j] * n[j];
        }
        n[k] = acc / rows[k][k];
    }
    n
}

/// Converts monomial moments to Legendre moments: `m = (1/2) D n`.
pub fn monomial_to_legendre<S: Scalar>(n: &[S]) -> Vec<S> {
    let order = n.len() - 1;
    let rows = legendre_monomial_rows::<S>(order);
    (0..=order)
        .map(|k| {
            let s: S = rows[k][..=k].iter().zip(n).map(|(&d, &nv)| d * nv).sum();
            S::of(0.5) * s
        })
        .collect()
}

/// Exact linear change of basis between the Legendre and monomial moment
/// conventions.
pub fn convert_basis<S: Scalar>(m: &MomentVector<S>, to: BasisTag) -> MomentVector<S> {
    if m.basis == to {
        return m.clone();
    }
    let values = match to {
        BasisTag::Monomial => legendre_to_monomial(&m.values),
        BasisTag::Legendre => monomial_to_legendre(&m.values),
    };
    MomentVector { values, basis: to }
}
