//! Fifth-order finite-difference WENO reconstruction and Lax–Friedrichs
//! flux splitting (Jiang–Shu smoothness indicators, `eps = 1e-6`).
//!
//! All routines work on ghosted arrays: `NG = 3` ghost cells on each side,
//! filled by the caller according to the boundary rule.

use crate::grid::NG;
use crate::scalar::Scalar;

/// Regularization constant in the nonlinear weights.
pub const EPS_WENO: f64 = 1e-6;

/// Upwind direction of a biased reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wind {
    /// Information travels to the right; stencils lean left.
    FromLeft,
    /// Information travels to the left; stencils lean right.
    FromRight,
}

/// WENO5 point reconstruction at the interface from the five upwind-ordered
/// cell values `(a, b, c, d, e)`, where `c` is the cell adjacent to the
/// interface on the upwind side.
#[inline]
fn weno5_face<S: Scalar>(a: S, b: S, c: S, d: S, e: S) -> S {
    let eps = S::of(EPS_WENO);
    let c13_12 = S::of(13.0 / 12.0);
    let quarter = S::of(0.25);

    let p0 = (S::of(2.0) * a - S::of(7.0) * b + S::of(11.0) * c) / S::of(6.0);
    let p1 = (-b + S::of(5.0) * c + S::of(2.0) * d) / S::of(6.0);
    let p2 = (S::of(2.0) * c + S::of(5.0) * d - e) / S::of(6.0);

    let b0 = c13_12 * (a - S::of(2.0) * b + c).powi(2)
        + quarter * (a - S::of(4.0) * b + S::of(3.0) * c).powi(2);
    let b1 = c13_12 * (b - S::of(2.0) * c + d).powi(2) + quarter * (b - d).powi(2);
    let b2 = c13_12 * (c - S::of(2.0) * d + e).powi(2)
        + quarter * (S::of(3.0) * c - S::of(4.0) * d + e).powi(2);

    let a0 = S::of(0.1) / (eps + b0).powi(2);
    let a1 = S::of(0.6) / (eps + b1).powi(2);
    let a2 = S::of(0.3) / (eps + b2).powi(2);
    let sum = a0 + a1 + a2;
    (a0 * p0 + a1 * p1 + a2 * p2) / sum
}

/// Reconstructs the `n + 1` interface values of a ghosted field.
///
/// `g` has length `n + 2 NG`; `faces[i]` receives the reconstruction at the
/// interface `x_{i - 1/2}` for `i = 0..=n`. For [`Wind::FromRight`] the
/// stencil is the exact mirror image of the [`Wind::FromLeft`] one, so a
/// reflective wall sees identical reconstructions from both sides.
pub fn weno5_faces<S: Scalar>(g: &[S], wind: Wind, faces: &mut [S]) {
    let n = g.len() - 2 * NG;
    assert_eq!(faces.len(), n + 1);
    match wind {
        Wind::FromLeft => {
            // face i - 1/2 reconstructed from cells i-3 .. i+1
            for (i, face) in faces.iter_mut().enumerate() {
                let c = i + NG - 1; // ghosted index of the upwind cell
                *face = weno5_face(g[c - 2], g[c - 1], g[c], g[c + 1], g[c + 2]);
            }
        }
        Wind::FromRight => {
            // face i - 1/2 reconstructed from cells i+2 .. i-2, mirrored
            for (i, face) in faces.iter_mut().enumerate() {
                let c = i + NG; // ghosted index of the upwind cell
                *face = weno5_face(g[c + 2], g[c + 1], g[c], g[c - 1], g[c - 2]);
            }
        }
    }
}

/// Upwind-biased WENO5 approximation of `∂x g` on the interior cells of a
/// ghosted field.
pub fn weno5_derivative<S: Scalar>(g: &[S], dx: S, wind: Wind) -> Vec<S> {
    let n = g.len() - 2 * NG;
    let mut faces = vec![S::zero(); n + 1];
    weno5_faces(g, wind, &mut faces);
    let inv = S::one() / dx;
    (0..n).map(|j| (faces[j + 1] - faces[j]) * inv).collect()
}

/// Scratch buffers for repeated split-flux evaluations.
#[derive(Debug, Clone)]
pub struct SplitScratch<S> {
    plus: Vec<S>,
    minus: Vec<S>,
    faces_p: Vec<S>,
    faces_m: Vec<S>,
}

impl<S: Scalar> SplitScratch<S> {
    pub fn new(n: usize) -> Self {
        SplitScratch {
            plus: vec![S::zero(); n + 2 * NG],
            minus: vec![S::zero(); n + 2 * NG],
            faces_p: vec![S::zero(); n + 1],
            faces_m: vec![S::zero(); n + 1],
        }
    }
}

/// Lax–Friedrichs split derivative of a flux field.
///
/// The flux is split componentwise as `g± = (g ± alpha u) / 2`; the plus
/// part is differenced with the left-leaning reconstruction, the minus part
/// with the right-leaning one, and the two contributions are summed into
/// `out`. `flux` and `u` are ghosted arrays of equal length.
pub fn lf_split_derivative_into<S: Scalar>(
    flux: &[S],
    u: &[S],
    dx: S,
    alpha: S,
    scratch: &mut SplitScratch<S>,
    out: &mut [S],
) {
    let n = flux.len() - 2 * NG;
    assert_eq!(u.len(), flux.len());
    assert_eq!(out.len(), n);
    let half = S::of(0.5);
    for i in 0..flux.len() {
        let au = alpha * u[i];
        scratch.plus[i] = half * (flux[i] + au);
        scratch.minus[i] = half * (flux[i] - au);
    }
    weno5_faces(&scratch.plus, Wind::FromLeft, &mut scratch.faces_p);
    weno5_faces(&scratch.minus, Wind::FromRight, &mut scratch.faces_m);
    let inv = S::one() / dx;
    for j in 0..n {
        let total_r = scratch.faces_p[j + 1] + scratch.faces_m[j + 1];
        let total_l = scratch.faces_p[j] + scratch.faces_m[j];
        out[j] = (total_r - total_l) * inv;
    }
}

/// Allocating convenience wrapper around [`lf_split_derivative_into`].
pub fn lf_split_flux_derivative<S: Scalar>(flux: &[S], u: &[S], dx: S, alpha: S) -> Vec<S> {
    let n = flux.len() - 2 * NG;
    let mut scratch = SplitScratch::new(n);
    let mut out = vec![S::zero(); n];
    lf_split_derivative_into(flux, u, dx, alpha, &mut scratch, &mut out);
    out
}
