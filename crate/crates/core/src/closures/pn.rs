//! Flux matrix of the P_N moment system.

use ndarray::Array2;

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Builds the `(N+1) × (N+1)` tridiagonal flux matrix of the truncated
/// moment hierarchy: zero diagonal, `A[k][k-1] = k / (2k+1)` and
/// `A[k][k+1] = (k+1) / (2k+1)`.
pub fn pn_matrix<S: Scalar>(n: usize) -> Result<Array2<S>> {
    if n < 1 {
        return invalid("pn_matrix: order must be at least 1");
    }
    let dim = n + 1;
    let mut a = Array2::zeros((dim, dim));
    for k in 0..dim {
        let kf = S::of_usize(k);
        let denom = S::of(2.0) * kf + S::one();
        if k > 0 {
            a[(k, k - 1)] = kf / denom;
        }
        if k + 1 < dim {
            a[(k, k + 1)] = (kf + S::one()) / denom;
        }
    }
    Ok(a)
}

/// Sub- and super-diagonal advection coefficients of row `k`:
/// `(k/(2k+1), (k+1)/(2k+1))`.
pub fn pn_row_coefficients<S: Scalar>(k: usize) -> (S, S) {
    let kf = S::of_usize(k);
    let denom = S::of(2.0) * kf + S::one();
    (kf / denom, (kf + S::one()) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gauss_legendre;
    use crate::eig::dense_eigenvalues;

    #[test]
    fn printed_low_order_matrices() {
        let a = pn_matrix::<f64>(1).unwrap();
        assert_eq!(a[(0, 0)], 0.0);
        assert_eq!(a[(0, 1)], 1.0);
        assert_eq!(a[(1, 0)], 1.0 / 3.0);
        assert_eq!(a[(1, 1)], 0.0);

        let a = pn_matrix::<f64>(2).unwrap();
        let expect = [
            [0.0, 1.0, 0.0],
            [1.0 / 3.0, 0.0, 2.0 / 3.0],
            [0.0, 2.0 / 5.0, 0.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn order_zero_is_rejected() {
        assert!(pn_matrix::<f64>(0).is_err());
    }

    /// The P_N flux matrix has the roots of P_{N+1} as eigenvalues; those
    /// roots come from the independent Newton-based quadrature builder.
    #[test]
    fn eigenvalues_are_roots_of_next_legendre_polynomial() {
        let n = 5;
        let a = pn_matrix::<f64>(n).unwrap();
        let dim = n + 1;
        let rows: Vec<Vec<f64>> = (0..dim)
            .map(|i| (0..dim).map(|j| a[(i, j)]).collect())
            .collect();
        let eig = dense_eigenvalues(rows).unwrap();
        let mut real: Vec<f64> = eig.iter().map(|c| c.0).collect();
        for &(_, im) in &eig {
            assert!(im.abs() < 1e-12, "imaginary eigenvalue {im}");
        }
        real.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let roots = gauss_legendre::<f64>(n + 1).unwrap().nodes;
        for (lambda, root) in real.iter().zip(&roots) {
            assert!((lambda - root).abs() < 1e-10, "{lambda} vs {root}");
        }
    }

    #[test]
    fn spectrum_is_real_simple_and_symmetric() {
        for n in 1..=9usize {
            let a = pn_matrix::<f64>(n).unwrap();
            let dim = n + 1;
            let rows: Vec<Vec<f64>> = (0..dim)
                .map(|i| (0..dim).map(|j| a[(i, j)]).collect())
                .collect();
            let mut real: Vec<f64> = dense_eigenvalues(rows)
                .unwrap()
                .iter()
                .map(|&(re, im)| {
                    assert!(im.abs() < 1e-12);
                    re
                })
                .collect();
            real.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for pair in real.windows(2) {
                assert!(pair[1] - pair[0] > 1e-8, "repeated eigenvalue at order {n}");
            }
            for (i, lambda) in real.iter().enumerate() {
                assert!(lambda.abs() < 1.0);
                let mirror = real[real.len() - 1 - i];
                assert!((lambda + mirror).abs() < 1e-10, "not symmetric about 0");
            }
        }
    }
}
