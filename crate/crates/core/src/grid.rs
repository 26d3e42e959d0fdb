//! Uniform cell-centered grid on the unit interval and ghost-cell handling.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Ghost cells per side; fixed by the WENO5 stencil width.
pub const NG: usize = 3;

/// Boundary treatment of a spatial field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Reflective,
}

/// Uniform grid of `nx` cells covering `[0, 1]`, with centers at
/// `x_j = (j + 1/2) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<S> {
    pub nx: usize,
    pub dx: S,
}

impl<S: Scalar> Grid<S> {
    pub fn new(nx: usize) -> Self {
        assert!(nx > 0, "grid needs at least one cell");
        Grid {
            nx,
            dx: S::one() / S::of_usize(nx),
        }
    }

    /// Center of cell `j`.
    pub fn center(&self, j: usize) -> S {
        (S::of_usize(j) + S::of(0.5)) * self.dx
    }

    pub fn centers(&self) -> Vec<S> {
        (0..self.nx).map(|j| self.center(j)).collect()
    }
}

/// Parity of a field under mirror reflection at a wall. Legendre moments of
/// order `k` reflect with sign `(-1)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_moment(k: usize) -> Self {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign<S: Scalar>(self) -> S {
        match self {
            Parity::Even => S::one(),
            Parity::Odd => -S::one(),
        }
    }
}

/// Fills the ghost regions of `buf`, whose interior part `buf[NG..NG + n]`
/// must already hold the field values.
///
/// Periodic ghosts wrap around the domain. Reflective ghosts mirror the
/// interior with the given parity sign: the ghost at `x_{-j-1}` receives
/// `sign * u(x_j)` and the ghost at `x_{nx+j}` receives `sign * u(x_{nx-1-j})`.
pub fn fill_ghosts<S: Scalar>(buf: &mut [S], boundary: Boundary, parity: Parity) {
    let n = buf.len() - 2 * NG;
    assert!(n >= NG, "need at least {NG} interior cells");
    match boundary {
        Boundary::Periodic => {
            for g in 0..NG {
                buf[NG - 1 - g] = buf[NG + n - 1 - g];
                buf[NG + n + g] = buf[NG + g];
            }
        }
        Boundary::Reflective => {
            let s = parity.sign::<S>();
            for g in 0..NG {
                buf[NG - 1 - g] = s * buf[NG + g];
                buf[NG + n + g] = s * buf[NG + n - 1 - g];
            }
        }
    }
}
