//! Complex tridiagonal systems solved with the Thomas algorithm.
//!
//! The factorisation is computed once and reused for every right-hand side,
//! which is the access pattern of a Crank-Nicolson loop with a fixed
//! Hamiltonian.

use crate::{Error, Result, C64};

/// `A x = d` with `A` given by its three diagonals. `lower[0]` and
/// `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<C64>,
    pub diag: Vec<C64>,
    pub upper: Vec<C64>,
}

/// LU factors of a [`Tridiagonal`] without pivoting.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    lower: Vec<C64>,
    /// Modified super-diagonal `c'_j`.
    c_prime: Vec<C64>,
    /// Reciprocal pivots `1 / (b_j - a_j c'_{j-1})`.
    inv_pivot: Vec<C64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn factor(&self) -> Result<ThomasFactor> {
        let n = self.diag.len();
        assert!(self.lower.len() == n && self.upper.len() == n);
        let mut c_prime = vec![C64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![C64::new(0.0, 0.0); n];
        let mut prev_c = C64::new(0.0, 0.0);
        for j in 0..n {
            let pivot = if j == 0 {
                self.diag[0]
            } else {
                self.diag[j] - self.lower[j] * prev_c
            };
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularSystem(j));
            }
            let inv = pivot.inv();
            inv_pivot[j] = inv;
            if j + 1 < n {
                c_prime[j] = self.upper[j] * inv;
            }
            prev_c = c_prime[j];
        }
        Ok(ThomasFactor {
            lower: self.lower.clone(),
            c_prime,
            inv_pivot,
        })
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j] * x[j];
                if j > 0 {
                    s += self.lower[j] * x[j - 1];
                }
                if j + 1 < n {
                    s += self.upper[j] * x[j + 1];
                }
                s
            })
            .collect()
    }
}

impl ThomasFactor {
    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn solve_in_place(&self, rhs: &mut [C64]) {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        let mut prev = C64::new(0.0, 0.0);
        for j in 0..n {
            let d = if j == 0 { rhs[0] } else { rhs[j] - self.lower[j] * prev };
            prev = d * self.inv_pivot[j];
            rhs[j] = prev;
        }
        for j in (0..n.saturating_sub(1)).rev() {
            rhs[j] = rhs[j] - self.c_prime[j] * rhs[j + 1];
        }
    }

    pub(crate) fn c_prime(&self) -> &[C64] {
        &self.c_prime
    }

    pub(crate) fn inv_pivot(&self) -> &[C64] {
        &self.inv_pivot
    }
}
