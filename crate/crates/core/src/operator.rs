use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A linear operator on the k-level Fock space, as a `k × k` complex matrix.
/// Row and column `n` label the basis state `|n⟩`; matrices act on columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator(DMatrix<C64>);

impl FockOperator {
    /// Wraps a square matrix. Panics if the matrix is not square or has
    /// dimension below 2.
    pub fn new(matrix: DMatrix<C64>) -> Self {
        assert!(matrix.is_square(), "Fock operators are square");
        assert!(matrix.nrows() >= 2, "Fock space dimension is at least 2");
        Self(matrix)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(diagonal: &[C64]) -> Self {
        let mut m = DMatrix::zeros(diagonal.len(), diagonal.len());
        for (n, d) in diagonal.iter().enumerate() {
            m[(n, n)] = *d;
        }
        Self::new(m)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    /// `⟨row|A|col⟩`.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.0[(row, col)] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    /// Non-negative integer power by repeated squaring; `A^0 = I`.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let n = self.dim();
        let mut sum = 0.0;
        for r in 0..n {
            for c in (0..n).filter(|&c| c != r) {
                sum += self.0[(r, c)].norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|n| self.0[(n, n)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Matrix inverse, validated by `‖A A⁻¹ - I‖_F ≤ tol`.
    pub fn inverse(&self, name: &'static str, tol: f64) -> Result<Self> {
        let inv = self
            .0
            .clone()
            .try_inverse()
            .ok_or(Error::Singular { name, residual: f64::INFINITY })?;
        let residual = (&self.0 * &inv - DMatrix::identity(self.dim(), self.dim())).norm();
        if !(residual <= tol) {
            return Err(Error::Singular { name, residual });
        }
        Ok(Self(inv))
    }

    /// Applies the operator to a column vector of amplitudes.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim());
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Row-major nested `[re, im]` pairs, the layout used for JSON export.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| [self.0[(r, c)].re, self.0[(r, c)].im]).collect())
            .collect()
    }
}

impl From<DMatrix<C64>> for FockOperator {
    fn from(m: DMatrix<C64>) -> Self {
        Self::new(m)
    }
}

impl Serialize for FockOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FockOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let n = rows.len();
        if n < 2 || rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("expected a square matrix of dimension >= 2"));
        }
        Ok(Self::from_fn(n, |r, c| C64::new(rows[r][c][0], rows[r][c][1])))
    }
}

impl<'a> Mul<&'a FockOperator> for &'a FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: &'a FockOperator) -> FockOperator {
        FockOperator(&self.0 * &rhs.0)
    }
}

impl Mul for FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: FockOperator) -> FockOperator {
        FockOperator(self.0 * rhs.0)
    }
}

impl Mul<C64> for &FockOperator {
    type Output = FockOperator;
    fn mul(self, rhs: C64) -> FockOperator {
        self.scale(rhs)
    }
}

impl Mul<&FockOperator> for C64 {
    type Output = FockOperator;
    fn mul(self, rhs: &FockOperator) -> FockOperator {
        rhs.scale(self)
    }
}

impl<'a> Add<&'a FockOperator> for &'a FockOperator {
    type Output = FockOperator;
    fn add(self, rhs: &'a FockOperator) -> FockOperator {
        FockOperator(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a FockOperator> for &'a FockOperator {
    type Output = FockOperator;
    fn sub(self, rhs: &'a FockOperator) -> FockOperator {
        FockOperator(&self.0 - &rhs.0)
    }
}

impl Neg for &FockOperator {
    type Output = FockOperator;
    fn neg(self) -> FockOperator {
        FockOperator(-&self.0)
    }
}
