use std::ops::{Add, AddAssign, Deref, DerefMut, Mul, MulAssign, Neg, Sub, SubAssign};

use super::NumError;

/// Dense real vector. Iterates, resolvent outputs and flattened matrices all
/// travel as this type.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealVector(Vec<f64>);

impl RealVector {
    /// Checked constructor: rejects empty input and non-finite components.
    pub fn new(components: Vec<f64>) -> Result<Self, NumError> {
        if components.is_empty() {
            return Err(NumError::Empty);
        }
        if let Some(index) = components.iter().position(|c| !c.is_finite()) {
            return Err(NumError::NonFinite { index });
        }
        Ok(Self(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Self(vec![value; dim])
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.dist_sq(other).sqrt()
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert_eq!(self.dim(), x.dim());
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s += a * xi;
        }
    }

    /// `a * self + b * other`
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(x, y)| a * x + b * y).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Concatenates blocks into one vector.
    pub fn concat(blocks: &[RealVector]) -> Self {
        Self(blocks.iter().flat_map(|b| b.0.iter().copied()).collect())
    }

    /// Splits into consecutive blocks of equal size.
    pub fn split_blocks(&self, block: usize) -> Vec<RealVector> {
        self.0.chunks(block).map(|c| Self(c.to_vec())).collect()
    }
}

impl From<Vec<f64>> for RealVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for RealVector {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

impl FromIterator<f64> for RealVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl Deref for RealVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for RealVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Add for &RealVector {
    type Output = RealVector;
    fn add(self, rhs: &RealVector) -> RealVector {
        self.lincomb(1.0, rhs, 1.0)
    }
}

impl Sub for &RealVector {
    type Output = RealVector;
    fn sub(self, rhs: &RealVector) -> RealVector {
        debug_assert_eq!(self.dim(), rhs.dim());
        self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect()
    }
}

impl Mul<f64> for &RealVector {
    type Output = RealVector;
    fn mul(self, rhs: f64) -> RealVector {
        self.map(|x| x * rhs)
    }
}

impl Mul<f64> for RealVector {
    type Output = RealVector;
    fn mul(mut self, rhs: f64) -> RealVector {
        self *= rhs;
        self
    }
}

impl Neg for &RealVector {
    type Output = RealVector;
    fn neg(self) -> RealVector {
        self.map(|x| -x)
    }
}

impl AddAssign<&RealVector> for RealVector {
    fn add_assign(&mut self, rhs: &RealVector) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&RealVector> for RealVector {
    fn sub_assign(&mut self, rhs: &RealVector) {
        self.axpy(-1.0, rhs);
    }
}

impl MulAssign<f64> for RealVector {
    fn mul_assign(&mut self, rhs: f64) {
        for x in self.0.iter_mut() {
            *x *= rhs;
        }
    }
}
