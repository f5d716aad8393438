//! Dense real vectors.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};

/// A dense point in `R^n`.
///
/// Vectors built from outside data through [`Vector::new`] are checked for
/// finite entries. Results of arithmetic are not re-checked; solvers call
/// [`Vector::is_finite`] where a blow-up has to be detected.
///
/// Binary arithmetic between vectors of different lengths panics.
#[derive(Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Vector(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    pub fn filled(len: usize, value: f64) -> Self {
        Vector(vec![value; len])
    }

    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[index] = 1.0;
        v
    }

    /// Entries drawn uniformly from `[-scale, scale)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize, scale: f64) -> Self {
        Vector((0..len).map(|_| rng.random_range(-scale..scale)).collect())
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Self {
        Vector((0..len).map(f).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Self {
        Vector(self.0.iter().copied().map(f).collect())
    }

    pub fn zip_map(&self, other: &Vector, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        assert_same_len(self, other);
        Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_same_len(self, other);
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn distance_squared(&self, other: &Vector) -> f64 {
        assert_same_len(self, other);
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|x| factor * x)
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, factor: f64, other: &Vector) -> Self {
        self.zip_map(other, |a, b| a + factor * b)
    }

    /// In-place `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &Vector) {
        assert_same_len(self, other);
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += factor * b;
        }
    }
}

#[track_caller]
fn assert_same_len(a: &Vector, b: &Vector) {
    assert_eq!(a.len(), b.len(), "vector length mismatch");
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Vector::new(entries)
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scaled(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.map(|x| -x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        assert_eq!(Vector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1 }));
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(Vector::new(vec![]).is_ok());
    }

    #[test]
    fn basic_arithmetic() {
        let a = Vector::from_slice(&[3.0, 4.0]).unwrap();
        let b = Vector::from_slice(&[1.0, -1.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), -1.0);
        assert_eq!((&a - &b).as_slice(), &[2.0, 5.0]);
        assert_eq!(a.add_scaled(2.0, &b).as_slice(), &[5.0, 2.0]);
        assert_eq!(a.distance_squared(&b), 29.0);
        assert_eq!(a.norm_l1(), 7.0);
        assert_eq!(b.norm_inf(), 1.0);
    }

    #[test]
    #[should_panic(expected = "vector length mismatch")]
    fn mismatched_lengths_panic() {
        let _ = Vector::zeros(2).dot(&Vector::zeros(3));
    }
}
