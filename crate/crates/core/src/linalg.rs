//! Dense 2×2 linear algebra for the t–x block.
//!
//! Everything the profile equations need fits in two dimensions, so the
//! eigenvalue problems are solved in closed form instead of through a
//! general-purpose decomposition.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::real::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<T>(pub [T; 2]);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Real> Vec2<T> {
    pub fn new(a: T, b: T) -> Self {
        Self([a, b])
    }

    pub fn zero() -> Self {
        Self([T::zero(); 2])
    }

    pub fn dot(&self, o: &Self) -> T {
        self.0[0] * o.0[0] + self.0[1] * o.0[1]
    }

    pub fn norm(&self) -> T {
        self.0[0].hypot(self.0[1])
    }

    pub fn scale(&self, s: T) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    pub fn outer(&self, o: &Self) -> Mat2<T> {
        Mat2([[self.0[0] * o.0[0], self.0[0] * o.0[1]], [self.0[1] * o.0[0], self.0[1] * o.0[1]]])
    }

    pub fn is_finite(&self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }
}

impl<T> Index<usize> for Vec2<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vec2<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1]])
    }
}

impl<T: Real> Mat2<T> {
    pub fn new(a00: T, a01: T, a10: T, a11: T) -> Self {
        Self([[a00, a01], [a10, a11]])
    }

    pub fn zero() -> Self {
        Self([[T::zero(); 2]; 2])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn diag(a: T, b: T) -> Self {
        Self([[a, T::zero()], [T::zero(), b]])
    }

    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        let m = &self.0;
        (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        let m = &self.0;
        Self([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn symmetric_part(&self) -> Self {
        let half = lit::<T>(0.5);
        (*self + self.transpose()).scale(half)
    }

    pub fn mul_vec(&self, v: &Vec2<T>) -> Vec2<T> {
        let m = &self.0;
        Vec2([m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Self([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    /// Solves `self · x = b` by Cramer's rule; `None` when exactly singular.
    pub fn solve(&self, b: &Vec2<T>) -> Option<Vec2<T>> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Vec2([(b[0] * m[1][1] - m[0][1] * b[1]) / d, (m[0][0] * b[1] - m[1][0] * b[0]) / d]))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// Eigenvalues of a symmetric matrix, ascending. Only the symmetric part is used.
    pub fn sym_eigenvalues(&self) -> [T; 2] {
        let s = self.symmetric_part();
        let half = lit::<T>(0.5);
        let mean = s.trace() * half;
        let diff = (s.0[0][0] - s.0[1][1]) * half;
        let r = diff.hypot(s.0[0][1]);
        [mean - r, mean + r]
    }

    /// Strict positive definiteness of the symmetric part, with a relative margin.
    pub fn is_positive_definite(&self) -> bool {
        let [lo, hi] = self.sym_eigenvalues();
        lo > T::rel_tol(1e-13) * hi.abs().max(T::min_positive_value())
    }

    /// Eigenvalues of a general real matrix. Returned with the larger real part first.
    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let half = lit::<T>(0.5);
        let tr = self.trace();
        let det = self.det();
        let m = &self.0;
        // discriminant of λ² − tr λ + det, written to avoid cancellation
        let d = ((m[0][0] - m[1][1]) * half).powi(2) + m[0][1] * m[1][0];
        let mean = tr * half;
        if d >= T::zero() {
            let r = d.sqrt();
            // larger-magnitude root first, the other from the product
            let big = if mean >= T::zero() { mean + r } else { mean - r };
            let small = if big != T::zero() { det / big } else { T::zero() };
            let (a, b) = if big >= small { (big, small) } else { (small, big) };
            [Complex::new(a, T::zero()), Complex::new(b, T::zero())]
        } else {
            let im = (-d).sqrt();
            [Complex::new(mean, im), Complex::new(mean, -im)]
        }
    }

    /// Unit eigenvector for a real eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: T) -> Vec2<T> {
        let m = &self.0;
        // rows of (A − λI); use the one with larger norm
        let r0 = Vec2::new(m[0][0] - lambda, m[0][1]);
        let r1 = Vec2::new(m[1][0], m[1][1] - lambda);
        let row = if r0.norm() >= r1.norm() { r0 } else { r1 };
        let v = if row.norm() == T::zero() { Vec2::new(T::one(), T::zero()) } else { Vec2::new(-row[1], row[0]) };
        v.scale(T::one() / v.norm())
    }
}

/// Generalized eigenvalues of the symmetric pencil `(a, b)` with `b` positive definite,
/// i.e. roots of `det(a − λ b) = 0`, ascending. `None` when `b` is not positive definite.
pub fn generalized_sym_eigenvalues<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Option<[T; 2]> {
    let a = a.symmetric_part();
    let b = b.symmetric_part();
    if !b.is_positive_definite() {
        return None;
    }
    // Cholesky of b, then the ordinary symmetric problem L⁻¹ a L⁻ᵀ
    let l00 = b.0[0][0].sqrt();
    let l10 = b.0[1][0] / l00;
    let l11 = (b.0[1][1] - l10 * l10).sqrt();
    let linv = Mat2::new(T::one() / l00, T::zero(), -l10 / (l00 * l11), T::one() / l11);
    let c = linv * a * linv.transpose();
    Some(c.sym_eigenvalues())
}

impl<T: Real> Index<(usize, usize)> for Mat2<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Mat2<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        Self([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (&self.0, &o.0);
        let mut out = [[T::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(out)
    }
}
