//! Small dense linear algebra over [`Scalar`].
//!
//! Dimensions here are tiny (n <= ~50), so everything is row-major `Vec`
//! storage with straightforward O(n^3) kernels.

use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn scaled<T: Scalar>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// `y += s * x`
pub fn axpy<T: Scalar>(y: &mut [T], s: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

pub fn neg<T: Scalar>(a: &[T]) -> Vec<T> {
    a.iter().map(|&x| -x).collect()
}

/// Returns `a / |a|`, or `None` for a (numerically) zero vector.
pub fn normalized<T: Scalar>(a: &[T]) -> Option<Vec<T>> {
    let r = norm(a);
    if r <= T::min_positive_value() || !r.is_finite() {
        return None;
    }
    Some(scaled(a, T::one() / r))
}

pub fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[i] = T::one();
    e
}

/// Flips `v` so that its first entry of magnitude above `tol` is positive.
pub fn canonical_sign<T: Scalar>(v: &[T], tol: T) -> Vec<T> {
    match v.iter().find(|x| x.abs() > tol) {
        Some(x) if *x < T::zero() => neg(v),
        _ => v.to_vec(),
    }
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Incrementally built orthonormal basis (modified Gram-Schmidt, with one
/// reorthogonalisation pass).
#[derive(Clone, Debug)]
pub struct OrthoBasis<T> {
    dim: usize,
    pub vectors: Vec<Vec<T>>,
}

impl<T: Scalar> OrthoBasis<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Component of `v` orthogonal to the current span.
    pub fn residual(&self, v: &[T]) -> Vec<T> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for q in &self.vectors {
                let c = dot(&r, q);
                axpy(&mut r, -c, q);
            }
        }
        r
    }

    /// Adds `v` if its orthogonal residual exceeds `rel_tol * |v|`.
    pub fn push(&mut self, v: &[T], rel_tol: T) -> bool {
        if self.vectors.len() == self.dim {
            return false;
        }
        let scale = norm(v);
        if scale <= T::min_positive_value() {
            return false;
        }
        let r = self.residual(v);
        let rn = norm(&r);
        if rn <= rel_tol * scale {
            return false;
        }
        self.vectors.push(scaled(&r, T::one() / rn));
        true
    }

    /// Coordinates of `v` in this basis.
    pub fn coords(&self, v: &[T]) -> Vec<T> {
        self.vectors.iter().map(|q| dot(v, q)).collect()
    }

    /// Completes the basis with standard basis vectors up to the full dimension.
    pub fn complete(&mut self) {
        let mut i = 0;
        while self.vectors.len() < self.dim && i < self.dim {
            let e = unit::<T>(self.dim, i);
            self.push(&e, T::lit(1e-3));
            i += 1;
        }
    }
}

/// Orthonormal basis of the hyperplane `u^⊥` (u need not be normalised).
pub fn orthonormal_complement<T: Scalar>(u: &[T]) -> Vec<Vec<T>> {
    let n = u.len();
    let mut b = OrthoBasis::new(n);
    b.push(u, T::zero());
    b.complete();
    b.vectors.into_iter().skip(1).collect()
}

/// Unit normal of the hyperplane spanned by `n - 1` vectors in R^n, if they
/// are linearly independent (up to `rel_tol`).
pub fn hyperplane_normal<T: Scalar>(vectors: &[&[T]], rel_tol: T) -> Option<Vec<T>> {
    let n = vectors.first()?.len();
    debug_assert_eq!(vectors.len() + 1, n);
    let mut b = OrthoBasis::new(n);
    for v in vectors {
        if !b.push(v, rel_tol) {
            return None;
        }
    }
    (0..n)
        .map(|i| b.residual(&unit::<T>(n, i)))
        .max_by(|a, c| norm(a).partial_cmp(&norm(c)).unwrap())
        .and_then(|r| normalized(&r))
}

/// Square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[&[T]]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    /// `u ⊗ u`
    pub fn outer(u: &[T]) -> Self {
        let n = u.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = u[i] * u[j];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ v`
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (i, &vi) in v.iter().enumerate() {
            axpy(&mut out, vi, self.row(i));
        }
        out
    }

    /// `vᵀ self v`
    pub fn quad_form(&self, v: &[T]) -> T {
        dot(v, &self.mul_vec(v))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `self += s * (u ⊗ u)`
    pub fn add_outer(&mut self, s: T, u: &[T]) {
        for i in 0..self.n {
            for j in 0..self.n {
                self[(i, j)] = self[(i, j)] + s * u[i] * u[j];
            }
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        let scale = self.frobenius().max(T::one());
        (0..self.n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= rel_tol * scale))
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::new(self)
    }

    pub fn determinant(&self) -> T {
        match Lu::new(self) {
            Ok(lu) => lu.determinant(),
            Err(_) => T::zero(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.n;
        let mut inv = Self::zeros(n);
        for j in 0..n {
            let col = lu.solve(&unit::<T>(n, j));
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        Ok(self.lu()?.solve(b))
    }

    /// Lower-triangular Cholesky factor; fails unless symmetric positive definite.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.n;
        if !self.is_symmetric(T::tol(1e-10)) {
            return Err(GeomError::NotPsd("matrix is not symmetric".into()));
        }
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return Err(GeomError::NotPsd(format!("pivot {j} is {d}")));
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues and the matrix whose columns are the eigenvectors.
    pub fn symmetric_eigen(&self) -> Result<(Vec<T>, Self)> {
        if !self.is_symmetric(T::tol(1e-10)) {
            return Err(GeomError::NotPsd("matrix is not symmetric".into()));
        }
        let n = self.n;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        let scale = a.frobenius();
        if scale == T::zero() {
            return Ok((vec![T::zero(); n], v));
        }
        let two = T::lit(2.0);
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum::<T>()
                .sqrt();
            if off <= T::epsilon() * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq.abs() <= T::min_positive_value() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        Ok(((0..n).map(|i| a[(i, i)]).collect(), v))
    }

    /// `V diag(f(λ)) Vᵀ` for a symmetric matrix.
    fn spectral_map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let (vals, vecs) = self.symmetric_eigen()?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for (k, &lam) in vals.iter().enumerate() {
            let fl = f(lam);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + fl * vecs[(i, k)] * vecs[(j, k)];
                }
            }
        }
        Ok(out)
    }
}

/// Symmetric square root of a symmetric positive semidefinite matrix.
pub fn psd_sqrt<T: Scalar>(m: &Mat<T>) -> Result<Mat<T>> {
    if !m.is_finite() {
        return Err(GeomError::NotPsd("non-finite entries".into()));
    }
    let (vals, _) = m.symmetric_eigen()?;
    let scale = vals.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    let floor = T::tol(1e-12) * scale.max(T::one());
    if let Some(bad) = vals.iter().find(|&&l| l < -floor) {
        return Err(GeomError::NotPsd(format!("negative eigenvalue {bad}")));
    }
    m.spectral_map(|l| l.max(T::zero()).sqrt())
}

/// Inverse square root of a symmetric positive definite matrix.
pub fn pd_inv_sqrt<T: Scalar>(m: &Mat<T>) -> Result<Mat<T>> {
    let (vals, _) = m.symmetric_eigen()?;
    if let Some(bad) = vals.iter().find(|&&l| !(l > T::zero())) {
        return Err(GeomError::NotPsd(format!("non-positive eigenvalue {bad}")));
    }
    m.spectral_map(|l| T::one() / l.sqrt())
}

/// LU factorisation with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Mat<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Scalar> Lu<T> {
    pub fn new(m: &Mat<T>) -> Result<Self> {
        let n = m.n;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let scale = m.data.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
        if scale == T::zero() || !scale.is_finite() {
            return Err(GeomError::Singular("zero or non-finite matrix".into()));
        }
        let tiny = T::epsilon() * scale * T::of(n);
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pv <= tiny {
                return Err(GeomError::Singular(format!("pivot {k} vanishes")));
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] = lu[(i, j)] - f * lu[(k, j)];
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn determinant(&self) -> T {
        (0..self.lu.n).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_psd(n: usize, seed: u64) -> Mat<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = Mat::from_rows(
            &(0..n)
                .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        b.mul(&b.transpose())
    }

    #[test]
    fn psd_sqrt_identity_and_diagonal() {
        let i3 = Mat::<f64>::identity(3);
        assert!(psd_sqrt(&i3).unwrap().sub(&i3).frobenius() < 1e-15);
        let d = psd_sqrt(&Mat::from_diag(&[4.0, 1.0])).unwrap();
        assert!(d.sub(&Mat::from_diag(&[2.0, 1.0])).frobenius() < 1e-14);
    }

    #[test]
    fn psd_sqrt_residual_and_commutation() {
        for seed in 0..100 {
            let m = random_psd(5, seed);
            let r = psd_sqrt(&m).unwrap();
            assert!(r.mul(&r).sub(&m).frobenius() <= 1e-10, "seed {seed}");
            assert!(r.mul(&m).sub(&m.mul(&r)).frobenius() <= 1e-8);
            assert!(r.is_symmetric(1e-12));
        }
    }

    #[test]
    fn psd_sqrt_rejects_bad_input() {
        let asym = Mat::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(psd_sqrt(&asym), Err(GeomError::NotPsd(_))));
        let indef = Mat::from_diag(&[1.0, -1.0]);
        assert!(matches!(psd_sqrt(&indef), Err(GeomError::NotPsd(_))));
    }

    #[test]
    fn lu_determinant_and_inverse() {
        let m = Mat::<f64>::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]).unwrap();
        // cofactor expansion: 0*(1) - 2*(1 - 0) + 1*(0 - 3) = -5
        assert!((m.determinant() + 5.0).abs() < 1e-14);
        let inv = m.inverse().unwrap();
        assert!(inv.mul(&m).sub(&Mat::identity(3)).frobenius() < 1e-14);
        let sing = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(sing.inverse().is_err());
        assert_eq!(sing.determinant(), 0.0);
    }

    #[test]
    fn cholesky_detects_indefinite() {
        let m = random_psd(4, 7).add(&Mat::identity(4));
        let l = m.cholesky().unwrap();
        assert!(l.mul(&l.transpose()).sub(&m).frobenius() < 1e-12);
        assert!(Mat::from_diag(&[1.0, 0.0]).cholesky().is_err());
    }

    #[test]
    fn hyperplane_normal_is_orthogonal() {
        let a = [1.0, 2.0, 0.5];
        let b = [0.0, 1.0, -1.0];
        let nrm = hyperplane_normal::<f64>(&[&a, &b], 1e-12).unwrap();
        assert!(dot(&nrm, &a).abs() < 1e-14 && dot(&nrm, &b).abs() < 1e-14);
        assert!((norm(&nrm) - 1.0).abs() < 1e-14);
        assert!(hyperplane_normal::<f64>(&[&a, &a], 1e-12).is_none());
    }

    #[test]
    fn complement_is_orthonormal() {
        let u = [0.3, -0.4, 0.5, 0.1];
        let c = orthonormal_complement::<f64>(&u);
        assert_eq!(c.len(), 3);
        for (i, x) in c.iter().enumerate() {
            assert!(dot(x, &u).abs() < 1e-14);
            for (j, y) in c.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(x, y) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_precision_kernel() {
        let m = Mat::<f32>::from_diag(&[9.0, 4.0]);
        let r = psd_sqrt(&m).unwrap();
        assert!((r[(0, 0)] - 3.0).abs() < 1e-5 && (r[(1, 1)] - 2.0).abs() < 1e-5);
    }
}
