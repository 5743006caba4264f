//! Small dense linear algebra over [`Scalar`]: row reduction, null spaces,
//! consistent solves, and (float only) Cholesky and a Hermitian power iteration.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r);
        }
        Ok(Self { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    /// Largest `|M_ij − conj(M_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = self[(i, j)].clone() - self[(j, i)].conj();
                worst = worst.max(d.magnitude());
            }
        }
        worst
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn truncate_rows(&mut self, rows: usize) {
        self.rows = rows;
        self.data.truncate(rows * self.cols);
    }
}

impl<S> std::ops::Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduce `m` to reduced row echelon form, searching pivots only in the first
/// `pivot_cols` columns. Zero rows are dropped; the returned vector holds the
/// pivot column of each remaining row.
pub fn rref<S: Scalar>(m: &mut Mat<S>, pivot_cols: usize) -> Vec<usize> {
    let pivots = rref_keep_rows(m, pivot_cols);
    m.truncate_rows(pivots.len());
    pivots
}

fn rref_keep_rows<S: Scalar>(m: &mut Mat<S>, pivot_cols: usize) -> Vec<usize> {
    let scale = {
        let mut s: f64 = 0.0;
        for i in 0..m.rows {
            for j in 0..pivot_cols {
                s = s.max(m[(i, j)].magnitude());
            }
        }
        s
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == m.rows {
            break;
        }
        let mut best = r;
        let mut best_mag = m[(r, c)].magnitude();
        for i in r + 1..m.rows {
            let mag = m[(i, c)].magnitude();
            if mag > best_mag {
                best = i;
                best_mag = mag;
                if S::EXACT {
                    break;
                }
            }
        }
        if m[(best, c)].is_negligible(scale) {
            for i in r..m.rows {
                m[(i, c)] = S::zero();
            }
            continue;
        }
        m.swap_rows(r, best);
        let inv = S::one() / m[(r, c)].clone();
        for j in 0..m.cols {
            let v = m[(r, j)].clone() * inv.clone();
            m[(r, j)] = v;
        }
        m[(r, c)] = S::one();
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let factor = m[(i, c)].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..m.cols {
                let v = m[(i, j)].clone() - factor.clone() * m[(r, j)].clone();
                m[(i, j)] = v;
            }
            m[(i, c)] = S::zero();
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : R x = 0}` for a matrix already in reduced row echelon form.
pub fn null_space_of_rref<S: Scalar>(reduced: &Mat<S>, pivots: &[usize]) -> Vec<Vec<S>> {
    let cols = reduced.cols();
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(i, f)].clone();
            }
            v
        })
        .collect()
}

/// Solve `A x = b`, allowing singular but consistent systems (free variables
/// are set to zero). Returns `None` when the system is inconsistent.
pub fn solve_consistent<S: Scalar>(a: &Mat<S>, b: &[S]) -> Option<Vec<S>> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = Mat::zeros(a.rows(), n + 1);
    let scale = a.max_magnitude().max(b.iter().map(|x| x.magnitude()).fold(0.0, f64::max));
    for i in 0..a.rows() {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let pivots = rref_keep_rows(&mut aug, n);
    for i in pivots.len()..aug.rows() {
        if !aug[(i, n)].is_negligible(scale) {
            return None;
        }
    }
    let mut x = vec![S::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[(i, n)].clone();
    }
    Some(x)
}

/// Lower-triangular `L` with `L Lᴴ = M`; fails when `M` is not numerically
/// positive definite.
pub fn cholesky(m: &Mat<C64>) -> Result<Mat<C64>> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::DimensionMismatch { expected: n, got: m.cols() });
    }
    let max_diag = (0..n).map(|i| m[(i, i)].re.abs()).fold(0.0, f64::max);
    let mut l = Mat::<C64>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 1e-14 * max_diag) {
            return Err(Error::NotPositiveDefinite(format!(
                "pivot {j} is {d:e} (largest diagonal {max_diag:e})"
            )));
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solve `L y = b` for lower-triangular `L`.
pub fn forward_substitute(l: &Mat<C64>, b: &[C64]) -> Vec<C64> {
    let n = l.rows();
    let mut y = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Solve `Lᴴ x = y` for lower-triangular `L`.
pub fn backward_substitute_adjoint(l: &Mat<C64>, y: &[C64]) -> Vec<C64> {
    let n = l.rows();
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)].conj();
    }
    x
}

pub fn cholesky_solve(l: &Mat<C64>, b: &[C64]) -> Vec<C64> {
    backward_substitute_adjoint(l, &forward_substitute(l, b))
}

/// Ratio of the largest to smallest squared Cholesky pivot; a cheap lower
/// bound on the spectral condition number.
pub fn pivot_condition(l: &Mat<C64>) -> f64 {
    let (lo, hi) = (0..l.rows())
        .map(|i| l[(i, i)].re * l[(i, i)].re)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    if l.rows() == 0 {
        1.0
    } else {
        hi / lo
    }
}

/// Largest eigenvalue of the pencil `A v = λ B v` with `A` Hermitian positive
/// semidefinite and `B` Hermitian positive definite, by power iteration on
/// `L⁻¹ A L⁻ᴴ`.
pub fn largest_generalized_eigenvalue(a: &Mat<C64>, b: &Mat<C64>, max_iter: usize) -> Result<f64> {
    let n = a.rows();
    if n == 0 {
        return Ok(0.0);
    }
    let l = cholesky(b)?;
    // C = L⁻¹ A L⁻ᴴ, assembled column by column.
    let mut c = Mat::<C64>::zeros(n, n);
    let mut linv_a = Mat::<C64>::zeros(n, n);
    for j in 0..n {
        let col: Vec<C64> = (0..n).map(|i| a[(i, j)]).collect();
        let y = forward_substitute(&l, &col);
        for i in 0..n {
            linv_a[(i, j)] = y[i];
        }
    }
    // (L⁻¹ A) L⁻ᴴ = (L⁻¹ (L⁻¹ A)ᴴ)ᴴ
    let t = linv_a.conj_transpose();
    for j in 0..n {
        let col: Vec<C64> = (0..n).map(|i| t[(i, j)]).collect();
        let y = forward_substitute(&l, &col);
        for i in 0..n {
            c[(j, i)] = y[i].conj();
        }
    }
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + i as f64 * 1e-3, 0.0)).collect();
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = c.mul_vec(&v);
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
            / v.iter().map(|x| x.norm_sqr()).sum::<f64>();
        v = w.into_iter().map(|x| x / norm).collect();
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            return Ok(next);
        }
        lambda = next;
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CQ;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> CQ {
        CQ::new(BigRational::new(p.into(), d.into()), BigRational::from_integer(0.into()))
    }

    #[test]
    fn rref_and_null_space_exact() {
        // rows: [1 1 0], [2 2 0]  -> rank 1, null space dim 2
        let mut m = Mat::from_rows(vec![vec![q(1, 1), q(1, 1), q(0, 1)], vec![q(2, 1), q(2, 1), q(0, 1)]], 3).unwrap();
        let p = rref(&mut m, 3);
        assert_eq!(p, vec![0]);
        let ns = null_space_of_rref(&m, &p);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(Scalar::is_zero(&(v[0].clone() + v[1].clone())));
        }
    }

    #[test]
    fn singular_consistent_and_inconsistent() {
        let a = Mat::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]], 2).unwrap();
        let x = solve_consistent(&a, &[q(2, 1), q(2, 1)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![q(2, 1), q(2, 1)]);
        assert!(solve_consistent(&a, &[q(1, 1), q(2, 1)]).is_none());
    }

    #[test]
    fn cholesky_roundtrip_and_rejects_indefinite() {
        let m = Mat::from_rows(
            vec![vec![C64::new(4.0, 0.0), C64::new(1.0, 1.0)], vec![C64::new(1.0, -1.0), C64::new(3.0, 0.0)]],
            2,
        )
        .unwrap();
        let l = cholesky(&m).unwrap();
        let back = l.mul(&l.conj_transpose()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((back[(i, j)] - m[(i, j)]).norm() < 1e-14);
            }
        }
        let x = cholesky_solve(&l, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let r = m.mul_vec(&x);
        assert!((r[0] - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
        let bad = Mat::from_rows(vec![vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)], vec![C64::new(2.0, 0.0), C64::new(1.0, 0.0)]], 2).unwrap();
        assert!(cholesky(&bad).is_err());
    }

    #[test]
    fn generalized_eigenvalue_of_rank_one_pencil() {
        // A = u uᴴ, B = diag(2, 4): λ = uᴴ B⁻¹ u
        let u = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let mut a = Mat::<C64>::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                a[(i, j)] = u[i] * u[j].conj();
            }
        }
        let mut b = Mat::<C64>::zeros(2, 2);
        b[(0, 0)] = C64::new(2.0, 0.0);
        b[(1, 1)] = C64::new(4.0, 0.0);
        let lam = largest_generalized_eigenvalue(&a, &b, 200).unwrap();
        assert!((lam - 1.5).abs() < 1e-12);
    }
}
