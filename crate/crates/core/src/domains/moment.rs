//! Moment matrices `M_ij = ⟨z^{α_j}, z^{α_i}⟩_D` for domains where monomials
//! are not orthogonal.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::shadow::power_integral;
use super::{DiagonalDomain, Shape};
use crate::error::{Error, Result};
use crate::jets::{jet_space_dim, monomials_up_to, MultiIndex};
use crate::linalg::{cholesky, solve_consistent, Mat};
use crate::quadrature::{gauss_legendre, integrate};
use crate::scalar::C64;

pub const MAX_MOMENT_DIM: usize = 3;
pub const MAX_MOMENT_DEGREE: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub enum MomentRule {
    /// Adaptive Gauss–Kronrod over the Reinhardt shadow.
    Shadow,
    /// Tensor Gauss–Legendre in each radius, trapezoid in each angle.
    TensorPolar { radial: usize, angular: usize },
    /// Matrix supplied by the caller.
    Supplied,
}

/// `{A w + c : w ∈ polydisc(radii)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePolydisc {
    pub matrix: Mat<C64>,
    pub shift: Vec<C64>,
    pub radii: Vec<f64>,
}

impl AffinePolydisc {
    pub fn new(matrix: Mat<C64>, shift: Vec<C64>, radii: Vec<f64>) -> Result<Self> {
        let n = radii.len();
        if n == 0 || n > MAX_MOMENT_DIM {
            return Err(Error::InvalidArgument(format!("affine polydisc dimension {n} outside 1..={MAX_MOMENT_DIM}")));
        }
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.rows() });
        }
        if shift.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: shift.len() });
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidArgument(format!("radii must be positive: {radii:?}")));
        }
        let det = determinant(&matrix);
        if det.norm() <= 1e-12 * matrix.max_magnitude().powi(n as i32) {
            return Err(Error::Singular("affine map is not invertible".into()));
        }
        let neg: Vec<C64> = shift.iter().map(|c| -c).collect();
        let w0 = solve_consistent(&matrix, &neg).ok_or_else(|| Error::Singular("affine map".into()))?;
        if w0.iter().zip(&radii).any(|(w, r)| w.norm() >= *r) {
            return Err(Error::InvalidArgument("the domain does not contain the origin".into()));
        }
        Ok(Self { matrix, shift, radii })
    }

    /// `{|z|² + |z − c|² < r}`: the disc of radius `√((r − |c|²/2)/2)` about `c/2`.
    pub fn ellipse(c: C64, r: f64) -> Result<Self> {
        let rho2 = (r - c.norm_sqr() / 2.0) / 2.0;
        if !(rho2 > 0.0) {
            return Err(Error::InvalidArgument(format!("empty region for c={c}, r={r}")));
        }
        Self::new(Mat::identity(1), vec![c / 2.0], vec![rho2.sqrt()])
    }

    pub fn dim(&self) -> usize {
        self.radii.len()
    }

    /// Componentwise containment for maps sharing `A` and `c`.
    pub fn certified_subset_of(&self, other: &Self) -> bool {
        self.matrix == other.matrix
            && self.shift == other.shift
            && self.radii.iter().zip(&other.radii).all(|(a, b)| a <= b)
    }
}

fn determinant(m: &Mat<C64>) -> C64 {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[(i, k)].norm().partial_cmp(&a[(j, k)].norm()).unwrap()).unwrap();
        if a[(p, k)].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            det = -det;
        }
        det *= a[(k, k)];
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            for j in k..n {
                let v = a[(k, j)];
                a[(i, j)] -= f * v;
            }
        }
    }
    det
}

#[derive(Clone, Debug)]
pub struct MomentDomain {
    n: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
    gram: Mat<C64>,
    rule: MomentRule,
    error_estimate: f64,
    affine: Option<AffinePolydisc>,
}

impl MomentDomain {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Row `i`, column `j` holds `∫ z^{α_j} conj(z^{α_i})`.
    pub fn gram(&self) -> &Mat<C64> {
        &self.gram
    }

    pub fn rule(&self) -> &MomentRule {
        &self.rule
    }

    pub fn error_estimate(&self) -> f64 {
        self.error_estimate
    }

    pub fn affine(&self) -> Option<&AffinePolydisc> {
        self.affine.as_ref()
    }

    /// Validate and adopt a Hermitian positive-definite matrix indexed by the
    /// monomials of degree at most `degree` in graded order.
    pub fn from_matrix(n: usize, degree: u32, gram: Mat<C64>) -> Result<Self> {
        check_limits(n, degree)?;
        let size = jet_space_dim(n, degree);
        if gram.rows() != size || gram.cols() != size {
            return Err(Error::DimensionMismatch { expected: size, got: gram.rows() });
        }
        let scale = gram.max_magnitude();
        if gram.hermitian_defect() > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "moment matrix is not Hermitian (defect {:e})",
                gram.hermitian_defect()
            )));
        }
        let gram = hermitize(&gram);
        cholesky(&gram)?;
        Ok(Self {
            n,
            degree,
            indices: monomials_up_to(n, degree),
            gram,
            rule: MomentRule::Supplied,
            error_estimate: 0.0,
            affine: None,
        })
    }

    /// Diagonal matrix from a Reinhardt domain, each entry by adaptive
    /// quadrature over the shadow (not by the closed forms).
    pub fn from_diagonal(domain: &DiagonalDomain, degree: u32) -> Result<Self> {
        let n = domain.dim();
        check_limits(n, degree)?;
        let indices = monomials_up_to(n, degree);
        let tol = domain.tolerance();
        let values: Vec<Result<(f64, f64)>> = indices
            .par_iter()
            .map(|alpha| match (domain.shape(), domain.weight()) {
                (Shape::Polydisc { radii }, super::Weight::None) => shadow_box(alpha, tol, &|j, _| radii[j]),
                (Shape::Ball { radius }, _) => {
                    let r2 = radius * radius;
                    shadow_box(alpha, tol, &|_, s| (r2 - s).max(0.0).sqrt())
                }
                _ => Ok((domain.monomial_norm(alpha)?, 0.0)),
            })
            .collect();
        let mut gram = Mat::zeros(indices.len(), indices.len());
        let mut err: f64 = 0.0;
        for (i, v) in values.into_iter().enumerate() {
            let (value, e) = v?;
            if !value.is_finite() {
                return Err(Error::InvalidArgument(format!("z^{} has infinite norm; no finite moment matrix", indices[i])));
            }
            gram[(i, i)] = C64::new(value, 0.0);
            err = err.max(e / value);
        }
        cholesky(&gram)?;
        Ok(Self { n, degree, indices, gram, rule: MomentRule::Shadow, error_estimate: err, affine: None })
    }

    /// Tensor rule that is exact for the polynomial integrands involved; the
    /// error estimate compares against a rule with one more node per axis.
    pub fn from_affine(domain: &AffinePolydisc, degree: u32) -> Result<Self> {
        let n = domain.dim();
        check_limits(n, degree)?;
        let indices = monomials_up_to(n, degree);
        let m = degree as usize + 1;
        let q = degree as usize + 1;
        let gram = hermitize(&affine_gram(domain, &indices, degree, m, q));
        let check = affine_gram(domain, &indices, degree, m + 1, q + 1);
        let scale = gram.max_magnitude();
        let mut err: f64 = 0.0;
        for i in 0..indices.len() {
            for j in 0..indices.len() {
                err = err.max((gram[(i, j)] - check[(i, j)]).norm() / scale);
            }
        }
        cholesky(&gram).map_err(|e| Error::Singular(format!("moment matrix: {e}")))?;
        Ok(Self {
            n,
            degree,
            indices,
            gram,
            rule: MomentRule::TensorPolar { radial: m, angular: q },
            error_estimate: err,
            affine: Some(domain.clone()),
        })
    }

    /// Leading block for monomials of degree at most `degree`.
    pub fn restrict(&self, degree: u32) -> Result<Self> {
        if degree > self.degree {
            return Err(Error::InvalidArgument(format!(
                "requested degree {degree} exceeds stored degree {}",
                self.degree
            )));
        }
        let size = jet_space_dim(self.n, degree);
        let mut gram = Mat::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                gram[(i, j)] = self.gram[(i, j)];
            }
        }
        Ok(Self {
            n: self.n,
            degree,
            indices: self.indices[..size].to_vec(),
            gram,
            rule: self.rule.clone(),
            error_estimate: self.error_estimate,
            affine: self.affine.clone(),
        })
    }

    /// Long-format CSV: `row,col,alpha,beta,re,im`, row-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,alpha,beta,re,im\n");
        for i in 0..self.indices.len() {
            for j in 0..self.indices.len() {
                let v = self.gram[(i, j)];
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:e},{:e}",
                    i,
                    j,
                    index_label(&self.indices[i]),
                    index_label(&self.indices[j]),
                    v.re,
                    v.im
                );
            }
        }
        out
    }
}

fn index_label(alpha: &MultiIndex) -> String {
    alpha.components().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
}

fn check_limits(n: usize, degree: u32) -> Result<()> {
    if n == 0 || n > MAX_MOMENT_DIM {
        return Err(Error::InvalidArgument(format!("moment matrices support 1 <= n <= {MAX_MOMENT_DIM}, got {n}")));
    }
    if degree > MAX_MOMENT_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "moment matrices support degree <= {MAX_MOMENT_DEGREE}, got {degree}"
        )));
    }
    Ok(())
}

fn hermitize(m: &Mat<C64>) -> Mat<C64> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in i + 1..m.cols() {
            let v = (m[(i, j)] + m[(j, i)].conj()) / 2.0;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// `(2π)^n ∫ Π x_j^{2α_j+1}` over `{0 ≤ x_j < upper(j, Σ_{i<j} x_i²)}` by
/// iterated adaptive quadrature. Returns value and error estimate.
fn shadow_box(alpha: &MultiIndex, tol: f64, upper: &(dyn Fn(usize, f64) -> f64 + Sync)) -> Result<(f64, f64)> {
    fn level(
        alpha: &MultiIndex,
        j: usize,
        s: f64,
        tol: f64,
        upper: &(dyn Fn(usize, f64) -> f64 + Sync),
        err: &mut f64,
    ) -> Result<f64> {
        let n = alpha.dim();
        let hi = upper(j, s);
        let p = alpha.get(j) as f64;
        if j + 1 == n {
            return Ok(power_integral(0.0, hi, p));
        }
        let failure = std::cell::RefCell::new(None);
        let inner_err = std::cell::Cell::new(0.0f64);
        let f = |x: f64| {
            let mut e = 0.0;
            match level(alpha, j + 1, s + x * x, tol, upper, &mut e) {
                Ok(v) => {
                    inner_err.set(inner_err.get().max(e));
                    x.powf(2.0 * p + 1.0) * v
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let r = integrate(f, 0.0, hi, tol, 0.0, 2000)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        *err += r.error + inner_err.get() * hi.powf(2.0 * p + 2.0);
        Ok(r.value)
    }
    let mut err = 0.0;
    let v = level(alpha, 0, 0.0, tol, upper, &mut err)?;
    let factor = (2.0 * PI).powi(alpha.dim() as i32);
    Ok((factor * v, factor * err))
}

fn affine_gram(domain: &AffinePolydisc, indices: &[MultiIndex], degree: u32, m: usize, q: usize) -> Mat<C64> {
    let n = domain.dim();
    let (x, w) = gauss_legendre(m);
    // Nodes of the one-factor rule on the disc of radius r: (point, weight).
    let factors: Vec<Vec<(C64, f64)>> = domain
        .radii
        .iter()
        .map(|&r| {
            let mut pts = Vec::with_capacity(m * q);
            for (xi, wi) in x.iter().zip(&w) {
                let rho = r * (xi + 1.0) / 2.0;
                let wr = wi * r / 2.0 * rho;
                for k in 0..q {
                    let theta = 2.0 * PI * k as f64 / q as f64;
                    pts.push((C64::from_polar(rho, theta), wr * 2.0 * PI / q as f64));
                }
            }
            pts
        })
        .collect();
    let per = m * q;
    let total = per.pow(n as u32);
    let jac = determinant(&domain.matrix).norm_sqr();
    let size = indices.len();
    const CHUNK: usize = 4096;
    let chunks: Vec<Vec<C64>> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![C64::new(0.0, 0.0); size * size];
            let mut vals = vec![C64::new(0.0, 0.0); size];
            let mut powers = vec![vec![C64::new(0.0, 0.0); degree as usize + 1]; n];
            for flat in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let mut rest = flat;
                let mut wv = vec![C64::new(0.0, 0.0); n];
                let mut weight = jac;
                for (k, f) in factors.iter().enumerate() {
                    let (p, wt) = f[rest % per];
                    rest /= per;
                    wv[k] = p;
                    weight *= wt;
                }
                let z: Vec<C64> = (0..n)
                    .map(|i| (0..n).fold(domain.shift[i], |acc, k| acc + domain.matrix[(i, k)] * wv[k]))
                    .collect();
                for i in 0..n {
                    powers[i][0] = C64::new(1.0, 0.0);
                    for e in 1..=degree as usize {
                        powers[i][e] = powers[i][e - 1] * z[i];
                    }
                }
                for (v, alpha) in vals.iter_mut().zip(indices) {
                    *v = (0..n).fold(C64::new(1.0, 0.0), |acc, i| acc * powers[i][alpha.get(i) as usize]);
                }
                for a in 0..size {
                    let ca = vals[a].conj() * weight;
                    for b in 0..size {
                        acc[a * size + b] += ca * vals[b];
                    }
                }
            }
            acc
        })
        .collect();
    let mut gram = Mat::zeros(size, size);
    for acc in chunks {
        for a in 0..size {
            for b in 0..size {
                gram[(a, b)] += acc[a * size + b];
            }
        }
    }
    gram
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_moments_by_quadrature() {
        let m = MomentDomain::from_diagonal(&DiagonalDomain::unit_disc(), 2).unwrap();
        for (i, want) in [PI, PI / 2.0, PI / 3.0].iter().enumerate() {
            assert!((m.gram()[(i, i)].re - want).abs() < 1e-12);
        }
        assert_eq!(m.gram()[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn bidisc_and_ball_match_closed_forms() {
        let d = DiagonalDomain::unit_polydisc(2);
        let m = MomentDomain::from_diagonal(&d, 1).unwrap();
        let want = [PI * PI, PI * PI / 2.0, PI * PI / 2.0];
        for (i, w) in want.iter().enumerate() {
            assert!((m.gram()[(i, i)].re - w).abs() < 1e-12);
        }
        let b = DiagonalDomain::ball(3, 1.0).unwrap();
        let m = MomentDomain::from_diagonal(&b, 3).unwrap();
        for (i, alpha) in m.indices().iter().enumerate() {
            let want = b.monomial_norm(alpha).unwrap();
            assert!((m.gram()[(i, i)].re - want).abs() <= 1e-10 * want, "{alpha}");
        }
    }

    #[test]
    fn centered_affine_disc_is_diagonal() {
        let a = AffinePolydisc::new(Mat::identity(1), vec![C64::new(0.0, 0.0)], vec![1.0]).unwrap();
        let m = MomentDomain::from_affine(&a, 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { PI / (i as f64 + 1.0) } else { 0.0 };
                assert!((m.gram()[(i, j)] - C64::new(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn shifted_disc_moments() {
        // disc of radius ρ about c: ⟨1, z⟩ = ∫ conj(z) = π ρ² conj(c), stored at (1, 0)
        let c = C64::new(0.2, -0.1);
        let a = AffinePolydisc::new(Mat::identity(1), vec![c], vec![0.5]).unwrap();
        let m = MomentDomain::from_affine(&a, 2).unwrap();
        let area = PI * 0.25;
        assert!((m.gram()[(0, 0)].re - area).abs() < 1e-14);
        assert!((m.gram()[(1, 0)] - c.conj() * area).norm() < 1e-14);
        assert!((m.gram()[(0, 1)] - c * area).norm() < 1e-14);
        assert!(m.gram().hermitian_defect() <= 1e-12);
        assert!(m.error_estimate() < 1e-12);
    }

    #[test]
    fn ellipse_region() {
        let e = AffinePolydisc::ellipse(C64::new(0.4, 0.0), 1.0).unwrap();
        let m = MomentDomain::from_affine(&e, 3).unwrap();
        assert!(m.gram()[(0, 1)].norm() > 1e-3);
        assert!(m.gram().hermitian_defect() <= 1e-12 * m.gram().max_magnitude());
        assert!(AffinePolydisc::ellipse(C64::new(3.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn rejects_indefinite_supplied_matrix() {
        let mut g = Mat::identity(3);
        g[(2, 2)] = C64::new(-1.0, 0.0);
        assert!(MomentDomain::from_matrix(2, 1, g).is_err());
        assert!(MomentDomain::from_matrix(2, 1, Mat::identity(3)).is_ok());
    }

    #[test]
    fn csv_layout() {
        let m = MomentDomain::from_matrix(1, 1, Mat::identity(2)).unwrap();
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "row,col,alpha,beta,re,im");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("0,1,0,1,"));
    }
}
