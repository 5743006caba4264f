//! Inner-product data for Bergman spaces: monomial norms on complete
//! Reinhardt domains (optionally weighted by `e^{−ψ}`), sublevel sets of toric
//! weights, truncated weights, and moment matrices for general domains.

mod descriptor;
mod moment;
pub mod shadow;

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::jets::{Jet, MultiIndex};
use crate::scalar::{exact_from_f64, PiRational, Quantity, Scalar};
use shadow::{Shadow, Side};

pub use descriptor::{DomainDescriptor, ExhaustionSequence};
pub use moment::{AffinePolydisc, MomentDomain, MomentRule};

/// Default relative tolerance for quadrature-based norms.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `φ = Σ_j 2 a_j log|z_j|` with `a_j ≥ 0`, not all zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ToricWeight {
    a: Vec<f64>,
}

impl ToricWeight {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidArgument("toric weight needs at least one exponent".into()));
        }
        if a.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidArgument(format!("toric exponents must be finite and >= 0: {a:?}")));
        }
        if a.iter().all(|x| *x == 0.0) {
            return Err(Error::InvalidArgument("toric weight with all exponents zero".into()));
        }
        Ok(Self { a })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.a
    }

    pub fn exact_exponent(&self, j: usize) -> BigRational {
        exact_from_f64(self.a[j]).expect("validated finite")
    }

    /// Indices with `a_j > 0`.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.a.iter().enumerate().filter(|(_, a)| **a > 0.0).map(|(j, _)| j)
    }

    /// `φ(x)` at a point of the shadow.
    pub fn eval_radial(&self, x: &[f64]) -> f64 {
        self.active().map(|j| 2.0 * self.a[j] * x[j].ln()).sum()
    }
}

/// Weight `e^{−ψ}` attached to a diagonal domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    None,
    /// `ψ = c·φ`.
    Toric { phi: ToricWeight, c: f64 },
    /// `ψ_j = max(φ, −j)`.
    Truncated { psi: ToricWeight, j: u32 },
}

impl Weight {
    /// Per-coordinate exponents `c·a_j` of a toric weight, zero otherwise.
    fn toric_exponents(&self, n: usize) -> Vec<f64> {
        match self {
            Weight::Toric { phi, c } => phi.a.iter().map(|a| c * a).collect(),
            _ => vec![0.0; n],
        }
    }

    fn exact_toric_exponents(&self, n: usize) -> Vec<BigRational> {
        match self {
            Weight::Toric { phi, c } => {
                let c = exact_from_f64(*c).expect("validated finite");
                (0..n).map(|j| &c * phi.exact_exponent(j)).collect()
            }
            _ => vec![BigRational::zero(); n],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Polydisc { radii: Vec<f64> },
    Ball { radius: f64 },
    /// `{φ < −t} ∩ polydisc(radii)`.
    Sublevel { radii: Vec<f64>, phi: ToricWeight, t: f64 },
}

/// A complete Reinhardt domain with a diagonal weight, so that monomials are
/// orthogonal and the inner product is determined by `c_α = ∥z^α∥²`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalDomain {
    n: usize,
    shape: Shape,
    weight: Weight,
    exact: bool,
    tol: f64,
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive and finite, got {r}")));
    }
    Ok(())
}

impl DiagonalDomain {
    pub fn polydisc(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidArgument("polydisc needs at least one radius".into()));
        }
        for r in &radii {
            check_radius(*r)?;
        }
        Ok(Self { n: radii.len(), shape: Shape::Polydisc { radii }, weight: Weight::None, exact: true, tol: DEFAULT_TOL })
    }

    pub fn unit_polydisc(n: usize) -> Self {
        Self::polydisc(vec![1.0; n]).expect("valid radii")
    }

    pub fn unit_disc() -> Self {
        Self::unit_polydisc(1)
    }

    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("ball dimension must be positive".into()));
        }
        check_radius(radius)?;
        Ok(Self { n, shape: Shape::Ball { radius }, weight: Weight::None, exact: true, tol: DEFAULT_TOL })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// Whether every `c_α / π^n` is an exactly known rational (or `+∞`).
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Attach `e^{−cφ}`; an existing toric weight is merged by adding exponents.
    pub fn with_toric_weight(&self, phi: &ToricWeight, c: f64) -> Result<Self> {
        if phi.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: phi.dim() });
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::InvalidArgument(format!("weight multiple must be finite and >= 0, got {c}")));
        }
        if matches!(self.shape, Shape::Ball { .. }) {
            return Err(Error::InvalidArgument("toric weights are supported on polydiscs and their sublevel sets".into()));
        }
        if c == 0.0 {
            return Ok(self.clone());
        }
        let weight = match &self.weight {
            Weight::None => Weight::Toric { phi: phi.clone(), c },
            Weight::Toric { phi: old, c: c_old } => {
                let merged: Vec<f64> = old.a.iter().zip(&phi.a).map(|(x, y)| c_old * x + c * y).collect();
                Weight::Toric { phi: ToricWeight::new(merged)?, c: 1.0 }
            }
            Weight::Truncated { .. } => {
                return Err(Error::InvalidArgument("cannot stack a toric weight on a truncated weight".into()))
            }
        };
        let mut out = self.clone();
        out.weight = weight;
        Ok(out)
    }

    /// Attach a weight descriptor (e.g. from [`truncate_weight`]).
    pub fn with_weight(&self, weight: Weight) -> Result<Self> {
        match weight {
            Weight::None => {
                let mut out = self.clone();
                out.weight = Weight::None;
                Ok(out)
            }
            Weight::Toric { phi, c } => {
                let mut base = self.clone();
                base.weight = Weight::None;
                base.with_toric_weight(&phi, c)
            }
            Weight::Truncated { psi, j } => {
                if psi.dim() != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: psi.dim() });
                }
                if !matches!(self.shape, Shape::Polydisc { .. }) {
                    return Err(Error::InvalidArgument("truncated weights are supported on polydiscs".into()));
                }
                let mut out = self.clone();
                out.weight = Weight::Truncated { psi, j };
                out.exact = false;
                Ok(out)
            }
        }
    }

    /// `c_α = ∫_D |z^α|² e^{−ψ}`; `+∞` when `z^α` is not square integrable.
    pub fn monomial_norm(&self, alpha: &MultiIndex) -> Result<f64> {
        if alpha.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: alpha.dim() });
        }
        let n = self.n;
        let e = self.weight.toric_exponents(n);
        let p: Vec<f64> = (0..n).map(|j| alpha.get(j) as f64 - e[j]).collect();
        let two_pi_n = (2.0 * PI).powi(n as i32);
        match (&self.shape, &self.weight) {
            (Shape::Polydisc { radii }, Weight::None | Weight::Toric { .. }) => {
                let mut v = PI.powi(n as i32);
                for j in 0..n {
                    if p[j] + 1.0 <= 0.0 {
                        return Ok(f64::INFINITY);
                    }
                    v *= radii[j].powf(2.0 * p[j] + 2.0) / (p[j] + 1.0);
                }
                Ok(v)
            }
            (Shape::Ball { radius }, _) => {
                let k = alpha.degree() as i32;
                let mut v = PI.powi(n as i32) * radius.powi(2 * k + 2 * n as i32);
                for &a in alpha.components() {
                    for i in 1..=a {
                        v *= i as f64;
                    }
                }
                for i in 1..=(n as i32 + k) {
                    v /= i as f64;
                }
                Ok(v)
            }
            (Shape::Sublevel { radii, phi, t }, _) => {
                let s = Shadow::new(radii, &phi.a, &p, self.tol);
                let v = s.integral(Side::Below, -t)?;
                Ok(if v.is_infinite() { v } else { two_pi_n * v })
            }
            (Shape::Polydisc { radii }, Weight::Truncated { psi, j }) => {
                let level = -(*j as f64);
                let pw: Vec<f64> = (0..n).map(|i| alpha.get(i) as f64 - psi.a[i]).collect();
                let pu: Vec<f64> = alpha.components().iter().map(|&x| x as f64).collect();
                let above = Shadow::new(radii, &psi.a, &pw, self.tol).integral(Side::Above, level)?;
                let below = Shadow::new(radii, &psi.a, &pu, self.tol).integral(Side::Below, level)?;
                Ok(two_pi_n * (above + (*j as f64).exp() * below))
            }
        }
    }

    /// `c_α / π^n` as an exact rational; `None` encodes `+∞`.
    pub fn exact_norm(&self, alpha: &MultiIndex) -> Result<Option<BigRational>> {
        if !self.exact {
            return Err(Error::NotExact("domain norms are only known numerically".into()));
        }
        if alpha.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: alpha.dim() });
        }
        let n = self.n;
        match &self.shape {
            Shape::Polydisc { radii } => {
                let e = self.weight.exact_toric_exponents(n);
                let mut v = BigRational::one();
                for j in 0..n {
                    let p1 = BigRational::from_integer(BigInt::from(alpha.get(j) + 1)) - &e[j];
                    if !p1.is_positive() {
                        return Ok(None);
                    }
                    let r = exact_from_f64(radii[j])?;
                    let two_p1 = &p1 * BigRational::from_integer(2.into());
                    let pow = if r.is_one() {
                        BigRational::one()
                    } else if two_p1.is_integer() {
                        let k = two_p1.to_integer().to_i32().ok_or_else(|| {
                            Error::NotExact("radius exponent out of range".into())
                        })?;
                        num_traits::pow::Pow::pow(&r, k)
                    } else {
                        return Err(Error::NotExact(format!("r^{two_p1} is irrational")));
                    };
                    v = v * pow / p1;
                }
                Ok(Some(v))
            }
            Shape::Ball { radius } => {
                let r = exact_from_f64(*radius)?;
                let k = alpha.degree();
                let mut v = num_traits::pow::Pow::pow(&r, (2 * k + 2 * n as u32) as i32);
                for &a in alpha.components() {
                    for i in 1..=a {
                        v *= BigRational::from_integer(i.into());
                    }
                }
                for i in 1..=(n as u32 + k) {
                    v /= BigRational::from_integer(i.into());
                }
                Ok(Some(v))
            }
            Shape::Sublevel { .. } => Err(Error::NotExact("sublevel norms are computed by quadrature".into())),
        }
    }

    /// Exact norm with the `π^n` factor attached.
    pub fn exact_quantity(&self, alpha: &MultiIndex) -> Result<Quantity> {
        Ok(match self.exact_norm(alpha)? {
            Some(q) => Quantity::exact(PiRational::new(self.n as i32, q)),
            None => Quantity::infinite(),
        })
    }

    /// Componentwise containment certified from descriptors alone.
    pub fn certified_subset_of(&self, other: &Self) -> bool {
        if self.n != other.n || self.weight != other.weight {
            return false;
        }
        match (&self.shape, &other.shape) {
            (Shape::Polydisc { radii: a }, Shape::Polydisc { radii: b }) => a.iter().zip(b).all(|(x, y)| x <= y),
            (Shape::Ball { radius: a }, Shape::Ball { radius: b }) => a <= b,
            (Shape::Ball { radius }, Shape::Polydisc { radii }) => radii.iter().all(|r| radius <= r),
            (
                Shape::Sublevel { radii: a, phi: pa, t: ta },
                Shape::Sublevel { radii: b, phi: pb, t: tb },
            ) => pa == pb && ta >= tb && a.iter().zip(b).all(|(x, y)| x <= y),
            (Shape::Sublevel { radii: a, .. }, Shape::Polydisc { radii: b }) => a.iter().zip(b).all(|(x, y)| x <= y),
            _ => false,
        }
    }
}

/// `{φ < −t} ∩ D` for a (possibly weighted) polydisc `D`.
pub fn sublevel_domain(domain: &DiagonalDomain, phi: &ToricWeight, t: f64) -> Result<DiagonalDomain> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("sublevel parameter must be finite and >= 0, got {t}")));
    }
    if phi.dim() != domain.n {
        return Err(Error::DimensionMismatch { expected: domain.n, got: phi.dim() });
    }
    let radii = match &domain.shape {
        Shape::Polydisc { radii } => radii.clone(),
        _ => return Err(Error::InvalidArgument("sublevel sets are taken inside polydiscs".into())),
    };
    if matches!(domain.weight, Weight::Truncated { .. }) {
        return Err(Error::InvalidArgument("sublevel sets of truncated-weight domains are not supported".into()));
    }
    // Constraint inactive on the whole polydisc.
    if phi.eval_radial(&radii) <= -t {
        return Ok(domain.clone());
    }
    let active: Vec<usize> = phi.active().collect();
    let mut out = domain.clone();
    if active.len() == 1 {
        let j = active[0];
        let mut radii = radii;
        radii[j] = radii[j].min((-t / (2.0 * phi.a[j])).exp());
        out.shape = Shape::Polydisc { radii };
        out.exact = false;
        return Ok(out);
    }
    out.shape = Shape::Sublevel { radii, phi: phi.clone(), t };
    out.exact = false;
    Ok(out)
}

/// Weight descriptor for `ψ_j = max(ψ, −j)`.
pub fn truncate_weight(psi: &ToricWeight, j: u32) -> Result<Weight> {
    if j == 0 {
        return Err(Error::InvalidArgument("truncation level must be >= 1".into()));
    }
    Ok(Weight::Truncated { psi: psi.clone(), j })
}

/// `∫_D |F|² e^{−cφ}` for a polynomial jet `F`.
pub fn weighted_integral<S: Scalar>(
    domain: &DiagonalDomain,
    f: &Jet<S>,
    phi: &ToricWeight,
    c: f64,
) -> Result<Quantity> {
    if f.dim() != domain.n {
        return Err(Error::DimensionMismatch { expected: domain.n, got: f.dim() });
    }
    let weighted = domain.with_toric_weight(phi, c)?;
    if S::EXACT && weighted.is_exact() {
        let mut total = BigRational::zero();
        for (alpha, coeff) in f.terms() {
            match weighted.exact_norm(alpha)? {
                Some(q) => total += coeff.abs_sqr().re_rational().expect("exact flavour") * q,
                None => return Ok(Quantity::infinite()),
            }
        }
        return Ok(Quantity::exact(PiRational::new(domain.n as i32, total)));
    }
    let mut total = 0.0;
    for (alpha, coeff) in f.terms() {
        let norm = weighted.monomial_norm(alpha)?;
        if norm.is_infinite() {
            return Ok(Quantity::infinite());
        }
        total += coeff.to_c64().norm_sqr() * norm;
    }
    Ok(Quantity::float(total))
}

/// A domain usable by the Bergman computations.
#[derive(Clone, Debug)]
pub enum Domain {
    Diagonal(DiagonalDomain),
    Moment(MomentDomain),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Diagonal(d) => d.dim(),
            Domain::Moment(m) => m.dim(),
        }
    }
}

impl From<DiagonalDomain> for Domain {
    fn from(d: DiagonalDomain) -> Self {
        Domain::Diagonal(d)
    }
}

impl From<MomentDomain> for Domain {
    fn from(m: MomentDomain) -> Self {
        Domain::Moment(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CQ;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn disc_norms() {
        let d = DiagonalDomain::unit_disc();
        assert!((d.monomial_norm(&MultiIndex::new(vec![0])).unwrap() - PI).abs() < 1e-15);
        assert!((d.monomial_norm(&MultiIndex::new(vec![1])).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(d.exact_norm(&MultiIndex::new(vec![1])).unwrap(), Some(q(1, 2)));
    }

    #[test]
    fn bidisc_product_formula() {
        let d = DiagonalDomain::unit_polydisc(2);
        let a = MultiIndex::new(vec![1, 2]);
        assert!((d.monomial_norm(&a).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert_eq!(d.exact_norm(&a).unwrap(), Some(q(1, 6)));
    }

    #[test]
    fn ball_norms() {
        // unit ball in C^2: ∥z1∥² = π² 1!/3! = π²/6
        let b = DiagonalDomain::ball(2, 1.0).unwrap();
        let a = MultiIndex::new(vec![1, 0]);
        assert_eq!(b.exact_norm(&a).unwrap(), Some(q(1, 6)));
        assert!((b.monomial_norm(&a).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert_eq!(b.exact_norm(&MultiIndex::zeros(2)).unwrap(), Some(q(1, 2)));
    }

    #[test]
    fn weighted_finiteness_rule() {
        let phi = ToricWeight::new(vec![1.0]).unwrap();
        let d = DiagonalDomain::unit_disc().with_toric_weight(&phi, 1.0).unwrap();
        assert!(d.monomial_norm(&MultiIndex::new(vec![0])).unwrap().is_infinite());
        assert!((d.monomial_norm(&MultiIndex::new(vec![1])).unwrap() - PI).abs() < 1e-15);
        assert_eq!(d.exact_norm(&MultiIndex::new(vec![0])).unwrap(), None);
        assert_eq!(d.exact_norm(&MultiIndex::new(vec![1])).unwrap(), Some(q(1, 1)));
        // half-integer exponents stay rational on the unit disc
        let d = DiagonalDomain::unit_disc().with_toric_weight(&phi, 0.5).unwrap();
        assert_eq!(d.exact_norm(&MultiIndex::new(vec![0])).unwrap(), Some(q(2, 1)));
    }

    #[test]
    fn weighted_integral_examples() {
        let phi = ToricWeight::new(vec![1.0]).unwrap();
        let d = DiagonalDomain::unit_disc();
        let z: Jet<CQ> = Jet::monomial(MultiIndex::new(vec![1]), 1);
        let v = weighted_integral(&d, &z, &phi, 1.0).unwrap();
        assert_eq!(v.exact.unwrap().rational, q(1, 1));
        let one: Jet<CQ> = Jet::monomial(MultiIndex::new(vec![0]), 0);
        assert!(weighted_integral(&d, &one, &phi, 1.0).unwrap().is_infinite());
        let v = weighted_integral(&d, &z, &phi, 0.0).unwrap();
        assert_eq!(v.exact.unwrap().rational, q(1, 2));
    }

    #[test]
    fn single_variable_sublevel_is_a_disc() {
        let phi = ToricWeight::new(vec![1.0]).unwrap();
        let t = 2.5;
        let d = sublevel_domain(&DiagonalDomain::unit_disc(), &phi, t).unwrap();
        match d.shape() {
            Shape::Polydisc { radii } => assert!((radii[0] - (-t / 2.0f64).exp()).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        for k in 0..4u32 {
            let v = d.monomial_norm(&MultiIndex::new(vec![k])).unwrap();
            let want = PI * (-t * (k as f64 + 1.0)).exp() / (k as f64 + 1.0);
            assert!((v - want).abs() <= 1e-13 * want);
        }
        let same = sublevel_domain(&DiagonalDomain::unit_disc(), &phi, 0.0).unwrap();
        assert_eq!(same, DiagonalDomain::unit_disc());
        assert!(sublevel_domain(&DiagonalDomain::unit_disc(), &phi, -1.0).is_err());
    }

    #[test]
    fn truncated_weight_piecewise_norm() {
        // ψ = 2 log|z| on the disc: c_0^{ψ_j} = π (j + 1)
        let psi = ToricWeight::new(vec![1.0]).unwrap();
        for j in [1u32, 3, 10] {
            let d = DiagonalDomain::unit_disc().with_weight(truncate_weight(&psi, j).unwrap()).unwrap();
            let v = d.monomial_norm(&MultiIndex::new(vec![0])).unwrap();
            assert!((v - PI * (j as f64 + 1.0)).abs() < 1e-9 * v, "{j}: {v}");
            let v1 = d.monomial_norm(&MultiIndex::new(vec![1])).unwrap();
            let want = PI * (1.0 - (-(j as f64)).exp() / 2.0);
            assert!((v1 - want).abs() < 1e-9 * want);
        }
        assert!(truncate_weight(&psi, 0).is_err());
    }
}
