//! Ideals seen through finite jets: the ladder `I + 𝔪ᵏ` as a span in the jet
//! space below degree `k`, its annihilating functionals, and toric
//! multiplier ideals.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::domains::ToricWeight;
use crate::error::{Error, Result};
use crate::jets::{jet_multiply, monomials_up_to, Functional, Jet, MultiIndex, TermsJson};
use crate::linalg::{null_space_of_rref, rref, Mat};
use crate::scalar::{exact_from_f64, floor_rational, rational_to_string, Scalar, C64};

/// Polynomial generators of a proper ideal `I ⊆ 𝒪_o`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealPresentation<S> {
    n: usize,
    generators: Vec<Jet<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealJson {
    pub n: usize,
    pub generators: Vec<TermsJson>,
}

impl<S: Scalar> IdealPresentation<S> {
    pub fn new(n: usize, generators: Vec<Jet<S>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("an ideal presentation needs at least one generator".into()));
        }
        for g in &generators {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
            }
        }
        if generators.iter().all(|g| g.is_zero()) {
            return Err(Error::InvalidArgument("all generators are zero".into()));
        }
        let zero = MultiIndex::zeros(n);
        if generators.iter().any(|g| !g.coeff(&zero).is_zero()) {
            return Err(Error::NotProper(1));
        }
        // Generators are polynomials: their bound is their natural degree.
        let generators = generators
            .into_iter()
            .map(|g| {
                let d = g.natural_degree().unwrap_or(0);
                g.with_degree_bound(d)
            })
            .collect();
        Ok(Self { n, generators })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Jet<S>] {
        &self.generators
    }

    /// Largest natural degree among the generators.
    pub fn max_degree(&self) -> u32 {
        self.generators.iter().filter_map(|g| g.natural_degree()).max().unwrap_or(0)
    }

    pub fn from_json(json: &IdealJson) -> Result<Self> {
        let gens = json.generators.iter().map(|g| g.to_jet()).collect::<Result<Vec<_>>>()?;
        Self::new(json.n, gens)
    }

    pub fn to_float(&self) -> IdealPresentation<C64> {
        IdealPresentation { n: self.n, generators: self.generators.iter().map(|g| g.to_float()).collect() }
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson { n: self.n, generators: self.generators.iter().map(TermsJson::from_jet).collect() }
    }
}

/// `(I + 𝔪ᵏ)/𝔪ᵏ` as a subspace `S` of jets of degree `< k`, stored as the
/// reduced row echelon form over columns in `≺` order.
#[derive(Clone, Debug, PartialEq)]
pub struct JetIdeal<S> {
    n: usize,
    level: u32,
    indices: Vec<MultiIndex>,
    basis: Mat<S>,
    pivots: Vec<usize>,
}

/// Span of `truncate(g·z^β)` over generators `g` and `|β| < k`.
pub fn jet_ideal<S: Scalar>(gens: &IdealPresentation<S>, k: u32) -> Result<JetIdeal<S>> {
    if k == 0 {
        return Err(Error::InvalidArgument("ideal level must be >= 1".into()));
    }
    let n = gens.n;
    let indices = monomials_up_to(n, k - 1);
    let shifts = monomials_up_to(n, k - 1);
    let mut rows = Vec::new();
    for g in &gens.generators {
        for beta in &shifts {
            let shifted = jet_multiply(g, &Jet::monomial(beta.clone(), beta.degree()), k - 1)?;
            if !shifted.is_zero() {
                rows.push(shifted.dense(&indices));
            }
        }
    }
    let cols = indices.len();
    let mut m = Mat::from_rows(rows, cols)?;
    let pivots = rref(&mut m, cols);
    if pivots.len() == cols {
        return Err(Error::NotProper(k));
    }
    Ok(JetIdeal { n, level: k, indices, basis: m, pivots })
}

impl<S: Scalar> JetIdeal<S> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `k`, with `𝔪ᵏ` contained in the ideal.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Monomials of degree `< k` in `≺` order (the columns of the basis).
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis_matrix(&self) -> &Mat<S> {
        &self.basis
    }

    pub fn basis(&self) -> Vec<Jet<S>> {
        (0..self.basis.rows())
            .map(|i| Jet::from_dense(self.n, self.level - 1, &self.indices, self.basis.row(i)))
            .collect()
    }

    /// Whether `truncate(f, k−1)` lies in `S`.
    pub fn contains(&self, f: &Jet<S>) -> Result<bool> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: f.dim() });
        }
        if f.degree_bound() + 1 < self.level {
            return Err(Error::InvalidArgument(format!(
                "jet known to degree {} but membership at level {} needs degree {}",
                f.degree_bound(),
                self.level,
                self.level - 1
            )));
        }
        let mut v = f.dense(&self.indices);
        let scale = v.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
        for (i, &p) in self.pivots.iter().enumerate() {
            let factor = v[p].clone();
            if factor.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                v[j] = v[j].clone() - factor.clone() * b.clone();
            }
        }
        Ok(v.iter().all(|x| x.is_negligible(scale.max(1.0))))
    }

    /// Long-format CSV of the reduced basis: `row,alpha,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,alpha,re,im\n");
        for i in 0..self.basis.rows() {
            for (alpha, x) in self.indices.iter().zip(self.basis.row(i)) {
                if x.is_zero() {
                    continue;
                }
                let (re, im) = scalar_text(x);
                let label = alpha.components().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
                let _ = writeln!(out, "{i},{label},{re},{im}");
            }
        }
        out
    }
}

pub(crate) fn scalar_text<S: Scalar>(x: &S) -> (String, String) {
    match (x.re_rational(), x.im_rational()) {
        (Some(re), Some(im)) => (rational_to_string(&re), rational_to_string(&im)),
        _ => {
            let z = x.to_c64();
            (format!("{:e}", z.re), format!("{:e}", z.im))
        }
    }
}

/// Linearly independent functionals of order `< k` annihilating a jet ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalBasis<S> {
    level: u32,
    members: Vec<Functional<S>>,
}

impl<S: Scalar> FunctionalBasis<S> {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn members(&self) -> &[Functional<S>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `{ξ : ord ξ < k, ξ·s = 0 for all s ∈ S}`.
pub fn annihilator<S: Scalar>(ideal: &JetIdeal<S>) -> FunctionalBasis<S> {
    let members = null_space_of_rref(&ideal.basis, &ideal.pivots)
        .into_iter()
        .map(|v| Functional::from_dense(ideal.n, &ideal.indices, &v))
        .collect();
    FunctionalBasis { level: ideal.level, members }
}

/// A monomial ideal given by its minimal exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    n: usize,
    generators: Vec<MultiIndex>,
}

impl MonomialIdeal {
    /// Minimal generators are extracted from `exponents`.
    pub fn new(n: usize, exponents: Vec<MultiIndex>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidArgument("a monomial ideal needs a generator".into()));
        }
        for e in &exponents {
            if e.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: e.dim() });
            }
        }
        let mut generators: Vec<MultiIndex> = Vec::new();
        for e in &exponents {
            if exponents.iter().any(|o| o != e && o.divides(e)) || generators.contains(e) {
                continue;
            }
            generators.push(e.clone());
        }
        generators.sort();
        Ok(Self { n, generators })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[MultiIndex] {
        &self.generators
    }

    pub fn contains_monomial(&self, beta: &MultiIndex) -> bool {
        self.generators.iter().any(|g| g.divides(beta))
    }

    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(|g| g.degree() == 0)
    }

    /// `c ≤ c'` style containment: every generator of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.generators.iter().all(|g| other.contains_monomial(g))
    }

    pub fn presentation<S: Scalar>(&self) -> Result<IdealPresentation<S>> {
        let gens = self.generators.iter().map(|g| Jet::monomial(g.clone(), g.degree())).collect();
        IdealPresentation::new(self.n, gens)
    }
}

/// `𝓘(cφ)_o = (z^m)` with `m_j = ⌊c a_j⌋` for `a_j > 0`: `z^β` belongs iff
/// `β_j + 1 > c a_j` for every such `j`.
pub fn multiplier_ideal_exact(phi: &ToricWeight, c: &BigRational) -> Result<MonomialIdeal> {
    if c < &BigRational::zero() {
        return Err(Error::InvalidArgument("multiplier ideal needs c >= 0".into()));
    }
    let n = phi.dim();
    let m: Vec<u32> = (0..n)
        .map(|j| {
            let a = phi.exact_exponent(j);
            if a.is_zero() {
                Ok(0)
            } else {
                floor_rational(&(c * a))
                    .to_u32()
                    .ok_or_else(|| Error::InvalidArgument("multiplier exponent out of range".into()))
            }
        })
        .collect::<Result<_>>()?;
    MonomialIdeal::new(n, vec![MultiIndex::new(m)])
}

pub fn multiplier_ideal(phi: &ToricWeight, c: f64) -> Result<MonomialIdeal> {
    multiplier_ideal_exact(phi, &exact_from_f64(c)?)
}

/// Smallest jumping number strictly greater than `c`.
pub fn next_jump(phi: &ToricWeight, c: &BigRational) -> BigRational {
    phi.active()
        .map(|j| {
            let a = phi.exact_exponent(j);
            let k = floor_rational(&(c * &a)) + BigInt::from(1);
            BigRational::from_integer(k) / a
        })
        .min()
        .expect("toric weight has an active exponent")
}

/// `𝓘₊(cφ) = 𝓘(c'φ)` with `c'` the midpoint between `c` and the next jump.
pub fn multiplier_ideal_plus_exact(phi: &ToricWeight, c: &BigRational) -> Result<MonomialIdeal> {
    if c < &BigRational::zero() {
        return Err(Error::InvalidArgument("multiplier ideal needs c >= 0".into()));
    }
    let mid = (c + next_jump(phi, c)) / BigRational::from_integer(2.into());
    multiplier_ideal_exact(phi, &mid)
}

pub fn multiplier_ideal_plus(phi: &ToricWeight, c: f64) -> Result<MonomialIdeal> {
    multiplier_ideal_plus_exact(phi, &exact_from_f64(c)?)
}

/// Values `c` at which `𝓘(cφ)` changes, up to those generated by exponents
/// of size at most `d`: `(β_j + 1)/a_j` for `a_j > 0`, `0 ≤ β_j ≤ d`.
pub fn jumping_numbers_exact(phi: &ToricWeight, d: u32) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = phi
        .active()
        .flat_map(|j| {
            let a = phi.exact_exponent(j);
            (0..=d).map(move |b| BigRational::from_integer(BigInt::from(b + 1)) / &a)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn jumping_numbers(phi: &ToricWeight, d: u32) -> Vec<f64> {
    jumping_numbers_exact(phi, d).iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}
