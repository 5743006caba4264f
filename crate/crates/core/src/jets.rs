//! Multi-indices, truncated Taylor jets at the origin, and finitely supported
//! coefficient functionals.
//!
//! Multi-indices are ordered by total degree first; ties are broken from the
//! *last* coordinate: `α ≺ β` iff `α_n = β_n, …, α_{j+1} = β_{j+1}` and
//! `α_j < β_j`. Every dense layout in the crate enumerates monomials in this
//! order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_string, Scalar, C64, CQ};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self(components)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self ≤ other`, i.e. `z^self` divides `z^other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| {
                for (a, b) in self.0.iter().zip(&other.0).rev() {
                    match a.cmp(b) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The graded order `≺`; errors on dimension mismatch.
pub fn compare(a: &MultiIndex, b: &MultiIndex) -> Result<Ordering> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.cmp(b))
}

/// All multi-indices of total degree exactly `d` in `n` variables, in `≺` order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in 0..=d {
            prefix.push(a);
            rec(n, d - a, prefix, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return if d == 0 { vec![MultiIndex(vec![])] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out.sort();
    out
}

/// All multi-indices with `|α| ≤ d`, in `≺` order.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<MultiIndex> {
    (0..=d).flat_map(|k| monomials_of_degree(n, k)).collect()
}

/// Number of monomials of degree `≤ d` in `n` variables.
pub fn jet_space_dim(n: usize, d: u32) -> usize {
    // C(n + d, n)
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=n as u128 {
        num *= d as u128 + i;
        den *= i;
    }
    (num / den) as usize
}

/// A truncated Taylor germ at the origin: coefficients `c_α = D^α f(o)/α!`
/// for `|α| ≤ degree_bound`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    n: usize,
    degree_bound: u32,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Jet<S> {
    pub fn zero(n: usize, degree_bound: u32) -> Self {
        Self { n, degree_bound, coeffs: BTreeMap::new() }
    }

    /// Terms of degree above `degree_bound` are rejected.
    pub fn from_terms(
        n: usize,
        degree_bound: u32,
        terms: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let mut jet = Self::zero(n, degree_bound);
        for (alpha, c) in terms {
            if alpha.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: alpha.dim() });
            }
            if alpha.degree() > degree_bound {
                return Err(Error::InvalidArgument(format!(
                    "term {alpha} exceeds degree bound {degree_bound}"
                )));
            }
            jet.add_term(alpha, c);
        }
        Ok(jet)
    }

    /// Jet whose degree bound is its natural degree.
    pub fn polynomial(n: usize, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        let d = terms.iter().map(|(a, _)| a.degree()).max().unwrap_or(0);
        Self::from_terms(n, d, terms)
    }

    pub fn monomial(alpha: MultiIndex, degree_bound: u32) -> Self {
        let n = alpha.dim();
        let mut jet = Self::zero(n, degree_bound.max(alpha.degree()));
        jet.add_term(alpha, S::one());
        jet
    }

    fn add_term(&mut self, alpha: MultiIndex, c: S) {
        let v = match self.coeffs.remove(&alpha) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.coeffs.insert(alpha, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> S {
        self.coeffs.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest total degree with a nonzero coefficient.
    pub fn natural_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|a| a.degree()).max()
    }

    /// Lowest multi-index (in `≺`) with a nonzero coefficient.
    pub fn leading_index(&self) -> Option<&MultiIndex> {
        self.coeffs.keys().next()
    }

    pub fn truncate(&self, d: u32) -> Self {
        Self {
            n: self.n,
            degree_bound: d,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.degree() <= d)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn with_degree_bound(mut self, d: u32) -> Self {
        self.coeffs.retain(|a, _| a.degree() <= d);
        self.degree_bound = d;
        self
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.n, self.degree_bound);
        for (a, c) in &self.coeffs {
            out.add_term(a.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut out = Self::zero(self.n, self.degree_bound.min(other.degree_bound));
        for (a, c) in self.coeffs.iter().chain(&other.coeffs) {
            if a.degree() <= out.degree_bound {
                out.add_term(a.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-S::one()))
    }

    /// Dense coefficient vector over `indices`.
    pub fn dense(&self, indices: &[MultiIndex]) -> Vec<S> {
        indices.iter().map(|a| self.coeff(a)).collect()
    }

    pub fn from_dense(n: usize, degree_bound: u32, indices: &[MultiIndex], values: &[S]) -> Self {
        let mut jet = Self::zero(n, degree_bound);
        for (a, v) in indices.iter().zip(values) {
            if a.degree() <= degree_bound {
                jet.add_term(a.clone(), v.clone());
            }
        }
        jet
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Jet<T> {
        let mut out = Jet::zero(self.n, self.degree_bound);
        for (a, c) in &self.coeffs {
            out.add_term(a.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> Jet<C64> {
        self.map(|c| c.to_c64())
    }
}

/// Cauchy product truncated to `|α| ≤ d`.
pub fn jet_multiply<S: Scalar>(f: &Jet<S>, g: &Jet<S>, d: u32) -> Result<Jet<S>> {
    if f.n != g.n {
        return Err(Error::DimensionMismatch { expected: f.n, got: g.n });
    }
    let mut out = Jet::zero(f.n, d);
    for (a, x) in &f.coeffs {
        if a.degree() > d {
            continue;
        }
        for (b, y) in &g.coeffs {
            let ab = a.add(b);
            if ab.degree() <= d {
                out.add_term(ab, x.clone() * y.clone());
            }
        }
    }
    Ok(out)
}

/// A finitely supported coefficient functional `ξ`, acting on germs by
/// `(ξ·f)(o) = Σ ξ_α c_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional<S> {
    n: usize,
    entries: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Functional<S> {
    pub fn zero(n: usize) -> Self {
        Self { n, entries: BTreeMap::new() }
    }

    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (MultiIndex, S)>) -> Result<Self> {
        let mut xi = Self::zero(n);
        for (a, v) in entries {
            if a.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: a.dim() });
            }
            xi.add_entry(a, v);
        }
        Ok(xi)
    }

    /// The point evaluation of the `α`-th Taylor coefficient.
    pub fn delta(alpha: MultiIndex) -> Self {
        let n = alpha.dim();
        let mut xi = Self::zero(n);
        xi.add_entry(alpha, S::one());
        xi
    }

    fn add_entry(&mut self, alpha: MultiIndex, v: S) {
        let v = match self.entries.remove(&alpha) {
            Some(old) => old + v,
            None => v,
        };
        if !v.is_zero() {
            self.entries.insert(alpha, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, alpha: &MultiIndex) -> S {
        self.entries.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest support index in `≺`.
    pub fn top_index(&self) -> Option<&MultiIndex> {
        self.entries.keys().next_back()
    }

    /// `ord_o(ξ)`: maximum total degree over the support.
    pub fn ord(&self) -> Result<u32> {
        self.entries.keys().map(|a| a.degree()).max().ok_or(Error::ZeroFunctional)
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (a, v) in &self.entries {
            out.add_entry(a.clone(), v.clone() * s.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut out = self.clone();
        for (a, v) in &other.entries {
            out.add_entry(a.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn dense(&self, indices: &[MultiIndex]) -> Vec<S> {
        indices.iter().map(|a| self.entry(a)).collect()
    }

    pub fn from_dense(n: usize, indices: &[MultiIndex], values: &[S]) -> Self {
        let mut xi = Self::zero(n);
        for (a, v) in indices.iter().zip(values) {
            xi.add_entry(a.clone(), v.clone());
        }
        xi
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Functional<T> {
        let mut out = Functional::zero(self.n);
        for (a, v) in &self.entries {
            out.add_entry(a.clone(), f(v));
        }
        out
    }

    pub fn to_float(&self) -> Functional<C64> {
        self.map(|c| c.to_c64())
    }

    /// `(ξ·f)(o) = Σ ξ_α c_α`. Support beyond the jet's degree bound is an
    /// error since the jet does not know those coefficients.
    pub fn pair(&self, f: &Jet<S>) -> Result<S> {
        pair(self, f)
    }
}

pub fn pair<S: Scalar>(xi: &Functional<S>, f: &Jet<S>) -> Result<S> {
    if xi.n != f.n {
        return Err(Error::DimensionMismatch { expected: xi.n, got: f.n });
    }
    let mut acc = S::zero();
    for (a, v) in &xi.entries {
        if a.degree() > f.degree_bound {
            return Err(Error::SupportBeyondBound { index: a.to_string(), bound: f.degree_bound });
        }
        if let Some(c) = f.coeffs.get(a) {
            acc = acc + v.clone() * c.clone();
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// JSON: {"n":2,"terms":[{"alpha":[1,0],"re":1.0,"im":0.0}, …]}

/// A coefficient part: a JSON number, or a string holding `p/q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Part {
    Number(f64),
    Text(String),
}

impl Default for Part {
    fn default() -> Self {
        Part::Number(0.0)
    }
}

impl Part {
    fn to_scalar_part(&self) -> Result<num_rational::BigRational> {
        match self {
            Part::Number(x) => crate::scalar::exact_from_f64(*x),
            Part::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub alpha: Vec<u32>,
    #[serde(default)]
    pub re: Part,
    #[serde(default)]
    pub im: Part,
}

/// Wire form shared by jets and functionals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermsJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
}

impl TermsJson {
    fn parsed<S: Scalar>(&self) -> Result<Vec<(MultiIndex, S)>> {
        self.terms
            .iter()
            .map(|t| {
                if t.alpha.len() != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, got: t.alpha.len() });
                }
                let re = t.re.to_scalar_part()?;
                let im = t.im.to_scalar_part()?;
                Ok((MultiIndex::new(t.alpha.clone()), S::from_complex_rational(&re, &im)))
            })
            .collect()
    }

    pub fn to_jet<S: Scalar>(&self) -> Result<Jet<S>> {
        let terms = self.parsed::<S>()?;
        match self.degree_bound {
            Some(d) => Jet::from_terms(self.n, d, terms),
            None => Jet::polynomial(self.n, terms),
        }
    }

    pub fn to_functional<S: Scalar>(&self) -> Result<Functional<S>> {
        Functional::from_entries(self.n, self.parsed::<S>()?)
    }

    fn from_pairs<'a, S: Scalar>(
        n: usize,
        degree_bound: Option<u32>,
        pairs: impl Iterator<Item = (&'a MultiIndex, &'a S)>,
    ) -> Self {
        let terms = pairs
            .map(|(a, c)| {
                let (re, im) = match (c.re_rational(), c.im_rational()) {
                    (Some(re), Some(im)) => (
                        Part::Text(rational_to_string(&re)),
                        Part::Text(rational_to_string(&im)),
                    ),
                    _ => {
                        let z = c.to_c64();
                        (Part::Number(z.re), Part::Number(z.im))
                    }
                };
                TermJson { alpha: a.components().to_vec(), re, im }
            })
            .collect();
        Self { n, terms, degree_bound }
    }

    pub fn from_jet<S: Scalar>(jet: &Jet<S>) -> Self {
        Self::from_pairs(jet.n, Some(jet.degree_bound), jet.terms())
    }

    pub fn from_functional<S: Scalar>(xi: &Functional<S>) -> Self {
        Self::from_pairs(xi.n, None, xi.entries())
    }
}

impl Jet<CQ> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<TermsJson>(s)?.to_jet()
    }
}

impl Jet<C64> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<TermsJson>(s)?.to_jet()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn order_examples() {
        assert_eq!(compare(&mi(&[0, 0]), &mi(&[1, 0])).unwrap(), Ordering::Less);
        assert_eq!(compare(&mi(&[1, 0]), &mi(&[0, 1])).unwrap(), Ordering::Less);
        assert_eq!(compare(&mi(&[2, 0, 0]), &mi(&[0, 1, 1])).unwrap(), Ordering::Less);
        assert!(compare(&mi(&[1]), &mi(&[1, 0])).is_err());
    }

    #[test]
    fn enumeration_is_graded_last_coordinate_order() {
        let m = monomials_up_to(2, 2);
        let want = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
        assert_eq!(m, want.iter().map(|v| mi(v)).collect::<Vec<_>>());
        assert_eq!(jet_space_dim(3, 6), 84);
        assert_eq!(monomials_up_to(3, 6).len(), 84);
    }

    #[test]
    fn pair_examples() {
        let f = Jet::polynomial(1, [(mi(&[0]), c(3.0)), (mi(&[1]), c(5.0)), (mi(&[2]), c(7.0))]).unwrap();
        assert_eq!(Functional::delta(mi(&[1])).pair(&f).unwrap(), c(5.0));

        let g = Jet::polynomial(1, [(mi(&[0]), c(1.0)), (mi(&[1]), c(1.0)), (mi(&[2]), c(1.0))]).unwrap();
        let xi = Functional::from_entries(1, [(mi(&[0]), c(1.0)), (mi(&[2]), c(2.0))]).unwrap();
        assert_eq!(xi.pair(&g).unwrap(), c(3.0));

        let z2 = Jet::<C64>::monomial(mi(&[2]), 2);
        assert_eq!(Functional::delta(mi(&[2])).pair(&z2).unwrap(), c(1.0));
    }

    #[test]
    fn pair_rejects_support_beyond_bound() {
        let f = Jet::<C64>::monomial(mi(&[1]), 1);
        let err = Functional::delta(mi(&[3])).pair(&f).unwrap_err();
        assert!(matches!(err, Error::SupportBeyondBound { .. }));
    }

    #[test]
    fn ord_examples() {
        assert_eq!(Functional::<C64>::delta(mi(&[0])).ord().unwrap(), 0);
        let xi = Functional::from_entries(2, [(mi(&[1, 0]), c(2.0)), (mi(&[0, 3]), c(1.0))]).unwrap();
        assert_eq!(xi.ord().unwrap(), 3);
        let xi = Functional::from_entries(2, [(mi(&[2, 2]), C64::new(0.0, 1.0))]).unwrap();
        assert_eq!(xi.ord().unwrap(), 4);
        assert_eq!(Functional::<C64>::zero(2).ord().unwrap_err(), Error::ZeroFunctional);
    }

    #[test]
    fn multiply_examples() {
        let f = Jet::polynomial(2, [(mi(&[1, 0]), c(1.0)), (mi(&[0, 2]), c(-1.0))]).unwrap();
        let z1 = Jet::<C64>::monomial(mi(&[1, 0]), 1);
        let p = jet_multiply(&f, &z1, 2).unwrap();
        assert_eq!(p.terms().count(), 1);
        assert_eq!(p.coeff(&mi(&[2, 0])), c(1.0));

        let one = Jet::<C64>::monomial(mi(&[0, 0]), 0);
        assert_eq!(jet_multiply(&f, &one, 1).unwrap(), f.truncate(1));

        let a = Jet::polynomial(1, [(mi(&[0]), c(1.0)), (mi(&[1]), c(1.0))]).unwrap();
        let b = Jet::polynomial(1, [(mi(&[0]), c(1.0)), (mi(&[1]), c(-1.0))]).unwrap();
        let p = jet_multiply(&a, &b, 2).unwrap();
        let want = Jet::polynomial(1, [(mi(&[0]), c(1.0)), (mi(&[2]), c(-1.0))]).unwrap();
        assert_eq!(p, want);
    }

    #[test]
    fn json_shape() {
        let s = r#"{"n":2,"terms":[{"alpha":[1,0],"re":1.0,"im":0.0},{"alpha":[0,2],"re":"-3/5"}]}"#;
        let f = Jet::<CQ>::from_json_str(s).unwrap();
        assert_eq!(f.degree_bound(), 2);
        assert_eq!(f.coeff(&mi(&[0, 2])).re, BigRational::new((-3).into(), 5.into()));
        let back = TermsJson::from_jet(&f);
        assert_eq!(back.to_jet::<CQ>().unwrap(), f);
        assert!(Jet::<C64>::from_json_str(r#"{"n":2,"terms":[{"alpha":[1],"re":1}]}"#).is_err());
    }
}
