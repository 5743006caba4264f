//! A finite section of `A²(D)`: polynomials of degree at most `d` with the
//! domain's inner product `⟨f, g⟩ = gᴴ M f`.

use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::jets::{monomials_up_to, Functional, Jet, MultiIndex};
use crate::linalg::{solve_consistent, Mat};
use crate::scalar::{Quantity, Scalar};

#[derive(Clone, Debug)]
pub enum Metric<S> {
    /// `c_α`, with `None` for `+∞`.
    Diagonal(Vec<Option<S>>),
    Dense(Mat<S>),
}

#[derive(Clone, Debug)]
pub struct WorkingSpace<S> {
    n: usize,
    degree: u32,
    indices: Vec<MultiIndex>,
    metric: Metric<S>,
    /// Exact metrics store `M / π^pi_power`.
    pi_power: i32,
}

impl<S: Scalar> WorkingSpace<S> {
    pub fn new(domain: &Domain, degree: u32) -> Result<Self> {
        let n = domain.dim();
        let indices = monomials_up_to(n, degree);
        match domain {
            Domain::Diagonal(d) => {
                if S::EXACT {
                    let norms = indices
                        .iter()
                        .map(|a| Ok(d.exact_norm(a)?.map(|q| S::from_rational(&q))))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Self { n, degree, indices, metric: Metric::Diagonal(norms), pi_power: n as i32 })
                } else {
                    let norms = indices
                        .iter()
                        .map(|a| {
                            let v = d.monomial_norm(a)?;
                            if v.is_finite() {
                                Ok(Some(S::from_parts(v, 0.0)?))
                            } else {
                                Ok(None)
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Self { n, degree, indices, metric: Metric::Diagonal(norms), pi_power: 0 })
                }
            }
            Domain::Moment(m) => {
                if S::EXACT {
                    return Err(Error::NotExact("moment matrices are computed in floating point".into()));
                }
                if degree > m.degree() {
                    return Err(Error::InvalidArgument(format!(
                        "working degree {degree} exceeds the moment data degree {}",
                        m.degree()
                    )));
                }
                let size = indices.len();
                let g = m.gram();
                let mut dense = Mat::zeros(size, size);
                for i in 0..size {
                    for j in 0..size {
                        dense[(i, j)] = S::from_parts(g[(i, j)].re, g[(i, j)].im)?;
                    }
                }
                Ok(Self { n, degree, indices, metric: Metric::Dense(dense), pi_power: 0 })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn pi_power(&self) -> i32 {
        self.pi_power
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.metric
    }

    pub fn is_finite(&self, i: usize) -> bool {
        match &self.metric {
            Metric::Diagonal(c) => c[i].is_some(),
            Metric::Dense(_) => true,
        }
    }

    /// Positions whose monomial has infinite norm.
    pub fn forbidden(&self) -> Vec<usize> {
        (0..self.size()).filter(|&i| !self.is_finite(i)).collect()
    }

    /// `M v` over finite positions; infinite positions map to zero.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        match &self.metric {
            Metric::Diagonal(c) => v
                .iter()
                .zip(c)
                .map(|(x, c)| match c {
                    Some(c) => x.clone() * c.clone(),
                    None => S::zero(),
                })
                .collect(),
            Metric::Dense(m) => m.mul_vec(v),
        }
    }

    /// `⟨f, g⟩ = gᴴ M f` (scaled by `π^{−pi_power}`).
    pub fn inner(&self, f: &[S], g: &[S]) -> S {
        self.apply(f).iter().zip(g).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.conj())
    }

    pub fn dense_jet(&self, f: &Jet<S>) -> Vec<S> {
        f.dense(&self.indices)
    }

    pub fn dense_functional(&self, xi: &Functional<S>) -> Result<Vec<S>> {
        if xi.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: xi.dim() });
        }
        if let Some(top) = xi.entries().map(|(a, _)| a).find(|a| a.degree() > self.degree) {
            return Err(Error::SupportBeyondBound { index: top.to_string(), bound: self.degree });
        }
        Ok(xi.dense(&self.indices))
    }

    pub fn jet(&self, v: &[S]) -> Jet<S> {
        Jet::from_dense(self.n, self.degree, &self.indices, v)
    }

    /// `t` with `⟨f, t⟩ = ξ·f` on the working space. Entries of `ξ` at
    /// monomials of infinite norm are an error when `strict`, and ignored
    /// otherwise (such monomials never occur in `A²_ψ`).
    pub fn riesz_vector(&self, xi: &[S], strict: bool) -> Result<Vec<S>> {
        match &self.metric {
            Metric::Diagonal(c) => xi
                .iter()
                .zip(c)
                .enumerate()
                .map(|(i, (x, c))| match c {
                    Some(c) => Ok(x.conj() / c.clone()),
                    None if strict && !x.is_zero() => Err(Error::Unbounded(self.indices[i].to_string())),
                    None => Ok(S::zero()),
                })
                .collect(),
            Metric::Dense(m) => {
                let rhs: Vec<S> = xi.iter().map(|x| x.conj()).collect();
                solve_consistent(m, &rhs).ok_or_else(|| Error::Singular("moment matrix".into()))
            }
        }
    }

    /// Attach the `π` power to a scaled value whose true size is `x·π^p`.
    pub fn quantity(&self, x: &S, p: i32) -> Quantity {
        Quantity::from_scalar(x, p)
    }

    /// Quantities that scale like the metric.
    pub fn metric_quantity(&self, x: &S) -> Quantity {
        self.quantity(x, self.pi_power)
    }

    /// Quantities that scale like the inverse metric (kernels).
    pub fn kernel_quantity(&self, x: &S) -> Quantity {
        self.quantity(x, -self.pi_power)
    }
}

/// Working degree for data up to `needed`: diagonal domains use exactly that
/// degree; moment domains use all available moment data.
pub fn working_degree(domain: &Domain, needed: u32) -> Result<u32> {
    match domain {
        Domain::Diagonal(_) => Ok(needed),
        Domain::Moment(m) => {
            if needed > m.degree() {
                Err(Error::InvalidArgument(format!(
                    "degree {needed} needed but moment data only reaches degree {}",
                    m.degree()
                )))
            } else {
                Ok(m.degree())
            }
        }
    }
}
