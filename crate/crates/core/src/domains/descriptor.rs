//! JSON domain descriptors and nested exhaustion sequences.

use serde::{Deserialize, Serialize};

use super::{sublevel_domain, truncate_weight, AffinePolydisc, DiagonalDomain, Domain, MomentDomain, ToricWeight};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::C64;

fn one() -> f64 {
    1.0
}

/// Complex numbers are written as `[re, im]`.
pub type ComplexPair = [f64; 2];

fn complex(p: &ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

fn complex_matrix(rows: &[Vec<ComplexPair>]) -> Result<Mat<C64>> {
    let cols = rows.first().map_or(0, |r| r.len());
    Mat::from_rows(rows.iter().map(|r| r.iter().map(complex).collect()).collect(), cols)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainDescriptor {
    Polydisc {
        radii: Vec<f64>,
    },
    Ball {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    /// `base` weighted by `e^{−c φ}`, `φ = Σ 2 a_j log|z_j|`.
    ToricWeight {
        a: Vec<f64>,
        #[serde(default = "one")]
        c: f64,
        base: Box<DomainDescriptor>,
    },
    /// `{φ < −t} ∩ base`.
    Sublevel {
        t: f64,
        a: Vec<f64>,
        base: Box<DomainDescriptor>,
    },
    /// `base` weighted by `e^{−max(φ, −j)}`.
    TruncatedWeight {
        a: Vec<f64>,
        j: u32,
        base: Box<DomainDescriptor>,
    },
    /// `{A w + shift : w ∈ polydisc(radii)}`.
    AffinePolydisc {
        radii: Vec<f64>,
        matrix: Vec<Vec<ComplexPair>>,
        shift: Vec<ComplexPair>,
    },
    /// `{|z|² + |z − c|² < r}` in one variable.
    Ellipse {
        c: ComplexPair,
        r: f64,
    },
    /// An explicit Hermitian positive-definite moment matrix in graded order.
    Moments {
        degree: u32,
        matrix: Vec<Vec<ComplexPair>>,
    },
}

impl DomainDescriptor {
    pub fn is_diagonal(&self) -> bool {
        match self {
            Self::Polydisc { .. } | Self::Ball { .. } => true,
            Self::ToricWeight { base, .. } | Self::Sublevel { base, .. } | Self::TruncatedWeight { base, .. } => {
                base.is_diagonal()
            }
            _ => false,
        }
    }

    pub fn diagonal(&self, n: usize) -> Result<DiagonalDomain> {
        let d = match self {
            Self::Polydisc { radii } => DiagonalDomain::polydisc(radii.clone())?,
            Self::Ball { radius, n: bn } => DiagonalDomain::ball(bn.unwrap_or(n), *radius)?,
            Self::ToricWeight { a, c, base } => {
                base.diagonal(n)?.with_toric_weight(&ToricWeight::new(a.clone())?, *c)?
            }
            Self::Sublevel { t, a, base } => sublevel_domain(&base.diagonal(n)?, &ToricWeight::new(a.clone())?, *t)?,
            Self::TruncatedWeight { a, j, base } => {
                base.diagonal(n)?.with_weight(truncate_weight(&ToricWeight::new(a.clone())?, *j)?)?
            }
            _ => return Err(Error::InvalidArgument("descriptor is not a Reinhardt domain".into())),
        };
        if d.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: d.dim() });
        }
        Ok(d)
    }

    /// Build the domain; moment-type descriptors are assembled up to `degree`.
    pub fn build(&self, n: usize, degree: u32) -> Result<Domain> {
        if self.is_diagonal() {
            return Ok(Domain::Diagonal(self.diagonal(n)?));
        }
        let m = match self {
            Self::AffinePolydisc { radii, matrix, shift } => {
                let a = AffinePolydisc::new(complex_matrix(matrix)?, shift.iter().map(complex).collect(), radii.clone())?;
                MomentDomain::from_affine(&a, degree)?
            }
            Self::Ellipse { c, r } => MomentDomain::from_affine(&AffinePolydisc::ellipse(complex(c), *r)?, degree)?,
            Self::Moments { degree: stored, matrix } => {
                let full = MomentDomain::from_matrix(n, *stored, complex_matrix(matrix)?)?;
                if degree < *stored {
                    full.restrict(degree)?
                } else {
                    full
                }
            }
            _ => unreachable!("diagonal descriptors handled above"),
        };
        if m.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.dim() });
        }
        Ok(Domain::Moment(m))
    }
}

/// `D_1 ⊆ D_2 ⊆ …`, with each inclusion certified from the descriptors.
#[derive(Clone, Debug)]
pub struct ExhaustionSequence {
    domains: Vec<Domain>,
}

impl ExhaustionSequence {
    pub fn new(domains: Vec<Domain>) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::InvalidArgument("exhaustion sequence is empty".into()));
        }
        for (i, w) in domains.windows(2).enumerate() {
            let nested = match (&w[0], &w[1]) {
                (Domain::Diagonal(a), Domain::Diagonal(b)) => a.certified_subset_of(b),
                (Domain::Moment(a), Domain::Moment(b)) => match (a.affine(), b.affine()) {
                    (Some(x), Some(y)) => x.certified_subset_of(y),
                    _ => false,
                },
                _ => false,
            };
            if !nested {
                return Err(Error::NotNested(i));
            }
        }
        Ok(Self { domains })
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_descriptors() {
        let d: DomainDescriptor = serde_json::from_str(r#"{"kind":"polydisc","radii":[1.0,1.0]}"#).unwrap();
        assert!(d.is_diagonal());
        assert_eq!(d.diagonal(2).unwrap(), DiagonalDomain::unit_polydisc(2));
        let w: DomainDescriptor =
            serde_json::from_str(r#"{"kind":"toric_weight","a":[1,2],"base":{"kind":"polydisc","radii":[1,1]}}"#).unwrap();
        assert!(w.diagonal(2).is_ok());
        let s: DomainDescriptor =
            serde_json::from_str(r#"{"kind":"sublevel","t":3.0,"a":[1,1],"base":{"kind":"polydisc","radii":[1,1]}}"#)
                .unwrap();
        assert!(s.diagonal(2).is_ok());
        assert!(serde_json::from_str::<DomainDescriptor>(r#"{"kind":"ball","radius":1,"bogus":1}"#).is_err());
        assert!(serde_json::from_str::<DomainDescriptor>(r#"{"kind":"torus"}"#).is_err());
    }

    #[test]
    fn dimension_is_checked() {
        let d: DomainDescriptor = serde_json::from_str(r#"{"kind":"polydisc","radii":[1.0]}"#).unwrap();
        assert!(matches!(d.diagonal(2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn nesting_is_certified() {
        let a = Domain::Diagonal(DiagonalDomain::polydisc(vec![1.0]).unwrap());
        let b = Domain::Diagonal(DiagonalDomain::polydisc(vec![2.0]).unwrap());
        assert!(ExhaustionSequence::new(vec![a.clone(), b.clone()]).is_ok());
        assert!(matches!(ExhaustionSequence::new(vec![b, a]), Err(Error::NotNested(0))));
    }
}
