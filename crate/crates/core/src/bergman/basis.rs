//! The triangular orthonormal basis `{σ_α}` with `σ_α = T(ξ[α])`.

use super::space::{Metric, WorkingSpace};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::jets::{Functional, Jet, MultiIndex};
use crate::linalg::{cholesky, pivot_condition, Mat};
use crate::scalar::C64;

#[derive(Clone, Debug)]
pub struct TriangularBasis {
    n: usize,
    degree: u32,
    /// Monomials of finite norm, in `≺` order.
    indices: Vec<MultiIndex>,
    sigma: Vec<Jet<C64>>,
    xi: Vec<Functional<C64>>,
    condition: f64,
}

/// Gram–Schmidt from the top of the `≺` order downwards, so that the lowest
/// monomial of `σ_α` is `z^α` and `ξ[α] = ⟨·, σ_α⟩` is supported on `γ ⪯ α`.
pub fn triangular_basis(domain: &Domain, degree: u32) -> Result<TriangularBasis> {
    let ws = WorkingSpace::<C64>::new(domain, degree)?;
    let n = ws.dim();
    let finite: Vec<usize> = (0..ws.size()).filter(|&i| ws.is_finite(i)).collect();
    let size = finite.len();
    let mut gram = Mat::<C64>::zeros(size, size);
    match ws.metric() {
        Metric::Diagonal(c) => {
            for (a, &i) in finite.iter().enumerate() {
                gram[(a, a)] = c[i].expect("finite index");
            }
        }
        Metric::Dense(m) => {
            for (a, &i) in finite.iter().enumerate() {
                for (b, &j) in finite.iter().enumerate() {
                    gram[(a, b)] = m[(i, j)];
                }
            }
        }
    }
    let l = cholesky(&gram).map_err(|e| Error::NotPositiveDefinite(format!("Gram matrix of degree {degree}: {e}")))?;
    let condition = pivot_condition(&l);
    let inner = |f: &[C64], g: &[C64]| -> C64 {
        let gf = gram.mul_vec(f);
        gf.iter().zip(g).map(|(x, y)| x * y.conj()).sum()
    };
    let mut sigma_rev: Vec<Vec<C64>> = Vec::with_capacity(size);
    for a in (0..size).rev() {
        let mut v = vec![C64::new(0.0, 0.0); size];
        v[a] = C64::new(1.0, 0.0);
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for s in &sigma_rev {
                let c = inner(&v, s);
                for (x, y) in v.iter_mut().zip(s) {
                    *x -= c * y;
                }
            }
        }
        // Entries below `a` are zero by construction; keep them exactly so.
        for x in v.iter_mut().take(a) {
            *x = C64::new(0.0, 0.0);
        }
        let norm = inner(&v, &v).re.sqrt();
        if !(norm > 0.0) {
            return Err(Error::NotPositiveDefinite(format!("Gram–Schmidt breakdown at degree {degree}")));
        }
        sigma_rev.push(v.into_iter().map(|x| x / norm).collect());
    }
    sigma_rev.reverse();
    let indices: Vec<MultiIndex> = finite.iter().map(|&i| ws.indices()[i].clone()).collect();
    let mut sigma = Vec::with_capacity(size);
    let mut xi = Vec::with_capacity(size);
    for (a, s) in sigma_rev.iter().enumerate() {
        sigma.push(Jet::from_dense(n, degree, &indices, s));
        let mut e: Vec<C64> = gram.mul_vec(s).iter().map(|x| x.conj()).collect();
        for x in e.iter_mut().skip(a + 1) {
            *x = C64::new(0.0, 0.0);
        }
        xi.push(Functional::from_dense(n, &indices, &e));
    }
    Ok(TriangularBasis { n, degree, indices, sigma, xi, condition })
}

impl TriangularBasis {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The index set `E`.
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn sigma(&self) -> &[Jet<C64>] {
        &self.sigma
    }

    pub fn xi(&self) -> &[Functional<C64>] {
        &self.xi
    }

    /// Ratio of extreme Cholesky pivots of the Gram matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// `Σ_α |ξ·σ_α|²`, which equals `K_ξ(o)` for `ξ` of order at most the degree.
    pub fn parseval_kernel(&self, xi: &Functional<C64>) -> Result<f64> {
        self.sigma.iter().map(|s| Ok(xi.pair(s)?.norm_sqr())).sum()
    }
}
