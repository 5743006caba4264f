//! Riesz representatives, kernels at the origin, minimal `L²` extensions
//! modulo an ideal, and the supremum `B°` over annihilating functionals.

use serde::{Deserialize, Serialize};

use super::space::{working_degree, WorkingSpace};
use crate::domains::Domain;
use crate::error::{Error, Result};
use crate::ideals::{annihilator, JetIdeal};
use crate::jets::{Functional, Jet, MultiIndex, TermsJson};
use crate::linalg::{largest_generalized_eigenvalue, null_space_of_rref, rref, solve_consistent, Mat};
use crate::scalar::{Quantity, Scalar, C64};

/// `T(ξ)` whose true coefficients are `jet · π^pi_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representative<S> {
    pub jet: Jet<S>,
    pub pi_power: i32,
}

fn functional_degree<S: Scalar>(xi: &Functional<S>) -> u32 {
    xi.ord().unwrap_or(0)
}

/// `T(ξ)` with `⟨f, T(ξ)⟩ = ξ·f` on polynomials of the working degree.
pub fn riesz_representative<S: Scalar>(domain: &Domain, xi: &Functional<S>) -> Result<Representative<S>> {
    let ws = WorkingSpace::<S>::new(domain, working_degree(domain, functional_degree(xi))?)?;
    let v = ws.dense_functional(xi)?;
    let t = ws.riesz_vector(&v, true)?;
    Ok(Representative { jet: ws.jet(&t), pi_power: -ws.pi_power() })
}

/// `K_{ξ,D}(o) = ∥T(ξ)∥²`.
pub fn kernel_at_origin<S: Scalar>(domain: &Domain, xi: &Functional<S>) -> Result<Quantity> {
    let ws = WorkingSpace::<S>::new(domain, working_degree(domain, functional_degree(xi))?)?;
    let v = ws.dense_functional(xi)?;
    let t = ws.riesz_vector(&v, true)?;
    let k = dot(&v, &t);
    Ok(ws.kernel_quantity(&real_part(&k)))
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn real_part<S: Scalar>(x: &S) -> S {
    match x.re_rational() {
        Some(q) => S::from_rational(&q),
        None => S::from_parts(x.re_f64(), 0.0).unwrap_or_else(|_| x.clone()),
    }
}

fn max_abs<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.to_c64().norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub level: u32,
    pub working_degree: u32,
    pub working_dim: usize,
    pub ideal_rank: usize,
    /// Monomials of infinite weighted norm, forced to vanish.
    pub forbidden: usize,
    /// Largest entry of the normal-equation residual, relative.
    pub normal_residual: f64,
    /// Largest `|η·s|` over the ideal basis.
    pub annihilation_defect: f64,
    /// `|η·F − C|`, relative.
    pub pairing_defect: f64,
}

/// Minimal extension data: `C = ∥G∥²`, the minimizer `G` and the extremal
/// functional `η` (true coefficients `η · π^eta_pi_power`).
#[derive(Clone, Debug)]
pub struct ProjectionResult<S> {
    pub value: Quantity,
    /// `C / π^p` in the working scalar; `None` when `C = +∞`.
    pub scaled_value: Option<S>,
    pub minimizer: Option<Jet<S>>,
    pub eta: Option<Functional<S>>,
    pub eta_pi_power: i32,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionJson {
    pub value: Quantity,
    pub minimizer: Option<TermsJson>,
    pub eta: Option<TermsJson>,
    pub eta_pi_power: i32,
    pub diagnostics: Diagnostics,
}

impl<S: Scalar> ProjectionResult<S> {
    pub fn to_json(&self) -> ProjectionJson {
        ProjectionJson {
            value: self.value.clone(),
            minimizer: self.minimizer.as_ref().map(TermsJson::from_jet),
            eta: self.eta.as_ref().map(TermsJson::from_functional),
            eta_pi_power: self.eta_pi_power,
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Shared setup: working space, low-order part of `F`, ideal vectors.
struct Setup<S> {
    ws: WorkingSpace<S>,
    level: u32,
    f: Vec<S>,
    ideal: Vec<Vec<S>>,
}

fn setup<S: Scalar>(domain: &Domain, f: &Jet<S>, ideal: &JetIdeal<S>) -> Result<Setup<S>> {
    let n = domain.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
    }
    if ideal.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ideal.dim() });
    }
    let k = ideal.level();
    if f.degree_bound() + 1 < k {
        return Err(Error::InvalidArgument(format!(
            "F is known to degree {} but level {k} needs degree {}",
            f.degree_bound(),
            k - 1
        )));
    }
    let ws = WorkingSpace::<S>::new(domain, working_degree(domain, k - 1)?)?;
    let size = ws.size();
    let fv = ws.dense_jet(&f.truncate(k - 1));
    let low = ideal.indices().len();
    let mut vectors: Vec<Vec<S>> = ideal
        .basis_matrix()
        .row_vectors()
        .into_iter()
        .map(|mut r| {
            r.resize(size, S::zero());
            r
        })
        .collect();
    // Monomials of degree >= k belong to the ideal.
    for i in low..size {
        let mut e = vec![S::zero(); size];
        e[i] = S::one();
        vectors.push(e);
    }
    Ok(Setup { ws, level: k, f: fv, ideal: vectors })
}

/// `C_{F,I}(D) = min{∥F̃∥² : F̃ − F ∈ I}` with `I` given through a jet ideal
/// containing `𝔪ᵏ`. `G` is the component of `F` orthogonal to the ideal.
pub fn minimal_l2<S: Scalar>(domain: &Domain, f: &Jet<S>, ideal: &JetIdeal<S>) -> Result<ProjectionResult<S>> {
    let Setup { ws, level, f: fv, ideal: vectors } = setup(domain, f, ideal)?;
    let size = ws.size();
    let m = vectors.len();
    let forbidden = ws.forbidden();
    let mut diagnostics = Diagnostics {
        level,
        working_degree: ws.degree(),
        working_dim: size,
        ideal_rank: ideal.rank(),
        forbidden: forbidden.len(),
        normal_residual: 0.0,
        annihilation_defect: 0.0,
        pairing_defect: 0.0,
    };
    // Affine constraints: G vanishes where the norm is infinite.
    let (y0, null) = if forbidden.is_empty() {
        (vec![S::zero(); m], identity_columns::<S>(m))
    } else {
        let rows: Vec<Vec<S>> = forbidden.iter().map(|&i| vectors.iter().map(|b| b[i].clone()).collect()).collect();
        let c = Mat::from_rows(rows, m)?;
        let rhs: Vec<S> = forbidden.iter().map(|&i| -fv[i].clone()).collect();
        let Some(y0) = solve_consistent(&c, &rhs) else {
            return Ok(ProjectionResult {
                value: Quantity::infinite(),
                scaled_value: None,
                minimizer: None,
                eta: None,
                eta_pi_power: ws.pi_power(),
                diagnostics,
            });
        };
        let mut reduced = c.clone();
        let pivots = rref(&mut reduced, m);
        (y0, null_space_of_rref(&reduced, &pivots))
    };
    let combine = |coeffs: &[S]| -> Vec<S> {
        let mut out = vec![S::zero(); size];
        for (b, y) in vectors.iter().zip(coeffs) {
            if y.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                *o = o.clone() + x.clone() * y.clone();
            }
        }
        out
    };
    let shift = combine(&y0);
    let g0: Vec<S> = fv.iter().zip(&shift).map(|(a, b)| a.clone() + b.clone()).collect();
    // Feasible directions P = B N, then the normal equations Pᴴ M P z = −Pᴴ M g0.
    let p: Vec<Vec<S>> = null.iter().map(|col| combine(col)).collect();
    let mp: Vec<Vec<S>> = p.iter().map(|v| ws.apply(v)).collect();
    let r = p.len();
    let mut a = Mat::zeros(r, r);
    let mut rhs = vec![S::zero(); r];
    let mg0 = ws.apply(&g0);
    for i in 0..r {
        for j in 0..r {
            a[(i, j)] = conj_dot(&p[i], &mp[j]);
        }
        rhs[i] = -conj_dot(&p[i], &mg0);
    }
    let z = solve_consistent(&a, &rhs).ok_or_else(|| Error::Singular("normal equations of the projection".into()))?;
    let mut g = g0.clone();
    for (v, zi) in p.iter().zip(&z) {
        for (o, x) in g.iter_mut().zip(v) {
            *o = o.clone() + x.clone() * zi.clone();
        }
    }
    if r > 0 {
        let az = a.mul_vec(&z);
        let scale = max_abs(&rhs).max(a.max_magnitude() * max_abs(&z)).max(f64::MIN_POSITIVE);
        diagnostics.normal_residual =
            az.iter().zip(&rhs).map(|(x, y)| (x.clone() - y.clone()).to_c64().norm()).fold(0.0, f64::max) / scale;
    }
    for i in &forbidden {
        g[*i] = S::zero();
    }
    let value = real_part(&ws.inner(&g, &g));
    let eta_vec = extremal_vector(&ws, &g, &vectors, level)?;
    // Diagnostics on η.
    let scale = max_abs(&eta_vec).max(f64::MIN_POSITIVE);
    diagnostics.annihilation_defect =
        vectors.iter().map(|b| dot(&eta_vec, b).to_c64().norm()).fold(0.0, f64::max) / scale;
    let c_f = value.re_f64().abs().max(f64::MIN_POSITIVE);
    diagnostics.pairing_defect = (dot(&eta_vec, &fv) - value.clone()).to_c64().norm() / c_f;
    let n = ws.dim();
    let mut eta = Functional::from_dense(n, ws.indices(), &eta_vec);
    let minimizer = ws.jet(&g).with_degree_bound(level - 1);
    if eta.is_zero() {
        // F ∈ I: any annihilating functional attains 0; the constant evaluation is one.
        eta = Functional::delta(MultiIndex::zeros(n));
    }
    Ok(ProjectionResult {
        value: ws.metric_quantity(&value),
        scaled_value: Some(value),
        minimizer: Some(minimizer),
        eta: Some(eta),
        eta_pi_power: ws.pi_power(),
        diagnostics,
    })
}

fn identity_columns<S: Scalar>(m: usize) -> Vec<Vec<S>> {
    (0..m)
        .map(|i| {
            let mut e = vec![S::zero(); m];
            e[i] = S::one();
            e
        })
        .collect()
}

/// `Σ conj(a_i) b_i`.
fn conj_dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.conj() * y.clone())
}

/// `η = conj(M g)` on finite monomials, with entries on infinite-norm
/// monomials chosen so that `η` annihilates every ideal vector, and with
/// nothing of degree `≥ k`.
fn extremal_vector<S: Scalar>(ws: &WorkingSpace<S>, g: &[S], vectors: &[Vec<S>], level: u32) -> Result<Vec<S>> {
    let mut eta: Vec<S> = ws.apply(g).iter().map(|x| x.conj()).collect();
    for (i, alpha) in ws.indices().iter().enumerate() {
        if alpha.degree() >= level {
            eta[i] = S::zero();
        }
    }
    let forbidden: Vec<usize> = ws.forbidden().into_iter().filter(|&i| ws.indices()[i].degree() < level).collect();
    if forbidden.is_empty() {
        return Ok(eta);
    }
    let rows: Vec<Vec<S>> = vectors.iter().map(|b| forbidden.iter().map(|&i| b[i].clone()).collect()).collect();
    let rhs: Vec<S> = vectors.iter().map(|b| -dot(&eta, b)).collect();
    let lambda = solve_consistent(&Mat::from_rows(rows, forbidden.len())?, &rhs)
        .ok_or_else(|| Error::Singular("no annihilating completion of the extremal functional".into()))?;
    for (&i, l) in forbidden.iter().zip(lambda) {
        eta[i] = l;
    }
    Ok(eta)
}

/// The extremal functional `η` with `T(η) = G`, `ord η < k` and
/// `|η·F|²/K_η(o) = C`.
pub fn extremal_functional<S: Scalar>(domain: &Domain, f: &Jet<S>, ideal: &JetIdeal<S>) -> Result<Functional<S>> {
    minimal_l2(domain, f, ideal)?
        .eta
        .ok_or_else(|| Error::Hypothesis("C is infinite; no extremal functional".into()))
}

/// `B° = sup_ξ |ξ·F|²/K_ξ(o)` over `ξ` annihilating the ideal.
#[derive(Clone, Debug)]
pub struct BCircle<S> {
    pub value: Quantity,
    pub scaled_value: Option<S>,
    /// A maximizer, up to a positive multiple.
    pub maximizer: Option<Functional<S>>,
    /// `|ξ·F|²/K_ξ(o)` evaluated directly at the maximizer.
    pub ratio_at_maximizer: Option<Quantity>,
    /// Largest eigenvalue of the quotient pencil (floating point).
    pub eigen_value: Option<f64>,
    /// `|ξ_i·F|²/K_{ξ_i}(o)` for each annihilator basis element.
    pub basis_ratios: Vec<f64>,
}

/// Maximize the Rayleigh quotient over the span of the annihilator basis
/// `ξ_1, …, ξ_m`. With `b_i = ξ_i·F` and `H_ji = ⟨Tξ_i, Tξ_j⟩` the maximum is
/// `bᴴ H⁺ b`, attained at `Σ conj(y_i) ξ_i` where `H y = b`.
pub fn b_circle<S: Scalar>(domain: &Domain, f: &Jet<S>, ideal: &JetIdeal<S>) -> Result<BCircle<S>> {
    let Setup { ws, f: fv, .. } = setup(domain, f, ideal)?;
    let ann = annihilator(ideal);
    let xis: Vec<Vec<S>> = ann.members().iter().map(|x| ws.dense_functional(x)).collect::<Result<_>>()?;
    let ts: Vec<Vec<S>> = xis.iter().map(|x| ws.riesz_vector(x, false)).collect::<Result<_>>()?;
    let m = xis.len();
    let b: Vec<S> = xis.iter().map(|x| dot(x, &fv)).collect();
    let mut h = Mat::zeros(m, m);
    for j in 0..m {
        for i in 0..m {
            h[(j, i)] = dot(&xis[j], &ts[i]);
        }
    }
    let p = ws.pi_power();
    let to_true = |x: f64| x * std::f64::consts::PI.powi(p);
    let basis_ratios = (0..m)
        .map(|i| {
            let num = b[i].to_c64().norm_sqr();
            let den = h[(i, i)].re_f64();
            if num == 0.0 {
                0.0
            } else if den <= 0.0 {
                f64::INFINITY
            } else {
                to_true(num / den)
            }
        })
        .collect();
    let eigen_value = {
        let hc = Mat::from_rows(
            (0..m).map(|i| (0..m).map(|j| h[(i, j)].to_c64()).collect()).collect(),
            m,
        )?;
        let bc: Vec<C64> = b.iter().map(|x| x.to_c64()).collect();
        let mut a = Mat::<C64>::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                a[(i, j)] = bc[i] * bc[j].conj();
            }
        }
        largest_generalized_eigenvalue(&a, &hc, 500).ok().map(to_true)
    };
    let Some(y) = solve_consistent(&h, &b) else {
        return Ok(BCircle {
            value: Quantity::infinite(),
            scaled_value: None,
            maximizer: None,
            ratio_at_maximizer: None,
            eigen_value,
            basis_ratios,
        });
    };
    let value = real_part(&conj_dot(&b, &y));
    let n = ws.dim();
    let mut xi_star = vec![S::zero(); ws.size()];
    for (x, yi) in xis.iter().zip(&y) {
        let w = yi.conj();
        for (o, v) in xi_star.iter_mut().zip(x) {
            *o = o.clone() + v.clone() * w.clone();
        }
    }
    let maximizer = Functional::from_dense(n, ws.indices(), &xi_star);
    let (maximizer, ratio) = if maximizer.is_zero() {
        (Functional::delta(MultiIndex::zeros(n)), ws.metric_quantity(&S::zero()))
    } else {
        let t = ws.riesz_vector(&xi_star, false)?;
        let k = real_part(&dot(&xi_star, &t));
        let pf = dot(&xi_star, &fv);
        let ratio = real_part(&pf.abs_sqr()) / k;
        (maximizer, ws.metric_quantity(&ratio))
    };
    Ok(BCircle {
        value: ws.metric_quantity(&value),
        scaled_value: Some(value),
        maximizer: Some(maximizer),
        ratio_at_maximizer: Some(ratio),
        eigen_value,
        basis_ratios,
    })
}
