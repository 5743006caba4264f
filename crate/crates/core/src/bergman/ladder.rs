//! Sweeps: the ladder `I + 𝔪ᵏ`, exhaustions `D_1 ⊆ D_2 ⊆ …`, and the
//! density construction approaching `F ∈ A²(D,I)^⊥` by representatives.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::projection::{b_circle, minimal_l2};
use super::space::{working_degree, WorkingSpace};
use crate::domains::{Domain, ExhaustionSequence};
use crate::error::{Error, Result};
use crate::ideals::{jet_ideal, IdealPresentation, JetIdeal};
use crate::jets::Jet;
use crate::scalar::{Quantity, Scalar, C64};

/// Relative step below which a sequence counts as settled.
pub const STABLE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub k: u32,
    pub c: Quantity,
    pub b: Quantity,
    /// `|C_k − B°_k|`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ladder {
    pub rows: Vec<LadderRow>,
    pub nondecreasing: bool,
    /// First `k` after which two consecutive steps are below tolerance.
    pub stabilized_at: Option<u32>,
    /// The last value, when the sequence has stabilized.
    pub limit: Option<Quantity>,
}

fn close(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= STABLE_TOL * a.abs().max(1.0)
}

/// First position `i` with `v_i ≈ v_{i+1} ≈ v_{i+2}`.
pub fn stabilization_index(values: &[f64]) -> Option<usize> {
    (0..values.len().saturating_sub(2)).find(|&i| close(values[i], values[i + 1]) && close(values[i + 1], values[i + 2]))
}

pub fn is_nondecreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| {
        if w[0].is_infinite() {
            w[1].is_infinite()
        } else {
            w[1] >= w[0] - STABLE_TOL * w[0].abs().max(1.0)
        }
    })
}

fn gap(a: &Quantity, b: &Quantity) -> f64 {
    if a.is_infinite() && b.is_infinite() {
        0.0
    } else {
        (a.value - b.value).abs()
    }
}

/// `F` is treated as a polynomial: its degree bound is raised as needed.
fn as_polynomial<S: Scalar>(f: &Jet<S>, degree: u32) -> Jet<S> {
    if f.degree_bound() >= degree {
        f.clone()
    } else {
        f.clone().with_degree_bound(degree)
    }
}

/// `(k, C_{F,I+𝔪ᵏ}(D), B°_k)` for each `k` in the range.
pub fn krull_ladder<S: Scalar>(
    domain: &Domain,
    f: &Jet<S>,
    gens: &IdealPresentation<S>,
    ks: RangeInclusive<u32>,
) -> Result<Ladder> {
    if ks.is_empty() || *ks.start() == 0 {
        return Err(Error::InvalidArgument(format!("ladder range {ks:?} must be nonempty and start at 1 or more")));
    }
    working_degree(domain, ks.end() - 1)?;
    let f = as_polynomial(f, ks.end() - 1);
    let rows: Vec<LadderRow> = ks
        .clone()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let ideal = jet_ideal(gens, k)?;
            let c = minimal_l2(domain, &f, &ideal)?.value;
            let b = b_circle(domain, &f, &ideal)?.value;
            let gap = gap(&c, &b);
            Ok(LadderRow { k, c, b, gap })
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.c.value).collect();
    let stabilized_at = stabilization_index(&values).map(|i| rows[i].k);
    let limit = stabilized_at.map(|_| rows.last().expect("nonempty").c.clone());
    Ok(Ladder { nondecreasing: is_nondecreasing(&values), rows, stabilized_at, limit })
}

impl Ladder {
    /// `k,C_k,B_k,gap,C_k_exact`; the last column is empty in float mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,C_k,B_k,gap,C_k_exact\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{:e},{}", r.k, csv_value(&r.c), csv_value(&r.b), r.gap, csv_exact(&r.c));
        }
        out
    }
}

fn csv_value(q: &Quantity) -> String {
    if q.is_infinite() {
        "inf".into()
    } else {
        format!("{:.17e}", q.value)
    }
}

fn csv_exact(q: &Quantity) -> String {
    match (&q.exact, q.is_infinite()) {
        (Some(e), false) => e.to_string(),
        _ => String::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionRow {
    pub i: usize,
    pub c: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub rows: Vec<ExhaustionRow>,
    pub nondecreasing: bool,
    /// `C` on the limiting domain, when one is given.
    pub limit: Option<Quantity>,
}

impl Exhaustion {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,C_i,C_i_exact\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.i, csv_value(&r.c), csv_exact(&r.c));
        }
        out
    }
}

/// `C_{F,I}(D_i)` along a nested sequence, optionally against the limit domain.
pub fn exhaustion_limit<S: Scalar>(
    seq: &ExhaustionSequence,
    f: &Jet<S>,
    ideal: &JetIdeal<S>,
    limit_domain: Option<&Domain>,
) -> Result<Exhaustion> {
    let rows: Vec<ExhaustionRow> = seq
        .domains()
        .par_iter()
        .enumerate()
        .map(|(i, d)| Ok(ExhaustionRow { i: i + 1, c: minimal_l2(d, f, ideal)?.value }))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.iter().map(|r| r.c.value).collect();
    let limit = match limit_domain {
        Some(d) => Some(minimal_l2(d, f, ideal)?.value),
        None => None,
    };
    Ok(Exhaustion { nondecreasing: is_nondecreasing(&values), rows, limit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub k: u32,
    /// `∥F − G_k∥`.
    pub distance: f64,
    /// `⟨F, G_k⟩`, real and nonnegative by construction.
    pub inner_re: f64,
    pub inner_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub norm: f64,
    pub rows: Vec<DensityRow>,
}

/// For `F ⟂ I`, approximate `F` by `G_k = e^{iθ_k}(∥F∥/∥g_k∥) g_k` with
/// `g_k = T(ξ_k)`, `ξ_k` the maximizing functional at level `k` and `θ_k`
/// chosen so that `⟨F, G_k⟩ ≥ 0`.
pub fn density_sequence<S: Scalar>(
    domain: &Domain,
    f: &Jet<S>,
    gens: &IdealPresentation<S>,
    ks: RangeInclusive<u32>,
) -> Result<Density> {
    if f.is_zero() {
        return Err(Error::ZeroJet);
    }
    if ks.is_empty() || *ks.start() == 0 {
        return Err(Error::InvalidArgument(format!("range {ks:?} must be nonempty and start at 1 or more")));
    }
    let f = f.to_float();
    let gens = gens.to_float();
    let deg_f = f.natural_degree().unwrap_or(0);
    let w = working_degree(domain, deg_f.max(ks.end() - 1))?;
    let f = as_polynomial(&f, w);
    let ws = WorkingSpace::<C64>::new(domain, w)?;
    let fv = ws.dense_jet(&f);
    let pi_scale = std::f64::consts::PI.powi(ws.pi_power());
    let norm_sqr = |v: &[C64]| ws.inner(v, v).re;
    let f_norm2 = norm_sqr(&fv);
    if !(f_norm2.is_finite() && f_norm2 > 0.0) {
        return Err(Error::Hypothesis("F must have finite nonzero norm".into()));
    }
    // F must be orthogonal to the ideal; checked at the level where the jet of F is exact.
    let check = jet_ideal(&gens, w.min(deg_f) + 1)?;
    for row in check.basis_matrix().row_vectors() {
        let mut b = row;
        b.resize(ws.size(), C64::new(0.0, 0.0));
        let ip = ws.inner(&fv, &b).norm();
        let scale = (f_norm2 * norm_sqr(&b)).sqrt();
        if ip > 1e-10 * scale {
            return Err(Error::Hypothesis(format!("F is not orthogonal to the ideal (|<F,s>| = {ip:e})")));
        }
    }
    let rows = ks
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let ideal = jet_ideal(&gens, k)?;
            let bc = b_circle(domain, &f, &ideal)?;
            let zero = bc.scaled_value.map_or(true, |v| v.re == 0.0);
            let g = match (&bc.maximizer, zero) {
                (Some(xi), false) => ws.riesz_vector(&ws.dense_functional(xi)?, false)?,
                _ => vec![C64::new(0.0, 0.0); ws.size()],
            };
            let g_norm2 = norm_sqr(&g);
            let gk: Vec<C64> = if g_norm2 > 0.0 {
                let ip = ws.inner(&fv, &g);
                let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { C64::new(1.0, 0.0) };
                let s = phase * (f_norm2 / g_norm2).sqrt();
                g.iter().map(|y| s * y).collect()
            } else {
                g
            };
            let diff: Vec<C64> = fv.iter().zip(&gk).map(|(x, y)| x - y).collect();
            let d2 = norm_sqr(&diff).max(0.0);
            let ip = ws.inner(&fv, &gk) * pi_scale;
            Ok(DensityRow { k, distance: (d2 * pi_scale).sqrt(), inner_re: ip.re, inner_im: ip.im })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Density { norm: (f_norm2 * pi_scale).sqrt(), rows })
}
