//! Strong openness on toric weights: jumping numbers, the ξ-cse `γ_ξ(φ)`
//! computed combinatorially and as a growth rate of kernels on sublevel sets,
//! and effectiveness reports for `∫|F|²e^{−φ}`.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bergman::{b_circle, kernel_at_origin, minimal_l2};
use crate::domains::{sublevel_domain, weighted_integral, DiagonalDomain, Domain, ToricWeight};
use crate::error::{Error, Result};
use crate::ideals::{jet_ideal, jumping_numbers_exact, multiplier_ideal_exact, multiplier_ideal_plus_exact, MonomialIdeal};
use crate::jets::{monomials_up_to, Functional, Jet, MultiIndex, TermsJson};
use crate::scalar::{exact_from_f64, rational_to_string, PiRational, Quantity, Scalar};

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn check_dim(n: usize, phi: &ToricWeight) -> Result<()> {
    if phi.dim() != n {
        return Err(Error::DimensionMismatch { expected: phi.dim(), got: n });
    }
    Ok(())
}

/// `min_{a_j>0} (β_j+1)/a_j`: `z^β ∈ 𝓘(cφ)` iff `c` is below this value.
pub fn monomial_threshold(beta: &MultiIndex, phi: &ToricWeight) -> BigRational {
    phi.active()
        .map(|j| BigRational::from_integer((beta.get(j) + 1).into()) / phi.exact_exponent(j))
        .min()
        .expect("toric weight has an active exponent")
}

/// `c_o^F(φ)`. Monomials are orthogonal for every `e^{−cφ}`, so `F ∈ 𝓘(cφ)`
/// iff each monomial of its support is, and the threshold is the minimum.
pub fn jumping_number<S: Scalar>(f: &Jet<S>, phi: &ToricWeight) -> Result<BigRational> {
    check_dim(f.dim(), phi)?;
    f.terms().map(|(b, _)| monomial_threshold(b, phi)).min().ok_or(Error::ZeroJet)
}

/// `γ_ξ(φ) = inf{c : ξ annihilates 𝓘(cφ)}`: every support monomial must have
/// left the ideal.
pub fn xi_cse_combinatorial<S: Scalar>(xi: &Functional<S>, phi: &ToricWeight) -> Result<BigRational> {
    check_dim(xi.dim(), phi)?;
    xi.entries().map(|(b, _)| monomial_threshold(b, phi)).max().ok_or(Error::ZeroFunctional)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CseRow {
    pub t: f64,
    pub log_kernel: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CseLimit {
    pub rows: Vec<CseRow>,
    /// Least-squares slope over the last four points.
    pub slope: f64,
    /// Largest deviation of the whole table from its least-squares line.
    pub affine_residual: f64,
    /// `h·(s_{i+1} − s_i)` for consecutive chord slopes `s`.
    pub second_differences: Vec<f64>,
    pub convex: bool,
}

pub const CONVEXITY_TOL: f64 = 1e-8;

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    let tx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let ty = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|(x, y)| (x - tx) * (y - ty)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - tx) * (x - tx)).sum();
    let slope = sxy / sxx;
    (slope, ty - slope * tx)
}

/// Growth rate of `log K_{ξ,{φ<−t}∩D}(o)` along `t_grid`.
pub fn xi_cse_limit(
    xi: &Functional<crate::scalar::C64>,
    phi: &ToricWeight,
    domain: &DiagonalDomain,
    t_grid: &[f64],
) -> Result<CseLimit> {
    if xi.is_zero() {
        return Err(Error::ZeroFunctional);
    }
    check_dim(xi.dim(), phi)?;
    if t_grid.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 values of t, got {}", t_grid.len())));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("t values must be strictly increasing".into()));
    }
    let rows = t_grid
        .iter()
        .map(|&t| {
            let sub = sublevel_domain(domain, phi, t)?;
            let k = kernel_at_origin(&Domain::Diagonal(sub), xi)?;
            if !(k.value.is_finite() && k.value > 0.0) {
                return Err(Error::Unbounded(format!("kernel at t = {t} is {}", k.value)));
            }
            Ok(CseRow { t, log_kernel: k.value.ln() })
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.log_kernel)).collect();
    let (slope, _) = least_squares(&points[points.len() - 4..]);
    let (s_all, i_all) = least_squares(&points);
    let affine_residual = points.iter().map(|(x, y)| (y - s_all * x - i_all).abs()).fold(0.0, f64::max);
    let second_differences: Vec<f64> = points
        .windows(3)
        .map(|w| {
            let h0 = w[1].0 - w[0].0;
            let h1 = w[2].0 - w[1].0;
            let s0 = (w[1].1 - w[0].1) / h0;
            let s1 = (w[2].1 - w[1].1) / h1;
            (s1 - s0) * (h0 + h1) / 2.0
        })
        .collect();
    let convex = second_differences.iter().all(|d| *d >= -CONVEXITY_TOL);
    Ok(CseLimit { rows, slope, affine_residual, second_differences, convex })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub jumping_number: String,
    pub minimum: String,
    /// The functional attaining the minimum.
    pub minimizer: TermsJson,
    pub family_size: usize,
    /// Sampled functionals with `ξ·F ≠ 0`.
    pub sampled: usize,
    /// Sampled functionals with `ξ·F ≠ 0` and `γ_ξ < c_o^F`.
    pub violations: usize,
    pub holds: bool,
}

/// `c_o^F(φ) = min{γ_ξ(φ) : ξ·F ≠ 0}` over the family `{δ_β : β ∈ supp F}`
/// together with the extremal functional for `𝓘₊(c_o^F φ)`, and the lower
/// bound `γ_ξ ≥ c_o^F` on `samples` random functionals of order at most `d`.
pub fn verify_corollary_min<S: Scalar>(
    f: &Jet<S>,
    phi: &ToricWeight,
    d: u32,
    samples: usize,
    seed: u64,
) -> Result<CorollaryReport> {
    let n = f.dim();
    let c0 = jumping_number(f, phi)?;
    let deg = f.natural_degree().unwrap_or(0);
    if d < deg {
        return Err(Error::InvalidArgument(format!("search degree {d} is below deg F = {deg}")));
    }
    let mut family: Vec<Functional<S>> = f.terms().map(|(b, _)| Functional::delta(b.clone())).collect();
    let plus = multiplier_ideal_plus_exact(phi, &c0)?;
    let level = plus.generators().iter().map(|g| g.degree()).max().unwrap_or(0) + 1;
    let ideal = jet_ideal(&plus.presentation::<S>()?, level)?;
    let polydisc: Domain = DiagonalDomain::unit_polydisc(n).into();
    let fl = f.clone().with_degree_bound(f.degree_bound().max(level - 1).max(d));
    if let Some(eta) = minimal_l2(&polydisc, &fl, &ideal)?.eta {
        family.push(eta);
    }
    let mut best: Option<(BigRational, &Functional<S>)> = None;
    for xi in &family {
        if xi.pair(&fl)?.is_zero() {
            continue;
        }
        let g = xi_cse_combinatorial(xi, phi)?;
        if best.as_ref().map_or(true, |(b, _)| g < *b) {
            best = Some((g, xi));
        }
    }
    let (minimum, minimizer) = best.ok_or(Error::ZeroJet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = monomials_up_to(n, d);
    let mut sampled = 0;
    let mut violations = 0;
    for _ in 0..samples {
        let mut terms = Vec::new();
        for b in &support {
            if rng.gen_bool(0.4) {
                let re = rng.gen_range(-3i32..=3) as f64;
                let im = rng.gen_range(-3i32..=3) as f64;
                terms.push((b.clone(), S::from_parts(re, im)?));
            }
        }
        let xi = Functional::from_entries(n, terms)?;
        if xi.is_zero() || xi.pair(&fl)?.is_zero() {
            continue;
        }
        sampled += 1;
        if xi_cse_combinatorial(&xi, phi)? < c0 {
            violations += 1;
        }
    }
    Ok(CorollaryReport {
        jumping_number: rational_to_string(&c0),
        holds: minimum == c0 && violations == 0,
        minimum: rational_to_string(&minimum),
        minimizer: TermsJson::from_functional(minimizer),
        family_size: family.len(),
        sampled,
        violations,
    })
}

/// Whether `F ∈ 𝓘(pφ)`, decided monomial by monomial.
pub fn in_multiplier_ideal<S: Scalar>(f: &Jet<S>, phi: &ToricWeight, p: &BigRational) -> Result<bool> {
    let ideal: MonomialIdeal = multiplier_ideal_exact(phi, p)?;
    Ok(f.terms().all(|(b, _)| ideal.contains_monomial(b)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessReport {
    /// `A = ∫_D |F|² e^{−φ}`.
    pub integral: Quantity,
    pub jumping_number: PiRational,
    /// Minimal generators of `𝓘₊(c_o^F φ)`.
    pub plus_ideal: Vec<String>,
    pub level: u32,
    /// `C_{F,𝓘₊}(D)`.
    pub c: Quantity,
    /// `B°` for the same data.
    pub b: Quantity,
    /// `|C − B°|`, relative.
    pub equivalence_gap: f64,
    /// `R = A/C`.
    pub ratio: Quantity,
    /// `R/(R−1)`; `null` for `R = 1`.
    pub p_max: Quantity,
    /// Largest `p` with `F ∈ 𝓘(p'φ)` for all `p' < p`, by scanning jumps.
    pub p_star: PiRational,
    pub sharp: bool,
    /// `p_max ≤ p*` and membership holds at every tested `p < p_max`.
    pub sound: bool,
}

fn exact_ratio(a: &Quantity, c: &Quantity) -> Option<BigRational> {
    match (&a.exact, &c.exact) {
        (Some(a), Some(c)) if a.pi_power == c.pi_power && !c.rational.is_zero() => Some(&a.rational / &c.rational),
        _ => None,
    }
}

/// Data for `p/(p−1) > A/C_{F,𝓘₊(c_o^F φ)}(D)` on a diagonal domain.
pub fn effectiveness_report<S: Scalar>(
    domain: &DiagonalDomain,
    f: &Jet<S>,
    phi: &ToricWeight,
) -> Result<EffectivenessReport> {
    if f.is_zero() {
        return Err(Error::ZeroJet);
    }
    check_dim(domain.dim(), phi)?;
    let integral = weighted_integral(domain, f, phi, 1.0)?;
    if integral.is_infinite() {
        return Err(Error::Hypothesis("∫|F|²e^{−φ} is infinite".into()));
    }
    let c0 = jumping_number(f, phi)?;
    let plus = multiplier_ideal_plus_exact(phi, &c0)?;
    let level = plus.generators().iter().map(|g| g.degree()).max().unwrap_or(0) + 1;
    let ideal = jet_ideal(&plus.presentation::<S>()?, level)?;
    let fl = f.clone().with_degree_bound(f.degree_bound().max(level - 1));
    let dom: Domain = domain.clone().into();
    let c = minimal_l2(&dom, &fl, &ideal)?.value;
    let b = b_circle(&dom, &fl, &ideal)?.value;
    let equivalence_gap = match (&c.exact, &b.exact) {
        (Some(x), Some(y)) if x == y => 0.0,
        _ => (c.value - b.value).abs() / c.value.abs().max(f64::MIN_POSITIVE),
    };
    if c.value <= 0.0 {
        return Err(Error::Hypothesis("C vanishes, so F lies in the ideal".into()));
    }
    let (ratio, p_max, p_max_exact) = match exact_ratio(&integral, &c) {
        Some(r) => {
            let one = BigRational::one();
            let pm = if r > one { Some(&r / (&r - &one)) } else { None };
            let p_max = match &pm {
                Some(p) => Quantity::exact(PiRational::new(0, p.clone())),
                None => Quantity::infinite(),
            };
            (Quantity::exact(PiRational::new(0, r)), p_max, pm)
        }
        None => {
            let r = integral.value / c.value;
            let p_max = if r > 1.0 { Quantity::float(r / (r - 1.0)) } else { Quantity::infinite() };
            let pm = if p_max.is_infinite() { None } else { exact_from_f64(p_max.value).ok() };
            (Quantity::float(r), p_max, pm)
        }
    };
    // p*: the first jump at which F leaves 𝓘(pφ).
    let deg = f.natural_degree().unwrap_or(0);
    let mut p_star = None;
    for j in jumping_numbers_exact(phi, deg) {
        if !in_multiplier_ideal(f, phi, &j)? {
            p_star = Some(j);
            break;
        }
    }
    let p_star = p_star.ok_or_else(|| Error::InvalidArgument("no jump found for F".into()))?;
    let sharp = match (&p_max.exact, &p_max_exact) {
        (Some(_), Some(pm)) => *pm == p_star,
        _ => !p_max.is_infinite() && (p_max.value - to_f64(&p_star)).abs() <= 1e-9 * to_f64(&p_star).max(1.0),
    };
    let sound = match &p_max_exact {
        None => false,
        Some(pm) => {
            let below = pm <= &p_star || (to_f64(pm) - to_f64(&p_star)).abs() <= 1e-9 * to_f64(&p_star).max(1.0);
            let mut probes: Vec<BigRational> = jumping_numbers_exact(phi, deg).into_iter().filter(|j| j < pm).collect();
            let mut last = BigRational::zero();
            let mut mids = Vec::new();
            for j in &probes {
                mids.push((&last + j) / BigRational::from_integer(2.into()));
                last = j.clone();
            }
            mids.push((&last + pm) / BigRational::from_integer(2.into()));
            probes.extend(mids);
            let member = probes
                .iter()
                .filter(|p| p.is_positive() || p.is_zero())
                .map(|p| in_multiplier_ideal(f, phi, p))
                .collect::<Result<Vec<_>>>()?;
            below && member.into_iter().all(|m| m)
        }
    };
    Ok(EffectivenessReport {
        integral,
        jumping_number: PiRational::new(0, c0),
        plus_ideal: plus.generators().iter().map(|g| g.to_string()).collect(),
        level,
        c,
        b,
        equivalence_gap,
        ratio,
        p_max,
        p_star: PiRational::new(0, p_star),
        sharp,
        sound,
    })
}

impl EffectivenessReport {
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let q = |x: &Quantity| x.to_string();
        let _ = writeln!(out, "{:<16} {}", "A", q(&self.integral));
        let _ = writeln!(out, "{:<16} {} ({})", "c_o^F", self.jumping_number, self.jumping_number.to_f64());
        let _ = writeln!(out, "{:<16} ({})", "I_+", self.plus_ideal.join(", "));
        let _ = writeln!(out, "{:<16} {}", "C", q(&self.c));
        let _ = writeln!(out, "{:<16} {}", "B", q(&self.b));
        let _ = writeln!(out, "{:<16} {:e}", "gap", self.equivalence_gap);
        let _ = writeln!(out, "{:<16} {}", "R = A/C", q(&self.ratio));
        let _ = writeln!(out, "{:<16} {}", "p_max", q(&self.p_max));
        let _ = writeln!(out, "{:<16} {} ({})", "p*", self.p_star, self.p_star.to_f64());
        let _ = writeln!(out, "{:<16} {}", "sharp", self.sharp);
        let _ = writeln!(out, "{:<16} {}", "sound", self.sound);
        out
    }
}
