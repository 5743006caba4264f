//! Randomized and golden check batteries. Every instance draws from its own
//! ChaCha stream derived from the suite seed, so results do not depend on
//! the number of worker threads.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergman::{
    b_circle, density_sequence, exhaustion_limit, krull_ladder, minimal_l2, triangular_basis, WorkingSpace,
};
use crate::domains::{truncate_weight, DiagonalDomain, Domain, ExhaustionSequence, MomentDomain, ToricWeight};
use crate::error::{Error, Result};
use crate::ideals::{jet_ideal, IdealPresentation};
use crate::jets::{jet_space_dim, monomials_up_to, Functional, Jet, MultiIndex};
use crate::linalg::Mat;
use crate::scalar::{PiRational, Quantity, C64, CQ};
use crate::sop::{effectiveness_report, jumping_number, verify_corollary_min, xi_cse_combinatorial, xi_cse_limit};

pub const SUITES: &[&str] = &["equivalence", "weighted", "ladder", "basis", "sop", "convexity", "density", "exhaustion"];

/// Environment variable capping the worker pool.
pub const THREADS_VAR: &str = "BERGLAB_THREADS";

/// Size the global rayon pool from `BERGLAB_THREADS`, if set. Calling this
/// after the pool exists has no effect.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest relative discrepancy seen by the check.
    pub gap: f64,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, gap: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, gap, detail: detail.into() }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self::new(name, false, f64::INFINITY, format!("error: {err}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub seed: u64,
    pub total: usize,
    pub passed: usize,
    pub max_gap: f64,
    pub checks: Vec<Check>,
}

impl SuiteSummary {
    fn from_checks(suite: &str, seed: u64, checks: Vec<Check>) -> Self {
        let passed = checks.iter().filter(|c| c.passed).count();
        let max_gap = checks.iter().map(|c| c.gap).filter(|g| g.is_finite()).fold(0.0, f64::max);
        Self { suite: suite.into(), seed, total: checks.len(), passed, max_gap, checks }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite {} (seed {}): {}/{} pass, max gap {:e}\n",
            self.suite, self.seed, self.passed, self.total, self.max_gap
        );
        for c in self.checks.iter().filter(|c| !c.passed) {
            out.push_str(&format!("  FAIL {}: {}\n", c.name, c.detail));
        }
        out
    }
}

/// Run a named suite; `count` sizes the randomized part where there is one.
pub fn run_suite(name: &str, seed: u64, count: usize) -> Result<SuiteSummary> {
    let checks = match name {
        "equivalence" => equivalence_checks(seed, count),
        "weighted" => weighted_checks(seed, count),
        "ladder" => ladder_checks(),
        "basis" => basis_checks(seed, count),
        "sop" => sop_checks(seed, count),
        "convexity" => convexity_checks(),
        "density" => density_checks(seed, count),
        "exhaustion" => exhaustion_checks(),
        other => return Err(Error::InvalidArgument(format!("unknown suite '{other}'; expected one of {SUITES:?}"))),
    };
    Ok(SuiteSummary::from_checks(name, seed, checks))
}

pub fn default_count(name: &str) -> usize {
    match name {
        "equivalence" | "weighted" => 50,
        "basis" | "sop" => 20,
        "density" => 10,
        _ => 0,
    }
}

fn instance_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64 + 1);
    rng
}

fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn small_coeff<R: Rng>(rng: &mut R) -> CQ {
    loop {
        let re: i64 = rng.gen_range(-3..=3);
        let im: i64 = if rng.gen_bool(0.3) { rng.gen_range(-2..=2) } else { 0 };
        if re != 0 || im != 0 {
            return CQ::new(rational(re, 1), rational(im, 1));
        }
    }
}

/// Random polynomial with `terms` monomials of degree in `lo..=hi`.
fn random_poly<R: Rng>(rng: &mut R, n: usize, lo: u32, hi: u32, terms: usize) -> Jet<CQ> {
    let pool: Vec<MultiIndex> = monomials_up_to(n, hi).into_iter().filter(|a| a.degree() >= lo).collect();
    let picked: Vec<(MultiIndex, CQ)> =
        (0..terms).map(|_| (pool[rng.gen_range(0..pool.len())].clone(), small_coeff(rng))).collect();
    let jet = Jet::from_terms(n, hi, picked).expect("degrees within bound");
    if jet.is_zero() {
        Jet::monomial(pool[0].clone(), hi)
    } else {
        jet
    }
}

fn random_ideal<R: Rng>(rng: &mut R, n: usize, k: u32) -> IdealPresentation<CQ> {
    let count = rng.gen_range(1..=2);
    let top = (k - 1).max(1);
    let gens = (0..count)
        .map(|_| {
            let t = rng.gen_range(1..=3);
            let g = random_poly(rng, n, 1, top, t);
            let d = g.natural_degree().unwrap_or(1);
            g.with_degree_bound(d)
        })
        .collect();
    IdealPresentation::new(n, gens).expect("generators without constant term")
}

fn random_pd_moments<R: Rng>(rng: &mut R, n: usize, degree: u32) -> Domain {
    let size = jet_space_dim(n, degree);
    let mut a = Mat::<C64>::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut g = a.conj_transpose().mul(&a).expect("square");
    for i in 0..size {
        g[(i, i)] += C64::new(0.5, 0.0);
    }
    MomentDomain::from_matrix(n, degree, g).expect("positive definite").into()
}

fn rel_gap(a: f64, b: f64, scale: f64) -> f64 {
    if a.is_infinite() || b.is_infinite() {
        return if a == b { 0.0 } else { f64::INFINITY };
    }
    (a - b).abs() / a.abs().max(b.abs()).max(scale).max(f64::MIN_POSITIVE)
}

/// `∥F∥²` in the working space, as a floor for relative gaps near zero.
fn norm_floor(domain: &Domain, f: &Jet<C64>, degree: u32) -> f64 {
    WorkingSpace::<C64>::new(domain, degree)
        .map(|ws| {
            let v = ws.dense_jet(&f.truncate(degree));
            let finite: Vec<C64> =
                v.iter().enumerate().map(|(i, x)| if ws.is_finite(i) { *x } else { C64::new(0.0, 0.0) }).collect();
            1e-12 * ws.inner(&finite, &finite).re.abs()
        })
        .unwrap_or(0.0)
}

fn exact_label(q: &Quantity) -> String {
    match (&q.exact, q.is_infinite()) {
        (_, true) => "inf".into(),
        (Some(e), _) => e.to_string(),
        (None, _) => format!("{:e}", q.value),
    }
}

/// `C` and `B°` in rational and floating point on a diagonal domain.
fn diagonal_equivalence(name: String, domain: &Domain, f: &Jet<CQ>, gens: &IdealPresentation<CQ>, k: u32) -> Check {
    let run = || -> Result<Check> {
        let ideal = jet_ideal(gens, k)?;
        let c = minimal_l2(domain, f, &ideal)?.value;
        let b = b_circle(domain, f, &ideal)?.value;
        let exact_ok = c.is_infinite() && b.is_infinite() || (c.exact.is_some() && c.exact == b.exact);
        let ff = f.to_float();
        let fideal = jet_ideal(&gens.to_float(), k)?;
        let cf = minimal_l2(domain, &ff, &fideal)?.value;
        let bf = b_circle(domain, &ff, &fideal)?.value;
        let floor = norm_floor(domain, &ff, k - 1);
        let gap = rel_gap(cf.value, bf.value, floor);
        let drift = rel_gap(cf.value, c.value, floor);
        Ok(Check::new(
            name,
            exact_ok && gap <= 1e-9 && drift <= 1e-9,
            gap,
            format!("C = {}, B = {}, float gap {gap:e}, float vs exact {drift:e}", exact_label(&c), exact_label(&b)),
        ))
    };
    run().unwrap_or_else(|e| Check::failed("diagonal equivalence", &e))
}

fn moment_equivalence(name: String, domain: &Domain, f: &Jet<C64>, gens: &IdealPresentation<C64>, k: u32) -> Check {
    let run = || -> Result<Check> {
        let ideal = jet_ideal(gens, k)?;
        let c = minimal_l2(domain, f, &ideal)?;
        let b = b_circle(domain, f, &ideal)?;
        let floor = norm_floor(domain, f, k - 1);
        let gap = rel_gap(c.value.value, b.value.value, floor);
        let eig = b.eigen_value.map_or(f64::INFINITY, |e| rel_gap(e, c.value.value, floor.max(1e-12)));
        Ok(Check::new(
            name,
            gap <= 1e-9,
            gap,
            format!("C = {:e}, B = {:e}, gap {gap:e}, eigen-iteration gap {eig:e}", c.value.value, b.value.value),
        ))
    };
    run().unwrap_or_else(|e| Check::failed("moment equivalence", &e))
}

/// `B° = C` on random polydiscs, balls and positive definite moment data.
pub fn equivalence_checks(seed: u64, count: usize) -> Vec<Check> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(seed, i);
            match i % 3 {
                0 | 1 => {
                    let n = rng.gen_range(1..=3usize);
                    let max_k = if n == 3 { 5 } else { 7 };
                    let k = rng.gen_range(2..=max_k);
                    let domain: Domain = if i % 3 == 0 {
                        let radii = (0..n).map(|_| [1.0, 0.5, 0.75, 1.5, 2.0][rng.gen_range(0..5)]).collect();
                        DiagonalDomain::polydisc(radii).expect("valid").into()
                    } else {
                        DiagonalDomain::ball(n, [1.0, 0.5, 2.0][rng.gen_range(0..3)]).expect("valid").into()
                    };
                    let gens = random_ideal(&mut rng, n, k);
                    let t = rng.gen_range(1..=4);
                    let f = random_poly(&mut rng, n, 0, k - 1, t);
                    diagonal_equivalence(format!("equivalence #{i} diagonal n={n} k={k}"), &domain, &f, &gens, k)
                }
                _ => {
                    let n = rng.gen_range(1..=2usize);
                    let degree = if n == 1 { rng.gen_range(2..=6) } else { rng.gen_range(2..=4) };
                    let domain = random_pd_moments(&mut rng, n, degree);
                    let k = rng.gen_range(2..=degree + 1);
                    let gens = random_ideal(&mut rng, n, k).to_float();
                    let t = rng.gen_range(1..=4);
                    let f = random_poly(&mut rng, n, 0, k - 1, t).to_float();
                    moment_equivalence(format!("equivalence #{i} moments n={n} d={degree} k={k}"), &domain, &f, &gens, k)
                }
            }
        })
        .collect()
}

/// The equivalence with toric weights, the `C_{z,ψ,(z²)}(Δ) = π` example and
/// convergence under the truncations `ψ_j = max(ψ, −j)`.
pub fn weighted_checks(seed: u64, count: usize) -> Vec<Check> {
    let mut checks: Vec<Check> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(seed ^ 0x5eed, i);
            let n = rng.gen_range(1..=2usize);
            let k = rng.gen_range(2..=if n == 1 { 6 } else { 5 });
            let mut a: Vec<f64> = (0..n).map(|_| [0.0, 0.5, 1.0, 2.0][rng.gen_range(0..4)]).collect();
            if a.iter().all(|x| *x == 0.0) {
                a[0] = 1.0;
            }
            let integral = a.iter().all(|x| x.fract() == 0.0);
            let radii = (0..n).map(|_| if integral { [1.0, 0.5, 2.0][rng.gen_range(0..3)] } else { 1.0 }).collect();
            let phi = ToricWeight::new(a.clone()).expect("valid");
            let domain: Domain =
                DiagonalDomain::polydisc(radii).and_then(|d| d.with_toric_weight(&phi, 1.0)).expect("valid").into();
            let gens = random_ideal(&mut rng, n, k);
            let t = rng.gen_range(1..=4);
            let f = random_poly(&mut rng, n, 0, k - 1, t);
            diagonal_equivalence(format!("weighted #{i} a={a:?} k={k}"), &domain, &f, &gens, k)
        })
        .collect();

    let golden = || -> Result<Check> {
        let phi = ToricWeight::new(vec![1.0])?;
        let domain: Domain = DiagonalDomain::unit_disc().with_toric_weight(&phi, 1.0)?.into();
        let f = Jet::<CQ>::monomial(MultiIndex::new(vec![1]), 1);
        let gens = IdealPresentation::new(1, vec![Jet::monomial(MultiIndex::new(vec![2]), 2)])?;
        let ideal = jet_ideal(&gens, 2)?;
        let c = minimal_l2(&domain, &f, &ideal)?.value;
        let b = b_circle(&domain, &f, &ideal)?.value;
        let want = PiRational::new(1, rational(1, 1));
        Ok(Check::new(
            "weighted disc C_{z,psi,(z^2)} = pi",
            c.exact.as_ref() == Some(&want) && b.exact.as_ref() == Some(&want),
            0.0,
            format!("C = {}, B = {}", exact_label(&c), exact_label(&b)),
        ))
    };
    checks.push(golden().unwrap_or_else(|e| Check::failed("weighted golden", &e)));

    // (a, F, generators, level)
    let truncations: Vec<(Vec<f64>, Vec<(Vec<u32>, i64)>, Vec<Vec<u32>>, u32)> = vec![
        (vec![1.0], vec![(vec![1], 1)], vec![vec![2]], 2),
        (vec![0.5], vec![(vec![0], 1), (vec![1], 1)], vec![vec![2]], 2),
        (vec![1.0, 1.0], vec![(vec![1, 1], 1), (vec![2, 0], 2)], vec![vec![2, 0], vec![0, 2]], 3),
    ];
    checks.extend(truncations.into_par_iter().map(|(a, f, gens, k)| truncation_check(a, f, gens, k)).collect::<Vec<_>>());
    checks
}

fn truncation_check(a: Vec<f64>, f: Vec<(Vec<u32>, i64)>, gens: Vec<Vec<u32>>, k: u32) -> Check {
    let name = format!("truncated weights a={a:?} F={f:?}");
    let run = || -> Result<Check> {
        let n = a.len();
        let psi = ToricWeight::new(a.clone())?;
        let base = DiagonalDomain::unit_polydisc(n);
        let f = Jet::from_terms(n, k - 1, f.iter().map(|(b, c)| (MultiIndex::new(b.clone()), C64::new(*c as f64, 0.0))))?;
        let gens = IdealPresentation::new(n, gens.iter().map(|g| Jet::monomial(MultiIndex::new(g.clone()), g.iter().sum())).collect())?;
        let ideal = jet_ideal(&gens, k)?;
        let singular: Domain = base.with_toric_weight(&psi, 1.0)?.into();
        let limit = minimal_l2(&singular, &f, &ideal)?.value.value;
        let mut values = Vec::new();
        let mut equiv_gap: f64 = 0.0;
        for j in [1u32, 2, 5, 10, 20, 40] {
            let d: Domain = base.with_weight(truncate_weight(&psi, j)?)?.into();
            let c = minimal_l2(&d, &f, &ideal)?.value.value;
            let b = b_circle(&d, &f, &ideal)?.value.value;
            equiv_gap = equiv_gap.max(rel_gap(c, b, 0.0));
            values.push(c);
        }
        let last = *values.last().expect("nonempty");
        let diff = (last - limit).abs();
        let monotone = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
        Ok(Check::new(
            name.clone(),
            limit.is_finite() && diff <= 1e-6 && monotone && equiv_gap <= 1e-9,
            diff,
            format!("limit {limit:e}, C(psi_40) {last:e}, |diff| {diff:e}, nondecreasing {monotone}, B/C gap {equiv_gap:e}"),
        ))
    };
    run().unwrap_or_else(|e| Check::failed(name.clone(), &e))
}

/// The ladder `I + 𝔪ᵏ` for `I = (z₁ − z₂²)`, `F = z₁` on the bidisc.
pub fn ladder_checks() -> Vec<Check> {
    let run = || -> Result<Vec<Check>> {
        let one = CQ::new(rational(1, 1), BigRational::zero());
        let g = Jet::polynomial(
            2,
            vec![(MultiIndex::new(vec![1, 0]), one.clone()), (MultiIndex::new(vec![0, 2]), -one.clone())],
        )?;
        let gens = IdealPresentation::new(2, vec![g])?;
        let f = Jet::<CQ>::monomial(MultiIndex::new(vec![1, 0]), 1);
        let bidisc: Domain = DiagonalDomain::unit_polydisc(2).into();
        let ladder = krull_ladder(&bidisc, &f, &gens, 2..=7)?;
        let fifth = PiRational::new(2, rational(1, 5));
        let values_ok = ladder.rows.iter().all(|r| {
            let want = if r.k == 2 { PiRational::new(2, BigRational::zero()) } else { fifth.clone() };
            r.c.exact.as_ref() == Some(&want) && r.b == r.c
        });
        let shown: Vec<String> = ladder.rows.iter().map(|r| format!("k={}: {}", r.k, exact_label(&r.c))).collect();
        Ok(vec![
            Check::new("ladder values 0, pi^2/5, pi^2/5, ...", values_ok, 0.0, shown.join("; ")),
            Check::new("ladder nondecreasing", ladder.nondecreasing, 0.0, String::new()),
            Check::new(
                "ladder stabilized by k=4",
                ladder.stabilized_at.is_some_and(|k| k <= 4),
                0.0,
                format!("stabilized at {:?}", ladder.stabilized_at),
            ),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::failed("ladder", &e)])
}

/// Triangular basis structure on random positive definite moment data of degree 4.
pub fn basis_checks(seed: u64, count: usize) -> Vec<Check> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(seed ^ 0xba515, i);
            let domain = random_pd_moments(&mut rng, 2, 4);
            let name = format!("basis #{i}");
            let run = || -> Result<Check> {
                let b = triangular_basis(&domain, 4)?;
                let ws = WorkingSpace::<C64>::new(&domain, 4)?;
                let mut residual: f64 = 0.0;
                let mut top_ok = true;
                let mut low_ok = true;
                for (a, alpha) in b.indices().iter().enumerate() {
                    let sigma = ws.dense_jet(&b.sigma()[a]);
                    let t = ws.riesz_vector(&ws.dense_functional(&b.xi()[a])?, true)?;
                    let scale = sigma.iter().map(|x| x.norm()).fold(0.0, f64::max);
                    let r = t.iter().zip(&sigma).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale;
                    residual = residual.max(r);
                    top_ok &= b.xi()[a].top_index() == Some(alpha);
                    low_ok &= b.sigma()[a].leading_index() == Some(alpha);
                }
                Ok(Check::new(
                    name.clone(),
                    residual <= 1e-10 && top_ok && low_ok,
                    residual,
                    format!("T(xi[a]) residual {residual:e}, top support {top_ok}, first coefficient {low_ok}, pivot ratio {:e}", b.condition()),
                ))
            };
            run().unwrap_or_else(|e| Check::failed(name.clone(), &e))
        })
        .collect()
}

/// The sharp disc example and the minimum formula for `c_o^F` on random
/// monomials and binomials.
pub fn sop_checks(seed: u64, count: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    let sharp = || -> Result<Check> {
        let phi = ToricWeight::new(vec![1.0])?;
        let f = Jet::<CQ>::monomial(MultiIndex::new(vec![1]), 1);
        let r = effectiveness_report(&DiagonalDomain::unit_disc(), &f, &phi)?;
        let pi = |p: i32, a: i64, b: i64| Some(PiRational::new(p, rational(a, b)));
        let ok = r.integral.exact == pi(1, 1, 1)
            && r.c.exact == pi(1, 1, 2)
            && r.b.exact == pi(1, 1, 2)
            && r.ratio.exact == pi(0, 2, 1)
            && r.p_max.exact == pi(0, 2, 1)
            && Some(r.p_star.clone()) == pi(0, 2, 1)
            && r.sharp
            && r.sound;
        Ok(Check::new(
            "sharp disc example",
            ok,
            r.equivalence_gap,
            format!(
                "A = {}, C = {}, B = {}, R = {}, p_max = {}, p* = {}, sharp {}",
                exact_label(&r.integral),
                exact_label(&r.c),
                exact_label(&r.b),
                exact_label(&r.ratio),
                exact_label(&r.p_max),
                r.p_star,
                r.sharp
            ),
        ))
    };
    checks.push(sharp().unwrap_or_else(|e| Check::failed("sharp disc example", &e)));
    checks.extend((0..count).into_par_iter().map(|i| corollary_instance(seed, i)).collect::<Vec<_>>());
    checks
}

fn corollary_instance(seed: u64, i: usize) -> Check {
    let mut rng = instance_rng(seed ^ 0xc0, i);
    let n = rng.gen_range(1..=3usize);
    let mut a: Vec<f64> = (0..n).map(|_| [0.0, 0.5, 1.0, 1.5, 2.0, 3.0][rng.gen_range(0..6)]).collect();
    if a.iter().all(|x| *x == 0.0) {
        a[0] = 1.0;
    }
    let terms = if i % 2 == 0 { 1 } else { 2 };
    let f = random_poly(&mut rng, n, 0, 3, terms);
    let name = format!("minimum formula #{i} a={a:?} |supp F|={}", f.terms().count());
    let run = || -> Result<Check> {
        let phi = ToricWeight::new(a.clone())?;
        let c0 = jumping_number(&f, &phi)?;
        // Closed form: the smallest (β_j+1)/a_j over the support of F.
        let closed = f
            .terms()
            .flat_map(|(b, _)| {
                a.iter()
                    .enumerate()
                    .filter(|(_, x)| **x > 0.0)
                    .map(|(j, x)| (b.get(j) as f64 + 1.0) / x)
                    .collect::<Vec<_>>()
            })
            .fold(f64::INFINITY, f64::min);
        let r = verify_corollary_min(&f, &phi, 4, 60, seed.wrapping_add(i as u64))?;
        let c0f = num_traits::ToPrimitive::to_f64(&c0).unwrap_or(f64::NAN);
        Ok(Check::new(
            name.clone(),
            r.holds && c0f == closed,
            0.0,
            format!(
                "c_o = {} (closed form {closed}), min gamma = {}, sampled {}, violations {}",
                r.jumping_number, r.minimum, r.sampled, r.violations
            ),
        ))
    };
    run().unwrap_or_else(|e| Check::failed(name.clone(), &e))
}

/// Two routes to `γ_ξ` and log-convexity of `t ↦ log K` on sublevel sets.
pub fn convexity_checks() -> Vec<Check> {
    let mut cases: Vec<(String, Functional<C64>, Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let one = C64::new(1.0, 0.0);
    let grid10: Vec<f64> = (1..=10).map(f64::from).collect();
    let grid40: Vec<f64> = (1..=40).map(f64::from).collect();
    for k in 0..=4u32 {
        cases.push((format!("delta_{k} on the disc"), Functional::delta(MultiIndex::new(vec![k])), vec![1.0], grid10.clone(), 1e-9));
    }
    for k in 1..=3u32 {
        let xi = Functional::from_entries(1, vec![(MultiIndex::new(vec![0]), one), (MultiIndex::new(vec![k]), C64::new(0.5, 1.0))])
            .expect("valid");
        cases.push((format!("delta_0 + c delta_{k} on the disc"), xi, vec![1.0], grid40.clone(), 1e-9));
    }
    let grid2: Vec<f64> = (0..=12).map(|i| 5.0 * i as f64).collect();
    for beta in [[0u32, 0], [1, 0], [0, 2], [1, 1], [2, 1]] {
        cases.push((
            format!("delta_{beta:?} on the bidisc, a=(1,1)"),
            Functional::delta(MultiIndex::new(beta.to_vec())),
            vec![1.0, 1.0],
            grid2.clone(),
            5e-2,
        ));
    }
    let xi = Functional::from_entries(2, vec![(MultiIndex::new(vec![1, 0]), one), (MultiIndex::new(vec![0, 1]), one)]).expect("valid");
    cases.push(("delta_(1,0) + delta_(0,1) on the bidisc, a=(1,2)".into(), xi, vec![1.0, 2.0], grid2.clone(), 5e-2));
    cases
        .into_par_iter()
        .flat_map(|(name, xi, a, grid, tol)| {
            let run = || -> Result<Vec<Check>> {
                let phi = ToricWeight::new(a)?;
                let domain = DiagonalDomain::unit_polydisc(phi.dim());
                let want = num_traits::ToPrimitive::to_f64(&xi_cse_combinatorial(&xi, &phi)?).unwrap_or(f64::NAN);
                let r = xi_cse_limit(&xi, &phi, &domain, &grid)?;
                let gap = (r.slope - want).abs();
                let worst = r.second_differences.iter().cloned().fold(f64::INFINITY, f64::min);
                Ok(vec![
                    Check::new(
                        format!("cse slope, {name}"),
                        gap <= tol,
                        gap,
                        format!("limit slope {:.12} vs combinatorial {want}", r.slope),
                    ),
                    Check::new(
                        format!("log-convexity, {name}"),
                        r.convex,
                        worst.min(0.0).abs(),
                        format!("smallest second difference {worst:e}"),
                    ),
                ])
            };
            run().unwrap_or_else(|e| vec![Check::failed(name.clone(), &e)])
        })
        .collect()
}

const DENSITY_TOL: f64 = 1e-10;

fn density_check(name: String, domain: &Domain, f: &Jet<C64>, gens: &IdealPresentation<C64>, exact_from: u32, top: u32) -> Check {
    let run = || -> Result<Check> {
        let d = density_sequence(domain, f, gens, 1..=top)?;
        let scale = d.norm * d.norm;
        let phase_ok = d.rows.iter().all(|r| r.inner_re >= -1e-12 * scale && r.inner_im.abs() <= 1e-10 * scale);
        let tail_ok = d.rows.iter().filter(|r| r.k >= exact_from).all(|r| r.distance <= DENSITY_TOL * d.norm.max(1.0));
        let dist: Vec<String> = d.rows.iter().map(|r| format!("{}:{:.2e}", r.k, r.distance)).collect();
        let worst = d.rows.iter().filter(|r| r.k >= exact_from).map(|r| r.distance).fold(0.0, f64::max);
        Ok(Check::new(name.clone(), phase_ok && tail_ok, worst, format!("distances {}; phase ok {phase_ok}", dist.join(" "))))
    };
    run().unwrap_or_else(|e| Check::failed(name.clone(), &e))
}

/// `∥F − G_k∥ → 0` for `F ⟂ I`, reaching zero once `I` is exact at level `k`.
pub fn density_checks(seed: u64, count: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    let disc: Domain = DiagonalDomain::unit_disc().into();
    let bidisc: Domain = DiagonalDomain::unit_polydisc(2).into();
    let z2 = IdealPresentation::new(1, vec![Jet::<C64>::monomial(MultiIndex::new(vec![2]), 2)]).expect("valid");
    let z = Jet::<C64>::monomial(MultiIndex::new(vec![1]), 1);
    checks.push(density_check("density disc F=z, I=(z^2)".into(), &disc, &z, &z2, 2, 4));
    let z1 = IdealPresentation::new(2, vec![Jet::<C64>::monomial(MultiIndex::new(vec![1, 0]), 1)]).expect("valid");
    let f = Jet::polynomial(2, vec![(MultiIndex::new(vec![0, 1]), C64::new(0.6, 0.8))]).expect("valid");
    checks.push(density_check("density bidisc F=z2, I=(z1)".into(), &bidisc, &f, &z1, 3, 4));
    checks.extend(
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = instance_rng(seed ^ 0xde, i);
                let n = rng.gen_range(1..=2usize);
                let level = rng.gen_range(2..=4u32);
                let gens = random_ideal(&mut rng, n, level);
                let t = rng.gen_range(1..=4);
                let raw = random_poly(&mut rng, n, 0, level - 1, t).to_float();
                let domain: Domain = if i % 2 == 0 {
                    DiagonalDomain::unit_polydisc(n).into()
                } else {
                    DiagonalDomain::ball(n, 1.0).expect("valid").into()
                };
                let name = format!("density #{i} n={n} level={level}");
                let run = || -> Result<Check> {
                    // F: the component of a random polynomial orthogonal to I + 𝔪^level.
                    let fg = gens.to_float();
                    let g = minimal_l2(&domain, &raw, &jet_ideal(&fg, level)?)?;
                    let f = g.minimizer.ok_or_else(|| Error::Hypothesis("no minimizer".into()))?;
                    if f.is_zero() {
                        return Ok(Check::new(name.clone(), true, 0.0, "F in I; nothing to approximate"));
                    }
                    Ok(density_check(name.clone(), &domain, &f, &fg, level, level + 1))
                };
                run().unwrap_or_else(|e| Check::failed(name.clone(), &e))
            })
            .collect::<Vec<_>>(),
    );
    checks
}

/// Discs of radii `1 − 2^{−i}` exhausting `Δ`, `F = z`, `I = (z²)`.
pub fn exhaustion_checks() -> Vec<Check> {
    let run = || -> Result<Vec<Check>> {
        let radii: Vec<f64> = (1..=15).map(|i| 1.0 - 0.5f64.powi(i)).collect();
        let domains = radii.iter().map(|r| DiagonalDomain::polydisc(vec![*r]).map(Domain::from)).collect::<Result<Vec<_>>>()?;
        let seq = ExhaustionSequence::new(domains)?;
        let gens = IdealPresentation::new(1, vec![Jet::<C64>::monomial(MultiIndex::new(vec![2]), 2)])?;
        let ideal = jet_ideal(&gens, 2)?;
        let f = Jet::<C64>::monomial(MultiIndex::new(vec![1]), 1);
        let disc: Domain = DiagonalDomain::unit_disc().into();
        let e = exhaustion_limit(&seq, &f, &ideal, Some(&disc))?;
        let formula_gap = e
            .rows
            .iter()
            .zip(&radii)
            .map(|(row, r)| rel_gap(row.c.value, PI * r.powi(4) / 2.0, 0.0))
            .fold(0.0, f64::max);
        let last = e.rows.last().expect("nonempty").c.value;
        let limit = e.limit.as_ref().map_or(f64::NAN, |q| q.value);
        let dist = (last - PI / 2.0).abs();
        Ok(vec![
            Check::new("exhaustion C_i = pi r_i^4/2", formula_gap <= 1e-12, formula_gap, String::new()),
            Check::new("exhaustion nondecreasing", e.nondecreasing, 0.0, String::new()),
            Check::new("exhaustion limit domain C = pi/2", (limit - PI / 2.0).abs() <= 1e-14, (limit - PI / 2.0).abs(), String::new()),
            Check::new(
                "exhaustion within 1e-8 of pi/2 by i=15",
                dist <= 1e-8,
                dist,
                format!("C_15 = {last:.17}, |C_15 - pi/2| = {dist:e}"),
            ),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::failed("exhaustion", &e)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 1, 1).is_err());
    }

    #[test]
    fn deterministic_under_seed() {
        let a = run_suite("equivalence", 3, 6).unwrap();
        let b = run_suite("equivalence", 3, 6).unwrap();
        assert_eq!(a, b);
        assert!(a.all_passed(), "{}", a.to_text());
    }

    #[test]
    fn ladder_suite_passes() {
        let s = run_suite("ladder", 0, 0).unwrap();
        assert!(s.all_passed(), "{}", s.to_text());
    }
}
