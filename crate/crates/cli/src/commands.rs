use std::fmt::Write as _;

use berglab::bergman::{
    b_circle, density_sequence, exhaustion_limit, kernel_at_origin, krull_ladder, minimal_l2, riesz_representative,
    triangular_basis, WorkingSpace,
};
use berglab::domains::{DiagonalDomain, Domain, ExhaustionSequence, ToricWeight};
use berglab::ideals::{jet_ideal, IdealPresentation};
use berglab::jets::TermsJson;
use berglab::sop::{effectiveness_report, xi_cse_combinatorial, xi_cse_limit};
use berglab::suites::{self, SUITES};
use berglab::{Error, Functional, Jet, Quantity, Scalar, C64, CQ};
use serde_json::json;

use crate::spec::{Mode, ProblemSpec, SchemaError};
use crate::Common;

const DEFAULT_TOL: f64 = 1e-9;
/// Finite grids only estimate the limiting slope; quadrature cases need slack.
const DEFAULT_CSE_TOL: f64 = 5e-2;

#[derive(Debug)]
pub enum Failure {
    Schema(SchemaError),
    Numeric(Error),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Numeric(_) | Failure::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Schema(e) => write!(f, "{e}"),
            Failure::Numeric(e) => write!(f, "numerical failure: {e}"),
            Failure::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Serde(m) => Failure::Schema(SchemaError::new("$", m)),
            other => Failure::Numeric(other),
        }
    }
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Failure::Schema(e)
    }
}

/// Console text, files for `--out`, and whether every cross-check held.
pub struct Report {
    pub text: String,
    pub files: Vec<(String, String)>,
    pub ok: bool,
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

struct Settings {
    mode: Mode,
    tol: Option<f64>,
}

impl Settings {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

pub fn dispatch(name: &str, p: &ProblemSpec, c: &Common) -> Result<Report, Failure> {
    let diagonal = p.domain.as_ref().map_or(true, |d| d.is_diagonal())
        && p.exhaustion.iter().flatten().all(|d| d.is_diagonal());
    let default_mode = if diagonal { Mode::Exact } else { Mode::Float };
    let s = Settings { mode: c.mode.or(p.mode).unwrap_or(default_mode), tol: c.tol.or(p.tol) };
    let exact = s.mode == Mode::Exact;
    match name {
        "equiv" if exact => equiv::<CQ>(p, &s),
        "equiv" => equiv::<C64>(p, &s),
        "ladder" if exact => ladder::<CQ>(p, c, &s),
        "ladder" => ladder::<C64>(p, c, &s),
        "exhaust" if exact => exhaust::<CQ>(p, &s),
        "exhaust" => exhaust::<C64>(p, &s),
        "kernel" if exact => kernel::<CQ>(p, &s),
        "kernel" => kernel::<C64>(p, &s),
        "basis" => basis(p, &s),
        "sop" if exact => sop::<CQ>(p, &s),
        "sop" => sop::<C64>(p, &s),
        "cse" => cse(p, c, &s),
        "density" => density(p, c, &s),
        other => Err(SchemaError::new("$.command", format!("unknown command '{other}'")).into()),
    }
}

// ---------------------------------------------------------------------------
// Inputs

fn terms_jet<S: Scalar>(t: &TermsJson, min_bound: u32) -> Result<Jet<S>, Failure> {
    let jet = t.to_jet::<S>()?;
    // Polynomials without an explicit bound are exact germs; widen as needed.
    Ok(if t.degree_bound.is_none() && jet.degree_bound() < min_bound { jet.with_degree_bound(min_bound) } else { jet })
}

fn f_jet<S: Scalar>(p: &ProblemSpec, min_bound: u32) -> Result<Jet<S>, Failure> {
    terms_jet(ProblemSpec::require(&p.f, "f")?, min_bound)
}

fn gens<S: Scalar>(p: &ProblemSpec) -> Result<IdealPresentation<S>, Failure> {
    let list = ProblemSpec::require(&p.ideal, "ideal")?;
    let jets = list.iter().map(|t| t.to_jet::<S>()).collect::<berglab::Result<Vec<_>>>()?;
    Ok(IdealPresentation::new(p.n, jets)?)
}

fn domain(p: &ProblemSpec, degree: u32) -> Result<Domain, Failure> {
    Ok(ProblemSpec::require(&p.domain, "domain")?.build(p.n, p.degree.unwrap_or(degree))?)
}

fn diagonal(p: &ProblemSpec) -> Result<DiagonalDomain, Failure> {
    Ok(ProblemSpec::require(&p.domain, "domain")?.diagonal(p.n)?)
}

fn weight(p: &ProblemSpec) -> Result<ToricWeight, Failure> {
    Ok(ToricWeight::new(ProblemSpec::require(&p.weight, "weight")?.clone())?)
}

fn k_range(p: &ProblemSpec, c: &Common) -> Result<(u32, u32), Failure> {
    match (c.k, p.k_range) {
        (Some(k), _) => Ok(k),
        (None, Some([a, b])) => Ok((a, b)),
        _ => Err(SchemaError::new("$.k_range", "missing; pass --k A..B or set k_range").into()),
    }
}

fn relative_gap(a: &Quantity, b: &Quantity) -> f64 {
    match (a.is_infinite(), b.is_infinite()) {
        (true, true) => 0.0,
        (false, false) => (a.value - b.value).abs() / a.value.abs().max(b.value.abs()).max(f64::MIN_POSITIVE),
        _ => f64::INFINITY,
    }
}

/// Exact equality when both sides carry exact values, otherwise a relative gap.
fn agree(a: &Quantity, b: &Quantity, tol: f64) -> bool {
    match (&a.exact, &b.exact) {
        (Some(x), Some(y)) => x == y,
        _ => relative_gap(a, b) <= tol,
    }
}

// ---------------------------------------------------------------------------
// Commands

fn equiv<S: Scalar>(p: &ProblemSpec, s: &Settings) -> Result<Report, Failure> {
    let g = gens::<S>(p)?;
    let level = p.level.unwrap_or(g.max_degree() + 1);
    let f = f_jet::<S>(p, level - 1)?;
    let d = domain(p, level - 1)?;
    let j = jet_ideal(&g, level)?;
    let c = minimal_l2(&d, &f, &j)?;
    let b = b_circle(&d, &f, &j)?;
    let gap = relative_gap(&c.value, &b.value);
    let ok = agree(&c.value, &b.value, s.tol(DEFAULT_TOL));
    let text = format!("level {level}\nC  = {}\nB° = {}\ngap {gap:e}\n", c.value, b.value);
    let json = json!({
        "command": "equiv",
        "mode": mode_name(s.mode),
        "level": level,
        "c": c.to_json(),
        "b": b.value,
        "b_at_maximizer": b.ratio_at_maximizer,
        "maximizer": b.maximizer.as_ref().map(TermsJson::from_functional),
        "gap": gap,
        "passed": ok,
    });
    Ok(Report { text, files: vec![("equiv.json".into(), to_json(&json))], ok })
}

fn ladder<S: Scalar>(p: &ProblemSpec, c: &Common, s: &Settings) -> Result<Report, Failure> {
    let (lo, hi) = k_range(p, c)?;
    let g = gens::<S>(p)?;
    let f = f_jet::<S>(p, hi - 1)?;
    let d = domain(p, hi - 1)?;
    let l = krull_ladder(&d, &f, &g, lo..=hi)?;
    let tol = s.tol(DEFAULT_TOL);
    let gaps_ok = l.rows.iter().all(|r| agree(&r.c, &r.b, tol));
    let ok = gaps_ok && l.nondecreasing;
    let csv = l.to_csv();
    let mut text = csv.clone();
    let _ = writeln!(text, "nondecreasing {}, stabilized at {:?}", l.nondecreasing, l.stabilized_at);
    let json = json!({ "command": "ladder", "mode": mode_name(s.mode), "ladder": l, "passed": ok });
    Ok(Report { text, files: vec![("ladder.csv".into(), csv), ("ladder.json".into(), to_json(&json))], ok })
}

fn exhaust<S: Scalar>(p: &ProblemSpec, s: &Settings) -> Result<Report, Failure> {
    let g = gens::<S>(p)?;
    let level = p.level.unwrap_or(g.max_degree() + 1);
    let f = f_jet::<S>(p, level - 1)?;
    let degree = p.degree.unwrap_or(level - 1);
    let descriptors = ProblemSpec::require(&p.exhaustion, "exhaustion")?;
    let domains = descriptors.iter().map(|d| d.build(p.n, degree)).collect::<berglab::Result<Vec<_>>>()?;
    let seq = ExhaustionSequence::new(domains)?;
    let limit_domain = p.limit_domain.as_ref().map(|d| d.build(p.n, degree)).transpose()?;
    let e = exhaustion_limit(&seq, &f, &jet_ideal(&g, level)?, limit_domain.as_ref())?;
    let tol = s.tol(DEFAULT_TOL);
    // C grows with the domain, so every C_i is bounded by the limit.
    let bounded = match &e.limit {
        Some(lim) if !lim.is_infinite() => e.rows.iter().all(|r| r.c.value <= lim.value * (1.0 + tol)),
        _ => true,
    };
    let ok = e.nondecreasing && bounded;
    let csv = e.to_csv();
    let mut text = csv.clone();
    let limit_gap = match (&e.limit, e.rows.last()) {
        (Some(lim), Some(last)) => Some(relative_gap(lim, &last.c)),
        _ => None,
    };
    let _ = writeln!(text, "nondecreasing {}, limit {:?}, last gap {:?}", e.nondecreasing, e.limit.as_ref().map(|q| q.to_string()), limit_gap);
    let json = json!({ "command": "exhaust", "mode": mode_name(s.mode), "exhaustion": e, "limit_gap": limit_gap, "passed": ok });
    Ok(Report { text, files: vec![("exhaustion.csv".into(), csv), ("exhaustion.json".into(), to_json(&json))], ok })
}

fn kernel<S: Scalar>(p: &ProblemSpec, s: &Settings) -> Result<Report, Failure> {
    let xi: Functional<S> = ProblemSpec::require(&p.xi, "xi")?.to_functional()?;
    let top = xi.top_index().map_or(0, |a| a.degree());
    let d = domain(p, top)?;
    let k = kernel_at_origin(&d, &xi)?;
    let t = riesz_representative(&d, &xi)?;
    let text = format!("K = {k}\nT(xi): {} terms, scaled by pi^{}\n", t.jet.terms().count(), t.pi_power);
    let json = json!({
        "command": "kernel",
        "mode": mode_name(s.mode),
        "kernel": k,
        "representative": TermsJson::from_jet(&t.jet),
        "representative_pi_power": t.pi_power,
    });
    Ok(Report { text, files: vec![("kernel.json".into(), to_json(&json))], ok: true })
}

fn basis(p: &ProblemSpec, s: &Settings) -> Result<Report, Failure> {
    let degree = *ProblemSpec::require(&p.degree, "degree")?;
    let d = domain(p, degree)?;
    let b = triangular_basis(&d, degree)?;
    let ws = WorkingSpace::<C64>::new(&d, degree)?;
    let tol = s.tol(1e-10);
    let mut csv = String::from("alpha,residual,top_support,first_coefficient\n");
    let mut ok = true;
    let mut members = Vec::new();
    for (a, alpha) in b.indices().iter().enumerate() {
        let sigma = ws.dense_jet(&b.sigma()[a]);
        let t = ws.riesz_vector(&ws.dense_functional(&b.xi()[a])?, true)?;
        let scale = sigma.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let residual = t.iter().zip(&sigma).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale;
        let top = b.xi()[a].top_index() == Some(alpha);
        let low = b.sigma()[a].leading_index() == Some(alpha);
        ok &= residual <= tol && top && low;
        let label: Vec<String> = alpha.components().iter().map(|x| x.to_string()).collect();
        let _ = writeln!(csv, "{},{residual:.6e},{top},{low}", label.join(" "));
        members.push(json!({
            "alpha": alpha.components(),
            "sigma": TermsJson::from_jet(&b.sigma()[a]),
            "xi": TermsJson::from_functional(&b.xi()[a]),
            "residual": residual,
        }));
    }
    let mut text = csv.clone();
    let _ = writeln!(text, "pivot ratio {:e}", b.condition());
    let json = json!({ "command": "basis", "degree": degree, "members": members, "pivot_ratio": b.condition(), "passed": ok });
    Ok(Report { text, files: vec![("basis.csv".into(), csv), ("basis.json".into(), to_json(&json))], ok })
}

fn sop<S: Scalar>(p: &ProblemSpec, s: &Settings) -> Result<Report, Failure> {
    let f = f_jet::<S>(p, 0)?;
    let r = effectiveness_report(&diagonal(p)?, &f, &weight(p)?)?;
    let ok = r.sound && r.equivalence_gap <= s.tol(DEFAULT_TOL);
    let json = json!({ "command": "sop", "mode": mode_name(s.mode), "report": r, "passed": ok });
    Ok(Report { text: r.to_table(), files: vec![("sop.json".into(), to_json(&json))], ok })
}

fn cse(p: &ProblemSpec, c: &Common, s: &Settings) -> Result<Report, Failure> {
    let grid = match (&c.t, &p.t_grid) {
        (Some(t), _) => t.0.clone(),
        (None, Some(t)) => t.clone(),
        _ => return Err(SchemaError::new("$.t_grid", "missing; pass --t A:B:STEP or set t_grid").into()),
    };
    let xi: Functional<C64> = ProblemSpec::require(&p.xi, "xi")?.to_functional()?;
    let phi = weight(p)?;
    let combinatorial = xi_cse_combinatorial(&xi, &phi)?;
    let lim = xi_cse_limit(&xi, &phi, &diagonal(p)?, &grid)?;
    let target = berglab::scalar::PiRational::new(0, combinatorial).to_f64();
    let slope_gap = (lim.slope - target).abs() / target.abs().max(1.0);
    let ok = lim.convex && slope_gap <= s.tol(DEFAULT_CSE_TOL);
    let mut csv = String::from("t,log_K\n");
    for r in &lim.rows {
        let _ = writeln!(csv, "{:e},{:.17e}", r.t, r.log_kernel);
    }
    let min_second = lim.second_differences.iter().copied().fold(f64::INFINITY, f64::min);
    let text = format!(
        "{csv}slope {:.12}\ncombinatorial {target}\nslope gap {slope_gap:e}\nmin second difference {min_second:e}\nconvex {}\n",
        lim.slope, lim.convex
    );
    let json = json!({
        "command": "cse",
        "combinatorial": target,
        "limit": lim,
        "slope_gap": slope_gap,
        "passed": ok,
    });
    Ok(Report { text, files: vec![("cse.csv".into(), csv), ("cse.json".into(), to_json(&json))], ok })
}

fn density(p: &ProblemSpec, c: &Common, _s: &Settings) -> Result<Report, Failure> {
    let (lo, hi) = k_range(p, c)?;
    let f = f_jet::<C64>(p, 0)?;
    let g = gens::<C64>(p)?;
    let d = domain(p, hi)?;
    let r = density_sequence(&d, &f, &g, lo..=hi)?;
    let scale = r.norm * r.norm;
    let ok = r.rows.iter().all(|row| row.distance.is_finite() && row.inner_re >= -1e-12 * scale && row.inner_im.abs() <= 1e-10 * scale);
    let mut csv = String::from("k,distance,inner_re,inner_im\n");
    for row in &r.rows {
        let _ = writeln!(csv, "{},{:.17e},{:.17e},{:.17e}", row.k, row.distance, row.inner_re, row.inner_im);
    }
    let text = format!("{csv}norm {:.17e}\n", r.norm);
    let json = json!({ "command": "density", "density": r, "passed": ok });
    Ok(Report { text, files: vec![("density.csv".into(), csv), ("density.json".into(), to_json(&json))], ok })
}

pub fn suite(name: &str, seed: Option<u64>, count: Option<usize>) -> Result<Report, Failure> {
    if !SUITES.contains(&name) {
        return Err(SchemaError::new("suite", format!("unknown suite '{name}'; expected one of {}", SUITES.join(", "))).into());
    }
    let seed = seed.unwrap_or(0);
    let summary = suites::run_suite(name, seed, count.unwrap_or_else(|| suites::default_count(name)))?;
    let ok = summary.all_passed();
    let mut csv = String::from("check,passed,gap\n");
    for c in &summary.checks {
        let _ = writeln!(csv, "\"{}\",{},{:e}", c.name.replace('"', "'"), c.passed, c.gap);
    }
    let json = serde_json::to_value(&summary).expect("serializable");
    Ok(Report {
        text: summary.to_text(),
        files: vec![(format!("suite_{name}.json"), to_json(&json)), (format!("suite_{name}.csv"), csv)],
        ok,
    })
}
