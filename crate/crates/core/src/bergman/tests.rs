use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::*;
use crate::domains::{DiagonalDomain, Domain, ExhaustionSequence, MomentDomain, ToricWeight};
use crate::ideals::{jet_ideal, IdealPresentation};
use crate::jets::{Functional, Jet, MultiIndex};
use crate::linalg::Mat;
use crate::scalar::{PiRational, C64, CQ};

fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec())
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn cq(p: i64, d: i64) -> CQ {
    CQ::new(q(p, d), BigRational::zero())
}

fn cf(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn poly(n: usize, terms: &[(&[u32], i64)]) -> Jet<CQ> {
    Jet::polynomial(n, terms.iter().map(|(a, c)| (mi(a), cq(*c, 1)))).unwrap()
}

fn gens(n: usize, polys: &[&[(&[u32], i64)]]) -> IdealPresentation<CQ> {
    IdealPresentation::new(n, polys.iter().map(|p| poly(n, p)).collect()).unwrap()
}

fn disc() -> Domain {
    DiagonalDomain::unit_disc().into()
}

fn bidisc() -> Domain {
    DiagonalDomain::unit_polydisc(2).into()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn riesz_on_the_disc() {
    let t = riesz_representative(&disc(), &Functional::<CQ>::delta(mi(&[0]))).unwrap();
    assert_eq!(t.pi_power, -1);
    assert_eq!(t.jet.coeff(&mi(&[0])), cq(1, 1));
    let t = riesz_representative(&disc(), &Functional::<CQ>::delta(mi(&[1]))).unwrap();
    assert_eq!(t.jet.coeff(&mi(&[1])), cq(2, 1));
    assert!(t.jet.coeff(&mi(&[0])).is_zero());
    // conjugate-linear
    let xi = Functional::from_entries(1, vec![(mi(&[1]), C64::new(0.0, 3.0))]).unwrap();
    let t = riesz_representative(&disc(), &xi).unwrap();
    assert!((t.jet.coeff(&mi(&[1])) - C64::new(0.0, -6.0 / PI)).norm() < 1e-12);
}

#[test]
fn kernels_at_the_origin() {
    let k = kernel_at_origin(&disc(), &Functional::<CQ>::delta(mi(&[0]))).unwrap();
    assert_eq!(k.exact, Some(PiRational::new(-1, q(1, 1))));
    let xi = Functional::from_entries(1, vec![(mi(&[0]), cq(1, 1)), (mi(&[1]), cq(1, 1))]).unwrap();
    let k = kernel_at_origin(&disc(), &xi).unwrap();
    assert_eq!(k.exact, Some(PiRational::new(-1, q(3, 1))));
    assert!(close(k.value, 3.0 / PI, 1e-15));

    let phi = ToricWeight::new(vec![1.0]).unwrap();
    let weighted: Domain = DiagonalDomain::unit_disc().with_toric_weight(&phi, 1.0).unwrap().into();
    let k = kernel_at_origin(&weighted, &Functional::<CQ>::delta(mi(&[1]))).unwrap();
    assert_eq!(k.exact, Some(PiRational::new(-1, q(1, 1))));
    let err = kernel_at_origin(&weighted, &Functional::<CQ>::delta(mi(&[0])));
    assert!(matches!(err, Err(crate::Error::Unbounded(_))));
}

#[test]
fn kernel_float_matches_exact() {
    let ball: Domain = DiagonalDomain::ball(2, 1.0).unwrap().into();
    let xi = Functional::from_entries(2, vec![(mi(&[1, 0]), cq(1, 1)), (mi(&[1, 1]), cq(-2, 1))]).unwrap();
    let exact = kernel_at_origin(&ball, &xi).unwrap();
    let float = kernel_at_origin(&ball, &xi.to_float()).unwrap();
    assert!(close(float.value, exact.value, 1e-10));
}

#[test]
fn disc_projection() {
    let j = jet_ideal(&gens(1, &[&[(&[2], 1)]]), 2).unwrap();
    let f = poly(1, &[(&[1], 1)]);
    let r = minimal_l2(&disc(), &f, &j).unwrap();
    assert_eq!(r.value.exact, Some(PiRational::new(1, q(1, 2))));
    assert_eq!(r.minimizer.as_ref().unwrap(), &f);
    let eta = r.eta.unwrap();
    assert_eq!(eta.entries().count(), 1);
    assert_eq!(eta.entry(&mi(&[1])), cq(1, 2));
    assert_eq!(r.eta_pi_power, 1);
    let b = b_circle(&disc(), &f, &j).unwrap();
    assert_eq!(b.value, r.value);
    let m = b.maximizer.unwrap();
    assert_eq!(m.entries().count(), 1);
    assert!(!m.entry(&mi(&[1])).is_zero());
}

#[test]
fn bidisc_projection() {
    let j = jet_ideal(&gens(2, &[&[(&[1, 0], 1)]]), 3).unwrap();
    let f = poly(2, &[(&[1, 0], 1), (&[0, 1], 1)]).with_degree_bound(2);
    let r = minimal_l2(&bidisc(), &f, &j).unwrap();
    assert_eq!(r.value.exact, Some(PiRational::new(2, q(1, 2))));
    assert_eq!(r.minimizer.unwrap(), poly(2, &[(&[0, 1], 1)]).with_degree_bound(2));
    let eta = r.eta.unwrap();
    assert_eq!(eta.entries().count(), 1);
    assert_eq!(eta.entry(&mi(&[0, 1])), cq(1, 2));
    assert_eq!(r.eta_pi_power, 2);
    assert_eq!(b_circle(&bidisc(), &f, &j).unwrap().value, r.value);
}

#[test]
fn members_of_the_ideal_cost_nothing() {
    let j = jet_ideal(&gens(2, &[&[(&[1, 0], 1), (&[0, 2], -1)]]), 3).unwrap();
    let f = poly(2, &[(&[1, 0], 1), (&[0, 2], -1)]);
    let r = minimal_l2(&bidisc(), &f, &j).unwrap();
    assert!(r.value.exact.unwrap().is_zero());
    assert_eq!(r.eta.unwrap(), Functional::delta(mi(&[0, 0])));
    assert_eq!(b_circle(&bidisc(), &f, &j).unwrap().value.value, 0.0);
}

#[test]
fn extremal_functional_consistency() {
    let j = jet_ideal(&gens(2, &[&[(&[1, 0], 1), (&[0, 2], -1)]]), 3).unwrap();
    let f = poly(2, &[(&[1, 0], 1)]).with_degree_bound(2);
    let r = minimal_l2(&bidisc(), &f, &j).unwrap();
    let c = r.value.exact.clone().unwrap();
    let eta = r.eta.unwrap();
    assert!(eta.ord().unwrap() < 3);
    for s in j.basis() {
        assert!(eta.pair(&s).unwrap().is_zero());
    }
    // η carries π^p; K_η scales by π^{2p}·π^{−p}.
    let k = kernel_at_origin(&bidisc(), &eta).unwrap().exact.unwrap();
    assert_eq!(k.rational, c.rational);
    assert_eq!(k.pi_power + 2 * r.eta_pi_power, c.pi_power);
    assert_eq!(eta.pair(&f).unwrap(), CQ::new(c.rational.clone(), BigRational::zero()));
    assert_eq!(c, PiRational::new(2, q(1, 5)));
    assert!(r.diagnostics.annihilation_defect == 0.0);
}

#[test]
fn sandwich_bounds_each_annihilator() {
    let j = jet_ideal(&gens(2, &[&[(&[1, 0], 1), (&[0, 2], -1)]]), 4).unwrap();
    let f = poly(2, &[(&[1, 0], 1), (&[0, 1], 2), (&[1, 1], 1)]).with_degree_bound(3);
    let c = minimal_l2(&bidisc(), &f, &j).unwrap().value.value;
    let b = b_circle(&bidisc(), &f, &j).unwrap();
    assert!(close(b.value.value, c, 1e-15));
    assert!(close(b.ratio_at_maximizer.unwrap().value, c, 1e-12));
    assert!(close(b.eigen_value.unwrap(), c, 1e-9));
    for r in b.basis_ratios {
        assert!(r <= c * (1.0 + 1e-12));
    }
}

#[test]
fn ladder_on_the_cusp() {
    let g = gens(2, &[&[(&[1, 0], 1), (&[0, 2], -1)]]);
    let f = poly(2, &[(&[1, 0], 1)]);
    let l = krull_ladder(&bidisc(), &f, &g, 2..=6).unwrap();
    let want = PiRational::new(2, q(1, 5));
    assert!(l.rows[0].c.exact.as_ref().unwrap().is_zero());
    for row in &l.rows[1..] {
        assert_eq!(row.c.exact.as_ref(), Some(&want));
        assert_eq!(row.b, row.c);
        assert_eq!(row.gap, 0.0);
    }
    assert!(l.nondecreasing);
    assert_eq!(l.stabilized_at, Some(3));
    assert_eq!(l.limit.as_ref().unwrap().exact, Some(want));
    let csv = l.to_csv();
    assert!(csv.starts_with("k,C_k,B_k,gap,C_k_exact\n2,"));
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn disc_ladder_is_constant() {
    let g = gens(1, &[&[(&[2], 1)]]);
    let f = poly(1, &[(&[1], 1)]);
    let l = krull_ladder(&disc(), &f.to_float(), &g.to_float(), 2..=5).unwrap();
    for row in &l.rows {
        assert!(close(row.c.value, PI / 2.0, 1e-12));
        assert!(row.gap < 1e-12);
    }
    assert_eq!(l.stabilized_at, Some(2));
}

#[test]
fn stabilization_rule() {
    assert_eq!(stabilization_index(&[0.0, 1.0, 1.0, 1.0]), Some(1));
    assert_eq!(stabilization_index(&[0.0, 1.0, 1.0]), None);
    assert_eq!(stabilization_index(&[1.0, 1.0 + 1e-12, 1.0]), Some(0));
    assert!(is_nondecreasing(&[0.0, 1.0, 1.0, f64::INFINITY]));
    assert!(!is_nondecreasing(&[1.0, 0.5]));
}

#[test]
fn exhaustion_by_discs() {
    let domains: Vec<Domain> =
        (1..=8).map(|i| DiagonalDomain::polydisc(vec![1.0 - 0.5f64.powi(i)]).unwrap().into()).collect();
    let seq = ExhaustionSequence::new(domains).unwrap();
    let j = jet_ideal(&gens(1, &[&[(&[2], 1)]]).to_float(), 2).unwrap();
    let f = poly(1, &[(&[1], 1)]).to_float();
    let e = exhaustion_limit(&seq, &f, &j, Some(&disc())).unwrap();
    assert!(e.nondecreasing);
    for (i, row) in e.rows.iter().enumerate() {
        let r = 1.0 - 0.5f64.powi(i as i32 + 1);
        assert!(close(row.c.value, PI * r.powi(4) / 2.0, 1e-12));
    }
    assert!(close(e.limit.as_ref().unwrap().value, PI / 2.0, 1e-14));
    assert!(e.to_csv().starts_with("i,C_i,C_i_exact\n1,"));
}

#[test]
fn exhaustion_by_bidiscs() {
    let domains: Vec<Domain> =
        (1..=5).map(|i| DiagonalDomain::polydisc(vec![1.0 - 0.5f64.powi(i), 1.0]).unwrap().into()).collect();
    let seq = ExhaustionSequence::new(domains).unwrap();
    let j = jet_ideal(&gens(2, &[&[(&[1, 0], 1)]]).to_float(), 2).unwrap();
    let f = poly(2, &[(&[0, 1], 1)]).to_float();
    let e = exhaustion_limit(&seq, &f, &j, Some(&bidisc())).unwrap();
    for (i, row) in e.rows.iter().enumerate() {
        let r = 1.0 - 0.5f64.powi(i as i32 + 1);
        assert!(close(row.c.value, PI * r * r * PI / 2.0, 1e-12));
    }
    assert!(close(e.limit.unwrap().value, PI * PI / 2.0, 1e-12));
}

#[test]
fn triangular_basis_of_the_disc() {
    let b = triangular_basis(&disc(), 2).unwrap();
    for k in 0..3u32 {
        let s = &b.sigma()[k as usize];
        let want = ((k as f64 + 1.0) / PI).sqrt();
        assert_eq!(s.terms().count(), 1);
        assert!((s.coeff(&mi(&[k])) - cf(want)).norm() < 1e-12);
        let x = &b.xi()[k as usize];
        assert!((x.entry(&mi(&[k])) - cf(1.0 / want)).norm() < 1e-12);
    }
    let phi = ToricWeight::new(vec![1.0]).unwrap();
    let weighted: Domain = DiagonalDomain::unit_disc().with_toric_weight(&phi, 1.0).unwrap().into();
    let b = triangular_basis(&weighted, 2).unwrap();
    assert_eq!(b.indices(), &[mi(&[1]), mi(&[2])]);
}

fn random_moment_domain(seed: u64, n: usize, degree: u32) -> Domain {
    use rand::{Rng, SeedableRng};
    let size = crate::jets::jet_space_dim(n, degree);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut a = Mat::<C64>::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut g = a.conj_transpose().mul(&a).unwrap();
    for i in 0..size {
        g[(i, i)] += cf(0.5);
    }
    MomentDomain::from_matrix(n, degree, g).unwrap().into()
}

#[test]
fn triangular_basis_structure_on_moments() {
    let d = random_moment_domain(7, 2, 3);
    let b = triangular_basis(&d, 3).unwrap();
    let ws = WorkingSpace::<C64>::new(&d, 3).unwrap();
    let vecs: Vec<Vec<C64>> = b.sigma().iter().map(|s| ws.dense_jet(s)).collect();
    for (i, a) in vecs.iter().enumerate() {
        for (j, c) in vecs.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((ws.inner(a, c) - cf(want)).norm() < 1e-9, "gram ({i},{j})");
        }
    }
    for (k, alpha) in b.indices().iter().enumerate() {
        assert_eq!(b.sigma()[k].leading_index(), Some(alpha));
        assert_eq!(b.xi()[k].top_index(), Some(alpha));
        let t = ws.riesz_vector(&ws.dense_functional(&b.xi()[k]).unwrap(), true).unwrap();
        for (x, y) in t.iter().zip(&vecs[k]) {
            assert!((x - y).norm() < 1e-8);
        }
    }
    // Parseval against the direct kernel.
    let xi = Functional::from_entries(2, vec![(mi(&[0, 0]), cf(1.0)), (mi(&[1, 1]), C64::new(0.5, -2.0))]).unwrap();
    let direct = kernel_at_origin(&d, &xi).unwrap().value;
    assert!(close(b.parseval_kernel(&xi).unwrap(), direct, 1e-9));
}

#[test]
fn b_circle_matches_projection_on_moments() {
    for seed in 0..5 {
        let d = random_moment_domain(100 + seed, 2, 4);
        let g = IdealPresentation::new(
            2,
            vec![Jet::polynomial(2, vec![(mi(&[1, 0]), cf(1.0)), (mi(&[0, 2]), C64::new(0.3, -0.7))]).unwrap()],
        )
        .unwrap();
        let j = jet_ideal(&g, 3).unwrap();
        let f = Jet::polynomial(2, vec![(mi(&[1, 0]), cf(1.0)), (mi(&[0, 1]), C64::new(-0.2, 1.1))]).unwrap();
        let f = f.with_degree_bound(2);
        let c = minimal_l2(&d, &f, &j).unwrap();
        let b = b_circle(&d, &f, &j).unwrap();
        assert!(close(b.value.value, c.value.value, 1e-9));
        assert!(close(b.eigen_value.unwrap(), c.value.value, 1e-9));
        assert!(c.diagnostics.annihilation_defect < 1e-10);
        assert!(c.diagnostics.pairing_defect < 1e-10);
        let eta = c.eta.unwrap();
        let k = kernel_at_origin(&d, &eta).unwrap().value;
        assert!(close(k, c.value.value, 1e-9));
    }
}

#[test]
fn density_on_the_disc() {
    let g = gens(1, &[&[(&[2], 1)]]);
    let f = poly(1, &[(&[1], 1)]);
    let d = density_sequence(&disc(), &f, &g, 2..=4).unwrap();
    assert!(close(d.norm, (PI / 2.0).sqrt(), 1e-12));
    for row in d.rows {
        assert!(row.distance < 1e-12);
    }
}

#[test]
fn density_on_the_bidisc() {
    let g = gens(2, &[&[(&[1, 0], 1)]]);
    let f = Jet::polynomial(2, vec![(mi(&[0, 1]), C64::new(0.6, 0.8))]).unwrap();
    let d = density_sequence(&bidisc(), &f, &g.to_float(), 1..=4).unwrap();
    let dist: Vec<f64> = d.rows.iter().map(|r| r.distance).collect();
    assert!(dist.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(dist[0] > 0.1);
    assert!(dist[2] < 1e-12 && dist[3] < 1e-12);
    let rotated = f.scale(&C64::from_polar(1.0, 0.9));
    let d2 = density_sequence(&bidisc(), &rotated, &g.to_float(), 1..=4).unwrap();
    for (a, b) in d.rows.iter().zip(&d2.rows) {
        assert!((a.distance - b.distance).abs() < 1e-12);
    }
}

#[test]
fn density_rejects_bad_input() {
    let g = gens(1, &[&[(&[2], 1)]]);
    assert!(matches!(density_sequence(&disc(), &Jet::<CQ>::zero(1, 1), &g, 2..=3), Err(crate::Error::ZeroJet)));
    let f = poly(1, &[(&[1], 1), (&[2], 1)]);
    assert!(matches!(density_sequence(&disc(), &f, &g, 2..=3), Err(crate::Error::Hypothesis(_))));
}
