use berglab::bergman::{b_circle, kernel_at_origin, krull_ladder, minimal_l2, riesz_representative, triangular_basis};
use berglab::domains::{DiagonalDomain, Domain, MomentDomain, ToricWeight};
use berglab::ideals::{jet_ideal, multiplier_ideal_exact, IdealPresentation};
use berglab::jets::{compare, jet_multiply, monomials_up_to};
use berglab::linalg::Mat;
use berglab::scalar::{C64, CQ};
use berglab::sop::{jumping_number, xi_cse_combinatorial};
use berglab::{Functional, Jet, MultiIndex, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::cmp::Ordering;

fn cq(re: i64, im: i64) -> CQ {
    CQ::new(BigRational::from_integer(BigInt::from(re)), BigRational::from_integer(BigInt::from(im)))
}

fn index(n: usize, max: u32) -> impl Strategy<Value = MultiIndex> {
    proptest::collection::vec(0..=max, n).prop_map(MultiIndex::new)
}

fn coeff() -> impl Strategy<Value = CQ> {
    (-3i64..=3, -2i64..=2).prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0).prop_map(|(a, b)| cq(a, b))
}

/// Terms of total degree at most `d`.
fn terms(n: usize, d: u32, lo: u32, count: usize) -> impl Strategy<Value = Vec<(MultiIndex, CQ)>> {
    let pool: Vec<MultiIndex> = monomials_up_to(n, d).into_iter().filter(|a| a.degree() >= lo).collect();
    let len = pool.len();
    proptest::collection::vec((0..len, coeff()), 1..=count)
        .prop_map(move |v| v.into_iter().map(|(i, c)| (pool[i].clone(), c)).collect())
}

fn jet(n: usize, d: u32) -> impl Strategy<Value = Jet<CQ>> {
    terms(n, d, 0, 4).prop_map(move |t| Jet::from_terms(n, d, t).unwrap())
}

fn functional(n: usize, d: u32) -> impl Strategy<Value = Functional<CQ>> {
    terms(n, d, 0, 4)
        .prop_map(move |t| Functional::from_entries(n, t).unwrap())
        .prop_filter("nonzero", |x| !x.is_zero())
}

fn ideal(n: usize, d: u32) -> impl Strategy<Value = IdealPresentation<CQ>> {
    proptest::collection::vec(terms(n, d, 1, 3), 1..=2).prop_filter_map("nonzero generators", move |gs| {
        let gens: Vec<Jet<CQ>> = gs.into_iter().map(|t| Jet::polynomial(n, t).unwrap()).collect();
        IdealPresentation::new(n, gens).ok()
    })
}

fn polydisc(n: usize) -> impl Strategy<Value = Domain> {
    proptest::collection::vec(prop_oneof![Just(1.0), Just(0.5), Just(2.0), Just(1.5)], n)
        .prop_map(|r| DiagonalDomain::polydisc(r).unwrap().into())
}

fn diag_problem() -> impl Strategy<Value = (Domain, Jet<CQ>, IdealPresentation<CQ>, u32)> {
    (1usize..=2, 2u32..=4).prop_flat_map(|(n, k)| (polydisc(n), jet(n, k - 1), ideal(n, k - 1), Just(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn order_is_total_and_graded(a in index(3, 4), b in index(3, 4)) {
        let ab = compare(&a, &b).unwrap();
        prop_assert_eq!(ab, compare(&b, &a).unwrap().reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if a.degree() < b.degree() {
            prop_assert_eq!(ab, Ordering::Less);
        }
    }

    #[test]
    fn enumeration_is_sorted(n in 1usize..=3, d in 0u32..=4) {
        let all = monomials_up_to(n, d);
        prop_assert!(all.windows(2).all(|w| compare(&w[0], &w[1]).unwrap() == Ordering::Less));
    }

    #[test]
    fn pairing_is_bilinear(xi in functional(2, 3), eta in functional(2, 3), f in jet(2, 3), g in jet(2, 3)) {
        let lhs = xi.pair(&f.add(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, xi.pair(&f).unwrap() + xi.pair(&g).unwrap());
        if let Ok(sum) = xi.add(&eta) {
            prop_assert_eq!(sum.pair(&f).unwrap(), xi.pair(&f).unwrap() + eta.pair(&f).unwrap());
        }
    }

    #[test]
    fn riesz_reproduces_pairing((d, xi, f) in (1usize..=2).prop_flat_map(|n| (polydisc(n), functional(n, 3), jet(n, 3)))) {
        // ⟨f, T ξ⟩ = Σ_α f_α conj(t_α) c_α with c_α = ∥z^α∥².
        let t = riesz_representative(&d, &xi).unwrap();
        let Domain::Diagonal(dd) = &d else { unreachable!() };
        let mut total = CQ::zero();
        for (alpha, c) in f.terms() {
            let norm = dd.exact_norm(alpha).unwrap().unwrap();
            total = total + c.clone() * t.jet.coeff(alpha).conj() * CQ::from_rational(&norm);
        }
        prop_assert_eq!(total, xi.pair(&f).unwrap());
    }

    #[test]
    fn riesz_is_conjugate_linear(xi in functional(1, 3), re in -3i64..=3, im in 1i64..=3) {
        let d: Domain = DiagonalDomain::unit_disc().into();
        let lambda = cq(re, im);
        let t = riesz_representative(&d, &xi).unwrap().jet;
        let ts = riesz_representative(&d, &xi.scale(&lambda)).unwrap().jet;
        prop_assert_eq!(ts, t.scale(&lambda.conj()));
    }

    #[test]
    fn b_circle_equals_minimal_l2((d, f, g, k) in diag_problem()) {
        let j = jet_ideal(&g, k).unwrap();
        let c = minimal_l2(&d, &f, &j).unwrap();
        let b = b_circle(&d, &f, &j).unwrap();
        prop_assert_eq!(&c.value, &b.value);
        // C = 0 exactly when F is in the ideal.
        prop_assert_eq!(c.value.exact.as_ref().unwrap().is_zero(), j.contains(&f).unwrap());
        // Extremal consistency: η annihilates the ideal and η·F = C / π^p.
        let eta = c.eta.unwrap();
        for s in j.basis() {
            prop_assert!(eta.pair(&s).unwrap().is_zero());
        }
        if !j.contains(&f).unwrap() {
            let scaled = c.scaled_value.clone().unwrap();
            prop_assert_eq!(eta.pair(&f).unwrap(), scaled);
            let k_eta = kernel_at_origin(&d, &eta).unwrap().exact.unwrap();
            prop_assert_eq!(&k_eta.rational, &c.value.exact.as_ref().unwrap().rational);
        }
        // Sandwich: no single annihilator beats C.
        for r in b.basis_ratios {
            prop_assert!(r <= c.value.value * (1.0 + 1e-12) + 1e-300);
        }
    }

    #[test]
    fn ladder_is_nondecreasing((d, f, g, _k) in diag_problem()) {
        let top = f.degree_bound() + 1;
        let l = krull_ladder(&d, &f, &g, 1..=top).unwrap();
        prop_assert!(l.nondecreasing);
        for r in &l.rows {
            prop_assert_eq!(&r.b, &r.c);
        }
    }

    #[test]
    fn jet_ideals_are_closed_under_coordinates(g in ideal(2, 2), k in 2u32..=4, i in 0usize..2) {
        let j = jet_ideal(&g, k).unwrap();
        let zi = Jet::<CQ>::monomial(MultiIndex::unit(2, i), 1);
        for s in j.basis() {
            let shifted = jet_multiply(&s, &zi, k - 1).unwrap();
            prop_assert!(j.contains(&shifted).unwrap());
        }
    }

    #[test]
    fn multiplier_ideals_shrink(a in proptest::collection::vec(0u32..=4, 2), c in 0i64..=12, dc in 0i64..=6) {
        prop_assume!(a.iter().any(|x| *x > 0));
        let phi = ToricWeight::new(a.iter().map(|x| *x as f64 / 2.0).collect()).unwrap();
        let lo = BigRational::new(BigInt::from(c), BigInt::from(4));
        let hi = BigRational::new(BigInt::from(c + dc), BigInt::from(4));
        let big = multiplier_ideal_exact(&phi, &lo).unwrap();
        let small = multiplier_ideal_exact(&phi, &hi).unwrap();
        prop_assert!(small.is_subset_of(&big));
    }

    #[test]
    fn jumping_number_bounds_every_cse(f in jet(2, 3), xi in functional(2, 3), a in proptest::collection::vec(0u32..=4, 2)) {
        prop_assume!(a.iter().any(|x| *x > 0));
        prop_assume!(!f.is_zero());
        let phi = ToricWeight::new(a.iter().map(|x| *x as f64 / 2.0).collect()).unwrap();
        if !xi.pair(&f).unwrap().is_zero() {
            prop_assert!(xi_cse_combinatorial(&xi, &phi).unwrap() >= jumping_number(&f, &phi).unwrap());
        }
    }
}

fn random_moments(seed: u64) -> Domain {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let size = 10;
    let mut a = Mat::<C64>::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut g = a.conj_transpose().mul(&a).unwrap();
    for i in 0..size {
        g[(i, i)] += C64::new(0.25, 0.0);
    }
    MomentDomain::from_matrix(2, 3, g).unwrap().into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval_matches_direct_kernel(seed in 0u64..1000, xi in functional(2, 3)) {
        let d = random_moments(seed);
        let basis = triangular_basis(&d, 3).unwrap();
        let xi = xi.to_float();
        let direct = kernel_at_origin(&d, &xi).unwrap().value;
        let parseval = basis.parseval_kernel(&xi).unwrap();
        prop_assert!((direct - parseval).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn moment_equivalence(seed in 0u64..1000, (f, g) in (jet(2, 2), ideal(2, 2))) {
        let d = random_moments(seed);
        let f = f.to_float();
        let j = jet_ideal(&g.to_float(), 3).unwrap();
        let c = minimal_l2(&d, &f, &j).unwrap().value.value;
        let b = b_circle(&d, &f, &j).unwrap().value.value;
        prop_assert!((c - b).abs() <= 1e-9 * c.max(1e-12));
    }
}
