mod common;

use bv_core::arith::{build_tables, factorize};
use bv_core::characters::character_group;
use bv_core::dirichlet_poly::{
    greedy_spaced, large_value_report, primitive_family, select_well_spaced, CoefficientSpec, DirichletPolynomial,
    SampledTriples,
};
use bv_core::exponents::cases::{CaseEngine, Point};
use bv_core::exponents::lemma4::lemma4_witnesses;
use bv_core::exponents::{lemma4_oracle, lemma4_partition, rat, CaseId, FactorSource, Rational, Variant};
use bv_core::heath_brown::{dyadic_grid, floor_log2};
use bv_core::perron::{exact_by_convolution, exact_by_tuples, horizontal_bound_check, sigma_grid};
use bv_core::progressions::{psi_ap, psi_q};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gcd, random_tuple};

#[test]
fn partition_is_total_on_a_million_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tuples: Vec<[Rational; 8]> = (0..1_000_000).map(|_| random_tuple(&mut rng)).collect();
    let bad = bv_core::par::map(&tuples, |u| match lemma4_partition(u) {
        Ok(o) => !(o.all_checks_hold() && o.verify(u).is_ok()),
        Err(_) => true,
    });
    assert_eq!(bad.iter().filter(|&&b| b).count(), 0);
}

/// Splits `den` by nine weights (the ninth is the slack `1 - Σ u`).
fn tuple_strategy() -> impl Strategy<Value = [Rational; 8]> {
    (1i128..=400, prop::array::uniform9(0i128..=50)).prop_map(|(den, w)| {
        let total = w.iter().sum::<i128>().max(1);
        let mut k: [i128; 8] = core::array::from_fn(|i| den * w[i] / total);
        k.sort_unstable_by(|a, b| b.cmp(a));
        k.map(|v| rat(v, den))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn oracle_contains_the_constructive_partition(u in tuple_strategy()) {
        let o = lemma4_partition(&u).unwrap();
        prop_assert!(o.all_checks_hold());
        prop_assert!(lemma4_oracle(&u).unwrap().exists);
        prop_assert!(lemma4_witnesses(&u).unwrap().iter().any(|w| w.matches(&o)));
    }

    #[test]
    fn case_four_mirrors_case_three(
        m in 0i128..=40, n in 0i128..=40, l in 0i128..=40, th in 0i128..=9, b in 0usize..=7,
    ) {
        let eng = CaseEngine::new(FactorSource::Printed);
        let p = Point { m: rat(m, 80), n: rat(n, 80), l: rat(l, 80), theta: rat(th, 40) };
        let q = Point { m: p.n, n: p.m, ..p };
        let here = eng.evaluate(Variant::A, b, &p);
        let there = eng.evaluate(Variant::A, 7 - b, &q);
        for (c4, c3) in [(CaseId::ACase4A2, CaseId::ACase3A2), (CaseId::ACase4B2, CaseId::ACase3B2)] {
            let a = here.iter().find(|c| c.case_id == c4).unwrap();
            let z = there.iter().find(|c| c.case_id == c3).unwrap();
            prop_assert_eq!(a.x_exponent, z.x_exponent);
            prop_assert_eq!(a.t_exponent, z.t_exponent);
            prop_assert_eq!(a.form.mirror().mirror(), a.form);
        }
    }

    #[test]
    fn greedy_selection_is_well_spaced(
        raw in prop::collection::vec((-64.0f64..64.0, 0.0f64..10.0), 0..200),
    ) {
        let (ts, mags): (Vec<f64>, Vec<f64>) = raw.into_iter().unzip();
        let set = greedy_spaced(&ts, &mags);
        let mut pts = set.points.clone();
        pts.sort_by(f64::total_cmp);
        prop_assert!(pts.windows(2).all(|w| w[1] - w[0] >= 1.0));
    }

    #[test]
    fn large_value_count_matches_brute_force(v in 0.01f64..40.0, k in 4u32..9) {
        let n = 1u64 << k;
        let family = primitive_family(4).unwrap();
        let spec = CoefficientSpec::unit(n, 2 * n).unwrap();
        let s = SampledTriples::collect(&family, &spec, 16.0, 0.0).unwrap();
        let brute = s.triples.iter().filter(|t| t.3 >= v).count();
        let r = large_value_report(&s, 4, &spec, v, 1e12).unwrap();
        prop_assert_eq!(r.lhs as usize, brute);
    }

    #[test]
    fn perron_exact_sides_agree(
        lo in prop::collection::vec(1u64..12, 1..4), mob in prop::collection::vec(any::<bool>(), 3), y in 1u64..400,
    ) {
        let family: Vec<_> = lo
            .iter()
            .zip(&mob)
            .map(|(&n, &m)| {
                let spec = if m { CoefficientSpec::mobius(n, 2 * n) } else { CoefficientSpec::unit(n, 2 * n) };
                DirichletPolynomial::new(spec.unwrap(), bv_core::characters::DirichletCharacter::trivial())
            })
            .collect();
        let y = y as f64 + 0.5;
        prop_assert!((exact_by_tuples(&family, y) - exact_by_convolution(&family, y)).norm() < 1e-9);
        let r = horizontal_bound_check(&family, &sigma_grid(1.05, 9), 1000.0).unwrap();
        prop_assert!(r.holds());
    }
}

#[test]
fn characters_are_completely_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut groups = std::collections::HashMap::new();
    for _ in 0..10_000 {
        let q = rng.random_range(1..=300u64);
        let chars = groups.entry(q).or_insert_with(|| character_group(q).unwrap());
        let chi = &chars[rng.random_range(0..chars.len())];
        let m = rng.random_range(-10_000i64..10_000);
        let n = rng.random_range(-10_000i64..10_000);
        assert_eq!(chi.evaluate(m * n), chi.evaluate(m) * chi.evaluate(n), "q = {q}, m = {m}, n = {n}");
        assert!(chi.evaluate(1).is_one());
    }
}

#[test]
fn residue_classes_sum_to_psi_q() {
    let t = build_tables(20_000).unwrap();
    for q in [1u64, 2, 3, 12, 30, 97, 100] {
        for y in [10.5, 999.0, 19_999.9] {
            let total: f64 = (0..q).filter(|&a| gcd(a, q) == 1).map(|a| psi_ap(y, q, a, &t).unwrap()).sum();
            let want = psi_q(y, q, &t).unwrap();
            assert!((total - want).abs() <= 1e-10 * want.max(1.0), "q = {q}, y = {y}");
        }
    }
}

#[test]
fn dyadic_boxes_satisfy_both_constraints() {
    for x in [256.0, 4096.0, 65_536.0] {
        let s = floor_log2(x);
        let g = dyadic_grid(x).unwrap();
        for t in &g.tuples {
            let total: u32 = t.sizes.iter().map(|d| d.log2_n()).sum();
            assert!(total <= s);
            for d in &t.sizes[4..] {
                let (_, hi) = d.range();
                // 2 N_i <= x^{1/4} for i > 4
                assert!(hi == 1 || 4 * (floor_log2(hi as f64)) <= s);
            }
            assert!(t.coefficient().abs() <= 6);
        }
    }
}

#[test]
fn well_spaced_points_on_real_polynomials() {
    for q in [5u64, 8, 13] {
        for chi in character_group(q).unwrap() {
            let poly = DirichletPolynomial::new(CoefficientSpec::mobius(32, 64).unwrap(), chi);
            let set = select_well_spaced(&poly, 32.0, 0.5).unwrap();
            assert!(set.points.iter().all(|t| t.abs() <= 32.0));
            let mut p = set.points.clone();
            p.sort_by(f64::total_cmp);
            assert!(p.windows(2).all(|w| w[1] - w[0] >= 1.0));
        }
    }
}

#[test]
fn phi_matches_character_count() {
    for q in 1..=300u64 {
        assert_eq!(character_group(q).unwrap().len() as u64, factorize(q).phi());
    }
}
