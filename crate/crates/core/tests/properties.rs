mod common;

use common::*;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use signed_euler::analysis::Direct;
use signed_euler::cli_io::{self, field_report, AnalysisReport};
use signed_euler::euler_characteristic::{AwayFactor, PrimeAboveP};
use signed_euler::local_analysis::{count_points_bsgs, count_points_enumeration};
use signed_euler::*;

fn curve(a: &Coeffs) -> WeierstrassCurve {
    WeierstrassCurve::from_ints(*a).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn small_curve() -> impl Strategy<Value = Coeffs> {
    (0i64..=1, -1i64..=1, 0i64..=1, -40i64..=40, -40i64..=40)
        .prop_map(|(a1, a2, a3, a4, a6)| [a1, a2, a3, a4, a6])
        .prop_filter("nonsingular", |a| discriminant(a) != 0)
}

fn prime_below(limit: i64) -> impl Strategy<Value = i64> {
    let primes = odd_primes(3, limit);
    (0..primes.len()).prop_map(move |i| primes[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn count_matches_euler_oracle(a in small_curve(), q in prime_below(3000)) {
        prop_assume!(discriminant(&a) % q as i128 != 0);
        let reduced = reduce_mod(&curve(&a), q as u64).unwrap();
        prop_assert_eq!(count_points(&reduced).unwrap() as i64, count_euler(&a, q));
    }

    #[test]
    fn count_matches_brute_force(a in small_curve(), q in prime_below(80)) {
        prop_assume!(discriminant(&a) % q as i128 != 0);
        let reduced = reduce_mod(&curve(&a), q as u64).unwrap();
        prop_assert_eq!(count_points(&reduced).unwrap() as i64, count_brute(&a, q));
    }

    #[test]
    fn transforms_scale_invariants(
        a in small_curve(),
        u in prop::sample::select(vec![(1, 1), (-1, 1), (2, 1), (-3, 1), (1, 2), (2, 3)]),
        r in -5i64..5, s in -5i64..5, t in -5i64..5, den in 1i64..4,
    ) {
        let c = curve(&a);
        let u = rat(u.0, u.1);
        let tr = ModelTransform::new(u.clone(), rat(r, den), rat(s, den), rat(t, den)).unwrap();
        let d = tr.apply(&c);
        let u4 = &u * &u * &u * &u;
        let u12 = &u4 * &u4 * &u4;
        prop_assert_eq!(d.discriminant() * &u12, c.discriminant().clone());
        prop_assert_eq!(d.c4() * &u4, c.c4().clone());
        // the inverse transform returns the original model
        let back = tr.inverse().apply(&d);
        prop_assert_eq!(back.a_invariants(), c.a_invariants());
    }

    #[test]
    fn minimal_model_properties(
        a in small_curve(),
        u in prop::sample::select(vec![(1, 1), (1, 2), (1, 3), (1, 6), (2, 1), (3, 1)]),
        r in -3i64..3, s in -3i64..3, t in -3i64..3,
    ) {
        let scaled = ModelTransform::new(rat(u.0, u.1), rat(r, 1), rat(s, 1), rat(t, 1)).unwrap()
            .apply(&curve(&a));
        let (min, tr) = minimal_model(&scaled).unwrap();
        prop_assert!(min.is_integral());
        let mapped = tr.apply(&scaled);
        prop_assert_eq!(mapped.a_invariants(), min.a_invariants());
        let (again, tr2) = minimal_model(&min).unwrap();
        prop_assert_eq!(again.a_invariants(), min.a_invariants());
        prop_assert!(tr2.u.abs().is_one());
        // quotient of discriminants is u^12
        let u12 = num_traits::pow(tr.u.clone(), 12);
        prop_assert_eq!(min.discriminant() * &u12, scaled.discriminant().clone());
        // a minimal model never has a larger discriminant than an integral one
        let (min0, _) = minimal_model(&curve(&a)).unwrap();
        prop_assert!(min0.discriminant().abs() <= BigRational::from_integer(BigInt::from(discriminant(&a).abs())));
        prop_assert_eq!(min0.discriminant(), min.discriminant());
    }

    #[test]
    fn reduction_singular_iff_prime_divides_minimal_discriminant(a in small_curve(), q in prime_below(200)) {
        let (min, _) = minimal_model(&curve(&a)).unwrap();
        let red = reduce_mod(&min, q as u64).unwrap();
        let d = min.integral_discriminant().unwrap();
        prop_assert_eq!(red.singular, (d % BigInt::from(q)).is_zero());
    }

    #[test]
    fn classification_invariant_under_integral_transforms(
        a in small_curve(), q in prime_below(60),
        neg in any::<bool>(), r in -4i64..4, s in -4i64..4, t in -4i64..4,
    ) {
        let c = curve(&a);
        let tr = ModelTransform::new(rat(if neg { -1 } else { 1 }, 1), rat(r, 1), rat(s, 1), rat(t, 1)).unwrap();
        let d = tr.apply(&c);
        prop_assert_eq!(
            classify_reduction(&c, q as u64).unwrap(),
            classify_reduction(&d, q as u64).unwrap()
        );
    }

    #[test]
    fn lambda_is_multiplicative(
        p in prop::sample::select(vec![3u64, 5, 7, 11]),
        f in prop::collection::vec(-500i64..500, 1..5),
        g in prop::collection::vec(-500i64..500, 1..5),
    ) {
        prop_assume!(f[0] != 0 && g[0] != 0);
        let mk = |v: &[i64]| LambdaSeries::new(p, v.iter().map(|&x| BigInt::from(x)).collect(), None).unwrap();
        let (sf, sg) = (mk(&f), mk(&g));
        let prod = sf.mul(&sg).unwrap();
        prop_assert_eq!(
            lambda_euler_char(&prod).unwrap(),
            lambda_euler_char(&sf).unwrap().mul(lambda_euler_char(&sg).unwrap())
        );
    }

    #[test]
    fn field_reports_round_trip_and_satisfy_identity(seed in any::<u64>()) {
        let data = random_field_data(seed);
        let (report, code) = field_report(data, None, true).unwrap();
        prop_assert!(code == 0);
        let r = report.result.as_ref().unwrap();
        prop_assert!(r.breakdown_identity_holds());
        let back = AnalysisReport::from_json(&report.to_json()).unwrap();
        prop_assert_eq!(back, report);
    }

    #[test]
    fn hypothesis_check_ignores_prime_order(seed in any::<u64>()) {
        let data = random_field_data(seed);
        let r = data.supersingular_count();
        let mut g = rng(seed ^ 1);
        let signs = SignVector((0..r).map(|_| if g.gen() { euler_characteristic::Sign::Plus } else { euler_characteristic::Sign::Minus }).collect());
        let rep = check_hypotheses(&data, &signs).unwrap();
        let mut rev = data.clone();
        rev.primes_above_p.reverse();
        rev.away_tamagawa_p_parts.reverse();
        let mut rs = signs.clone();
        rs.0.reverse();
        let rep2 = check_hypotheses(&rev, &rs).unwrap();
        prop_assert_eq!(rep.overall, rep2.overall);
        prop_assert_eq!(rep.s1.is_fail(), rep2.s1.is_fail());
        prop_assert_eq!(rep.s2.is_fail(), rep2.s2.is_fail());
        prop_assert_eq!(rep.s3.is_fail(), rep2.s3.is_fail());
        prop_assert_eq!(rep.s4.is_fail(), rep2.s4.is_fail());
        prop_assert_eq!(&rep, &check_hypotheses(&data, &signs).unwrap());
    }

    #[test]
    fn exit_codes_stay_in_contract(tokens in prop::collection::vec(prop::sample::select(vec![
        "analyze", "local", "batch", "field", "lambda", "--curve", "0,0,0,-1,0", "0,-1,1,-10,-20",
        "1,2", "x", "--p", "5", "7", "4", "-3", "--q", "11", "--signs", "-", "+", "+-",
        "--sha-p", "25", "6", "--assert-selmer-finite", "--format", "json", "table",
        "--override-hypotheses", "--coeffs", "25,5,1", "0,1", "--precision", "2", "--input",
        "/nonexistent.csv", "--local-data", "/nonexistent.json", "--jobs",
    ]), 0..9)) {
        let mut args = vec!["signed-euler", "--no-cache"];
        args.extend(tokens.iter().copied());
        let code = cli_io::run(args, &mut Vec::new(), &mut Vec::new());
        prop_assert!([0, 2, 3].contains(&code), "code {}", code);
    }
}

fn random_field_data(seed: u64) -> FieldLocalData {
    let mut g = rng(seed);
    let p = [3u64, 5, 7, 11, 13][g.gen_range(0..5)];
    let n = g.gen_range(1..5);
    let primes = (0..n)
        .map(|_| {
            let ss = g.gen_bool(0.5);
            PrimeAboveP {
                ramification: g.gen_range(1..4),
                residue_degree: g.gen_range(1..4),
                reduction: if ss { ReductionType::GoodSupersingular } else { ReductionType::GoodOrdinary },
                a: Some(if ss { 0 } else { 1 }),
                d_p_part: Some(PPower::new(p, if ss { 0 } else { g.gen_range(0..3) })),
                base_is_qp: g.gen_bool(0.8),
                unramified: g.gen_bool(0.8),
            }
        })
        .collect();
    let away = (0..g.gen_range(0..4))
        .map(|i| AwayFactor { label: format!("v{i}"), value: PPower::new(p, g.gen_range(0..3)) })
        .collect();
    FieldLocalData {
        p,
        primes_above_p: primes,
        away_tamagawa_p_parts: away,
        torsion_p_part: PPower::new(p, g.gen_range(0..2)),
        sha_p_order: PPower::new(p, 2 * g.gen_range(0..2)),
        selmer_finite: g.gen_bool(0.7),
    }
}

#[test]
fn bsgs_agrees_with_enumeration_on_random_pairs() {
    let primes = odd_primes(1001, 100_000);
    let mut g = rng(0xb565);
    let mut checked = 0;
    while checked < 1000 {
        let a = random_curves(g.gen(), 1, 1000)[0];
        let q = primes[g.gen_range(0..primes.len())];
        if discriminant(&a) % q as i128 == 0 {
            continue;
        }
        let red = reduce_mod(&curve(&a), q as u64).unwrap();
        assert_eq!(
            count_points_bsgs(&red).unwrap(),
            count_points_enumeration(&red).unwrap(),
            "curve {a:?} q {q}"
        );
        checked += 1;
    }
}

#[test]
fn bsgs_agrees_with_oracle_around_two_to_the_seventeen() {
    let around: Vec<i64> = odd_primes((1 << 17) - 200, (1 << 17) + 200);
    for (_, a) in KNOWN.iter().map(|(l, a, _)| (l, a)).take(8) {
        for &q in &around {
            if discriminant(a) % q as i128 == 0 {
                continue;
            }
            let red = reduce_mod(&curve(a), q as u64).unwrap();
            assert_eq!(count_points_bsgs(&red).unwrap() as i64, count_euler(a, q), "{a:?} {q}");
            assert_eq!(count_points(&red).unwrap() as i64, count_euler(a, q));
        }
    }
}

#[test]
fn torsion_points_reduce_to_points_of_dividing_order() {
    // count_points is divisible by the order of any torsion point found
    for (_, a, _) in KNOWN {
        let t = torsion_subgroup(&curve(a)).unwrap();
        for q in odd_primes(3, 120) {
            if discriminant(a) % q as i128 == 0 {
                continue;
            }
            let n = count_points(&reduce_mod(&curve(a), q as u64).unwrap()).unwrap();
            for (_, ord) in &t.generators {
                assert_eq!(n % *ord as u64, 0, "{a:?} q={q}");
            }
        }
    }
}

#[test]
fn large_good_prime_is_rejected_above_limit() {
    let c = curve(&[0, 0, 0, -1, 0]);
    let big = BigUint::from(1_000_000_007u64);
    assert!(matches!(local_packet(&c, &big), Err(Error::PrimeTooLarge(_))));
    let (rep, _) = cli_io::analyze_report(&c, None, 7, None, None, true, false, &Direct).unwrap();
    assert!(rep.result.is_some());
}

#[test]
fn zero_coefficient_series_is_rejected() {
    assert!(matches!(LambdaSeries::new(5, vec![BigInt::zero()], None), Err(Error::ZeroSeries)));
}
