use std::cmp::Ordering;

use proptest::prelude::*;
use reversor_core::arith::{Precision, Rat};
use reversor_core::classify::{classify, ClassTag, Triplet};
use reversor_core::logbounds::{gap_report, solve_s, OrderFlag, SolveOptions};
use reversor_core::reversion::{analyze, overreversion_in, reversion_exponent, Chain};
use reversor_core::scan::{scan_equalities, ScanConfig};

fn t(a: u64, b: u64, c: u64) -> Triplet {
    Triplet::from_u64(a, b, c).unwrap()
}

#[test]
fn scan_matches_u128_brute_force() {
    let report = scan_equalities(&ScanConfig::new(40, 8).with_chunk_size(7), 3).unwrap();
    let mut expected = Vec::new();
    for z in 1..=40u128 {
        for x in 1..=z {
            for y in 1..=x {
                for n in 1..=8u32 {
                    if z.pow(n) == x.pow(n) + y.pow(n) {
                        expected.push((y as u64, x as u64, z as u64, n));
                    }
                }
            }
        }
    }
    let got: Vec<_> = report.equalities.iter().map(|e| (e.y, e.x, e.z, e.n)).collect();
    assert_eq!(got, expected);
}

#[test]
fn large_triplet_end_to_end() {
    // n is large here, so every power sum runs far past 64 bits.
    let tr = t(997, 998, 1000);
    let an = analyze(&tr).unwrap();
    assert!(an.n > 100);
    assert!(an.lambda_interval_nondegenerate && an.last_triangle_square_reversed);
    let rep = gap_report(&tr, Precision::default()).unwrap();
    assert!(!rep.theorem_violation());
    let s = solve_s(&tr, &SolveOptions::default()).unwrap();
    assert!(s.ordering_ok && s.residual_within_tolerance);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounds_bracket_the_exponent(a in 1u64..400, b in 1u64..400, c in 1u64..400) {
        let tr = t(a, b, c);
        prop_assume!(tr.z() > tr.x());
        let n = reversion_exponent(&tr).unwrap().n;
        let rep = gap_report(&tr, Precision::default()).unwrap();
        let n1 = Rat::from((n - 1) as i64);
        prop_assert!(!rep.a.value.cmp_rat(&n1).is(Ordering::Less));
        prop_assert!(rep.b.value.cmp_rat(&Rat::from(n as i64)).is(Ordering::Less));
        if classify(&tr).tag == ClassTag::AcuteScalene {
            prop_assert!(!rep.theorem_violation());
        }
    }

    #[test]
    fn equalizer_sits_between_bounds(a in 2u64..150, b in 2u64..150, c in 2u64..150) {
        let tr = t(a, b, c);
        prop_assume!(classify(&tr).tag == ClassTag::AcuteScalene);
        let r = solve_s(&tr, &SolveOptions::default()).unwrap();
        prop_assert!(r.ordering_ok);
        prop_assert_eq!(r.ordering.a_vs_s, OrderFlag::Strict);
        prop_assert_eq!(r.ordering.s_vs_b, OrderFlag::Strict);
    }

    #[test]
    fn overreversion_chain_is_ordered(a in 1u64..60, b in 1u64..60, c in 1u64..60, num in 0u64..=1000) {
        let tr = t(a, b, c);
        let Ok(an) = analyze(&tr) else { return Ok(()) };
        let (lo, hi) = (&an.rho_interval.lower, &an.rho_interval.upper);
        let rho = lo + &(&(hi - lo) * &Rat::new(num as i64, 1000));
        let o = overreversion_in(&an, &rho).unwrap();
        let expected = match num {
            0 => Chain::AtLowerBound,
            1000 => Chain::AtUpperBound,
            _ => Chain::StrictChain,
        };
        prop_assert_eq!(o.chain, expected);
        prop_assert_eq!(&o.lambda * &rho, Rat::from_nats(tr.z(), &1u8.into()));
    }
}
