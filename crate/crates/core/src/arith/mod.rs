//! Exact integer and rational kernels plus the certified real type used for
//! logarithmic quantities.

mod hireal;
mod rat;

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Pow;

pub use hireal::{escalate, Certified, HiReal, Precision, GUARD_BITS};
pub use rat::Rat;

use crate::error::Result;

/// Arbitrary-precision natural number.
pub type Nat = BigUint;

/// Serde adapter writing naturals as decimal strings.
pub mod nat_string {
    use super::Nat;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(n: &Nat, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(n)
    }
}

/// Serde adapter writing an `Ordering` as `"less"`, `"equal"` or `"greater"`.
pub mod ordering_name {
    use std::cmp::Ordering;

    use serde::Serializer;

    pub fn name(o: Ordering) -> &'static str {
        match o {
            Ordering::Less => "less",
            Ordering::Equal => "equal",
            Ordering::Greater => "greater",
        }
    }

    pub fn serialize<S: Serializer>(o: &Ordering, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(name(*o))
    }
}

pub fn ipow(base: &Nat, exp: u32) -> Nat {
    Pow::pow(base, exp)
}

/// Exact three-way comparison of `z^i` against `x^i + y^i`.
pub fn cmp_power_sum(z: &Nat, x: &Nat, y: &Nat, i: u32) -> Ordering {
    ipow(z, i).cmp(&(ipow(x, i) + ipow(y, i)))
}

/// `ln(x^e + y^e)` for `x >= y >= 1`, evaluated as
/// `e ln x + ln(1 + exp(e (ln y - ln x)))` so that `x^e` is never formed.
pub fn log_power_sum(x: &Nat, y: &Nat, e: &HiReal) -> Result<HiReal> {
    let prec = e.precision();
    let ln_x = HiReal::ln_nat(x, prec)?;
    let ratio = Rat::from_nats(y, x);
    let ln_ratio = HiReal::ln_rat(&ratio, prec)?;
    log_power_sum_with(&ln_x, &ln_ratio, e)
}

/// Same as [`log_power_sum`] with `ln x` and `ln(y/x)` supplied by the
/// caller, for loops that evaluate many exponents on one pair.
pub fn log_power_sum_with(ln_x: &HiReal, ln_ratio: &HiReal, e: &HiReal) -> Result<HiReal> {
    let u = e.mul(ln_ratio).exp();
    let one = HiReal::from_i64(1, e.precision());
    let log1p = one.add(&u).ln()?;
    Ok(e.mul(ln_x).add(&log1p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    fn repeated_mul(base: u64, exp: u32) -> Nat {
        (0..exp).fold(n(1), |acc, _| acc * n(base))
    }

    #[test]
    fn ipow_examples() {
        assert_eq!(ipow(&n(6), 3), n(216));
        assert_eq!(ipow(&n(12345), 0), n(1));
        assert_eq!(ipow(&n(0), 0), n(1));
        assert_eq!(ipow(&n(9), 5), repeated_mul(9, 5));
        assert_eq!(ipow(&n(9), 5), n(59049));
    }

    #[test]
    fn cmp_power_sum_examples() {
        assert_eq!(cmp_power_sum(&n(10), &n(9), &n(8), 4), Ordering::Less);
        assert_eq!(cmp_power_sum(&n(5), &n(4), &n(3), 2), Ordering::Equal);
        assert_eq!(cmp_power_sum(&n(4), &n(3), &n(2), 2), Ordering::Greater);
    }

    #[test]
    fn log_power_sum_at_integer_exponents() {
        let prec = Precision::default();
        let v = log_power_sum(&n(5), &n(2), &HiReal::from_i64(1, prec)).unwrap();
        let exact = HiReal::ln_nat(&n(7), prec).unwrap();
        assert!(v.cmp_hireal(&exact) == Certified::Indeterminate);
        assert!((v.to_f64() - 7f64.ln()).abs() < 1e-15);

        let v = log_power_sum(&n(9), &n(8), &HiReal::from_i64(4, prec)).unwrap();
        let exact = HiReal::ln_nat(&n(10657), prec).unwrap();
        assert!(v.sub(&exact).abs_upper() < Rat::new(1, Nat::from(10u8).pow(60u32)));
    }

    #[test]
    fn log_power_sum_fractional_exponent() {
        // float oracle first, then a 200-digit evaluation as reference
        let oracle = (4f64.powf(2.5) + 3f64.powf(2.5)).ln();
        let e = HiReal::from_rat(&Rat::new(5, 2), Precision::default());
        let v = log_power_sum(&n(4), &n(3), &e).unwrap();
        assert!((v.to_f64() - oracle).abs() < 1e-13);

        let e_ref = HiReal::from_rat(&Rat::new(5, 2), Precision::digits(200));
        let reference = log_power_sum(&n(4), &n(3), &e_ref).unwrap();
        let diff = v.sub(&reference.with_precision(Precision::default()));
        assert!(diff.abs_upper() < Rat::new(1, Nat::from(10u8).pow(45u32)));
    }
}
