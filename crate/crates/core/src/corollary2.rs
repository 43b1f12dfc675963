//! Extensions of the integer case: rational triples cleared to integers,
//! signed integer cases, and radical (q-th root) triplets.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::Serialize;

use crate::arith::{escalate, ipow, nat_string, ordering_name, Certified, HiReal, Nat, Precision, Rat};
use crate::classify::Triplet;
use crate::error::{Error, Result};

/// A positive fraction kept exactly as written (not reduced), since the
/// scaled integers depend on the written denominators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fraction {
    #[serde(with = "nat_string")]
    pub num: Nat,
    #[serde(with = "nat_string")]
    pub den: Nat,
}

impl Fraction {
    pub fn new(num: Nat, den: Nat) -> Result<Self> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::InvalidArgument(format!("fraction parts must be positive: {num}/{den}")));
        }
        Ok(Fraction { num, den })
    }

    pub fn from_u64(num: u64, den: u64) -> Result<Self> {
        Self::new(Nat::from(num), Nat::from(den))
    }

    pub fn value(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num.clone()), BigInt::from(self.den.clone()))
    }
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a positive fraction: {s:?}"));
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        Fraction::new(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaledEquation {
    pub n: u32,
    /// `(z, x, y)` after multiplying through by the product of denominators.
    #[serde(with = "nat_string")]
    pub z: Nat,
    #[serde(with = "nat_string")]
    pub x: Nat,
    #[serde(with = "nat_string")]
    pub y: Nat,
    #[serde(with = "nat_string")]
    pub lhs: Nat,
    #[serde(with = "nat_string")]
    pub rhs: Nat,
    pub integer_equal: bool,
    pub rational_equal: bool,
    /// Both sides equal the rational sides times `(z' x' y')^n`, exactly.
    pub certificate: bool,
}

/// Clears denominators of `(qz/qz')^n = (qx/qx')^n + (qy/qy')^n` by
/// multiplying through by `(qz' qx' qy')^n`, giving the integers
/// `(qz qx' qy', qx qz' qy', qy qz' qx')`.
pub fn scale_rational_triplet(z: &Fraction, x: &Fraction, y: &Fraction, n: u32) -> ScaledEquation {
    let zi = &z.num * &x.den * &y.den;
    let xi = &x.num * &z.den * &y.den;
    let yi = &y.num * &z.den * &x.den;
    let lhs = ipow(&zi, n);
    let rhs = ipow(&xi, n) + ipow(&yi, n);

    let lhs_rat: BigRational = Pow::pow(z.value(), n);
    let rhs_rat: BigRational = Pow::pow(x.value(), n) + Pow::pow(y.value(), n);
    let scale = BigRational::from_integer(BigInt::from(ipow(&(&z.den * &x.den * &y.den), n)));
    let certificate = &lhs_rat * &scale == BigRational::from_integer(BigInt::from(lhs.clone()))
        && &rhs_rat * &scale == BigRational::from_integer(BigInt::from(rhs.clone()));

    ScaledEquation {
        n,
        integer_equal: lhs == rhs,
        rational_equal: lhs_rat == rhs_rat,
        certificate,
        z: zi,
        x: xi,
        y: yi,
        lhs,
        rhs,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u32) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Signs applied to `(z, x, y)` with `|z| > |x| > |y|`, plus the parity of `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignCase {
    pub signs: [Sign; 3],
    pub parity: Parity,
}

impl SignCase {
    pub fn all() -> Vec<SignCase> {
        let mut out = Vec::with_capacity(16);
        for parity in [Parity::Even, Parity::Odd] {
            for bits in 0..8u8 {
                let s = |b: u8| if bits & b != 0 { Sign::Minus } else { Sign::Plus };
                out.push(SignCase { signs: [s(4), s(2), s(1)], parity });
            }
        }
        out
    }

    pub fn negatives(&self) -> usize {
        self.signs.iter().filter(|s| **s == Sign::Minus).count()
    }
}

impl fmt::Display for SignCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [z, x, y] = self.signs.map(Sign::symbol);
        let p = match self.parity {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        write!(f, "({z}z,{x}x,{y}y) n {p}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The signed equation is the all-positive equation in disguise.
    ReducesToFLT,
    /// The two sides have incompatible sign or modulus.
    Impossible,
}

/// Even `n` erases every sign. Odd `n` with all three negative is the
/// positive equation multiplied by -1. Every other odd case is ruled out by
/// sign or by `|z| > |x| > |y|`.
pub fn sign_case_verdict(case: &SignCase) -> Verdict {
    match (case.parity, case.negatives()) {
        (Parity::Even, _) => Verdict::ReducesToFLT,
        (Parity::Odd, 0) | (Parity::Odd, 3) => Verdict::ReducesToFLT,
        (Parity::Odd, _) => Verdict::Impossible,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SignCaseTally {
    pub case: SignCase,
    pub verdict: Verdict,
    pub n_values: Vec<u32>,
    pub triples_checked: u64,
    pub equalities: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignBruteforceReport {
    pub bound: u64,
    pub n_set: Vec<u32>,
    pub cases: Vec<SignCaseTally>,
    pub total_equalities: u64,
    /// No case produced an equality; every verdict is consistent.
    pub consistent: bool,
}

/// Exhaustive check of `(±z)^n = (±x)^n + (±y)^n` for
/// `1 <= |y| < |x| < |z| <= bound`, optionally restricted to given sign
/// patterns.
pub fn sign_case_bruteforce(bound: u64, n_set: &[u32], only: Option<&[[Sign; 3]]>) -> Result<SignBruteforceReport> {
    if bound < 3 {
        return Err(Error::InvalidArgument(format!("bound must be at least 3, got {bound}")));
    }
    if let Some(bad) = n_set.iter().find(|&&n| n <= 2) {
        return Err(Error::InvalidArgument(format!("exponents must exceed 2, got {bad}")));
    }
    let mut cases = Vec::new();
    for case in SignCase::all() {
        if only.is_some_and(|o| !o.contains(&case.signs)) {
            continue;
        }
        let ns: Vec<u32> = n_set.iter().copied().filter(|&n| Parity::of(n) == case.parity).collect();
        let signed_pow = |v: u64, s: Sign, n: u32| -> BigInt {
            let p = BigInt::from(ipow(&BigUint::from(v), n));
            if s == Sign::Minus && n % 2 == 1 {
                -p
            } else {
                p
            }
        };
        let mut checked = 0u64;
        let mut equalities = 0u64;
        for &n in &ns {
            for z in 3..=bound {
                let zp = signed_pow(z, case.signs[0], n);
                for x in 2..z {
                    let xp = signed_pow(x, case.signs[1], n);
                    for y in 1..x {
                        checked += 1;
                        if zp == &xp + signed_pow(y, case.signs[2], n) {
                            equalities += 1;
                        }
                    }
                }
            }
        }
        cases.push(SignCaseTally { case, verdict: sign_case_verdict(&case), n_values: ns, triples_checked: checked, equalities });
    }
    let total_equalities = cases.iter().map(|c| c.equalities).sum();
    Ok(SignBruteforceReport { bound, n_set: n_set.to_vec(), cases, total_equalities, consistent: total_equalities == 0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BaseRelation {
    /// `z = x + y`
    Sum,
    /// `z^2 = x^2 + y^2`
    Pythagorean,
}

impl FromStr for BaseRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(BaseRelation::Sum),
            "pythagorean" | "pyth" => Ok(BaseRelation::Pythagorean),
            _ => Err(Error::Parse(format!("unknown base relation {s:?}"))),
        }
    }
}

/// Component-wise `q`-th roots of a base triplet.
#[derive(Clone, Debug, Serialize)]
pub struct RadicalTriplet {
    pub base: Triplet,
    pub q: u32,
    pub relation: BaseRelation,
}

impl RadicalTriplet {
    pub fn new(base: Triplet, q: u32, relation: BaseRelation) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("root index must be at least 1".into()));
        }
        Ok(RadicalTriplet { base, q, relation })
    }

    /// Picks whichever relation the base satisfies, preferring `Sum`.
    pub fn detect(base: Triplet, q: u32) -> Result<Self> {
        let relation = if base.cmp_power_sum(1) == Ordering::Equal {
            BaseRelation::Sum
        } else if base.cmp_power_sum(2) == Ordering::Equal {
            BaseRelation::Pythagorean
        } else {
            return Err(Error::MalformedBase(format!("{base} is neither z = x + y nor z^2 = x^2 + y^2")));
        };
        Self::new(base, q, relation)
    }

    fn base_exponent(&self) -> u32 {
        match self.relation {
            BaseRelation::Sum => 1,
            BaseRelation::Pythagorean => 2,
        }
    }

    pub fn solving_exponent(&self) -> u32 {
        self.base_exponent() * self.q
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RadicalVerification {
    pub radical: RadicalTriplet,
    pub solving_exponent: u32,
    /// The solving exponent exceeds 2.
    pub beyond_square: bool,
    pub roots: [HiReal; 3],
    /// Order of `z^(1/q)` against `x^(1/q) + y^(1/q)`.
    #[serde(with = "ordering_name")]
    pub root_order: Ordering,
    pub root_order_digits: u32,
    /// `(c^(1/q))^e` for every component reproduces the base relation exactly.
    pub exact_identity: bool,
    /// The decimal roots raised to the solving exponent enclose the integers.
    pub powered_roots_enclose: bool,
    /// Non-real q-th roots per component, not constructed.
    pub complex_companions_per_component: u32,
}

pub fn radical_verify(rt: &RadicalTriplet, prec: Precision) -> Result<RadicalVerification> {
    let b = &rt.base;
    let e = rt.base_exponent();
    if b.cmp_power_sum(e) != Ordering::Equal {
        return Err(Error::MalformedBase(format!("{b} does not satisfy {:?}", rt.relation)));
    }
    let q = rt.q;
    let roots = |p: Precision| [b.z(), b.x(), b.y()].map(|c| HiReal::nth_root_nat(c, q, p));

    let (root_order, used) = if q == 1 {
        (b.cmp_power_sum(1), prec)
    } else {
        let cap = Precision::digits(Precision::DEFAULT_CAP_DIGITS.max(prec.get()));
        escalate(prec, cap, |p| {
            let [rz, rx, ry] = roots(p);
            rz.cmp_hireal(&rx.add(&ry)).decided()
        })?
    };

    // (c^(1/q))^(e q) = c^e, so the identity at the solving exponent is the
    // base relation itself.
    let se = rt.solving_exponent();
    let exact_identity = ipow(b.z(), se / q) == ipow(b.x(), se / q) + ipow(b.y(), se / q);
    let rs = roots(prec);
    let powered_roots_enclose = [b.z(), b.x(), b.y()]
        .iter()
        .zip(rs.iter())
        .all(|(c, r)| r.powi(se).contains(&Rat::from_integer(BigInt::from(ipow(c, e)))));

    Ok(RadicalVerification {
        radical: rt.clone(),
        solving_exponent: se,
        beyond_square: se > 2,
        roots: rs,
        root_order,
        root_order_digits: used.get(),
        exact_identity,
        powered_roots_enclose,
        complex_companions_per_component: if q.is_multiple_of(2) { q - 2 } else { q - 1 },
    })
}

/// For a `Sum` base, the certified order of `z^(j/q)` against
/// `x^(j/q) + y^(j/q)` for `j = 1..=q`.
pub fn radical_ladder(base: &Triplet, q: u32, prec: Precision) -> Result<Vec<(u32, Ordering)>> {
    if base.cmp_power_sum(1) != Ordering::Equal {
        return Err(Error::MalformedBase(format!("{base} is not of the form z = x + y")));
    }
    if q == 0 {
        return Err(Error::InvalidArgument("root index must be at least 1".into()));
    }
    let cap = Precision::digits(Precision::DEFAULT_CAP_DIGITS.max(prec.get()));
    (1..=q)
        .map(|j| {
            if j == q {
                return Ok((j, base.cmp_power_sum(1)));
            }
            let (o, _) = escalate(prec, cap, |p| {
                let r = |c: &Nat| HiReal::nth_root_nat(&ipow(c, j), q, p);
                match r(base.z()).cmp_hireal(&r(base.x()).add(&r(base.y()))) {
                    Certified::Decided(o) => Some(o),
                    Certified::Indeterminate => None,
                }
            })?;
            Ok((j, o))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn fr(n: u64, d: u64) -> Fraction {
        Fraction::from_u64(n, d).unwrap()
    }

    fn t(a: u64, b: u64, c: u64) -> Triplet {
        Triplet::from_u64(a, b, c).unwrap()
    }

    #[test]
    fn scaling_examples() {
        let s = scale_rational_triplet(&fr(5, 1), &fr(4, 1), &fr(3, 1), 3);
        assert_eq!((s.z.clone(), s.x.clone(), s.y.clone()), (Nat::from(5u8), Nat::from(4u8), Nat::from(3u8)));
        assert_eq!((s.lhs.clone(), s.rhs.clone()), (Nat::from(125u8), Nat::from(91u8)));
        assert!(!s.integer_equal && s.certificate);

        let s = scale_rational_triplet(&fr(5, 2), &fr(4, 2), &fr(3, 2), 3);
        assert_eq!((s.z.clone(), s.x.clone(), s.y.clone()), (Nat::from(20u8), Nat::from(16u8), Nat::from(12u8)));
        assert!(!s.integer_equal && !s.rational_equal && s.certificate);

        let s = scale_rational_triplet(&fr(5, 1), &fr(4, 1), &fr(3, 1), 2);
        assert_eq!((s.lhs.clone(), s.rhs.clone()), (Nat::from(25u8), Nat::from(25u8)));
        assert!(s.integer_equal && s.rational_equal);
    }

    #[test]
    fn scaling_preserves_truth_on_random_triples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let mut f = || fr(rng.gen_range(1..60), rng.gen_range(1..12));
            let (z, x, y) = (f(), f(), f());
            let n = rng.gen_range(1..=6);
            let s = scale_rational_triplet(&z, &x, &y, n);
            assert_eq!(s.integer_equal, s.rational_equal);
            assert!(s.certificate);
        }
        // a true rational instance: (5/2)^2 = (4/2)^2 + (3/2)^2
        let s = scale_rational_triplet(&fr(5, 2), &fr(2, 1), &fr(3, 2), 2);
        assert!(s.rational_equal && s.integer_equal);
    }

    #[test]
    fn fraction_parsing() {
        assert_eq!("5/2".parse::<Fraction>().unwrap(), fr(5, 2));
        assert_eq!("7".parse::<Fraction>().unwrap(), fr(7, 1));
        assert!("0/2".parse::<Fraction>().is_err());
        assert!("3/0".parse::<Fraction>().is_err());
    }

    #[test]
    fn verdict_examples() {
        let case = |s: [Sign; 3], p| SignCase { signs: s, parity: p };
        use Sign::*;
        assert_eq!(sign_case_verdict(&case([Minus, Minus, Plus], Parity::Odd)), Verdict::Impossible);
        assert_eq!(sign_case_verdict(&case([Plus, Plus, Plus], Parity::Even)), Verdict::ReducesToFLT);
        assert_eq!(sign_case_verdict(&case([Plus, Plus, Minus], Parity::Odd)), Verdict::Impossible);
        assert_eq!(sign_case_verdict(&case([Minus, Minus, Minus], Parity::Odd)), Verdict::ReducesToFLT);
        assert_eq!(SignCase::all().len(), 16);
        let impossible = SignCase::all().iter().filter(|c| sign_case_verdict(c) == Verdict::Impossible).count();
        assert_eq!(impossible, 6);
    }

    #[test]
    fn bruteforce_small() {
        let r = sign_case_bruteforce(3, &[3], None).unwrap();
        assert_eq!(r.total_equalities, 0);
        assert_eq!(r.cases.len(), 16);
        // only (1, 2, 3) up to signs, odd parity cases only
        assert_eq!(r.cases.iter().map(|c| c.triples_checked).sum::<u64>(), 8);

        let plus = [[Sign::Plus; 3]];
        let r = sign_case_bruteforce(12, &[3], Some(&plus)).unwrap();
        assert_eq!(r.cases.len(), 2);
        assert!(r.consistent);
        assert!(sign_case_bruteforce(2, &[3], None).is_err());
        assert!(sign_case_bruteforce(5, &[2], None).is_err());
    }

    #[test]
    fn radical_examples() {
        let v = radical_verify(&RadicalTriplet::new(t(2, 3, 5), 3, BaseRelation::Sum).unwrap(), Precision::default()).unwrap();
        assert_eq!(v.root_order, Ordering::Less);
        assert!(v.exact_identity && v.powered_roots_enclose && v.beyond_square);
        assert_eq!((v.solving_exponent, v.complex_companions_per_component), (3, 2));
        assert!((v.roots[0].to_f64() - 5f64.cbrt()).abs() < 1e-15);

        let v = radical_verify(&RadicalTriplet::new(t(3, 4, 5), 2, BaseRelation::Pythagorean).unwrap(), Precision::default()).unwrap();
        assert_eq!((v.solving_exponent, v.root_order), (4, Ordering::Less));
        assert!(v.exact_identity && v.powered_roots_enclose);

        let v = radical_verify(&RadicalTriplet::detect(t(2, 7, 9), 5).unwrap(), Precision::default()).unwrap();
        assert_eq!((v.solving_exponent, v.root_order), (5, Ordering::Less));
        assert!(v.exact_identity && v.powered_roots_enclose);

        let v = radical_verify(&RadicalTriplet::detect(t(2, 3, 5), 1).unwrap(), Precision::default()).unwrap();
        assert_eq!(v.root_order, Ordering::Equal);
        assert!(!v.beyond_square);
    }

    #[test]
    fn radical_rejects_malformed() {
        let rt = RadicalTriplet::new(t(2, 3, 6), 3, BaseRelation::Sum).unwrap();
        assert!(matches!(radical_verify(&rt, Precision::default()), Err(Error::MalformedBase(_))));
        assert!(matches!(RadicalTriplet::detect(t(4, 5, 6), 2), Err(Error::MalformedBase(_))));
        assert!(RadicalTriplet::new(t(2, 3, 5), 0, BaseRelation::Sum).is_err());
    }

    #[test]
    fn radical_ladder_stays_below_until_one() {
        for base in [t(2, 3, 5), t(1, 1, 2), t(2, 7, 9), t(5, 8, 13)] {
            for q in 1..=7 {
                let ladder = radical_ladder(&base, q, Precision::default()).unwrap();
                for (j, o) in ladder {
                    let expected = if j < q { Ordering::Less } else { Ordering::Equal };
                    assert_eq!(o, expected, "{base} q={q} j={j}");
                }
            }
        }
    }
}
