//! Logarithmic bounds around the reversion exponent.
//!
//! With `n` the reversion exponent, `b = ln p_n / ln z` and
//! `a = ln p_(n-1) / ln z` satisfy `n - 1 <= a < b < n`, and the real
//! exponent `s` solving `z^s = x^s + y^s` lies in `[a, b]`. Every order
//! claim here is decided with integer arithmetic; the [`HiReal`] values are
//! reported alongside and cross-checked against those decisions.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::{ipow, log_power_sum_with, ordering_name, Certified, HiReal, Nat, Precision, Rat};
use crate::classify::{classify, ClassTag, Triplet};
use crate::error::{Error, Result};
use crate::reversion::{power_sum, reversion_exponent};

/// `m` with `p = z^m`, if any.
pub fn exact_log(p: &Nat, z: &Nat) -> Option<u32> {
    if z <= &Nat::one() {
        return None;
    }
    let mut acc = Nat::one();
    let mut m = 0u32;
    while &acc < p {
        acc *= z;
        m += 1;
    }
    (&acc == p).then_some(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct LogBound {
    /// The exponent `e` of the power sum `p_e` inside the logarithm.
    pub exponent: u32,
    pub value: HiReal,
    /// Set when `p_e = z^m`, which makes the bound exactly `m`.
    pub exact: Option<u32>,
    /// Order of the bound against `e`, from `p_e` vs `z^e`.
    #[serde(with = "ordering_name")]
    pub exact_order: Ordering,
    /// Whether the decimal value, compared against `e` under its error
    /// bound, reaches the same verdict.
    pub agrees: bool,
}

fn ln_z(z: &Nat, prec: Precision) -> Result<HiReal> {
    if z <= &Nat::one() {
        return Err(Error::DegenerateBase);
    }
    HiReal::ln_nat(z, prec)
}

fn log_bound(t: &Triplet, e: u32, ln_z: &HiReal) -> Result<LogBound> {
    let prec = ln_z.precision();
    let p = power_sum(t.x(), t.y(), e);
    let exact = exact_log(&p, t.z());
    let value = match exact {
        Some(m) => HiReal::from_i64(m as i64, prec),
        None => HiReal::ln_nat(&p, prec)?.div(ln_z)?,
    };
    let exact_order = p.cmp(&ipow(t.z(), e));
    let agrees = value.cmp_rat(&Rat::from(e as i64)) == Certified::Decided(exact_order);
    Ok(LogBound { exponent: e, value, exact, exact_order, agrees })
}

/// `b = ln(x^n + y^n) / ln z`.
pub fn bound_b(t: &Triplet, n: u32, prec: Precision) -> Result<LogBound> {
    log_bound(t, n, &ln_z(t.z(), prec)?)
}

/// `a = ln(x^(n-1) + y^(n-1)) / ln z`; requires `n >= 1`.
pub fn bound_a(t: &Triplet, n: u32, prec: Precision) -> Result<LogBound> {
    if n == 0 {
        return Err(Error::InvalidArgument("bound a needs n >= 1".into()));
    }
    log_bound(t, n - 1, &ln_z(t.z(), prec)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct LogBoundsReport {
    pub triplet: Triplet,
    pub class: ClassTag,
    pub n: u32,
    pub a: LogBound,
    pub b: LogBound,
    pub gap: HiReal,
    pub n_minus_b: HiReal,
    pub k_n_minus_1: Rat,
    /// `0 < b - a < 1`, i.e. `1 < k_(n-1) < z`.
    pub gap_in_unit: bool,
    /// `b - a > 1/2`, i.e. `k_(n-1)^2 > z`.
    pub gap_above_half: bool,
    /// `n - b < 1/2`, i.e. `p_n^2 > z^(2n-1)`.
    pub n_minus_b_below_half: bool,
    pub k_squared_above_z: bool,
    /// `|(b - a) - ln k_(n-1) / ln z|`, with `ln k` taken directly on the
    /// rational.
    pub gap_identity_residual: HiReal,
    /// The half-unit bounds are theorems only for acute scalene triplets;
    /// elsewhere they are measured.
    pub bounds_are_theorems: bool,
    /// Decimal comparisons of the gap and of `n - b` agree with the exact flags.
    pub float_agrees: bool,
    /// `a = 2` exactly.
    pub a_is_two: bool,
}

impl LogBoundsReport {
    pub fn gap_identity_upper(&self) -> Rat {
        self.gap_identity_residual.abs_upper()
    }

    /// Whether any half-unit bound fails where it is a theorem.
    pub fn theorem_violation(&self) -> bool {
        self.bounds_are_theorems && !(self.gap_in_unit && self.gap_above_half && self.n_minus_b_below_half && self.k_squared_above_z)
    }
}

pub fn gap_report(t: &Triplet, prec: Precision) -> Result<LogBoundsReport> {
    let rev = reversion_exponent(t)?;
    let n = rev.n;
    let lz = ln_z(t.z(), prec)?;
    let a = log_bound(t, n - 1, &lz)?;
    let b = log_bound(t, n, &lz)?;
    let gap = b.value.sub(&a.value);
    let n_minus_b = HiReal::from_i64(n as i64, prec).sub(&b.value);

    let (x, y, z) = (t.x(), t.y(), t.z());
    let p1 = power_sum(x, y, n - 1);
    let p = power_sum(x, y, n);
    let k = Rat::from_nats(&p, &p1);
    let identity = HiReal::ln_rat(&k, prec)?.div(&lz)?;
    let gap_identity_residual = gap.sub(&identity).abs();

    let gap_in_unit = p > p1 && p < z * &p1;
    let k_squared_above_z = &p * &p > z * &p1 * &p1;
    let n_minus_b_below_half = &p * &p > ipow(z, 2 * n - 1);
    let half = Rat::new(1, 2);
    let float_agrees = gap.cmp_rat(&Rat::zero()).is(Ordering::Greater) == (p > p1)
        && gap.cmp_rat(&Rat::one()).is(Ordering::Less) == (p < z * &p1)
        && gap.cmp_rat(&half).is(Ordering::Greater) == k_squared_above_z
        && n_minus_b.cmp_rat(&half).is(Ordering::Less) == n_minus_b_below_half;
    let class = classify(t).tag;

    Ok(LogBoundsReport {
        triplet: t.clone(),
        class,
        n,
        a_is_two: a.exact == Some(2),
        a,
        b,
        gap,
        n_minus_b,
        k_n_minus_1: k,
        gap_in_unit,
        gap_above_half: k_squared_above_z,
        n_minus_b_below_half,
        k_squared_above_z,
        gap_identity_residual,
        bounds_are_theorems: class == ClassTag::AcuteScalene,
        float_agrees,
    })
}

/// Histogram bin of `b - a = ln k / ln z` among `bins` equal bins of
/// `[0, 1)`: the largest `j < bins` with `k^bins >= z^j`.
pub fn gap_bin(k: &Rat, z: &Nat, bins: u32) -> usize {
    let kb = k.pow(bins as i32);
    let zr = Rat::from_integer(BigInt::from(z.clone()));
    let mut zj = Rat::one();
    let mut bin = 0usize;
    for j in 1..bins {
        zj = &zj * &zr;
        if kb >= zj {
            bin = j as usize;
        } else {
            break;
        }
    }
    bin
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderFlag {
    Strict,
    Equal,
    /// Within the combined error bounds; neither order certified.
    Unresolved,
    Violated,
}

impl OrderFlag {
    fn from_certified(c: Certified) -> Self {
        match c {
            Certified::Decided(Ordering::Less) => OrderFlag::Strict,
            Certified::Decided(Ordering::Equal) => OrderFlag::Equal,
            Certified::Decided(Ordering::Greater) => OrderFlag::Violated,
            Certified::Indeterminate => OrderFlag::Unresolved,
        }
    }

    fn from_exact(o: Ordering) -> Self {
        Self::from_certified(Certified::Decided(o))
    }
}

/// The chain `n - 1 <= a <= s <= b <= n`, one flag per link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolveOrdering {
    pub n_minus_1_vs_a: OrderFlag,
    pub a_vs_s: OrderFlag,
    pub s_vs_b: OrderFlag,
    pub b_vs_n: OrderFlag,
}

impl SolveOrdering {
    pub fn ok(&self) -> bool {
        ![self.n_minus_1_vs_a, self.a_vs_s, self.s_vs_b, self.b_vs_n].contains(&OrderFlag::Violated)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualizerResult {
    pub triplet: Triplet,
    pub n: u32,
    /// Midpoint of the final bracket; its error bound covers the bracket.
    pub s: HiReal,
    pub bracket: (HiReal, HiReal),
    pub iterations: u32,
    /// `|s ln z - ln(x^s + y^s)|` at the midpoint.
    pub residual: HiReal,
    pub residual_within_tolerance: bool,
    pub a: HiReal,
    pub b: HiReal,
    /// `s` equals `a = n - 1` exactly.
    pub boundary_equality: bool,
    pub ordering: SolveOrdering,
    pub ordering_ok: bool,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tolerance: Rat,
    pub precision: Precision,
    pub cap: Precision,
}

impl SolveOptions {
    pub fn new(tolerance: f64, precision: Precision) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
        }
        let tolerance = Rat::from(num_rational::BigRational::from_float(tolerance).expect("finite"));
        Ok(SolveOptions { tolerance, precision, cap: Precision::digits(Precision::DEFAULT_CAP_DIGITS.max(precision.get())) })
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions::new(1e-12, Precision::default()).unwrap()
    }
}

/// `g(s) = s ln z - ln(x^s + y^s)`, with per-precision constants cached.
struct Equalizer<'a> {
    t: &'a Triplet,
    cache: Vec<(Precision, HiReal, HiReal, HiReal)>,
}

impl<'a> Equalizer<'a> {
    fn new(t: &'a Triplet) -> Self {
        Equalizer { t, cache: Vec::new() }
    }

    fn constants(&mut self, prec: Precision) -> Result<(HiReal, HiReal, HiReal)> {
        if let Some((_, lz, lx, lr)) = self.cache.iter().find(|c| c.0 == prec) {
            return Ok((lz.clone(), lx.clone(), lr.clone()));
        }
        let lz = HiReal::ln_nat(self.t.z(), prec)?;
        let lx = HiReal::ln_nat(self.t.x(), prec)?;
        let lr = HiReal::ln_rat(&Rat::from_nats(self.t.y(), self.t.x()), prec)?;
        self.cache.push((prec, lz.clone(), lx.clone(), lr.clone()));
        Ok((lz, lx, lr))
    }

    fn eval(&mut self, s: &Rat, prec: Precision) -> Result<HiReal> {
        let (lz, lx, lr) = self.constants(prec)?;
        let sv = HiReal::from_rat(s, prec);
        Ok(sv.mul(&lz).sub(&log_power_sum_with(&lx, &lr, &sv)?))
    }

    /// Sign of `g(s)`, escalating precision while undecided.
    fn sign(&mut self, s: &Rat, start: Precision, cap: Precision) -> Result<Option<Ordering>> {
        let mut prec = start;
        loop {
            let g = self.eval(s, prec)?;
            if let Some(o) = g.cmp_rat(&Rat::zero()).decided() {
                return Ok(Some(o));
            }
            if prec >= cap {
                return Ok(None);
            }
            prec = prec.doubled().min(cap);
        }
    }
}

/// Bisection for `z^s = x^s + y^s` on the bracket `[a, b]`.
pub fn solve_s(t: &Triplet, opts: &SolveOptions) -> Result<EqualizerResult> {
    let rev = reversion_exponent(t)?;
    let n = rev.n;
    let prec = opts.precision;
    let lz = ln_z(t.z(), prec)?;
    let a = log_bound(t, n - 1, &lz)?;
    let b = log_bound(t, n, &lz)?;
    let mut g = Equalizer::new(t);
    let n_rat = Rat::from(n as i64);
    let n1_rat = Rat::from(n as i64 - 1);

    let (lo, hi, iterations, boundary) = if let Some(m) = a.exact {
        // g(a) = 0 exactly; the root is unique because (x/z)^s + (y/z)^s decreases.
        let m = Rat::from(m as i64);
        (m.clone(), m, 0, true)
    } else {
        let mut lo = a.value.midpoint() - a.value.error_bound();
        let mut hi = b.value.midpoint() + b.value.error_bound();
        if lo < n1_rat {
            lo = n1_rat.clone();
        }
        if hi > n_rat {
            hi = n_rat.clone();
        }
        let lo_sign = g.sign(&lo, prec, opts.cap)?;
        let hi_sign = g.sign(&hi, prec, opts.cap)?;
        if lo_sign == Some(Ordering::Greater) || hi_sign == Some(Ordering::Less) {
            return Err(Error::NoSignChange { lo: lo.to_string(), hi: hi.to_string() });
        }
        let ulp = Rat::new(1, BigInt::one() << prec.bits());
        let mut iterations = 0u32;
        while &hi - &lo > opts.tolerance && &hi - &lo > ulp {
            let mid = &(&lo + &hi) * &Rat::new(1, 2);
            iterations += 1;
            match g.sign(&mid, prec, opts.cap)? {
                Some(Ordering::Less) => lo = mid,
                Some(Ordering::Greater) => hi = mid,
                // g vanishes to within the finest error bound
                _ => {
                    lo = mid.clone();
                    hi = mid;
                }
            }
        }
        (lo, hi, iterations, false)
    };

    let mid = &(&lo + &hi) * &Rat::new(1, 2);
    let half_width = &(&hi - &lo) * &Rat::new(1, 2);
    let s = HiReal::from_rat(&mid, prec).widen(&half_width);
    let residual = g.eval(&mid, prec)?.abs();
    let ln_z_lower = lz.midpoint() - lz.error_bound();
    let residual_within_tolerance = residual.abs_upper() <= &opts.tolerance * &ln_z_lower;

    let ordering = SolveOrdering {
        n_minus_1_vs_a: OrderFlag::from_exact(ipow(t.z(), n - 1).cmp(&power_sum(t.x(), t.y(), n - 1))),
        a_vs_s: if boundary { OrderFlag::Equal } else { OrderFlag::from_certified(a.value.cmp_hireal(&s)) },
        s_vs_b: OrderFlag::from_certified(s.cmp_hireal(&b.value)),
        b_vs_n: OrderFlag::from_exact(power_sum(t.x(), t.y(), n).cmp(&ipow(t.z(), n))),
    };

    Ok(EqualizerResult {
        triplet: t.clone(),
        n,
        s,
        bracket: (HiReal::from_rat(&lo, prec), HiReal::from_rat(&hi, prec)),
        iterations,
        residual,
        residual_within_tolerance,
        a: a.value,
        b: b.value,
        boundary_equality: boundary,
        ordering_ok: ordering.ok(),
        ordering,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    pub n: u32,
    pub b: HiReal,
    /// `z^n < x^n + y^n`, exactly; equivalent to `b(n) > n`.
    pub b_above_n: bool,
    /// The decimal value of `b(n)` is certified above `n`.
    pub float_agrees: bool,
    /// For `z = x = y`: `|(b(n) - n) - ln 2 / ln z|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln2_identity_residual: Option<HiReal>,
}

impl WitnessRow {
    pub fn ln2_identity_upper(&self) -> Option<Rat> {
        self.ln2_identity_residual.as_ref().map(HiReal::abs_upper)
    }
}

/// For triplets that never reverse (`z <= x`), shows `b(n) > n` for every
/// trial `n` up to `max_n`.
pub fn no_reversion_witness(t: &Triplet, max_n: u32, prec: Precision) -> Result<Vec<WitnessRow>> {
    if t.z() > t.x() {
        return Err(Error::WrongClass(format!("{t} reverses (z > x)")));
    }
    let lz = ln_z(t.z(), prec)?;
    let equilateral = t.x_eq_y() && t.z_eq_x();
    let ln2_over_lnz = if equilateral { Some(HiReal::ln2(prec).div(&lz)?) } else { None };
    (1..=max_n)
        .map(|n| {
            let bound = log_bound(t, n, &lz)?;
            let excess = bound.value.sub(&HiReal::from_i64(n as i64, prec));
            Ok(WitnessRow {
                n,
                b_above_n: bound.exact_order == Ordering::Greater,
                float_agrees: bound.agrees,
                ln2_identity_residual: ln2_over_lnz.as_ref().map(|r| excess.sub(r).abs()),
                b: bound.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn t(a: u64, b: u64, c: u64) -> Triplet {
        Triplet::from_u64(a, b, c).unwrap()
    }

    fn p() -> Precision {
        Precision::default()
    }

    fn near(v: &HiReal, printed: f64, tol: f64) {
        assert!((v.to_f64() - printed).abs() < tol, "{} vs {printed}", v.to_f64());
    }

    #[test]
    fn bound_b_examples() {
        let b = bound_b(&t(2, 5, 9), 1, p()).unwrap();
        near(&b.value, 0.885, 1e-3);
        assert!(b.agrees && b.exact_order == Ordering::Less);
        near(&bound_b(&t(6, 7, 8), 4, p()).unwrap().value, 3.950, 1e-3);
        near(&bound_b(&t(3, 4, 5), 3, p()).unwrap().value, 2.802, 1e-3);
        assert!(matches!(bound_b(&t(1, 1, 1), 1, p()), Err(Error::DegenerateBase)));
    }

    #[test]
    fn bound_a_examples() {
        let a = bound_a(&t(2, 7, 9), 2, p()).unwrap();
        assert_eq!(a.exact, Some(1));
        assert!(a.value.is_exact() && a.agrees && a.exact_order == Ordering::Equal);
        near(&bound_a(&t(4, 5, 6), 3, p()).unwrap().value, 2.072, 1e-3);
        let a = bound_a(&t(3, 4, 5), 3, p()).unwrap();
        assert_eq!(a.exact, Some(2));
        assert!(matches!(bound_a(&t(3, 4, 5), 0, p()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exact_log_detects_powers() {
        assert_eq!(exact_log(&Nat::from(25u8), &Nat::from(5u8)), Some(2));
        assert_eq!(exact_log(&Nat::from(1u8), &Nat::from(5u8)), Some(0));
        assert_eq!(exact_log(&Nat::from(24u8), &Nat::from(5u8)), None);
        assert_eq!(exact_log(&Nat::from(24u8), &Nat::from(1u8)), None);
    }

    #[test]
    fn gap_report_examples() {
        let r = gap_report(&t(2, 5, 9), p()).unwrap();
        near(&r.gap, 0.570, 1e-3);
        assert!(r.gap_in_unit && r.gap_above_half && !r.bounds_are_theorems);
        near(&gap_report(&t(6, 7, 8), p()).unwrap().gap, 0.908, 1e-3);
        near(&gap_report(&t(4, 5, 7), p()).unwrap().gap, 0.779, 1e-3);
        let r = gap_report(&t(3, 4, 5), p()).unwrap();
        assert!(r.a_is_two && r.float_agrees);
        assert!(matches!(gap_report(&t(3, 3, 3), p()), Err(Error::NoReversion { .. })));
    }

    #[test]
    fn a_is_two_only_for_pythagorean() {
        for (y, x, z) in crate::classify::canonical_triplets(60).filter(|&(_, x, z)| z > x) {
            let tr = t(y, x, z);
            let r = gap_report(&tr, Precision::digits(20)).unwrap();
            assert_eq!(r.a_is_two, y * y + x * x == z * z, "{tr}");
        }
    }

    #[test]
    fn gap_bins_are_exact() {
        // k = 2, z = 4: gap is exactly 1/2
        assert_eq!(gap_bin(&Rat::from(2), &Nat::from(4u8), 20), 10);
        assert_eq!(gap_bin(&Rat::one(), &Nat::from(9u8), 20), 0);
        let k = Rat::new(189, 41);
        let expected = ((189f64 / 41.0).ln() / 6f64.ln() * 20.0).floor() as usize;
        assert_eq!(gap_bin(&k, &Nat::from(6u8), 20), expected);
    }

    #[test]
    fn solve_pythagorean_boundary() {
        let r = solve_s(&t(3, 4, 5), &SolveOptions::default()).unwrap();
        assert!(r.boundary_equality && r.ordering_ok);
        assert!(r.s.contains(&Rat::from(2)) && r.s.is_exact());
        assert_eq!(r.ordering.n_minus_1_vs_a, OrderFlag::Equal);
        assert!(r.residual_within_tolerance);
    }

    #[test]
    fn solve_acute_and_degenerate() {
        let r = solve_s(&t(4, 5, 6), &SolveOptions::default()).unwrap();
        assert!(r.s.to_f64() > 2.0726 && r.s.to_f64() < 2.9253);
        assert!(r.residual_within_tolerance && r.ordering_ok && !r.boundary_equality);
        assert_eq!(r.ordering.a_vs_s, OrderFlag::Strict);
        let width = r.bracket.1.midpoint() - r.bracket.0.midpoint();
        assert!(width <= SolveOptions::default().tolerance);

        // 9 = 7 + 2 puts the root on the lower end of [1, 1.8069]
        let r = solve_s(&t(2, 7, 9), &SolveOptions::default()).unwrap();
        assert!(r.boundary_equality && r.s.contains(&Rat::one()));
        near(&r.b, 1.806, 1e-3);
    }

    #[test]
    fn solve_rejects_bad_input() {
        assert!(matches!(solve_s(&t(2, 4, 4), &SolveOptions::default()), Err(Error::NoReversion { .. })));
        assert!(SolveOptions::new(0.0, p()).is_err());
        assert!(SolveOptions::new(f64::NAN, p()).is_err());
    }

    #[test]
    fn halving_tolerance_moves_s_little() {
        for tr in [t(4, 5, 6), t(6, 7, 8), t(5, 9, 11), t(2, 3, 4)] {
            let coarse = SolveOptions::new(1e-8, p()).unwrap();
            let fine = SolveOptions::new(5e-9, p()).unwrap();
            let s1 = solve_s(&tr, &coarse).unwrap().s.midpoint();
            let s2 = solve_s(&tr, &fine).unwrap().s.midpoint();
            let moved = Rat::from((&s1 - &s2).as_big_rational().abs());
            assert!(moved <= coarse.tolerance, "{tr}");
        }
    }

    #[test]
    fn witness_examples() {
        let rows = no_reversion_witness(&t(2, 4, 4), 8, p()).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.b_above_n && r.float_agrees && r.ln2_identity_residual.is_none()));

        let rows = no_reversion_witness(&t(3, 3, 3), 8, p()).unwrap();
        for r in &rows {
            assert!(r.b_above_n);
            assert!(r.ln2_identity_upper().unwrap() < Rat::new(1, BigInt::from(10u8).pow(50)));
            near(&r.b.sub(&HiReal::from_i64(r.n as i64, p())), 2f64.ln() / 3f64.ln(), 1e-12);
        }

        assert!(no_reversion_witness(&t(1, 5, 5), 4, p()).unwrap().iter().all(|r| r.b_above_n));
        assert!(matches!(no_reversion_witness(&t(4, 5, 6), 4, p()), Err(Error::WrongClass(_))));
        assert!(matches!(no_reversion_witness(&t(1, 1, 1), 4, p()), Err(Error::DegenerateBase)));
    }
}
