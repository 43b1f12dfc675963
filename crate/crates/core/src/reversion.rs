//! Reversion exponent, power sums `p_i = x^i + y^i`, their ratios
//! `k_i = p_{i+1} / p_i`, the last triangle, and the reversor (`lambda`) and
//! `rho` intervals together with overreversion chains.
//!
//! Everything here is exact: naturals and lowest-terms rationals only.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::arith::{ipow, nat_string, Nat, Rat};
use crate::classify::{classify, ClassTag, Triplet};
use crate::error::{Error, Result};

pub fn power_sum(x: &Nat, y: &Nat, i: u32) -> Nat {
    ipow(x, i) + ipow(y, i)
}

/// `k_i = p_{i+1} / p_i` in lowest terms.
pub fn k_ratio(x: &Nat, y: &Nat, i: u32) -> Rat {
    Rat::from_nats(&power_sum(x, y, i + 1), &power_sum(x, y, i))
}

/// `k_0, ..., k_last` computed from one running sequence of power sums.
pub fn k_sequence(x: &Nat, y: &Nat, last: u32) -> Vec<Rat> {
    let (mut xi, mut yi) = (Nat::one(), Nat::one());
    let mut prev = &xi + &yi;
    let mut out = Vec::with_capacity(last as usize + 1);
    for _ in 0..=last {
        xi *= x;
        yi *= y;
        let next = &xi + &yi;
        out.push(Rat::from_nats(&next, &prev));
        prev = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReversionExponent {
    /// Smallest `i >= 1` with `z^i > x^i + y^i`.
    pub n: u32,
    /// `n >= 2` and `z^(n-1) < p_(n-1)` strictly; then `n - 1` is the
    /// largest positive exponent left unreversed.
    pub strict_at_n_minus_1: bool,
}

/// A-priori cap on the reversion exponent: once `(z/x)^i >= 2` the sum
/// `x^i + y^i <= 2 x^i` is exceeded, except for the single equality
/// `z^i = 2 x^i`, which the extra step covers.
pub fn exponent_bound(z: &Nat, x: &Nat) -> u32 {
    debug_assert!(z > x);
    let gap = Rat::from_nats(&(z - x), x).to_f64();
    let ln_ratio = gap.ln_1p();
    if ln_ratio.is_nan() || ln_ratio <= 0.0 || !ln_ratio.is_finite() {
        return if gap.is_infinite() { 2 } else { u32::MAX };
    }
    let bound = (std::f64::consts::LN_2 / ln_ratio * (1.0 + 1e-9)).ceil();
    bound.to_u32().unwrap_or(u32::MAX - 1).saturating_add(1)
}

pub fn reversion_exponent(t: &Triplet) -> Result<ReversionExponent> {
    let (z, x, y) = (t.z(), t.x(), t.y());
    if z <= x {
        return Err(Error::NoReversion { z: z.to_string(), x: x.to_string() });
    }
    let bound = exponent_bound(z, x);
    let (mut zi, mut xi, mut yi) = (Nat::one(), Nat::one(), Nat::one());
    let mut prev = Ordering::Less;
    for i in 1..=bound {
        zi *= z;
        xi *= x;
        yi *= y;
        let ord = zi.cmp(&(&xi + &yi));
        if ord == Ordering::Greater {
            return Ok(ReversionExponent { n: i, strict_at_n_minus_1: i >= 2 && prev == Ordering::Less });
        }
        prev = ord;
    }
    unreachable!("z > x reverses within {bound} steps")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatInterval {
    pub lower: Rat,
    pub upper: Rat,
}

impl RatInterval {
    pub fn contains_closed(&self, v: &Rat) -> bool {
        &self.lower <= v && v <= &self.upper
    }

    pub fn contains_open(&self, v: &Rat) -> bool {
        &self.lower < v && v < &self.upper
    }
}

/// The triangle `(y^(n-1), x^(n-1), z^(n-1))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerTriangle {
    #[serde(with = "nat_string")]
    pub y: Nat,
    #[serde(with = "nat_string")]
    pub x: Nat,
    #[serde(with = "nat_string")]
    pub z: Nat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReversionAnalysis {
    pub triplet: Triplet,
    pub class: ClassTag,
    pub n: u32,
    pub n_minus_1: u32,
    pub strict_at_n_minus_1: bool,
    #[serde(with = "nat_string")]
    pub p_n_minus_1: Nat,
    #[serde(with = "nat_string")]
    pub p_n: Nat,
    #[serde(with = "nat_string")]
    pub z_pow_n: Nat,
    pub k_n_minus_1: Rat,
    pub phi: Rat,
    /// `[k_(n-1), z^n / p_(n-1)]`
    pub rho_interval: RatInterval,
    /// `[phi, z / k_(n-1)]`
    pub lambda_interval: RatInterval,
    pub last_triangle: PowerTriangle,
    /// `z^(2n-2) > p_(2n-2)`, evaluated exactly for every `n`.
    pub last_triangle_square_reversed: bool,
    /// The squared reversal is only guaranteed when `2n - 2 > n`.
    pub square_reversal_required: bool,
    /// `z / k_(n-1) > phi`, equivalently `z^n > p_n`.
    pub lambda_interval_nondegenerate: bool,
    /// `lambda_max z^(n-1) >= p_(n-1)` and `z^n > p_n` for `lambda_max = z / k_(n-1)`.
    pub reversor_implication: bool,
    /// `y < k_(n-1) < x`; `None` when `x = y` (then `k` equals `x`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_strictly_between_bases: Option<bool>,
}

impl ReversionAnalysis {
    pub fn lambda_max(&self) -> &Rat {
        &self.lambda_interval.upper
    }

    pub fn rho_max(&self) -> &Rat {
        &self.rho_interval.upper
    }
}

pub fn analyze(t: &Triplet) -> Result<ReversionAnalysis> {
    let rev = reversion_exponent(t)?;
    let n = rev.n;
    if n == 1 {
        return Err(Error::NoLastTriangle);
    }
    if !rev.strict_at_n_minus_1 {
        return Err(Error::BoundaryEquality { exponent: n - 1 });
    }
    let (z, x, y) = (t.z(), t.x(), t.y());
    let zn1 = ipow(z, n - 1);
    let zn = &zn1 * z;
    let (xn1, yn1) = (ipow(x, n - 1), ipow(y, n - 1));
    let p_n_minus_1 = &xn1 + &yn1;
    let p_n = power_sum(x, y, n);
    let k = Rat::from_nats(&p_n, &p_n_minus_1);
    let phi = Rat::from_nats(&p_n_minus_1, &zn1);
    let z_rat = Rat::from_integer(BigInt::from(z.clone()));
    let rho_interval = RatInterval { lower: k.clone(), upper: Rat::from_nats(&zn, &p_n_minus_1) };
    let lambda_max = &z_rat / &k;
    let lambda_interval = RatInterval { lower: phi.clone(), upper: lambda_max.clone() };

    let square_exp = 2 * n - 2;
    let last_triangle_square_reversed = ipow(z, square_exp) > power_sum(x, y, square_exp);
    let zn1_rat = Rat::from_integer(BigInt::from(zn1.clone()));
    let p1_rat = Rat::from_integer(BigInt::from(p_n_minus_1.clone()));
    let reversor_implication = &lambda_max * &zn1_rat >= p1_rat && zn > p_n;
    let k_strictly_between_bases = (!t.x_eq_y()).then(|| {
        let (xr, yr) = (Rat::from_integer(BigInt::from(x.clone())), Rat::from_integer(BigInt::from(y.clone())));
        yr < k && k < xr
    });

    Ok(ReversionAnalysis {
        triplet: t.clone(),
        class: classify(t).tag,
        n,
        n_minus_1: n - 1,
        strict_at_n_minus_1: true,
        lambda_interval_nondegenerate: lambda_max > phi,
        p_n_minus_1,
        p_n,
        z_pow_n: zn,
        k_n_minus_1: k,
        phi,
        rho_interval,
        lambda_interval,
        last_triangle: PowerTriangle { y: yn1, x: xn1, z: zn1 },
        last_triangle_square_reversed,
        square_reversal_required: n > 2,
        reversor_implication,
        k_strictly_between_bases,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chain {
    /// `zeta_n = p_n`
    AtLowerBound,
    /// `z^n > zeta_n > p_n`
    StrictChain,
    /// `zeta_n = z^n`
    AtUpperBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverreversionRecord {
    pub rho: Rat,
    pub lambda: Rat,
    pub zeta_n: Rat,
    pub chain: Chain,
    #[serde(with = "nat_string")]
    pub z_pow_n: Nat,
    #[serde(with = "nat_string")]
    pub p_n: Nat,
}

/// `zeta_n = rho p_(n-1)` for a `rho` inside the closed `rho` interval.
pub fn overreversion(t: &Triplet, rho: &Rat) -> Result<OverreversionRecord> {
    let an = analyze(t)?;
    overreversion_in(&an, rho)
}

pub fn overreversion_in(an: &ReversionAnalysis, rho: &Rat) -> Result<OverreversionRecord> {
    if !an.rho_interval.contains_closed(rho) {
        return Err(Error::OutOfInterval {
            rho: rho.to_string(),
            lower: an.rho_interval.lower.to_string(),
            upper: an.rho_interval.upper.to_string(),
        });
    }
    let z = Rat::from_integer(BigInt::from(an.triplet.z().clone()));
    let zeta_n = rho * &Rat::from_integer(BigInt::from(an.p_n_minus_1.clone()));
    let p_n = Rat::from_integer(BigInt::from(an.p_n.clone()));
    let z_n = Rat::from_integer(BigInt::from(an.z_pow_n.clone()));
    let chain = if zeta_n == p_n {
        Chain::AtLowerBound
    } else if zeta_n == z_n {
        Chain::AtUpperBound
    } else {
        debug_assert!(p_n < zeta_n && zeta_n < z_n);
        Chain::StrictChain
    };
    Ok(OverreversionRecord {
        rho: rho.clone(),
        lambda: &z / rho,
        zeta_n,
        chain,
        z_pow_n: an.z_pow_n.clone(),
        p_n: an.p_n.clone(),
    })
}

/// `phi < lambda < z / k_(n-1)`, exactly.
pub fn is_overreversor(t: &Triplet, lambda: &Rat) -> Result<bool> {
    Ok(analyze(t)?.lambda_interval.contains_open(lambda))
}
