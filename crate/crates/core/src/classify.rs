//! Canonical triplets and their partition into seven classes by the exact
//! comparisons `z` vs `x + y`, `z^2` vs `x^2 + y^2`, and the equality
//! pattern of the sides.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::Serialize;

use crate::arith::{cmp_power_sum, nat_string, Nat};
use crate::error::{Error, Result};

/// Three positive integers sorted so that `z >= x >= y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triplet {
    #[serde(with = "nat_string")]
    y: Nat,
    #[serde(with = "nat_string")]
    x: Nat,
    #[serde(with = "nat_string")]
    z: Nat,
}

impl Triplet {
    /// Sorts the three values; input order carries no meaning.
    pub fn new(a: Nat, b: Nat, c: Nat) -> Result<Self> {
        if a.is_zero() || b.is_zero() || c.is_zero() {
            return Err(Error::NonPositive);
        }
        let mut v = [a, b, c];
        v.sort();
        let [y, x, z] = v;
        Ok(Triplet { y, x, z })
    }

    pub fn from_u64(a: u64, b: u64, c: u64) -> Result<Self> {
        Self::new(Nat::from(a), Nat::from(b), Nat::from(c))
    }

    pub fn y(&self) -> &Nat {
        &self.y
    }

    pub fn x(&self) -> &Nat {
        &self.x
    }

    pub fn z(&self) -> &Nat {
        &self.z
    }

    pub fn z_eq_x(&self) -> bool {
        self.z == self.x
    }

    pub fn x_eq_y(&self) -> bool {
        self.x == self.y
    }

    pub fn cmp_power_sum(&self, i: u32) -> Ordering {
        cmp_power_sum(&self.z, &self.x, &self.y, i)
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{},{}}}", self.y, self.x, self.z)
    }
}

impl FromStr for Triplet {
    type Err = Error;

    /// Accepts `"a,b,c"`, `"{a,b,c}"` or whitespace-separated values.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let parts: Vec<&str> = inner.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected three integers, got {s:?}")));
        }
        let mut vals = Vec::with_capacity(3);
        for p in parts {
            vals.push(p.parse::<Nat>().map_err(|_| Error::Parse(format!("not a positive integer: {p:?}")))?);
        }
        let c = vals.pop().unwrap();
        let b = vals.pop().unwrap();
        let a = vals.pop().unwrap();
        Triplet::new(a, b, c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
pub enum ClassTag {
    /// `z > x + y`
    NoTriangleStrict,
    /// `z = x + y`
    DegenerateSum,
    /// triangle with `z^2 > x^2 + y^2`
    Obtuse,
    /// triangle with `z^2 = x^2 + y^2`
    Right,
    /// triangle with `z^2 < x^2 + y^2` and `z > x`
    AcuteScalene,
    /// `z = x > y`
    AcuteZEqualsX,
    /// `z = x = y`
    Equilateral,
}

impl ClassTag {
    pub const ALL: [ClassTag; 7] = [
        ClassTag::NoTriangleStrict,
        ClassTag::DegenerateSum,
        ClassTag::Obtuse,
        ClassTag::Right,
        ClassTag::AcuteScalene,
        ClassTag::AcuteZEqualsX,
        ClassTag::Equilateral,
    ];

    /// Set label in the classic numbering. The `z = x > y` column shares its
    /// printed label with the generic acute set; the suffix disambiguates.
    pub fn set_label(self) -> &'static str {
        match self {
            ClassTag::NoTriangleStrict => "Set 1.1",
            ClassTag::DegenerateSum => "Set 1.2",
            ClassTag::Obtuse => "Set 2.1",
            ClassTag::Right => "Set 2.2",
            ClassTag::AcuteScalene => "Set 2.3.1",
            ClassTag::AcuteZEqualsX => "Set 2.3.1 (z=x>y)",
            ClassTag::Equilateral => "Set 2.3.2",
        }
    }

    pub fn predicted_n(self) -> PredictedN {
        match self {
            ClassTag::NoTriangleStrict => PredictedN::Fixed(1),
            ClassTag::DegenerateSum | ClassTag::Obtuse => PredictedN::Fixed(2),
            ClassTag::Right => PredictedN::Fixed(3),
            ClassTag::AcuteScalene => PredictedN::Computed,
            ClassTag::AcuteZEqualsX | ClassTag::Equilateral => PredictedN::NoneExists,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::NoTriangleStrict => "no-triangle-strict",
            ClassTag::DegenerateSum => "degenerate-sum",
            ClassTag::Obtuse => "obtuse",
            ClassTag::Right => "right",
            ClassTag::AcuteScalene => "acute-scalene",
            ClassTag::AcuteZEqualsX => "acute-z-equals-x",
            ClassTag::Equilateral => "equilateral",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s) || c.set_label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown class {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum PredictedN {
    Fixed(u32),
    /// Depends on the triplet; always greater than 2.
    Computed,
    NoneExists,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripletClass {
    pub tag: ClassTag,
    pub set_label: &'static str,
    pub predicted_n: PredictedN,
    pub z_eq_x: bool,
    pub x_eq_y: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

pub fn classify(t: &Triplet) -> TripletClass {
    let (z, x, y) = (t.z(), t.x(), t.y());
    let sum = x + y;
    let tag = match z.cmp(&sum) {
        Ordering::Greater => ClassTag::NoTriangleStrict,
        Ordering::Equal => ClassTag::DegenerateSum,
        Ordering::Less if t.z_eq_x() && t.x_eq_y() => ClassTag::Equilateral,
        Ordering::Less if t.z_eq_x() => ClassTag::AcuteZEqualsX,
        Ordering::Less => match t.cmp_power_sum(2) {
            Ordering::Greater => ClassTag::Obtuse,
            Ordering::Equal => ClassTag::Right,
            Ordering::Less => ClassTag::AcuteScalene,
        },
    };
    let note = match tag {
        ClassTag::Right if t.x_eq_y() => Some("x = y makes z irrational"),
        ClassTag::AcuteScalene | ClassTag::Obtuse if t.x_eq_y() => Some("isosceles with x = y < z"),
        _ => None,
    };
    TripletClass {
        tag,
        set_label: tag.set_label(),
        predicted_n: tag.predicted_n(),
        z_eq_x: t.z_eq_x(),
        x_eq_y: t.x_eq_y(),
        note,
    }
}

/// Every canonical triplet with `z <= z_max`, ordered by `(z, x, y)`.
pub fn canonical_triplets(z_max: u64) -> impl Iterator<Item = (u64, u64, u64)> {
    (1..=z_max).flat_map(|z| (1..=z).flat_map(move |x| (1..=x).map(move |y| (y, x, z))))
}
