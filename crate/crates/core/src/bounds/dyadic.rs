use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;

/// Exact value `numerator / 2^exponent`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: i128,
    exponent: u32,
}

impl DyadicRational {
    pub const ZERO: DyadicRational = DyadicRational {
        numerator: 0,
        exponent: 0,
    };

    pub fn new(numerator: i128, exponent: u32) -> Self {
        DyadicRational {
            numerator,
            exponent,
        }
        .normalized()
    }

    pub fn integer(v: i128) -> Self {
        DyadicRational::new(v, 0)
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> i128 {
        self.numerator >> self.exponent
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.exponent as i32)
    }

    fn normalized(mut self) -> Self {
        if self.numerator == 0 {
            self.exponent = 0;
            return self;
        }
        let tz = self.numerator.trailing_zeros().min(self.exponent);
        self.numerator >>= tz;
        self.exponent -= tz;
        self
    }

    fn aligned(a: Self, b: Self) -> (i128, i128, u32) {
        let e = a.exponent.max(b.exponent);
        let na = a.numerator << (e - a.exponent);
        let nb = b.numerator << (e - b.exponent);
        (na, nb, e)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: Self) -> Self {
        let (a, b, e) = DyadicRational::aligned(self, rhs);
        DyadicRational::new(a + b, e)
    }
}

impl Sub for DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> Self {
        DyadicRational {
            numerator: -self.numerator,
            exponent: self.exponent,
        }
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = DyadicRational::aligned(*self, *other);
        a.cmp(&b)
    }
}

impl From<i64> for DyadicRational {
    fn from(v: i64) -> Self {
        DyadicRational::integer(v as i128)
    }
}

/// Exact decimal expansion (every dyadic rational has a finite one).
impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            return write!(f, "{}", self.numerator);
        }
        // n / 2^e = n * 5^e / 10^e
        let scaled =
            BigInt::from(self.numerator.unsigned_abs()) * BigInt::from(5u32).pow(self.exponent);
        let digits = scaled.to_string();
        let e = self.exponent as usize;
        let padded = format!("{digits:0>width$}", width = e + 1);
        let (int, frac) = padded.split_at(padded.len() - e);
        let sign = if self.numerator < 0 { "-" } else { "" };
        write!(f, "{sign}{int}.{frac}")
    }
}
