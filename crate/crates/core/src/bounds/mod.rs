//! Numeric evaluation of the bound formulas for `iota(2^n - 1)`.
//!
//! Throughout, `L = floor(log2 n)` and `e_j = floor((n-1) / 2^j)`. Formulas
//! that only involve integers and powers of two are evaluated exactly as
//! [`DyadicRational`]s; the two involving logarithms carry an explicit error.

mod dyadic;
mod numeric;

use std::fmt;
use std::str::FromStr;

pub use dyadic::DyadicRational;
pub use numeric::{
    log_cube_integral, log_cube_integral_with_error, prime_count, PrimeSieve, PRIME_COUNT_MAX,
};

use crate::constructors::prime_ladder_chain;
use crate::error::{domain, Error, Result};
use crate::search::{Iota, IotaSource};

/// `floor(log2 n)` via bit length.
pub fn floor_log2(n: u64) -> u32 {
    assert!(n > 0, "floor_log2(0)");
    n.ilog2()
}

/// `xi(n, j) = n/2^j - k_j` where `k_0 = n`, `k_j = floor(k_(j-1) / 2)`.
pub fn xi(n: u64, j: u32) -> Result<DyadicRational> {
    if n < 2 {
        return Err(domain("xi", format!("n = {n} below 2")));
    }
    let l = floor_log2(n);
    if j < 1 || j > l {
        return Err(domain("xi", format!("j = {j} outside 1..={l}")));
    }
    let mut k = n;
    for _ in 0..j {
        k /= 2;
    }
    Ok(DyadicRational::new(n as i128, j) - DyadicRational::integer(k as i128))
}

/// `theta(n, s) = xi(n, 1) + ... + xi(n, s)`.
pub fn theta(n: u64, s: u32) -> Result<DyadicRational> {
    if s < 1 {
        return Err(domain("theta", "s must be at least 1"));
    }
    (1..=s).try_fold(DyadicRational::ZERO, |acc, j| Ok(acc + xi(n, j)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    BrauerLower,
    BrauerUpper,
    Simple,
    Integral,
    Backtrack,
    Pothole,
    Improved,
    Main,
    ScholzRhs,
}

impl BoundKind {
    pub const ALL: [BoundKind; 9] = [
        BoundKind::BrauerLower,
        BoundKind::BrauerUpper,
        BoundKind::Simple,
        BoundKind::Integral,
        BoundKind::Backtrack,
        BoundKind::Pothole,
        BoundKind::Improved,
        BoundKind::Main,
        BoundKind::ScholzRhs,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            BoundKind::BrauerLower => "brauer_lower",
            BoundKind::BrauerUpper => "brauer_upper",
            BoundKind::Simple => "simple",
            BoundKind::Integral => "integral",
            BoundKind::Backtrack => "backtrack",
            BoundKind::Pothole => "pothole",
            BoundKind::Improved => "improved",
            BoundKind::Main => "main",
            BoundKind::ScholzRhs => "scholz_rhs",
        }
    }

    /// Whether the formula contains `iota(n)`.
    pub fn needs_iota(self) -> bool {
        matches!(
            self,
            BoundKind::Integral | BoundKind::Pothole | BoundKind::Improved | BoundKind::ScholzRhs
        )
    }

    /// `brauer_lower` bounds `iota(n)` from below; every other kind bounds
    /// `iota(2^n - 1)` from above.
    pub fn is_lower(self) -> bool {
        self == BoundKind::BrauerLower
    }

    pub fn min_n(self) -> u64 {
        match self {
            BoundKind::BrauerLower => 1,
            BoundKind::Integral => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BoundKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| domain("bound kind", format!("unknown kind {s:?}")))
    }
}

/// Either an exact dyadic value or a float with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundNumber {
    Exact(DyadicRational),
    Real { value: f64, error: f64 },
}

impl BoundNumber {
    pub fn approx(&self) -> f64 {
        match self {
            BoundNumber::Exact(d) => d.to_f64(),
            BoundNumber::Real { value, .. } => *value,
        }
    }

    /// `len <= self`, and for reals `len <= value - error`.
    pub fn admits_at_most(&self, len: u64) -> bool {
        match self {
            BoundNumber::Exact(d) => DyadicRational::integer(len as i128) <= *d,
            BoundNumber::Real { value, error } => (len as f64) <= value - error,
        }
    }

    /// `len > self`, and for reals `len > value + error`.
    pub fn admits_above(&self, len: u64) -> bool {
        match self {
            BoundNumber::Exact(d) => DyadicRational::integer(len as i128) > *d,
            BoundNumber::Real { value, error } => (len as f64) > value + error,
        }
    }
}

impl fmt::Display for BoundNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundNumber::Exact(d) => write!(f, "{d}"),
            BoundNumber::Real { value, .. } => write!(f, "{value:.9}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub n: u64,
    pub value: BoundNumber,
    pub iota_source: Option<IotaSource>,
}

/// Evaluates `kind` at `n`. Kinds containing `iota(n)` need `iota`; the
/// caller decides where it comes from (see [`crate::search::IotaOracle`]).
pub fn bound_value(kind: BoundKind, n: u64, iota: Option<Iota>) -> Result<BoundValue> {
    if n < kind.min_n() {
        return Err(domain(
            "bound_value",
            format!("{kind} needs n >= {}, got {n}", kind.min_n()),
        ));
    }
    let iota_value = if kind.needs_iota() {
        let i = iota.ok_or(Error::MissingIota {
            kind: kind.tag(),
            n,
        })?;
        Some(i)
    } else {
        None
    };
    let iv = || iota_value.map(|i| i.value as i128).unwrap_or(0);
    let ni = n as i128;
    let l = floor_log2(n) as i128;
    let e_l = ((n - 1) >> floor_log2(n)) as i128;
    let exact = |v: DyadicRational| BoundNumber::Exact(v);
    let int = |v: i128| BoundNumber::Exact(DyadicRational::integer(v));

    let value = match kind {
        BoundKind::BrauerLower => {
            let v = (n as f64).log2() - 1.0;
            BoundNumber::Real {
                value: v,
                error: real_error(v),
            }
        }
        BoundKind::BrauerUpper => {
            let v = brauer_upper_mersenne(n);
            BoundNumber::Real {
                value: v,
                error: real_error(v),
            }
        }
        BoundKind::Simple => int(ni + 1 + (ni - 2) / 2),
        BoundKind::Integral => {
            let ladder = prime_ladder_chain(n)?;
            let nf = n as f64;
            let upper = (nf - 1.0) / 2.0;
            let (integral, quad_err) = if upper > 2.0 {
                log_cube_integral_with_error(2.0, upper)?
            } else {
                (0.0, 0.0)
            };
            let scale = 1.3 * nf.ln();
            let v = nf + iv() as f64 + nf / nf.ln() + scale * integral + ladder.filler_count as f64;
            BoundNumber::Real {
                value: v,
                error: real_error(v) + scale * quad_err,
            }
        }
        BoundKind::Backtrack => int(2 * ni - 1 - 2 * e_l + l),
        BoundKind::Pothole => int(2 * ni - 1 - e_l - l + iv()),
        BoundKind::Improved => {
            // 3n/2 - floor((n-2)/2^L) - (L-1) + (1-(-1)^n)/4 + iota(n)
            let three_halves = DyadicRational::new(3 * ni, 1);
            let parity = if n % 2 == 1 {
                DyadicRational::new(1, 1)
            } else {
                DyadicRational::ZERO
            };
            let rest = -((ni - 2) >> l) - (l - 1) + iv();
            exact(three_halves + parity + DyadicRational::integer(rest))
        }
        BoundKind::Main => {
            let th = theta(n, l as u32)?;
            exact(DyadicRational::integer(ni + 1 + 3 * l) - th)
        }
        BoundKind::ScholzRhs => int(ni - 1 + iv()),
    };
    Ok(BoundValue {
        kind,
        n,
        value,
        iota_source: iota_value.map(|i| i.source),
    })
}

fn real_error(v: f64) -> f64 {
    32.0 * f64::EPSILON * v.abs().max(1.0)
}

/// Brauer's asymptotic upper bound
/// `log2 r * (1 + 1/ln ln r + 2 ln 2 / (ln r)^(1 - ln 2))` at `r = 2^n - 1`.
pub fn brauer_upper_mersenne(n: u64) -> f64 {
    let nf = n as f64;
    let tail = (-(2f64.powi(-(n.min(1000) as i32)))).ln_1p();
    let ln_r = nf * std::f64::consts::LN_2 + tail;
    let log2_r = ln_r / std::f64::consts::LN_2;
    let ln2 = std::f64::consts::LN_2;
    log2_r * (1.0 + 1.0 / ln_r.ln() + 2.0 * ln2 / ln_r.powf(1.0 - ln2))
}

/// A constructed length checked against a bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub n: u64,
    pub kind: BoundKind,
    pub constructed_length: u64,
    pub bound: BoundValue,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(bound: BoundValue, constructed_length: u64) -> Self {
        let satisfied = if bound.kind.is_lower() {
            bound.value.admits_above(constructed_length)
        } else {
            bound.value.admits_at_most(constructed_length)
        };
        BoundReport {
            n: bound.n,
            kind: bound.kind,
            constructed_length,
            bound,
            satisfied,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(num: i128, exp: u32) -> DyadicRational {
        DyadicRational::new(num, exp)
    }

    fn searched(v: u32) -> Option<Iota> {
        Some(Iota {
            value: v,
            source: IotaSource::Search,
        })
    }

    fn exact(kind: BoundKind, n: u64, iota: Option<Iota>) -> DyadicRational {
        match bound_value(kind, n, iota).unwrap().value {
            BoundNumber::Exact(v) => v,
            other => panic!("{kind} not exact: {other:?}"),
        }
    }

    #[test]
    fn xi_and_theta_examples() {
        assert_eq!(xi(7, 1).unwrap(), d(1, 1));
        assert_eq!(xi(7, 2).unwrap(), d(3, 2));
        assert_eq!(xi(6, 1).unwrap(), DyadicRational::ZERO);
        assert_eq!(xi(6, 2).unwrap(), d(1, 1));
        for r in 1..20 {
            for j in 1..=r {
                assert_eq!(xi(1 << r, j).unwrap(), DyadicRational::ZERO);
            }
        }
        assert_eq!(theta(7, 2).unwrap(), d(5, 2));
        assert_eq!(theta(64, 6).unwrap(), DyadicRational::ZERO);
        assert_eq!(theta(6, 2).unwrap(), d(1, 1));
        assert!(xi(7, 3).is_err());
        assert!(xi(7, 0).is_err());
        assert!(theta(7, 0).is_err());
    }

    #[test]
    fn floor_log2_matches_bit_length() {
        for n in 1..=1_000_000u64 {
            assert_eq!(floor_log2(n), 64 - n.leading_zeros() - 1);
        }
    }

    #[test]
    fn bound_examples() {
        let i = DyadicRational::integer;
        assert_eq!(exact(BoundKind::Simple, 4, None), i(6));
        assert_eq!(exact(BoundKind::Main, 64, None), i(83));
        assert_eq!(exact(BoundKind::Pothole, 8, searched(3)), i(15));
        assert_eq!(exact(BoundKind::Backtrack, 16, None), i(35));
        assert_eq!(exact(BoundKind::ScholzRhs, 10, searched(4)), i(13));
        assert_eq!(exact(BoundKind::Improved, 8, searched(3)), i(13));
        let bl = bound_value(BoundKind::BrauerLower, 2, None).unwrap();
        assert_eq!(bl.value.approx(), 0.0);
        assert!(bl.iota_source.is_none());
    }

    #[test]
    fn missing_iota_is_an_error() {
        assert!(matches!(
            bound_value(BoundKind::Pothole, 8, None),
            Err(Error::MissingIota { n: 8, .. })
        ));
        let b = bound_value(BoundKind::Improved, 9, searched(4)).unwrap();
        assert_eq!(b.iota_source, Some(IotaSource::Search));
    }

    #[test]
    fn real_kinds_have_small_error() {
        for n in [3u64, 10, 64, 500, 4096, 8192] {
            for kind in [
                BoundKind::BrauerUpper,
                BoundKind::Integral,
                BoundKind::BrauerLower,
            ] {
                let b = bound_value(kind, n, searched(n.ilog2() + 2)).unwrap();
                match b.value {
                    BoundNumber::Real { error, .. } => assert!(error <= 1e-9, "{kind} {n}"),
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn conservative_comparisons() {
        let v = BoundNumber::Real {
            value: 10.0,
            error: 1e-9,
        };
        assert!(!v.admits_at_most(10));
        assert!(v.admits_at_most(9));
        assert!(!v.admits_above(10));
        assert!(v.admits_above(11));
        let e = BoundNumber::Exact(DyadicRational::integer(10));
        assert!(e.admits_at_most(10));
        assert!(!e.admits_above(10));
    }

    #[test]
    fn brauer_upper_reference_point() {
        // n = 64: log2 r = 64, ln r = 44.3614..., hand-evaluated factor 1.69656
        let v = brauer_upper_mersenne(64);
        assert!((v - 108.58).abs() < 0.05, "{v}");
    }
}
