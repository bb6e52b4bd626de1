//! Prime counting and the `1 / ln^3 t` integral.

use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{domain, Result};

/// Largest argument [`prime_count`] accepts.
pub const PRIME_COUNT_MAX: f64 = 1e8;

/// Sieve of Eratosthenes over odd numbers; bit `i` marks `2i + 1` composite.
#[derive(Debug)]
pub struct PrimeSieve {
    limit: u64,
    composite: Vec<u64>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let slots = limit / 2 + 1;
        let mut composite = vec![0u64; (slots as usize).div_ceil(64)];
        let mark = |bits: &mut [u64], i: u64| bits[(i / 64) as usize] |= 1 << (i % 64);
        mark(&mut composite, 0); // 1 is not prime
        let mut p = 3u64;
        while p * p <= limit {
            let i = p / 2;
            if composite[(i / 64) as usize] & (1 << (i % 64)) == 0 {
                let mut m = p * p;
                while m <= limit {
                    mark(&mut composite, m / 2);
                    m += 2 * p;
                }
            }
            p += 2;
        }
        PrimeSieve { limit, composite }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes `<= x`; `x` must not exceed the sieve limit.
    pub fn count(&self, x: u64) -> u64 {
        assert!(x <= self.limit, "sieve limit {} below {x}", self.limit);
        if x < 2 {
            return 0;
        }
        // odd slots 0..=last cover 1, 3, ..., the largest odd <= x
        let last = (x - 1) / 2;
        let full = (last + 1) / 64;
        let mut odd_composites: u64 = self.composite[..full as usize]
            .iter()
            .map(|w| w.count_ones() as u64)
            .sum();
        let rem = (last + 1) % 64;
        if rem > 0 {
            let mask = (1u64 << rem) - 1;
            odd_composites += (self.composite[full as usize] & mask).count_ones() as u64;
        }
        1 + (last + 1) - odd_composites
    }
}

fn shared_sieve(limit: u64) -> Arc<PrimeSieve> {
    static SIEVE: OnceLock<RwLock<Arc<PrimeSieve>>> = OnceLock::new();
    let cell = SIEVE.get_or_init(|| RwLock::new(Arc::new(PrimeSieve::new(1 << 16))));
    {
        let current = cell.read().expect("sieve lock");
        if current.limit >= limit {
            return Arc::clone(&current);
        }
    }
    let mut slot = cell.write().expect("sieve lock");
    if slot.limit < limit {
        let grown = limit.max(slot.limit * 2).min(PRIME_COUNT_MAX as u64);
        *slot = Arc::new(PrimeSieve::new(grown));
    }
    Arc::clone(&slot)
}

/// `pi(x)`, exact for `0 <= x <= 1e8`.
pub fn prime_count(x: f64) -> Result<u64> {
    if !(0.0..=PRIME_COUNT_MAX).contains(&x) {
        return Err(domain("prime_count", format!("x = {x} outside [0, 1e8]")));
    }
    let x = x.floor() as u64;
    Ok(shared_sieve(x).count(x))
}

/// `∫_a^b dt / ln^3 t` for `2 <= a <= b`, absolute error below `1e-12`.
pub fn log_cube_integral(a: f64, b: f64) -> Result<f64> {
    Ok(log_cube_integral_with_error(a, b)?.0)
}

/// As [`log_cube_integral`], also returning the error estimate.
pub fn log_cube_integral_with_error(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite() && 2.0 <= a && a <= b) {
        return Err(domain(
            "log_cube_integral",
            format!("need 2 <= a <= b, got a = {a}, b = {b}"),
        ));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let f = |t: f64| t.ln().powi(-3);
    Ok(adaptive(&f, a, b, 1e-12, 60))
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XK[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
    let (value, err) = gauss_kronrod(f, a, b);
    if err <= tol || depth == 0 {
        return (value, err);
    }
    let m = 0.5 * (a + b);
    let (l, le) = adaptive(f, a, m, tol / 2.0, depth - 1);
    let (r, re) = adaptive(f, m, b, tol / 2.0, depth - 1);
    (l + r, le + re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_count(x: u64) -> u64 {
        (2..=x)
            .filter(|&p| (2..).take_while(|d| d * d <= p).all(|d| p % d != 0))
            .count() as u64
    }

    #[test]
    fn prime_count_examples() {
        assert_eq!(prime_count(10.0).unwrap(), 4);
        assert_eq!(prime_count(100.0).unwrap(), 25);
        assert_eq!(prime_count(1.5).unwrap(), 0);
        assert_eq!(prime_count(2.0).unwrap(), 1);
        assert_eq!(prime_count(1e6).unwrap(), 78_498);
        assert!(prime_count(-1.0).is_err());
        assert!(prime_count(2e8).is_err());
    }

    #[test]
    fn sieve_matches_trial_division() {
        let s = PrimeSieve::new(5000);
        for x in 0..=5000 {
            assert_eq!(s.count(x), trial_division_count(x), "x = {x}");
        }
    }

    /// Antiderivative of `1/ln^3 t`: `-t/(2 ln^2 t) - t/(2 ln t) + li(t)/2`,
    /// with `li` from its convergent series.
    fn antiderivative(t: f64) -> f64 {
        let u = t.ln();
        let mut term = 1.0;
        let mut series = 0.0;
        for k in 1..200 {
            term *= u / k as f64;
            series += term / k as f64;
        }
        let li = 0.577_215_664_901_532_9 + u.ln() + series;
        -t / (2.0 * u * u) - t / (2.0 * u) + li / 2.0
    }

    #[test]
    fn integral_matches_closed_form() {
        assert_eq!(log_cube_integral(2.0, 2.0).unwrap(), 0.0);
        for &(a, b) in &[(2.0, 3.0), (2.0, 31.5), (2.0, 4095.5), (5.0, 100.0)] {
            let (v, err) = log_cube_integral_with_error(a, b).unwrap();
            let exact = antiderivative(b) - antiderivative(a);
            assert!((v - exact).abs() < 1e-9, "[{a}, {b}]: {v} vs {exact}");
            assert!(err < 1e-10);
        }
        assert!(log_cube_integral(1.0, 3.0).is_err());
        assert!(log_cube_integral(3.0, 2.0).is_err());
    }
}
