use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strict root-height bound `h(f) < num/den`, held as an exact rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeightBound {
    num: i64,
    den: i64,
}

/// Denominator used when a height bound is derived from a real number.
pub const HEIGHT_DENOMINATOR: i64 = 1 << 12;

impl HeightBound {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if num <= 0 || den <= 0 {
            return Err(Error::Config(format!(
                "height bound {num}/{den} must be positive"
            )));
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(y: i64) -> Result<Self> {
        Self::new(y, 1)
    }

    /// The largest multiple of `1/4096` not exceeding `y`.
    pub fn from_f64(y: f64) -> Result<Self> {
        if !(y.is_finite() && y > 0.0) {
            return Err(Error::Config(format!(
                "height bound {y} must be finite and positive"
            )));
        }
        let num = (y * HEIGHT_DENOMINATOR as f64).floor() as i64;
        Self::new(num.max(1), HEIGHT_DENOMINATOR)
    }

    pub fn numer(&self) -> i64 {
        self.num
    }
    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Exact test that all roots of `x^3 + t x^2 + a x + b` have modulus
    /// strictly below the bound.
    pub fn admits(&self, t: i64, a: i64, b: i64) -> bool {
        match admits_i128(
            self.num as i128,
            self.den as i128,
            t as i128,
            a as i128,
            b as i128,
        ) {
            Some(v) => v,
            None => {
                let q = |v: i64| BigRational::from_integer(BigInt::from(v));
                roots_in_open_disk(&[q(t), q(a), q(b)], &self.to_rational())
            }
        }
    }
}

// Jury conditions for the rescaled cubic z^3 + (t/y) z^2 + (a/y^2) z + b/y^3,
// multiplied through by powers of the positive bound. Returns None on
// overflow so the caller can widen.
fn admits_i128(p: i128, q: i128, t: i128, a: i128, b: i128) -> Option<bool> {
    let m = |x: i128, y: i128| x.checked_mul(y);
    let p2 = m(p, p)?;
    let p3 = m(p2, p)?;
    let q2 = m(q, q)?;
    let q3 = m(q2, q)?;
    let bq3 = m(b, q3)?;
    if m(b.abs(), q3)? >= p3 {
        return Some(false);
    }
    let tp2q = m(m(t, p2)?, q)?;
    let apq2 = m(m(a, p)?, q2)?;
    let c1 = p3.checked_add(tp2q)?.checked_add(apq2)?.checked_add(bq3)?;
    let c2 = p3.checked_sub(tp2q)?.checked_add(apq2)?.checked_sub(bq3)?;
    if c1 <= 0 || c2 <= 0 {
        return Some(false);
    }
    let lhs = m(p3, p3)?.checked_sub(m(bq3, bq3)?)?;
    let inner = m(a, p2)?.checked_sub(m(m(t, b)?, q2)?)?;
    let rhs = m(m(p2, q2)?, inner.abs())?;
    Some(lhs > rhs)
}

/// Exact test in rational arithmetic that every root of the monic cubic
/// `z^3 + c[0] z^2 + c[1] z + c[2]` satisfies `|z| < radius`.
pub fn roots_in_open_disk(c: &[BigRational; 3], radius: &BigRational) -> bool {
    assert!(radius.is_positive());
    let y = radius;
    let y2 = y * y;
    let y3 = &y2 * y;
    let a2 = &c[0] / y;
    let a1 = &c[1] / &y2;
    let a0 = &c[2] / &y3;
    let one = BigRational::one();
    let p1 = &one + &a2 + &a1 + &a0;
    let pm1 = &one - &a2 + &a1 - &a0;
    if !p1.is_positive() || !pm1.is_positive() {
        return false;
    }
    if a0.abs() >= one {
        return false;
    }
    let lhs = &one - &a0 * &a0;
    let rhs = (&a1 - &a0 * &a2).abs();
    lhs > rhs && !lhs.is_zero()
}

/// Integer range of constants `B` for which `x^3 + t x^2 + a x + B` has
/// height below `y`. The admissible set is an interval in `B` (each Jury
/// condition is linear or a concave quadratic in `B`), so it is located with
/// floating endpoints and then pinned by the exact test near both ends.
pub fn row_b_range(y: &HeightBound, t: i64, a: i64) -> Option<(i64, i64)> {
    let yf = y.as_f64();
    let (tf, af) = (t as f64, a as f64);
    let y2 = yf * yf;
    let y3 = y2 * yf;
    let y4 = y2 * y2;
    let y6 = y3 * y3;
    let d1 = tf * tf * y4 + 4.0 * (y6 - af * y4);
    let d2 = tf * tf * y4 + 4.0 * (y6 + af * y4);
    // Slightly negative discriminants may still hide a sliver near the
    // boundary; treat them as zero-width and let the exact test decide.
    let tol = 1e-9 * (tf * tf * y4 + 4.0 * y6);
    if d1 < -tol || d2 < -tol {
        return None;
    }
    let s1 = d1.max(0.0).sqrt();
    let s2 = d2.max(0.0).sqrt();
    let lo = [
        -(y3 + tf * y2 + af * yf),
        -y3,
        (tf * y2 - s1) / 2.0,
        (-tf * y2 - s2) / 2.0,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let hi = [
        y3 - tf * y2 + af * yf,
        y3,
        (tf * y2 + s1) / 2.0,
        (-tf * y2 + s2) / 2.0,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let slack = 2.0 + 1e-9 * y3;
    if lo > hi + slack {
        return None;
    }
    let ok = |b: i64| y.admits(t, a, b);
    let lo_start = (lo - slack).floor() as i64;
    let lo_end = (lo + slack).ceil() as i64;
    let hi_start = (hi - slack).floor() as i64;
    let hi_end = (hi + slack).ceil() as i64;
    let first = (lo_start..=lo_end.min(hi_end)).find(|&b| ok(b));
    let last = (hi_start.max(lo_start)..=hi_end).rev().find(|&b| ok(b));
    match (first, last) {
        (Some(f), Some(l)) if f <= l => Some((f, l)),
        (None, None) => None,
        _ => {
            // Windows disagree; fall back to a full exact scan of the span.
            let mut it = (lo_start..=hi_end).filter(|&b| ok(b));
            let f = it.next()?;
            let l = it.last().unwrap_or(f);
            Some((f, l))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Cubic;
    use proptest::prelude::*;

    fn hb(n: i64, d: i64) -> HeightBound {
        HeightBound::new(n, d).unwrap()
    }

    #[test]
    fn height_examples() {
        assert!(!hb(1, 1).admits(0, 0, -1));
        assert!(hb(9, 8).admits(0, 0, -1));
        assert!(!hb(2, 1).admits(0, -2, -5));
        assert!(hb(1, 1).admits(0, 0, 0));
        assert!(!hb(1, 1).admits(0, 0, 1));
    }

    #[test]
    fn unit_height_row_ranges_contain_only_x_cubed() {
        let y = hb(1, 1);
        let mut found = Vec::new();
        for t in -1..=1 {
            for a in -3..=3 {
                if let Some((lo, hi)) = row_b_range(&y, t, a) {
                    for b in lo..=hi {
                        found.push((t, a, b));
                    }
                }
            }
        }
        assert_eq!(found, vec![(0, 0, 0)]);
    }

    #[test]
    fn row_range_matches_brute_force() {
        for (n, d) in [(7, 2), (10, 1), (13, 3), (1, 1), (5, 1)] {
            let y = hb(n, d);
            let yf = y.as_f64();
            let amax = (3.0 * yf * yf).ceil() as i64;
            let bmax = (yf * yf * yf).ceil() as i64;
            for t in -1..=1 {
                for a in -amax..=amax {
                    let brute: Vec<i64> = (-bmax..=bmax).filter(|&b| y.admits(t, a, b)).collect();
                    let fast: Vec<i64> = match row_b_range(&y, t, a) {
                        Some((lo, hi)) => (lo..=hi).collect(),
                        None => vec![],
                    };
                    assert_eq!(brute, fast, "y={n}/{d} t={t} a={a}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn exact_test_agrees_with_root_moduli(t in -1i64..=1, a in -400i64..400, b in -8000i64..8000,
                                              n in 1i64..2000, d in 1i64..64) {
            let y = hb(n, d);
            let m = Cubic::new(t, a, b).max_root_modulus();
            if (m - y.as_f64()).abs() > 1e-6 {
                prop_assert_eq!(y.admits(t, a, b), m < y.as_f64());
            }
        }

        #[test]
        fn rational_reference_agrees_with_fast_path(t in -1i64..=1, a in -400i64..400,
                                                     b in -8000i64..8000, n in 1i64..2000, d in 1i64..64) {
            let y = hb(n, d);
            let q = |v: i64| BigRational::from_integer(BigInt::from(v));
            prop_assert_eq!(y.admits(t, a, b), roots_in_open_disk(&[q(t), q(a), q(b)], &y.to_rational()));
        }

        // Depressed cubics: roots of f below Y iff roots of x^3 + (A/l^2)x + B/l^3 below Y/l.
        #[test]
        fn scaling_law(a in -300i64..300, b in -3000i64..3000, ln in 1i64..9, ld in 1i64..9,
                       n in 1i64..400, d in 1i64..16) {
            let y = hb(n, d).to_rational();
            let lam = BigRational::new(BigInt::from(ln), BigInt::from(ld));
            let q = |v: i64| BigRational::from_integer(BigInt::from(v));
            let zero = q(0);
            let direct = roots_in_open_disk(&[zero.clone(), q(a), q(b)], &y);
            let l2 = &lam * &lam;
            let l3 = &l2 * &lam;
            let scaled = roots_in_open_disk(&[zero, q(a) / l2, q(b) / l3], &(&y / &lam));
            prop_assert_eq!(direct, scaled);
        }
    }
}
