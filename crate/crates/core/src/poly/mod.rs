//! Monic cubic integer polynomials: discriminant, roots, irreducibility, and
//! the exact root-height machinery used by every enumeration.

mod height;
mod region;

pub use height::{row_b_range, HeightBound};
pub use region::{enumerate_region, Congruence, RegionSpec, Sign, DEFAULT_BOX_BUDGET};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A general monic cubic `x^3 + t x^2 + a x + b` with integer coefficients.
///
/// Index computations run on this type because translating `x -> x + c`
/// leaves the normalized trace classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cubic {
    pub t: i64,
    pub a: i64,
    pub b: i64,
}

/// A monic cubic `x^3 + t x^2 + A x + B` with `t` in `{-1, 0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonicCubic {
    t: i64,
    a: i64,
    b: i64,
}

impl MonicCubic {
    pub fn new(t: i64, a: i64, b: i64) -> Result<Self> {
        if !(-1..=1).contains(&t) {
            return Err(Error::Config(format!(
                "trace coefficient {t} outside {{-1,0,1}}"
            )));
        }
        Ok(Self { t, a, b })
    }

    /// Caller guarantees `t` is in `{-1, 0, 1}`.
    pub(crate) const fn new_unchecked(t: i64, a: i64, b: i64) -> Self {
        Self { t, a, b }
    }

    pub fn t(&self) -> i64 {
        self.t
    }
    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn cubic(&self) -> Cubic {
        Cubic {
            t: self.t,
            a: self.a,
            b: self.b,
        }
    }

    pub fn discriminant(&self) -> Result<i128> {
        self.cubic().discriminant()
    }

    pub fn max_root_modulus(&self) -> f64 {
        self.cubic().max_root_modulus()
    }

    pub fn height_less_than(&self, y: &HeightBound) -> bool {
        y.admits(self.t, self.a, self.b)
    }

    pub fn is_irreducible(&self) -> bool {
        self.cubic().is_irreducible()
    }
}

impl From<MonicCubic> for Cubic {
    fn from(f: MonicCubic) -> Self {
        f.cubic()
    }
}

impl std::fmt::Display for MonicCubic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.cubic().fmt(f)
    }
}

impl std::fmt::Display for Cubic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x^3")?;
        for (c, mono) in [(self.t, "x^2"), (self.a, "x"), (self.b, "")] {
            if c != 0 {
                let sign = if c < 0 { '-' } else { '+' };
                let mag = c.unsigned_abs();
                if mag == 1 && !mono.is_empty() {
                    write!(f, " {sign} {mono}")?;
                } else {
                    write!(f, " {sign} {mag}{mono}")?;
                }
            }
        }
        Ok(())
    }
}

/// `18tAB - 4t^3 B + t^2 A^2 - 4A^3 - 27B^2` with overflow checks.
pub fn discriminant_of(t: i128, a: i128, b: i128) -> Option<i128> {
    let m = |x: i128, y: i128| x.checked_mul(y);
    let t1 = m(m(m(18, t)?, a)?, b)?;
    let t2 = m(m(m(m(4, t)?, t)?, t)?, b)?;
    let t3 = m(m(t, t)?, m(a, a)?)?;
    let t4 = m(m(m(4, a)?, a)?, a)?;
    let t5 = m(m(27, b)?, b)?;
    t1.checked_sub(t2)?
        .checked_add(t3)?
        .checked_sub(t4)?
        .checked_sub(t5)
}

impl Cubic {
    pub fn new(t: i64, a: i64, b: i64) -> Self {
        Self { t, a, b }
    }

    pub fn discriminant(&self) -> Result<i128> {
        discriminant_of(self.t as i128, self.a as i128, self.b as i128)
            .ok_or(Error::Overflow("discriminant"))
    }

    #[inline]
    pub fn eval(&self, x: i128) -> i128 {
        ((x + self.t as i128) * x + self.a as i128) * x + self.b as i128
    }

    #[inline]
    pub fn eval_derivative(&self, x: i128) -> i128 {
        (3 * x + 2 * self.t as i128) * x + self.a as i128
    }

    pub fn checked_eval(&self, x: i128) -> Option<i128> {
        x.checked_add(self.t as i128)?
            .checked_mul(x)?
            .checked_add(self.a as i128)?
            .checked_mul(x)?
            .checked_add(self.b as i128)
    }

    pub fn checked_eval_derivative(&self, x: i128) -> Option<i128> {
        x.checked_mul(3)?
            .checked_add(2 * self.t as i128)?
            .checked_mul(x)?
            .checked_add(self.a as i128)
    }

    /// `f(x + c)`, as a general monic cubic.
    pub fn shifted(&self, c: i64) -> Result<Cubic> {
        let (t, a, c) = (self.t as i128, self.a as i128, c as i128);
        let nt = t + 3 * c;
        let na = 3 * c * c + 2 * t * c + a;
        let nb = self.eval(c);
        let fit = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("shift"));
        Ok(Cubic {
            t: fit(nt)?,
            a: fit(na)?,
            b: fit(nb)?,
        })
    }

    /// The unique translate with `t` in `{-1, 0, 1}`.
    pub fn reduced(&self) -> Result<MonicCubic> {
        // t + 3c in {-1,0,1}  =>  c = -round(t/3)
        let c = -((self.t + 1).div_euclid(3));
        let g = self.shifted(c)?;
        MonicCubic::new(g.t, g.a, g.b)
    }

    /// True iff the polynomial has no rational (hence integer) root.
    pub fn is_irreducible(&self) -> bool {
        if self.b == 0 {
            return false;
        }
        let bound = root_bound(self);
        let b = self.b.unsigned_abs();
        let mut r: u64 = 1;
        while r <= bound {
            if b % r == 0 && (self.eval(r as i128) == 0 || self.eval(-(r as i128)) == 0) {
                return false;
            }
            r += 1;
        }
        true
    }

    /// Complex roots, polished by Newton steps on the undeflated cubic.
    pub fn roots(&self) -> [Complex64; 3] {
        real_cubic_roots(self.t as f64, self.a as f64, self.b as f64)
    }

    /// Max modulus over the complex roots. Absolute accuracy is about
    /// 1e-12 for simple roots of desk-scale polynomials; multiple roots lose
    /// accuracy to the usual square/cube-root conditioning.
    pub fn max_root_modulus(&self) -> f64 {
        self.roots().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Complex roots of `x^3 + t x^2 + a x + b` with real coefficients.
pub fn real_cubic_roots(t: f64, a: f64, b: f64) -> [Complex64; 3] {
    {
        let f = |x: f64| ((x + t) * x + a) * x + b;
        let df = |x: f64| (3.0 * x + 2.0 * t) * x + a;
        // Real root by safeguarded Newton inside a Cauchy bracket.
        let bound = 1.0 + t.abs().max(a.abs()).max(b.abs());
        let (mut lo, mut hi) = (-bound, bound);
        let mut x = 0.0;
        for _ in 0..200 {
            let fx = f(x);
            if fx == 0.0 {
                break;
            }
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = df(x);
            let mut nx = if d != 0.0 { x - fx / d } else { f64::NAN };
            if !(nx > lo && nx < hi) {
                nx = 0.5 * (lo + hi);
            }
            if (nx - x).abs() <= 1e-15 * (1.0 + x.abs()) {
                x = nx;
                break;
            }
            x = nx;
        }
        let r = x;
        // x^2 + (t + r) x + (a + r (t + r))
        let p = t + r;
        let q = a + r * p;
        let disc = p * p - 4.0 * q;
        let (z1, z2) = if disc >= 0.0 {
            let s = disc.sqrt();
            let big = -0.5 * (p + p.signum() * s);
            if big == 0.0 {
                (Complex64::new(0.0, 0.0), Complex64::new(-p, 0.0))
            } else {
                (Complex64::new(big, 0.0), Complex64::new(q / big, 0.0))
            }
        } else {
            let s = (-disc).sqrt();
            (
                Complex64::new(-p / 2.0, s / 2.0),
                Complex64::new(-p / 2.0, -s / 2.0),
            )
        };
        let mut roots = [Complex64::new(r, 0.0), z1, z2];
        let fc = |z: Complex64| ((z + t) * z + a) * z + b;
        let dfc = |z: Complex64| (z * 3.0 + 2.0 * t) * z + a;
        for z in roots.iter_mut() {
            for _ in 0..4 {
                let d = dfc(*z);
                if d.norm() < 1e-300 {
                    break;
                }
                let step = fc(*z) / d;
                if !step.re.is_finite() || !step.im.is_finite() {
                    break;
                }
                *z -= step;
                if step.norm() <= 1e-16 * (1.0 + z.norm()) {
                    break;
                }
            }
        }
        roots
    }
}

// Integer bound on |root|: 1 + max |coefficient| capped by a Fujiwara-style
// bound 2 max(|t|, |a|^(1/2), |b/2|^(1/3)).
fn root_bound(f: &Cubic) -> u64 {
    let t = f.t.unsigned_abs() as f64;
    let a = (f.a.unsigned_abs() as f64).sqrt();
    let b = (f.b.unsigned_abs() as f64 / 2.0).cbrt();
    let fuji = 2.0 * t.max(a).max(b);
    let cauchy = 1 + f
        .t
        .unsigned_abs()
        .max(f.a.unsigned_abs())
        .max(f.b.unsigned_abs());
    (fuji.ceil() as u64 + 1).min(cauchy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(t: i64, a: i64, b: i64) -> i128 {
        Cubic::new(t, a, b).discriminant().unwrap()
    }

    // Independent oracle: product of squared root differences.
    fn disc_from_roots(f: &Cubic) -> f64 {
        let r = f.roots();
        let d = (r[0] - r[1]) * (r[0] - r[2]) * (r[1] - r[2]);
        (d * d).re
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(disc(0, 0, 1), -27);
        assert_eq!(disc(0, -1, 0), 4);
        assert_eq!(disc(-1, -2, -8), -2012);
        assert_eq!(disc(1, -2, -1), 49);
        for (t, a, b) in [(-1, -2, -8), (1, -2, -1), (0, 5, -3), (1, 7, 11)] {
            let f = Cubic::new(t, a, b);
            let oracle = disc_from_roots(&f);
            assert!((oracle - disc(t, a, b) as f64).abs() < 1e-6 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn discriminant_overflow_is_reported() {
        let f = Cubic::new(0, i64::MAX / 2, i64::MAX / 2);
        assert_eq!(f.discriminant(), Err(Error::Overflow("discriminant")));
    }

    #[test]
    fn max_root_modulus_examples() {
        assert!((Cubic::new(0, 0, -1).max_root_modulus() - 1.0).abs() < 1e-12);
        assert!((Cubic::new(0, -2, 0).max_root_modulus() - 2f64.sqrt()).abs() < 1e-12);
        let heptagon = 2.0 * (std::f64::consts::PI / 7.0).cos();
        assert!((Cubic::new(1, -2, -1).max_root_modulus() - heptagon).abs() < 1e-12);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(!Cubic::new(0, 0, -1).is_irreducible());
        assert!(Cubic::new(0, 0, -2).is_irreducible());
        assert!(Cubic::new(1, -2, -1).is_irreducible());
        assert!(!Cubic::new(0, 0, 0).is_irreducible());
        // (x - 6)(x^2 + x + 1)
        assert!(!Cubic::new(-5, -5, -6).is_irreducible());
    }

    #[test]
    fn reduce_translates_into_trace_classes() {
        let f = Cubic::new(3, 2, -1); // x^3 - x - 1 shifted by 1
        assert_eq!(f.reduced().unwrap(), MonicCubic::new(0, -1, -1).unwrap());
        for t in -7..=7 {
            let g = Cubic::new(t, 2, 5).reduced().unwrap();
            assert!((-1..=1).contains(&g.t()));
            assert_eq!(
                g.discriminant().unwrap(),
                Cubic::new(t, 2, 5).discriminant().unwrap()
            );
        }
    }

    #[test]
    fn display() {
        assert_eq!(Cubic::new(-1, -2, -8).to_string(), "x^3 - x^2 - 2x - 8");
        assert_eq!(Cubic::new(0, 1, 0).to_string(), "x^3 + x");
    }
}
