//! Exact isomorphism test for cubic fields given by monic generators.
//!
//! Floating point only proposes a map: a root of `g` written as
//! `P(alpha) / n` with `n = ind(f)`, which is integral whenever the fields
//! agree. The proposal is accepted only after `g(P(x)/n) = 0 mod f` is
//! checked in integer arithmetic. Non-isomorphism is certified by a prime
//! at which the two splitting types differ.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::index::full_index;
use crate::poly::MonicCubic;

/// Fixed-point precisions (bits) tried after double precision.
pub const PRECISION_LADDER: [u64; 2] = [256, 1024];

const QUICK_PRIMES: usize = 20;
const CERTIFY_PRIMES: usize = 400;

/// Whether `Q[x]/f` and `Q[x]/g` are isomorphic.
pub fn isomorphic(f: &MonicCubic, g: &MonicCubic) -> Result<bool> {
    let pf = full_index(f)?;
    let pg = full_index(g)?;
    if pf.field_disc != pg.field_disc {
        return Ok(false);
    }
    isomorphic_same_disc(f, pf.total, g)
}

/// Isomorphism test for two irreducible cubics already known to have the
/// same field discriminant; `index_f` is `ind(f)`.
pub fn isomorphic_same_disc(f: &MonicCubic, index_f: u128, g: &MonicCubic) -> Result<bool> {
    if f == g {
        return Ok(true);
    }
    if propose_f64(f, index_f, g)? {
        return Ok(true);
    }
    if splitting_differs(f, g, QUICK_PRIMES) {
        return Ok(false);
    }
    for bits in PRECISION_LADDER {
        if propose_fixed(f, index_f, g, bits)? {
            return Ok(true);
        }
    }
    if splitting_differs(f, g, CERTIFY_PRIMES) {
        return Ok(false);
    }
    Err(Error::Precision(format!(
        "no verified map from {g} into Q[x]/({f}) at {} bits",
        PRECISION_LADDER[PRECISION_LADDER.len() - 1]
    )))
}

/// Number of roots of `f` modulo `p`.
fn roots_mod(f: &MonicCubic, p: u64) -> usize {
    let p = p as i64;
    let (t, a, b) = (f.t().rem_euclid(p), f.a().rem_euclid(p), f.b().rem_euclid(p));
    (0..p)
        .filter(|&x| ((((x + t) % p) * x % p + a) % p * x % p + b) % p == 0)
        .count()
}

/// Splitting types differ at one of the first `count` primes dividing
/// neither discriminant.
pub fn splitting_differs(f: &MonicCubic, g: &MonicCubic, count: usize) -> bool {
    let df = f.discriminant().unwrap_or(0);
    let dg = g.discriminant().unwrap_or(0);
    let mut used = 0;
    for p in primes_up_to(20_000) {
        if used == count {
            break;
        }
        let pi = p as i128;
        if df % pi == 0 || dg % pi == 0 {
            continue;
        }
        used += 1;
        if roots_mod(f, p) != roots_mod(g, p) {
            return true;
        }
    }
    false
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

// Coefficients of the quadratic through (alpha_i, beta_pi(i)), times n.
fn interpolate_f64(alpha: &[Complex64; 3], beta: &[Complex64; 3], pi: &[usize; 3], n: f64) -> [Complex64; 3] {
    let mut c = [Complex64::zero(); 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let w = beta[pi[i]] / ((alpha[i] - alpha[j]) * (alpha[i] - alpha[k]));
        c[2] += w;
        c[1] -= w * (alpha[j] + alpha[k]);
        c[0] += w * alpha[j] * alpha[k];
    }
    c.map(|z| z * n)
}

fn propose_f64(f: &MonicCubic, n: u128, g: &MonicCubic) -> Result<bool> {
    let alpha = f.cubic().roots();
    let beta = g.cubic().roots();
    let nf = n as f64;
    for pi in &PERMS {
        let c = interpolate_f64(&alpha, &beta, pi, nf);
        let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if scale > 1e12 {
            continue;
        }
        let near = c
            .iter()
            .all(|z| z.im.abs() < 1e-6 * scale && (z.re - z.re.round()).abs() < 1e-6 * scale.max(1.0));
        if !near {
            continue;
        }
        let p = c.map(|z| BigInt::from(z.re.round() as i64));
        if verify(f, n, g, &p) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `n^3 g(P(x) / n) = 0` modulo `f`, in integers.
pub fn verify(f: &MonicCubic, n: u128, g: &MonicCubic, p: &[BigInt; 3]) -> bool {
    let n = BigInt::from(n);
    let p2 = mul_mod_f(f, p, p);
    let p3 = mul_mod_f(f, &p2, p);
    let tg = BigInt::from(g.t()) * &n;
    let ag = BigInt::from(g.a()) * &n * &n;
    let bg = BigInt::from(g.b()) * &n * &n * &n;
    let mut r = p3;
    for k in 0..3 {
        r[k] += &tg * &p2[k] + &ag * &p[k];
    }
    r[0] += bg;
    r.iter().all(Zero::is_zero)
}

fn mul_mod_f(f: &MonicCubic, x: &[BigInt; 3], y: &[BigInt; 3]) -> [BigInt; 3] {
    let mut prod: [BigInt; 5] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            prod[i + j] += &x[i] * &y[j];
        }
    }
    let (t, a, b) = (BigInt::from(f.t()), BigInt::from(f.a()), BigInt::from(f.b()));
    for k in [4usize, 3] {
        let c = std::mem::take(&mut prod[k]);
        prod[k - 1] -= &t * &c;
        prod[k - 2] -= &a * &c;
        prod[k - 3] -= &b * &c;
    }
    let [p0, p1, p2, _, _] = prod;
    [p0, p1, p2]
}

/// Complex fixed-point number with `bits` fractional bits.
#[derive(Clone, Debug)]
struct Fx {
    re: BigInt,
    im: BigInt,
}

impl Fx {
    fn from_c64(z: Complex64, bits: u64) -> Self {
        let conv = |x: f64| {
            let (m, e) = frexp(x);
            let v = BigInt::from((m * 2f64.powi(53)) as i64);
            let shift = e as i64 - 53 + bits as i64;
            if shift >= 0 {
                v << shift as usize
            } else {
                v >> (-shift) as usize
            }
        };
        Self { re: conv(z.re), im: conv(z.im) }
    }

    fn from_int(v: i64, bits: u64) -> Self {
        Self { re: BigInt::from(v) << bits as usize, im: BigInt::zero() }
    }

    fn add(&self, o: &Fx) -> Fx {
        Fx { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Fx) -> Fx {
        Fx { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &Fx, bits: u64) -> Fx {
        Fx {
            re: (&self.re * &o.re - &self.im * &o.im) >> bits as usize,
            im: (&self.re * &o.im + &self.im * &o.re) >> bits as usize,
        }
    }

    fn div(&self, o: &Fx, bits: u64) -> Option<Fx> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        let re = ((&self.re * &o.re + &self.im * &o.im) << bits as usize) / &den;
        let im = ((&self.im * &o.re - &self.re * &o.im) << bits as usize) / &den;
        Some(Fx { re, im })
    }

    fn scale(&self, n: &BigInt) -> Fx {
        Fx { re: &self.re * n, im: &self.im * n }
    }
}

fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (0.0, 0);
    }
    let e = x.abs().log2().floor() as i32 + 1;
    (x / 2f64.powi(e), e)
}

// Roots of f refined by Newton's method to `bits` fractional bits.
fn roots_fixed(f: &MonicCubic, bits: u64) -> Option<[Fx; 3]> {
    let t = Fx::from_int(f.t(), bits);
    let a = Fx::from_int(f.a(), bits);
    let b = Fx::from_int(f.b(), bits);
    let three = Fx::from_int(3, bits);
    let two_t = Fx::from_int(2 * f.t(), bits);
    let steps = 4 + (bits as f64 / 40.0).log2().ceil() as usize;
    let seeds = f.cubic().roots();
    let mut out = Vec::with_capacity(3);
    for z0 in seeds {
        let mut z = Fx::from_c64(z0, bits);
        for _ in 0..steps {
            let fz = z.add(&t).mul(&z, bits).add(&a).mul(&z, bits).add(&b);
            let dz = three.mul(&z, bits).add(&two_t).mul(&z, bits).add(&a);
            z = z.sub(&fz.div(&dz, bits)?);
        }
        out.push(z);
    }
    out.try_into().ok()
}

fn propose_fixed(f: &MonicCubic, n: u128, g: &MonicCubic, bits: u64) -> Result<bool> {
    let (Some(alpha), Some(beta)) = (roots_fixed(f, bits), roots_fixed(g, bits)) else {
        return Ok(false);
    };
    let nb = BigInt::from(n);
    let tol = BigInt::from(1) << (bits / 2) as usize;
    let half = BigInt::from(1) << (bits - 1) as usize;
    for pi in &PERMS {
        let mut c = [Fx::from_int(0, bits), Fx::from_int(0, bits), Fx::from_int(0, bits)];
        let mut ok = true;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let den = alpha[i].sub(&alpha[j]).mul(&alpha[i].sub(&alpha[k]), bits);
            let Some(w) = beta[pi[i]].div(&den, bits) else {
                ok = false;
                break;
            };
            c[2] = c[2].add(&w);
            c[1] = c[1].sub(&w.mul(&alpha[j].add(&alpha[k]), bits));
            c[0] = c[0].add(&w.mul(&alpha[j].mul(&alpha[k], bits), bits));
        }
        if !ok {
            continue;
        }
        let mut p: [BigInt; 3] = Default::default();
        for k in 0..3 {
            let z = c[k].scale(&nb);
            if z.im.abs() > tol {
                ok = false;
                break;
            }
            let rounded = (&z.re + &half) >> bits as usize;
            let err = &z.re - (&rounded << bits as usize);
            if err.abs() > tol {
                ok = false;
                break;
            }
            p[k] = rounded;
        }
        if ok && verify(f, n, g, &p) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(t: i64, a: i64, b: i64) -> MonicCubic {
        MonicCubic::new(t, a, b).unwrap()
    }

    #[test]
    fn examples() {
        // f(x + 1) for f = x^3 - x - 1 is x^3 + 3x^2 + 2x - 1; its reduced form.
        let shifted = crate::poly::Cubic::new(3, 2, -1).reduced().unwrap();
        assert!(isomorphic(&m(0, -1, -1), &shifted).unwrap());
        assert!(!isomorphic(&m(0, -1, -1), &m(0, 0, -2)).unwrap());
        assert!(isomorphic(&m(0, -1, -1), &m(0, -4, -8)).unwrap());
        assert!(isomorphic(&m(0, -1, -1), &m(0, -1, 1)).unwrap());
    }

    #[test]
    fn cyclic_fields_of_conductor_63() {
        // Two non-isomorphic cyclic cubic fields of discriminant 3969.
        let f = m(0, -21, -35);
        let g = m(0, -21, 28);
        assert_eq!(full_index(&f).unwrap().field_disc, 3969);
        assert_eq!(full_index(&g).unwrap().field_disc, 3969);
        assert!(!isomorphic(&f, &g).unwrap());
    }

    #[test]
    fn fixed_point_path_agrees_with_f64() {
        let f = m(0, -4, -8);
        let g = m(0, -1, -1);
        let n = full_index(&f).unwrap().total;
        assert!(propose_fixed(&f, n, &g, 256).unwrap());
        assert!(!propose_fixed(&m(0, -1, -1), 1, &m(0, 0, -2), 256).unwrap());
    }
}
