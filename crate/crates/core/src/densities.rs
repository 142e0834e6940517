//! Densities of index-divisibility conditions in `V(Z^)`, the local masses
//! of cubic étale algebras, and the resulting Euler products.
//!
//! `V(Z^)` carries the average of three point masses in the trace `t` times
//! Haar measure on `(A, B)`. Only the prime 3 sees the trace class: for
//! `p != 3` a translation moves any trace to zero without changing Haar
//! measure, so densities at those primes are trace independent.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{factor, inv_mod, is_prime, mobius, partitions_at_most, primes_up_to};
use crate::error::{Error, Result};

/// Default cap on the exponent of a prime in `n` for density computations.
pub const DEFAULT_EXPONENT_CAP: u32 = 6;

/// Largest number of `A` residues enumerated for a single prime power.
pub const RESIDUE_BUDGET: u128 = 50_000_000;

pub const TRACES: [i64; 3] = [-1, 0, 1];

/// An exact density, certified by enumeration modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityValue {
    #[serde(serialize_with = "ser_ratio")]
    pub value: BigRational,
    pub modulus: u128,
    pub n: u64,
}

fn ser_ratio<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

impl DensityValue {
    pub fn to_f64(&self) -> f64 {
        ratio_f64(&self.value)
    }
}

pub fn ratio_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn canonical_trace(t: i64) -> i64 {
    (t + 1).rem_euclid(3) - 1
}

/// `nu(Sigma_p)`: the average over trace and `A mod p` of the number of
/// distinct roots of `3x^2 + 2tx + A` modulo `p`, divided by `p^2`.
pub fn nu_sigma_p(p: u64) -> Result<DensityValue> {
    if !is_prime(p) {
        return Err(Error::Config(format!("{p} is not prime")));
    }
    let mut value = BigRational::zero();
    for t in TRACES {
        value += nu_local(p, 1, t)?;
    }
    Ok(DensityValue {
        value: value / rat(3, 1),
        modulus: p as u128,
        n: p,
    })
}

fn cache() -> &'static Mutex<HashMap<(u64, u32, i64), BigRational>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32, i64), BigRational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Density of `p^l | ind(f)` among `x^3 + t x^2 + A x + B` with `(A, B)`
/// Haar-distributed in `Z_p^2`.
pub fn nu_local(p: u64, l: u32, t: i64) -> Result<BigRational> {
    if l == 0 {
        return Ok(BigRational::one());
    }
    let t = if p == 3 { canonical_trace(t) } else { 0 };
    let key = (p, l, t);
    if let Some(v) = cache().lock().expect("density cache").get(&key) {
        return Ok(v.clone());
    }
    let v = if l == 1 {
        level_one(p, t)?
    } else {
        higher_level(p, l, t)?
    };
    cache()
        .lock()
        .expect("density cache")
        .insert(key, v.clone());
    Ok(v)
}

fn level_one(p: u64, t: i64) -> Result<BigRational> {
    if p as u128 > RESIDUE_BUDGET {
        return Err(Error::Budget {
            what: "residues",
            needed: p as u128,
            budget: RESIDUE_BUDGET,
        });
    }
    let pi = p as i128;
    let t = t as i128;
    // Tally, over A mod p, the distinct roots of the derivative.
    let mut roots = vec![0u64; p as usize];
    for r in 0..pi {
        let a = (-(3 * r * r + 2 * t * r)).rem_euclid(pi);
        roots[a as usize] += 1;
    }
    let total: u64 = roots.iter().sum();
    let p3 = (pi * pi * pi) as i64;
    Ok(BigRational::new(BigInt::from(total), BigInt::from(p3)))
}

// Roots of 3x^2 + 2tx + a modulo p^l, as residues in [0, p^l), lifted from
// the roots modulo p. Simple roots lift uniquely by a Newton step.
fn derivative_roots(p: i128, l: u32, t: i128, a: i128, base: &[i128]) -> Vec<i128> {
    let fp = |x: i128, m: i128| (3 * x * x + 2 * t * x + a).rem_euclid(m);
    let mut frontier = base.to_vec();
    let mut m = p;
    for _ in 1..l {
        let next_m = m * p;
        let mut next = Vec::new();
        for &x in &frontier {
            let slope = (6 * x + 2 * t).rem_euclid(p);
            if slope != 0 {
                let inv = inv_mod(6 * x + 2 * t, next_m).expect("unit slope");
                next.push((x - fp(x, next_m) * inv).rem_euclid(next_m));
                continue;
            }
            for k in 0..p {
                let y = x + k * m;
                if fp(y, next_m) == 0 {
                    next.push(y);
                }
            }
        }
        frontier = next;
        m = next_m;
        if frontier.is_empty() {
            break;
        }
    }
    frontier
}

fn roots_mod_p(p: i128, t: i128, a: i128) -> Vec<i128> {
    (0..p).filter(|&x| (3 * x * x + 2 * t * x + a).rem_euclid(p) == 0).collect()
}

fn divided(p: i128, t: i128, a: i128, b: i128) -> bool {
    let r0 = if p == 3 { 0 } else { (-t * inv_mod(3, p).expect("p > 3")).rem_euclid(p) };
    let rs = if p == 3 { 0..3 } else { r0..r0 + 1 };
    rs.into_iter().any(|r| {
        (3 * r + t) % p == 0
            && (3 * r * r + 2 * t * r + a) % (p * p) == 0
            && (r * r * r + t * r * r + a * r + b) % (p * p * p) == 0
    })
}

// Constants `B mod p^(2l)` with a level-`l` witness whose root image is not
// an integer modulo `p`, for one value of `A`.
fn undivided_from_base(p: u64, l: u32, t: i64, a: i128, base: &[i128]) -> Vec<i128> {
    let pi = p as i128;
    let t = t as i128;
    let p2l = pi.pow(2 * l);
    let mut bs: Vec<i128> = derivative_roots(pi, l, t, a, base)
        .into_iter()
        .map(|r| (-(r * r * r + t * r * r + a * r)).rem_euclid(p2l))
        .collect();
    bs.sort_unstable();
    bs.dedup();
    bs.retain(|&b| !divided(pi, t, a, b));
    bs
}

fn higher_level(p: u64, l: u32, t: i64) -> Result<BigRational> {
    let pi = p as i128;
    let pl = pi
        .checked_pow(l)
        .filter(|&v| v as u128 <= RESIDUE_BUDGET)
        .ok_or(Error::Budget {
            what: "residues",
            needed: u128::MAX,
            budget: RESIDUE_BUDGET,
        })?;
    let p2l = pi.checked_pow(2 * l).ok_or(Error::Overflow("p^(2l)"))?;
    let mut count: u128 = 0;
    let bases: Vec<Vec<i128>> = (0..pi).map(|a| roots_mod_p(pi, t as i128, a)).collect();
    for a in 0..pl {
        count += undivided_from_base(p, l, t, a, &bases[(a % pi) as usize]).len() as u128;
    }
    let first = BigRational::new(BigInt::from(count), BigInt::from(pl) * BigInt::from(p2l));
    // Root image congruent to r mod p: (A, B) lie in a coset of measure
    // p^-5, and the rescaled cubic has trace (3r + t)/p.
    let mut second = BigRational::zero();
    for r in 0..pi {
        if (3 * r + t as i128) % pi == 0 {
            let t2 = ((3 * r + t as i128) / pi) as i64;
            second += nu_local(p, l.saturating_sub(3), t2)?;
        }
    }
    second /= BigRational::from_integer(BigInt::from(pi.pow(5)));
    Ok(first + second)
}

/// Trace-averaged density of `p^l | ind(f)`.
pub fn nu_prime_power(p: u64, l: u32) -> Result<BigRational> {
    let mut v = BigRational::zero();
    for t in TRACES {
        v += nu_local(p, l, t)?;
    }
    Ok(v / rat(3, 1))
}

fn checked_factor(n: u64, cap: u32) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::Config("n must be positive".into()));
    }
    let f = factor(n as u128)?;
    if let Some(&(p, e)) = f.iter().find(|&&(_, e)| e > cap) {
        return Err(Error::Config(format!(
            "exponent {e} of {p} exceeds the cap {cap}"
        )));
    }
    Ok(f)
}

// (1/3) sum_t prod_p g(p, e, t)
fn trace_average<F>(fact: &[(u64, u32)], mut g: F) -> Result<BigRational>
where
    F: FnMut(u64, u32, i64) -> Result<BigRational>,
{
    let mut total = BigRational::zero();
    for t in TRACES {
        let mut prod = BigRational::one();
        for &(p, e) in fact {
            prod *= g(p, e, t)?;
        }
        total += prod;
    }
    Ok(total / rat(3, 1))
}

/// `nu(Sigma_n)` assembled from its prime-power components.
pub fn nu_sigma_n(n: u64, cap: u32) -> Result<DensityValue> {
    let fact = checked_factor(n, cap)?;
    let value = trace_average(&fact, |p, e, t| nu_local(p, e, t))?;
    let modulus = fact
        .iter()
        .fold(1u128, |m, &(p, e)| m.saturating_mul((p as u128).pow(2 * e)));
    Ok(DensityValue { value, modulus, n })
}

/// Truncated Möbius sum for the density of index exactly `n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaEstimate {
    #[serde(serialize_with = "ser_ratio")]
    pub value: BigRational,
    pub tail_bound: f64,
}

/// `sum_{d <= d_max} mu(d) nu(Sigma_{dn})`. The tail bound uses
/// `nu(Sigma_{dn}) <= nu(Sigma_{d'}) = 1/d'^2` with `d'` the part of `d`
/// coprime to `n`.
pub fn sigma_exact(n: u64, d_max: u64) -> Result<SigmaEstimate> {
    if d_max == 0 {
        return Err(Error::Config("d_max must be at least 1".into()));
    }
    let mut value = BigRational::zero();
    for d in 1..=d_max {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let nu = nu_sigma_n(d * n, DEFAULT_EXPONENT_CAP)?.value;
        if mu > 0 {
            value += nu;
        } else {
            value -= nu;
        }
    }
    let rad: Vec<u64> = factor(n as u128)?.into_iter().map(|(p, _)| p).collect();
    let mut tail = 0.0;
    for mask in 0u32..(1 << rad.len()) {
        let d1: u64 = (0..rad.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| rad[i])
            .product();
        let floor = (d_max / d1).max(1);
        tail += 1.0 / floor as f64;
    }
    Ok(SigmaEstimate {
        value,
        tail_bound: tail,
    })
}

/// Density of index exactly `n` as an Euler product over `p <= p_max` (and
/// every prime dividing `n`).
pub fn sigma_euler(n: u64, p_max: u64) -> Result<f64> {
    let fact = checked_factor(n, u32::MAX)?;
    let mut primes: Vec<(u64, u32)> = primes_up_to(p_max)
        .into_iter()
        .map(|p| (p, fact.iter().find(|f| f.0 == p).map_or(0, |f| f.1)))
        .collect();
    for &(p, e) in &fact {
        if p > p_max {
            primes.push((p, e));
        }
    }
    let mut total = 0.0;
    for t in TRACES {
        let mut prod = 1.0;
        for &(p, e) in &primes {
            let local = nu_local(p, e, t)? - nu_local(p, e + 1, t)?;
            prod *= ratio_f64(&local);
        }
        total += prod;
    }
    Ok(total / 3.0)
}

/// `int |ind f|_p^{-s} dnu` with the index capped at `p^level`; `s` is 0 or -1.
pub fn padic_index_moment(p: u64, s: i32, level: u32) -> Result<BigRational> {
    if level > DEFAULT_EXPONENT_CAP {
        return Err(Error::Config(format!(
            "level {level} exceeds the cap {DEFAULT_EXPONENT_CAP}"
        )));
    }
    match s {
        0 => Ok(BigRational::one()),
        -1 => {
            // E[p^min(v, level)] = 1 + sum_{k=1}^{level} (p^k - p^(k-1)) P(v >= k)
            let mut acc = BigRational::one();
            for k in 1..=level {
                let w = BigInt::from(p).pow(k) - BigInt::from(p).pow(k - 1);
                acc += BigRational::from_integer(w) * nu_prime_power(p, k)?;
            }
            Ok(acc)
        }
        _ => Err(Error::Unsupported(format!("moment exponent s = {s}"))),
    }
}

/// Estimated gap between the capped moment at `level` and its limit.
///
/// Densities split as `nu_k = a_k + p^-5 sum_r nu_{k-3}` (undivided witness
/// part plus rescaled roots). Beyond `level` the undivided part is taken to
/// decay like `p^-2k` from its last computed value, which is what exact
/// enumeration shows at every level it reaches, and the recursion is run
/// forward with the largest trace multiplicity.
pub fn moment_truncation_bound(p: u64, level: u32) -> Result<f64> {
    if level == 0 {
        return Err(Error::Config("level must be at least 1".into()));
    }
    let pf = p as f64;
    let pi = p as i64;
    // Traces of the rescaled cubics reachable from each trace class.
    let children = |t: i64| -> Vec<usize> {
        (0..pi)
            .filter(|r| (3 * r + t).rem_euclid(pi) == 0)
            .map(|r| (canonical_trace((3 * r + t).div_euclid(pi)) + 1) as usize)
            .collect()
    };
    let kids: Vec<Vec<usize>> = TRACES.iter().map(|&t| children(t)).collect();
    let mut nu: Vec<[f64; 3]> = Vec::new();
    for k in 0..=level {
        let mut row = [0.0; 3];
        for (i, &t) in TRACES.iter().enumerate() {
            row[i] = ratio_f64(&nu_local(p, k, t)?);
        }
        nu.push(row);
    }
    let l = level as usize;
    let mut a = [0.0; 3];
    for i in 0..3 {
        let divided: f64 = kids[i].iter().map(|&c| nu[l.saturating_sub(3)][c]).sum();
        a[i] = nu[l][i] - divided / pf.powi(5);
    }
    let mut tail = 0.0;
    for k in l + 1..l + 400 {
        let mut row = [0.0; 3];
        for i in 0..3 {
            a[i] /= pf * pf;
            let divided: f64 = kids[i].iter().map(|&c| nu[k - 3][c]).sum();
            row[i] = a[i] + divided / pf.powi(5);
        }
        nu.push(row);
        let w = pf.powi(k as i32) - pf.powi(k as i32 - 1);
        let term = w * row.iter().sum::<f64>() / 3.0;
        tail += term;
        if term < 1e-18 {
            break;
        }
    }
    Ok(tail)
}

/// `sum_{k<d} P(k, d-k) p^-k`: the discriminant-weighted mass of degree-`d`
/// étale algebras over `Q_p`.
pub fn local_mass(d: u32, p: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for k in 0..d {
        let count = partitions_at_most(k, d - k);
        acc += BigRational::new(BigInt::from(count), BigInt::from(p).pow(k));
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResidueEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// `prod_{p <= p_max} (1 - 1/p) local_mass(d, p)` with a bound on the
/// omitted tail.
pub fn euler_product_residue(d: u32, p_max: u64) -> Result<ResidueEstimate> {
    if d < 3 {
        return Err(Error::Unsupported(format!(
            "degree {d}: the polynomial count is two-to-one onto quadratic fields"
        )));
    }
    if p_max < 2 {
        return Err(Error::Config("p_max must be at least 2".into()));
    }
    let mut value = 1.0;
    for p in primes_up_to(p_max) {
        let factor = (1.0 - 1.0 / p as f64) * ratio_f64(&local_mass(d, p));
        value *= factor;
    }
    // (1 - x) * sum_k c_k x^k - 1 = sum_j e_j x^j with x = 1/p.
    let c: Vec<i64> = (0..d)
        .map(|k| partitions_at_most(k, d - k) as i64)
        .collect();
    let mut e = vec![0i64; d as usize + 1];
    for (k, &ck) in c.iter().enumerate() {
        e[k] += ck;
        e[k + 1] -= ck;
    }
    e[0] -= 1;
    let pm = p_max as f64;
    // sum_{n > P} n^-j <= P^(1-j) / (j - 1)
    let tail: f64 = e
        .iter()
        .enumerate()
        .filter(|(j, _)| *j >= 2)
        .map(|(j, &ej)| ej.unsigned_abs() as f64 * pm.powi(1 - j as i32) / (j as f64 - 1.0))
        .sum();
    assert!(e[1] == 0, "linear term cancels for every degree");
    let rel = if tail < 0.5 {
        (2.0 * tail).exp() - 1.0
    } else {
        f64::INFINITY
    };
    Ok(ResidueEstimate {
        value,
        error_bound: value.abs() * rel,
    })
}
