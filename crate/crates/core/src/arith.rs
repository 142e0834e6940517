//! Elementary integer arithmetic: primes, valuations, factorization,
//! Möbius function, square roots modulo primes.
//!
//! Factorization is trial division (up to 10^5, or the square root of the
//! remaining cofactor, whichever is smaller) followed by Brent's variant of
//! Pollard rho on 64-bit cofactors. Cofactors above 2^64 are reported as a
//! budget failure rather than guessed at.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Trial-division bound used by [`factor`].
pub const TRIAL_BOUND: u64 = 100_000;

/// Prime factorization as ascending `(prime, exponent)` pairs.
pub type Factorization = Vec<(u64, u32)>;

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_BOUND))
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        return (a % m) * (b % m) % m;
    }
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// Brent's cycle detection with batched gcds. Returns a nontrivial factor
// or None when the iteration budget runs out for this constant.
fn rho_brent(n: u64, c: u64, max_iter: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let m = 128u64;
    let mut x;
    let mut ys;
    let mut g;
    let mut iters = 0u64;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        loop {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += m;
            if k >= r || g != 1 {
                break;
            }
        }
        r *= 2;
        iters += r;
        if g != 1 || iters > max_iter {
            break;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g != 1 {
                break;
            }
        }
    }
    (g != 1 && g != n).then_some(g)
}

fn split_u64(n: u64, out: &mut Vec<u64>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    let r = isqrt(n as u128) as u64;
    if r * r == n {
        split_u64(r, out)?;
        return split_u64(r, out);
    }
    for c in 1..64 {
        if let Some(d) = rho_brent(n, c, 1 << 24) {
            split_u64(d, out)?;
            return split_u64(n / d, out);
        }
    }
    Err(Error::Factorization {
        cofactor: n as u128,
    })
}

/// Factor a positive integer.
pub fn factor(n: u128) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Unsupported("factor(0)".into()));
    }
    let mut m = n;
    let mut out: Factorization = Vec::new();
    for &p in small_primes() {
        if (p as u128) * (p as u128) > m {
            break;
        }
        if m % p as u128 == 0 {
            let mut e = 0;
            while m % p as u128 == 0 {
                m /= p as u128;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if m > 1 {
        if m > u64::MAX as u128 {
            return Err(Error::Factorization { cofactor: m });
        }
        let mut big = Vec::new();
        split_u64(m as u64, &mut big)?;
        big.sort_unstable();
        for p in big {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// p-adic valuation of a nonzero integer.
#[inline]
pub fn valuation(mut n: i128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Möbius function.
pub fn mobius(n: u64) -> i32 {
    let mut m = n;
    let mut sign = 1;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// Product of the prime powers dividing `m` to exponent at least two.
pub fn sq_part(m: u64) -> u64 {
    let mut out = 1;
    let mut rest = m;
    let mut p = 2u64;
    while p * p <= rest {
        if rest % p == 0 {
            let mut pe = 1;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                pe *= p;
                e += 1;
            }
            if e >= 2 {
                out *= pe;
            }
        }
        p += 1;
    }
    out
}

/// All positive divisors, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Modular inverse for coprime `a`, `m`.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// Number of partitions of `k` into at most `m` parts.
pub fn partitions_at_most(k: u32, m: u32) -> u64 {
    // p(k, m) = p(k, m-1) + p(k-m, m)
    let (k, m) = (k as usize, m as usize);
    let mut table = vec![vec![0u64; m + 1]; k + 1];
    for row in table.iter_mut().take(1) {
        row.iter_mut().for_each(|v| *v = 1);
    }
    for n in 1..=k {
        for parts in 1..=m {
            let without = table[n][parts - 1];
            let with = if n >= parts {
                table[n - parts][parts]
            } else {
                0
            };
            table[n][parts] = without + with;
        }
    }
    table[k][m]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small_and_large() {
        assert_eq!(factor(2012).unwrap(), vec![(2, 2), (503, 1)]);
        assert_eq!(factor(1).unwrap(), vec![]);
        let n: u128 = 1_000_000_007u128 * 998_244_353u128;
        assert_eq!(
            factor(n).unwrap(),
            vec![(998_244_353, 1), (1_000_000_007, 1)]
        );
        let sq: u128 = 1_000_003u128 * 1_000_003u128 * 12;
        assert_eq!(factor(sq).unwrap(), vec![(2, 2), (3, 1), (1_000_003, 2)]);
    }

    #[test]
    fn sq_part_examples() {
        assert_eq!(sq_part(12), 4);
        assert_eq!(sq_part(30), 1);
        assert_eq!(sq_part(72), 72);
    }

    #[test]
    fn mobius_and_divisors() {
        let mu: Vec<i32> = (1..=10).map(mobius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn sqrt_mod_agrees_with_search() {
        for &p in &[3u64, 5, 7, 13, 17, 97, 193] {
            for a in 0..p {
                let found = (0..p).any(|x| x * x % p == a);
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert!(!found),
                }
            }
        }
    }

    #[test]
    fn partition_counts() {
        assert_eq!(partitions_at_most(4, 2), 3);
        assert_eq!(partitions_at_most(0, 3), 1);
        assert_eq!(partitions_at_most(5, 5), 7);
        assert_eq!(partitions_at_most(2, 1), 1);
    }

    #[test]
    fn primality() {
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }
}
