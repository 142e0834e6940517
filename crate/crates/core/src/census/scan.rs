//! Streaming pass over a height box that recovers the index of every
//! polynomial whose field discriminant can still be small.
//!
//! Along a row `(t, A)` the discriminant is a quadratic in `B`:
//! `27 Disc = 4 D0^3 - u^2` with `D0 = t^2 - 3A` and `u = 27B + 2t^3 - 9tA`.
//! For `p > 3` the classes of `B` modulo `p^2` with `p^2 | Disc` are read off
//! from a square root of `D0`, so the square part of every discriminant in
//! the row is sieved out at once. Since `ind(f)^2` divides that square part,
//! rows are filtered without factoring each discriminant.

use crate::arith::{factor, inv_mod, isqrt, primes_up_to, sqrt_mod, valuation};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::index::local_index;
use crate::poly::{discriminant_of, row_b_range, HeightBound, MonicCubic, RegionSpec};

/// An irreducible polynomial together with its index and field discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Hit {
    pub f: MonicCubic,
    pub index: u128,
    pub field_disc: i128,
}

/// What the scan should report.
pub struct ScanSpec<'a> {
    pub y: HeightBound,
    /// Cheap pre-filter on `(|disc|, square part of |disc|)`. The square
    /// part is a multiple of `ind^2`; the filter must not reject anything
    /// that `keep` would accept.
    pub prefilter: &'a (dyn Fn(u128, u128) -> bool + Sync),
    pub keep: &'a (dyn Fn(&Hit) -> bool + Sync),
    pub budget: u128,
}

/// Every irreducible `f` with `h(f) < y` accepted by `keep`, in
/// lexicographic `(t, A, B)` order.
///
/// Only the rows with `t >= 0` are walked (and `B > 0` when `t = 0`); the
/// substitution `x -> -x` supplies the rest with the same index.
pub fn scan(spec: &ScanSpec<'_>, exec: &Exec) -> Result<Vec<Hit>> {
    let region = RegionSpec {
        budget: spec.budget,
        ..RegionSpec::height_only(spec.y)
    };
    region.check_budget()?;
    let amax = region.a_max();
    let rows: Vec<(i64, i64)> = [0i64, 1]
        .into_iter()
        .flat_map(|t| (-amax..=amax).map(move |a| (t, a)))
        .collect();
    let bmax = region.b_max() as i128;
    let dmax = discriminant_bound(amax as i128, bmax)?;
    let primes = primes_up_to(isqrt(dmax) as u64 + 1);
    let per_row = exec.map(&rows, |&(t, a)| scan_row(spec, &primes, t, a));
    let mut out = Vec::new();
    for row in per_row {
        for h in row? {
            out.push(h);
            out.push(Hit {
                f: MonicCubic::new_unchecked(-h.f.t(), h.f.a(), -h.f.b()),
                ..h
            });
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn discriminant_bound(amax: i128, bmax: i128) -> Result<u128> {
    // |Disc| <= 18|AB| + 4|B| + A^2 + 4|A|^3 + 27 B^2 for |t| <= 1.
    let v = (|| {
        18i128
            .checked_mul(amax)?
            .checked_mul(bmax)?
            .checked_add(4 * bmax)?
            .checked_add(amax.checked_mul(amax)?)?
            .checked_add(4i128.checked_mul(amax.checked_pow(3)?)?)?
            .checked_add(27i128.checked_mul(bmax.checked_mul(bmax)?)?)
    })()
    .ok_or(Error::Overflow("discriminant bound"))?;
    Ok(v as u128)
}

/// Square part `prod p^(2 floor(v_p / 2))` of `|Disc|` for each `B` in
/// `lo..=hi`; zero where the discriminant vanishes.
pub fn row_square_parts(t: i64, a: i64, lo: i64, hi: i64, primes: &[u64]) -> Result<Vec<u128>> {
    let len = (hi - lo + 1).max(0) as usize;
    let (ti, ai) = (t as i128, a as i128);
    let disc = |b: i64| discriminant_of(ti, ai, b as i128).ok_or(Error::Overflow("discriminant"));
    let mut sq = vec![1u128; len];
    let mut dmax = 0u128;
    for (i, b) in (lo..=hi).enumerate() {
        let d = disc(b)?.unsigned_abs();
        dmax = dmax.max(d);
        if d == 0 {
            sq[i] = 0;
            continue;
        }
        for p in [2u64, 3] {
            let v = valuation(d as i128, p);
            sq[i] *= (p as u128).pow(v - v % 2);
        }
    }
    let d0 = ti * ti - 3 * ai;
    let c1 = 2 * ti * ti * ti - 9 * ti * ai;
    for &p in primes.iter().skip_while(|&&p| p < 5) {
        let (pi, p2) = (p as i128, (p * p) as i128);
        if (p as u128) * (p as u128) > dmax {
            break;
        }
        let inv27 = inv_mod(27, p2).expect("p > 3");
        let mut mark = |start: i128, step: i128| -> Result<()> {
            let first = lo as i128 + (start - lo as i128).rem_euclid(step);
            let mut b = first;
            while b <= hi as i128 {
                let i = (b - lo as i128) as usize;
                if sq[i] != 0 {
                    let d = disc(b as i64)?;
                    let v = valuation(d, p);
                    sq[i] *= (p as u128).pow(v - v % 2);
                }
                b += step;
            }
            Ok(())
        };
        if d0.rem_euclid(pi) == 0 {
            // Triple root modulo p: p^2 | Disc exactly when p | u.
            let b0 = (-c1 * inv_mod(27, pi).expect("p > 3")).rem_euclid(pi);
            mark(b0, pi)?;
            continue;
        }
        let Some(s) = sqrt_mod(d0.rem_euclid(pi) as u64, p) else {
            continue;
        };
        // Lift the root of D0 to p^2, then u = +-2 D0 s.
        let s = s as i128;
        let inv = inv_mod(2 * s, p2).expect("unit");
        let s2 = (s - (s * s - d0).rem_euclid(p2) * inv).rem_euclid(p2);
        let u = (2 * d0.rem_euclid(p2) * s2).rem_euclid(p2);
        for u in [u, (p2 - u) % p2] {
            mark(((u - c1) * inv27).rem_euclid(p2), p2)?;
        }
    }
    Ok(sq)
}

/// Index and field discriminant of an irreducible `f`, given a multiple of
/// `ind(f)^2` among the divisors of the discriminant.
pub fn index_from_square_part(f: &MonicCubic, disc: i128, sq: u128) -> Result<Hit> {
    let c = f.cubic();
    let mut index: u128 = 1;
    for (p, _) in factor(sq)? {
        index *= (p as u128).pow(local_index(&c, p)?);
    }
    Ok(Hit {
        f: *f,
        index,
        field_disc: disc / (index * index) as i128,
    })
}

fn scan_row(spec: &ScanSpec<'_>, primes: &[u64], t: i64, a: i64) -> Result<Vec<Hit>> {
    let mut out = Vec::new();
    let Some((lo, hi)) = row_b_range(&spec.y, t, a) else {
        return Ok(out);
    };
    let lo = if t == 0 { lo.max(1) } else { lo };
    if lo > hi {
        return Ok(out);
    }
    let sq = row_square_parts(t, a, lo, hi, primes)?;
    for (i, b) in (lo..=hi).enumerate() {
        if sq[i] == 0 {
            continue;
        }
        let disc = discriminant_of(t as i128, a as i128, b as i128).ok_or(Error::Overflow("discriminant"))?;
        if !(spec.prefilter)(disc.unsigned_abs(), sq[i]) {
            continue;
        }
        let f = MonicCubic::new_unchecked(t, a, b);
        if !f.is_irreducible() {
            continue;
        }
        let hit = index_from_square_part(&f, disc, sq[i])?;
        if (spec.keep)(&hit) {
            out.push(hit);
        }
    }
    Ok(out)
}
