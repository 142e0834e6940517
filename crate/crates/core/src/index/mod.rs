//! Index of the monogenic order `Z[x]/f` in the ring of integers, one prime
//! at a time.
//!
//! The `p`-part of the index is found without building the maximal order:
//! if the image of `x` is congruent to an integer modulo `p` the cubic is
//! rescaled and the exponent grows by three; otherwise the exponent is the
//! largest `l` for which some residue `r` has `p^(2l) | f(r)` and
//! `p^l | f'(r)`.

mod oracle;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use oracle::{maximal_order_oracle, CubicOrderBasis};

use crate::arith::{factor, valuation};
use crate::error::{Error, Result};
use crate::poly::{Cubic, MonicCubic};

/// `ind(f) = prod p^e` together with the field discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexProfile {
    pub factors: BTreeMap<u64, u32>,
    pub total: u128,
    pub field_disc: i128,
}

fn nonzero_disc(f: &Cubic) -> Result<i128> {
    let d = f.discriminant()?;
    if d == 0 {
        return Err(Error::ZeroDiscriminant);
    }
    Ok(d)
}

/// Whether `p` divides the index of `f`.
pub fn index_divisible_p(f: &MonicCubic, p: u64) -> Result<bool> {
    let g = f.cubic();
    nonzero_disc(&g)?;
    Ok((0..p as i128).any(|r| witness_at(&g, p, r, 1)))
}

/// Exponent of `p` in the index of a monic cubic with nonzero discriminant.
pub fn local_index(f: &Cubic, p: u64) -> Result<u32> {
    let d = nonzero_disc(f)?;
    if valuation(d, p) < 2 {
        return Ok(0);
    }
    if let Some(g) = divided_root(f, p) {
        return Ok(3 + local_index(&g, p)?);
    }
    Ok(witness_depth(f, p, valuation(d, p) / 2))
}

/// `v_p` of `f(r)` is at least `2l` and of `f'(r)` at least `l`.
fn witness_at(f: &Cubic, p: u64, r: i128, l: u32) -> bool {
    let pi = p as i128;
    if let (Some(fv), Some(dv), Some(p2l)) = (
        f.checked_eval(r),
        f.checked_eval_derivative(r),
        pi.checked_pow(2 * l),
    ) {
        return fv % p2l == 0 && dv % pi.pow(l) == 0;
    }
    divides_pow(&eval_big(f, r), p, 2 * l) && divides_pow(&eval_deriv_big(f, r), p, l)
}

fn eval_big(f: &Cubic, r: i128) -> BigInt {
    if let Some(v) = f.checked_eval(r) {
        return BigInt::from(v);
    }
    let r = BigInt::from(r);
    ((&r + f.t) * &r + f.a) * &r + f.b
}

fn eval_deriv_big(f: &Cubic, r: i128) -> BigInt {
    if let Some(v) = f.checked_eval_derivative(r) {
        return BigInt::from(v);
    }
    let r = BigInt::from(r);
    (BigInt::from(3) * &r + 2 * f.t) * &r + f.a
}

fn divides_pow(v: &BigInt, p: u64, e: u32) -> bool {
    if v.is_zero() {
        return true;
    }
    let pe = BigInt::from(p).pow(e);
    (v % pe).is_zero()
}

// Largest l <= cap admitting a witness. Residues that pass at level l are
// the only ones whose lifts can pass at level l + 1, because both
// conditions at level l depend only on r mod p^l.
fn witness_depth(f: &Cubic, p: u64, cap: u32) -> u32 {
    let p_i = p as i128;
    let mut frontier: Vec<i128> = (0..p_i).filter(|&r| witness_at(f, p, r, 1)).collect();
    if frontier.is_empty() {
        return 0;
    }
    let mut depth = 1;
    let mut modulus = p_i;
    while depth < cap {
        let Some(next_mod) = modulus.checked_mul(p_i) else {
            break;
        };
        let mut next = Vec::new();
        for &r in &frontier {
            for j in 0..p_i {
                let s = r + j * modulus;
                if witness_at(f, p, s, depth + 1) {
                    next.push(s);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
        modulus = next_mod;
        depth += 1;
    }
    depth
}

/// If `x - r` is divisible by `p` in `Z[x]/f` for some integer `r`, the
/// characteristic polynomial of `(x - r)/p`.
fn divided_root(f: &Cubic, p: u64) -> Option<Cubic> {
    let p = p as i128;
    for r in 0..p {
        let k = 3 * r + f.t as i128;
        let a = f.checked_eval_derivative(r)?;
        let b = f.checked_eval(r)?;
        if k % p == 0 && a % (p * p) == 0 && b % (p * p * p) == 0 {
            let g = Cubic::new(
                (k / p).to_i64()?,
                (a / (p * p)).to_i64()?,
                (b / (p * p * p)).to_i64()?,
            );
            return Some(g);
        }
    }
    None
}

/// Index and field discriminant of an irreducible cubic.
pub fn full_index(f: &MonicCubic) -> Result<IndexProfile> {
    full_index_general(&f.cubic())
}

pub fn full_index_general(f: &Cubic) -> Result<IndexProfile> {
    let d = nonzero_disc(f)?;
    if !f.is_irreducible() {
        return Err(Error::Reducible {
            t: f.t,
            a: f.a,
            b: f.b,
        });
    }
    let mut factors = BTreeMap::new();
    let mut total: u128 = 1;
    for (p, e) in factor(d.unsigned_abs())? {
        if e < 2 {
            continue;
        }
        let v = local_index(f, p)?;
        if v > 0 {
            factors.insert(p, v);
            total *= (p as u128).pow(v);
        }
    }
    let sq = (total * total) as i128;
    Ok(IndexProfile {
        factors,
        total,
        field_disc: d / sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(t: i64, a: i64, b: i64) -> MonicCubic {
        MonicCubic::new(t, a, b).unwrap()
    }

    #[test]
    fn divisibility_examples() {
        assert!(index_divisible_p(&m(-1, -2, -8), 2).unwrap());
        assert!(!index_divisible_p(&m(0, 0, -2), 2).unwrap());
        assert!(!index_divisible_p(&m(1, -2, -1), 7).unwrap());
        assert_eq!(
            index_divisible_p(&m(0, 0, 0), 2),
            Err(Error::ZeroDiscriminant)
        );
    }

    #[test]
    fn local_index_examples() {
        for p in [2, 3, 5, 7, 23] {
            assert_eq!(local_index(&Cubic::new(0, -1, -1), p).unwrap(), 0);
        }
        assert_eq!(local_index(&Cubic::new(-1, -2, -8), 2).unwrap(), 1);
        assert_eq!(local_index(&Cubic::new(0, -4, -8), 2).unwrap(), 3);
        assert_eq!(
            local_index(&Cubic::new(0, 0, 0), 2),
            Err(Error::ZeroDiscriminant)
        );
    }

    #[test]
    fn full_index_examples() {
        let p = full_index(&m(0, -1, -1)).unwrap();
        assert_eq!((p.total, p.field_disc), (1, -23));
        let p = full_index(&m(-1, -2, -8)).unwrap();
        assert_eq!((p.total, p.field_disc), (2, -503));
        assert_eq!(p.factors, BTreeMap::from([(2, 1)]));
        let p = full_index(&m(1, -2, -1)).unwrap();
        assert_eq!((p.total, p.field_disc), (1, 49));
        assert!(matches!(
            full_index(&m(0, -1, 0)),
            Err(Error::Reducible { .. })
        ));
    }
}
