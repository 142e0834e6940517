//! Side experiments: reducible polynomials, the index tail, the ratio of
//! exact-index counts to density times volume, and the averaged form of
//! that comparison.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::scan_field_window;
use crate::archimedean::region_volume;
use crate::arith::{divisors, factor, mobius};
use crate::census::scan::{scan, Hit, ScanSpec};
use crate::densities::sigma_euler;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::poly::{Cubic, HeightBound, RegionSpec, Sign, DEFAULT_BOX_BUDGET};

/// Euler-product cutoff used for `sigma(n)` in this module.
pub const SIGMA_P_MAX: u64 = 1000;

/// Calibrated constant in `#reducible(Sigma_n, Y) <= c d(n)^2 (Y^3/n + Y)`,
/// where `d(n)^2` stands in for `n^eps`.
pub const REDUCIBLE_CONSTANT: f64 = 12.0;

/// `f in Sigma_p` at the first level: some `r` has `p^2 | f(r)` and `p | f'(r)`.
/// This reads only residues, so it applies to every cubic.
pub fn in_sigma_prime(f: &Cubic, p: u64) -> bool {
    let p = p as i128;
    (0..p).any(|r| f.eval(r).rem_euclid(p * p) == 0 && f.eval_derivative(r).rem_euclid(p) == 0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducibleCount {
    pub n: u64,
    pub y: f64,
    pub count: u64,
    pub bound: f64,
}

/// Reducible `f in Sigma_n` with `h(f) < y`, for squarefree `n`.
///
/// Writing `f = (x - r)(x^2 + (r + k) x + b)` gives `t = k`,
/// `A = b - r^2 - r k`, `B = -r b`; the root `r` and the roots of the
/// quadratic all lie in the disk, so `|r| < Y` and `|b| < Y^2`.
pub fn reducible_diagnostic(n: u64, y: &HeightBound) -> Result<ReducibleCount> {
    if n == 0 || mobius(n) == 0 {
        return Err(Error::Config(format!("n = {n} must be squarefree")));
    }
    let primes: Vec<u64> = factor(n as u128)?.into_iter().map(|(p, _)| p).collect();
    let yf = y.as_f64();
    let rmax = yf.ceil() as i64;
    let bmax = (yf * yf).ceil() as i64;
    let mut seen = BTreeSet::new();
    for r in -rmax..=rmax {
        for k in -1..=1i64 {
            for b in -bmax..=bmax {
                let (t, a, bb) = (k, b - r * r - r * k, -r * b);
                if !y.admits(t, a, bb) {
                    continue;
                }
                let f = Cubic::new(t, a, bb);
                if primes.iter().all(|&p| in_sigma_prime(&f, p)) {
                    seen.insert((t, a, bb));
                }
            }
        }
    }
    let tau = divisors(n).len() as f64;
    Ok(ReducibleCount {
        n,
        y: yf,
        count: seen.len() as u64,
        bound: REDUCIBLE_CONSTANT * tau * tau * (yf.powi(3) / n as f64 + yf),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MhaRatio {
    pub n: u64,
    pub count: u64,
    pub sigma: f64,
    pub volume: f64,
    pub ratio: f64,
}

/// Volume of `{h < Y, lo < |Disc| < hi}` over all three traces.
pub fn window_volume(lo: f64, hi: f64, y: HeightBound) -> Result<f64> {
    let r = RegionSpec::height_only(y).with_window(lo, hi, Sign::Both);
    Ok(region_volume(&r)?.value)
}

/// `#{f irreducible : ind f = n, h < Y, n^2 X < |Disc| < delta n^2 X}`
/// against `sigma(n)` times the volume of the same region.
pub fn mha_ratio(n: u64, x: f64, delta: f64, y: HeightBound, exec: &Exec) -> Result<MhaRatio> {
    if n == 0 || !(delta > 1.0) || !(x > 0.0) {
        return Err(Error::Config("need n >= 1, X > 0 and delta > 1".into()));
    }
    let n2 = (n as f64) * (n as f64);
    let sigma = sigma_euler(n, SIGMA_P_MAX)?;
    let volume = window_volume(n2 * x, delta * n2 * x, y)?;
    let denom = sigma * volume;
    if !(denom > 1e-300) {
        return Err(Error::Config(format!(
            "sigma({n}) * Vol = {denom:e}: the window holds no volume at Y = {}",
            y.as_f64()
        )));
    }
    let count = scan_field_window(x, delta * x, y, exec)?
        .iter()
        .filter(|h| h.index == n as u128)
        .count() as u64;
    Ok(MhaRatio { n, count, sigma, volume, ratio: count as f64 / denom })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailMass {
    pub count: u64,
    /// `X^(1/4 + delta1)`.
    pub threshold: f64,
    /// `Y^6 / threshold^2`, the field discriminant bound for tail polynomials.
    pub budget_shape: f64,
}

/// Irreducible `f` with `h(f) < Y` and `ind(f) > X^(1/4 + delta1)`.
pub fn tail_mass(x: f64, delta1: f64, y: HeightBound, exec: &Exec) -> Result<TailMass> {
    if !(x > 0.0 && delta1 > 0.0) {
        return Err(Error::Config("need X > 0 and delta1 > 0".into()));
    }
    let threshold = x.powf(0.25 + delta1);
    let prefilter = |_: u128, sq: u128| (sq as f64) > threshold * threshold;
    let keep = |h: &Hit| (h.index as f64) > threshold;
    let hits = scan(
        &ScanSpec { y, prefilter: &prefilter, keep: &keep, budget: DEFAULT_BOX_BUDGET },
        exec,
    )?;
    Ok(TailMass {
        count: hits.len() as u64,
        threshold,
        budget_shape: y.as_f64().powi(6) / (threshold * threshold),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityVolumeComparison {
    pub x: f64,
    pub delta: f64,
    pub y: f64,
    /// Irreducible `f` with `h < Y` and `X < |Disc K_f| < delta X`.
    pub lhs: u64,
    /// `sum_n sigma(n) Vol(h < Y, n^2 X < |Disc| < delta n^2 X)`.
    pub rhs: f64,
    pub n_max: u64,
    pub relative_gap: f64,
}

/// `sum_K |S_K(Y)|` over the window `X < |Disc K| < delta X` against
/// `sum_n sigma(n) Vol(V_{n^2 X, Y})` restricted to the same window, with
/// `Y = C X^(1/4 + kappa)`. Terms stop at `n^2 X >= (2Y)^6`, beyond which
/// the region is empty.
pub fn density_volume_comparison(x: f64, delta: f64, kappa: f64, c: f64, exec: &Exec) -> Result<DensityVolumeComparison> {
    if !(x > 0.0 && delta > 1.0 && kappa > 0.0 && c > 1.0) {
        return Err(Error::Config("need X > 0, delta > 1, kappa > 0, C > 1".into()));
    }
    let y = HeightBound::from_f64(c * x.powf(0.25 + kappa))?;
    let yf = y.as_f64();
    let n_max = ((2.0 * yf).powi(6) / x).sqrt().floor() as u64;
    let ns: Vec<u64> = (1..=n_max).collect();
    let terms = exec.map(&ns, |&n| -> Result<f64> {
        let n2 = (n as f64) * (n as f64);
        let vol = window_volume(n2 * x, delta * n2 * x, y)?;
        if vol == 0.0 {
            return Ok(0.0);
        }
        Ok(sigma_euler(n, SIGMA_P_MAX)? * vol)
    });
    let mut rhs = 0.0;
    for t in terms {
        rhs += t?;
    }
    let lhs = scan_field_window(x, delta * x, y, exec)?.len() as u64;
    Ok(DensityVolumeComparison {
        x,
        delta,
        y: yf,
        lhs,
        rhs,
        n_max,
        relative_gap: (lhs as f64 - rhs).abs() / rhs,
    })
}
