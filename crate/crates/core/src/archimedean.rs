//! Real volumes: counting regions in coefficient space, the trace-zero
//! unit-height volumes, and the assembled counting constant.
//!
//! For fixed trace `t` and `A`, the constants `B` of height below `Y` form an
//! interval whose endpoints are explicit (each stability condition is linear
//! or quadratic in `B`), and a discriminant window cuts it by the level sets
//! of a concave quadratic in `B`. Volumes are therefore one-dimensional
//! integrals of interval lengths, done by adaptive Gauss-Kronrod.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::densities::{euler_product_residue, ResidueEstimate};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::poly::{real_cubic_roots, RegionSpec, Sign};

pub const DEFAULT_SEED: u64 = 0x5eed_cafe;
pub const DEFAULT_MC_SAMPLES: u64 = 2_000_000;
const MC_CHUNK: u64 = 65_536;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    MonteCarlo { seed: u64, samples: u64 },
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

/// Signature `(r1, r2)` of a real étale algebra of degree `r1 + 2 r2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignatureSpec {
    pub r1: u32,
    pub r2: u32,
}

impl SignatureSpec {
    pub fn new(r1: u32, r2: u32) -> Self {
        Self { r1, r2 }
    }

    pub fn degree(&self) -> u32 {
        self.r1 + 2 * self.r2
    }

    pub fn all(d: u32) -> Vec<SignatureSpec> {
        (0..=d / 2).rev().map(|r2| SignatureSpec::new(d - 2 * r2, r2)).collect()
    }
}

// Adaptive Gauss-Kronrod (7, 15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
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

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut stack = vec![(a, b, tol, 0u32)];
    let (mut total, mut err) = (0.0, 0.0);
    while let Some((lo, hi, tl, depth)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        if e <= tl || depth >= 48 || hi - lo < 1e-13 * (1.0 + lo.abs()) {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, tl / 2f64.sqrt(), depth + 1));
            stack.push((mid, hi, tl / 2f64.sqrt(), depth + 1));
        }
    }
    (total, err)
}

fn interval_len(lo: f64, hi: f64) -> f64 {
    (hi - lo).max(0.0)
}

/// Interval of real `B` giving height below `y` for the row `(t, a)`.
pub fn height_b_interval(y: f64, t: f64, a: f64) -> Option<(f64, f64)> {
    let y2 = y * y;
    let y3 = y2 * y;
    let y4 = y2 * y2;
    let y6 = y3 * y3;
    let d1 = t * t * y4 + 4.0 * (y6 - a * y4);
    let d2 = t * t * y4 + 4.0 * (y6 + a * y4);
    if d1 < 0.0 || d2 < 0.0 {
        return None;
    }
    let (s1, s2) = (d1.sqrt(), d2.sqrt());
    let lo = [-(y3 + t * y2 + a * y), -y3, (t * y2 - s1) / 2.0, (-t * y2 - s2) / 2.0]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = [y3 - t * y2 + a * y, y3, (t * y2 + s1) / 2.0, (-t * y2 + s2) / 2.0]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    (lo < hi).then_some((lo, hi))
}

// Roots of disc(t, a, B) = c as a function of B: -27 B^2 + beta B + gamma.
fn disc_level_set(t: f64, a: f64, c: f64) -> Option<(f64, f64)> {
    let beta = 18.0 * t * a - 4.0 * t * t * t;
    let gamma = t * t * a * a - 4.0 * a * a * a - c;
    let disc = beta * beta + 108.0 * gamma;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some(((beta - s) / 54.0, (beta + s) / 54.0))
}

// Measure of B in [lo, hi] with disc > c.
fn measure_disc_above(lo: f64, hi: f64, t: f64, a: f64, c: f64) -> f64 {
    match disc_level_set(t, a, c) {
        Some((r1, r2)) => interval_len(lo.max(r1), hi.min(r2)),
        None => 0.0,
    }
}

// Values of `a` where disc = c at an end of the height interval. The row
// length has a kink there, and two nearby kinks can hide a narrow ramp from
// the quadrature nodes.
fn edge_crossings(y: f64, t: f64, c: f64, amax: f64) -> Vec<f64> {
    const STEPS: usize = 4096;
    let disc = |a: f64, b: f64| {
        18.0 * t * a * b - 4.0 * t * t * t * b + t * t * a * a - 4.0 * a * a * a - 27.0 * b * b
    };
    let g = |a: f64, end: usize| {
        height_b_interval(y, t, a).map(|(lo, hi)| disc(a, if end == 0 { lo } else { hi }) - c)
    };
    let h = 2.0 * amax / STEPS as f64;
    let mut out = Vec::new();
    for end in 0..2 {
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=STEPS {
            let a = -amax + i as f64 * h;
            let Some(v) = g(a, end) else {
                prev = None;
                continue;
            };
            if let Some((pa, pv)) = prev {
                if (pv < 0.0) != (v < 0.0) {
                    let (mut lo, mut hi, lo_neg) = (pa, a, pv < 0.0);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        match g(mid, end) {
                            Some(m) if (m < 0.0) == lo_neg => lo = mid,
                            _ => hi = mid,
                        }
                    }
                    out.push(0.5 * (lo + hi));
                }
            }
            prev = Some((a, v));
        }
    }
    out
}

fn row_length(r: &RegionSpec, y: f64, t: f64, a: f64) -> f64 {
    let Some((lo, hi)) = height_b_interval(y, t, a) else { return 0.0 };
    let full = interval_len(lo, hi);
    let (x_lo, x_hi) = (r.x_lo, r.x_hi);
    let above = |c: f64| {
        if c == f64::NEG_INFINITY {
            full
        } else if c == f64::INFINITY {
            0.0
        } else {
            measure_disc_above(lo, hi, t, a, c)
        }
    };
    // disc in (x_lo, x_hi) and disc in (-x_hi, -x_lo), up to null sets.
    let pos = above(x_lo) - above(x_hi);
    let neg = above(-x_hi) - above(-x_lo);
    match r.sign {
        Sign::Positive => pos,
        Sign::Negative => neg,
        Sign::Both => pos + neg,
    }
}

/// Volume of `{(A, B) real : h < Y, x_lo < |disc| < x_hi, sign}` summed over
/// the trace classes of the region.
pub fn region_volume(r: &RegionSpec) -> Result<VolumeEstimate> {
    if !(r.x_lo >= 0.0 && r.x_hi >= 0.0) {
        return Err(Error::Config("discriminant window must be non-negative".into()));
    }
    if r.x_hi <= r.x_lo {
        return Ok(VolumeEstimate { value: 0.0, abs_error: 0.0, method: Method::Exact });
    }
    let y = r.y.as_f64();
    let scale = y.powi(5);
    let (mut value, mut err) = (0.0, 0.0);
    for &t in &r.trace_set {
        let t = t as f64;
        let f = |a: f64| row_length(r, y, t, a);
        let amax = 3.0 * y * y + 1.0;
        let mut cuts = vec![-amax, -0.5 * y * y, 0.0, 0.5 * y * y, amax];
        // Square-root edges: the height interval closes at a = +-(Y^2 + t^2/4)
        // and the level set disc = c appears at a = t^2/3 - cbrt(c/4).
        cuts.push(y * y + t * t / 4.0);
        cuts.push(-y * y - t * t / 4.0);
        for c in [0.0, r.x_lo, r.x_hi, -r.x_lo, -r.x_hi] {
            if c.is_finite() {
                cuts.push(t * t / 3.0 - (c / 4.0).cbrt());
                cuts.extend(edge_crossings(y, t, c, amax));
            }
        }
        cuts.retain(|a| a.abs() <= amax);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (v, e) = integrate(&f, w[0], w[1], 1e-11 * scale);
            value += v;
            err += e;
        }
    }
    Ok(VolumeEstimate { value, abs_error: err, method: Method::Quadrature })
}

/// Monte-Carlo estimate of the same volume, sampling the coefficient box
/// and testing heights through numerically computed roots. Chunks use
/// independent streams of one seed, so the estimate does not depend on the
/// number of workers.
pub fn region_volume_mc(r: &RegionSpec, samples: u64, seed: u64, exec: &Exec) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    let y = r.y.as_f64();
    let (amax, bmax) = (3.0 * y * y, y * y * y);
    let box_vol = (2.0 * amax) * (2.0 * bmax) * r.trace_set.len() as f64;
    let chunks: Vec<u64> = (0..samples.div_ceil(MC_CHUNK)).collect();
    let traces = r.trace_set.clone();
    let hits: Vec<u64> = exec.map(&chunks, |&c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let n = MC_CHUNK.min(samples - c * MC_CHUNK);
        let mut h = 0;
        for _ in 0..n {
            let t = traces[rng.gen_range(0..traces.len())] as f64;
            let a = rng.gen_range(-amax..amax);
            let b = rng.gen_range(-bmax..bmax);
            let max_mod = real_cubic_roots(t, a, b).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if max_mod >= y {
                continue;
            }
            let d = 18.0 * t * a * b - 4.0 * t * t * t * b + t * t * a * a - 4.0 * a * a * a - 27.0 * b * b;
            let m = d.abs();
            if r.sign.admits(if d > 0.0 { 1 } else { -1 }) && m > r.x_lo && m < r.x_hi {
                h += 1;
            }
        }
        h
    });
    let hits: u64 = hits.iter().sum();
    let p = hits as f64 / samples as f64;
    let value = box_vol * p;
    let abs_error = 3.0 * box_vol * (p * (1.0 - p) / samples as f64).sqrt();
    Ok(VolumeEstimate { value, abs_error, method: Method::MonteCarlo { seed, samples } })
}

/// `d_0`-measure of trace-zero elements of `K_inf` with all coordinates of
/// modulus below one, where Lebesgue measure factors as `d lambda * d_0`
/// along `alpha = lambda (1, ..., 1) + beta`.
pub fn trace_zero_volume(sig: SignatureSpec) -> Result<VolumeEstimate> {
    // Writing the trace-zero part in two free coordinates gives Jacobian 3
    // in both signatures.
    match (sig.r1, sig.r2) {
        (3, 0) => {
            // |b1|, |b2|, |b1 + b2| < 1: slice in b1.
            let f = |b1: f64| interval_len((-1.0f64).max(-1.0 - b1), 1.0f64.min(1.0 - b1));
            let (a, e1) = integrate(&f, -1.0, 0.0, 1e-13);
            let (b, e2) = integrate(&f, 0.0, 1.0, 1e-13);
            Ok(VolumeEstimate { value: 3.0 * (a + b), abs_error: 3.0 * (e1 + e2), method: Method::Quadrature })
        }
        (1, 1) => {
            // x = -2u real, z = u + iv: |2u| < 1 and u^2 + v^2 < 1.
            let f = |u: f64| 2.0 * (1.0 - u * u).max(0.0).sqrt();
            let (v, e) = integrate(&f, -0.5, 0.5, 1e-13);
            Ok(VolumeEstimate { value: 3.0 * v, abs_error: 3.0 * e, method: Method::Quadrature })
        }
        _ => Err(Error::Unsupported(format!("signature ({}, {})", sig.r1, sig.r2))),
    }
}

/// Monte-Carlo counterpart of [`trace_zero_volume`].
pub fn trace_zero_volume_mc(sig: SignatureSpec, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let box_area = match (sig.r1, sig.r2) {
        (3, 0) => {
            for _ in 0..samples {
                let (b1, b2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if (b1 + b2).abs() < 1.0 {
                    hits += 1;
                }
            }
            4.0
        }
        (1, 1) => {
            for _ in 0..samples {
                let (u, v): (f64, f64) = (rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0));
                if u * u + v * v < 1.0 {
                    hits += 1;
                }
            }
            2.0
        }
        _ => return Err(Error::Unsupported(format!("signature ({}, {})", sig.r1, sig.r2))),
    };
    let p = hits as f64 / samples as f64;
    let scale = 3.0 * box_area;
    Ok(VolumeEstimate {
        value: scale * p,
        abs_error: 3.0 * scale * (p * (1.0 - p) / samples as f64).sqrt(),
        method: Method::MonteCarlo { seed, samples },
    })
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * k)
}

/// `1 / (2 #Aut)` for the real algebra of the given signature.
pub fn signature_mass(sig: SignatureSpec) -> BigRational {
    let aut = factorial(sig.r1) * factorial(sig.r2) * BigInt::from(2).pow(sig.r2);
    BigRational::new(BigInt::from(1), aut * 2)
}

/// Half the sum over real étale algebras of degree `d` of `1 / #Aut`.
pub fn archimedean_mass(d: u32) -> Result<BigRational> {
    if d < 2 {
        return Err(Error::Config("degree must be at least 2".into()));
    }
    Ok(SignatureSpec::all(d).into_iter().map(signature_mass).fold(BigRational::zero(), |a, b| a + b))
}

/// Coefficient `c` in `#{K : |disc K| < X} ~ c X`, for one signature or all.
pub fn heuristic_constant(d: u32, sig: Option<SignatureSpec>, p_max: u64) -> Result<ResidueEstimate> {
    if d < 3 {
        return Err(Error::Unsupported(format!(
            "degree {d}: the polynomial count is two-to-one onto quadratic fields"
        )));
    }
    let mass = match sig {
        Some(s) if s.degree() != d => {
            return Err(Error::Config(format!("signature ({}, {}) has degree {}", s.r1, s.r2, s.degree())))
        }
        Some(s) => signature_mass(s),
        None => archimedean_mass(d)?,
    };
    let m = crate::densities::ratio_f64(&mass);
    let res = euler_product_residue(d, p_max)?;
    Ok(ResidueEstimate { value: m * res.value, error_bound: m * res.error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::HeightBound;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn masses() {
        assert_eq!(signature_mass(SignatureSpec::new(3, 0)), rat(1, 12));
        assert_eq!(signature_mass(SignatureSpec::new(1, 1)), rat(1, 4));
        assert_eq!(archimedean_mass(3).unwrap(), rat(1, 3));
        assert_eq!(archimedean_mass(2).unwrap(), rat(1, 2));
    }

    #[test]
    fn constants() {
        let z3 = 1.202_056_903_159_594_2;
        let c = heuristic_constant(3, Some(SignatureSpec::new(3, 0)), 10_000).unwrap();
        assert!((c.value - 1.0 / (12.0 * z3)).abs() < 1e-4);
        let c = heuristic_constant(3, Some(SignatureSpec::new(1, 1)), 10_000).unwrap();
        assert!((c.value - 1.0 / (4.0 * z3)).abs() < 1e-4);
        let c = heuristic_constant(3, None, 10_000).unwrap();
        assert!((c.value - 1.0 / (3.0 * z3)).abs() < 1e-4);
        assert!(heuristic_constant(2, None, 100).is_err());
    }

    #[test]
    fn trace_zero_volumes() {
        let v = trace_zero_volume(SignatureSpec::new(3, 0)).unwrap();
        assert!((v.value - 9.0).abs() < 1e-9);
        let v = trace_zero_volume(SignatureSpec::new(1, 1)).unwrap();
        let exact = 3.0 * (3f64.sqrt() / 2.0 + std::f64::consts::PI / 3.0);
        assert!((v.value - exact).abs() < 1e-9);
        assert!(trace_zero_volume(SignatureSpec::new(2, 1)).is_err());
    }

    #[test]
    fn empty_window_has_zero_volume() {
        let r = RegionSpec::height_only(HeightBound::integer(3).unwrap()).with_window(0.0, 0.0, Sign::Both);
        assert_eq!(region_volume(&r).unwrap().value, 0.0);
    }

    #[test]
    fn integrator_handles_sqrt_edges() {
        let f = |x: f64| (1.0 - x * x).max(0.0).sqrt();
        let (v, _) = integrate(&f, -1.0, 1.0, 1e-12);
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }
}
