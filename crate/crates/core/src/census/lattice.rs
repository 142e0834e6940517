//! Counting the elements of `O_K` that generate polynomials of bounded
//! height, directly on the lattice.
//!
//! An element of trace `-t` with all conjugates below `Y` in absolute value
//! has `T2 < 3 Y^2`, so the candidates in each trace slice lie in a plane
//! ellipse. Every candidate is then settled exactly from its
//! characteristic polynomial.

use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use num_bigint::BigInt;
use num_complex::Complex64;

use super::FieldRecord;
use crate::error::{Error, Result};
use crate::index::maximal_order_oracle;
use crate::poly::{HeightBound, MonicCubic};

/// Default cap on lattice points visited per count.
pub const DEFAULT_LATTICE_BUDGET: u128 = 50_000_000;

/// Maximal order of one field, split along the trace.
#[derive(Clone, Debug)]
pub struct TraceSlices {
    poly: MonicCubic,
    /// Basis elements as integer coordinates in `1, alpha, alpha^2`, over `den`.
    basis: [[i128; 3]; 3],
    den: i128,
    /// `tr(e0)`; `e1`, `e2` have trace zero.
    g: i128,
    /// Realified embeddings of the basis; the Euclidean norm is `T2`.
    emb: [[f64; 3]; 3],
}

impl TraceSlices {
    pub fn new(f: &MonicCubic) -> Result<Self> {
        let order = maximal_order_oracle(&f.cubic())?;
        let mut den = BigInt::one();
        for row in &order.basis {
            for c in row {
                den = den.lcm(c.denom());
            }
        }
        let conv = |v: BigInt| v.to_i128().ok_or(Error::Overflow("order basis"));
        let mut raw = [[0i128; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let c = &order.basis[i][j];
                raw[i][j] = conv(c.numer() * (&den / c.denom()))?;
            }
        }
        let den = conv(den)?;
        let power_traces = [3i128, -(f.t() as i128), (f.t() * f.t() - 2 * f.a()) as i128];
        let traces: Vec<i128> = raw
            .iter()
            .map(|r| (0..3).map(|j| r[j] * power_traces[j]).sum::<i128>() / den)
            .collect();
        let (unimod, g) = split_trace([traces[0], traces[1], traces[2]]);
        let mut basis = [[0i128; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                for j in 0..3 {
                    basis[i][j] += unimod[i][k] * raw[k][j];
                }
            }
        }
        let mut me = Self {
            poly: *f,
            basis,
            den,
            g,
            emb: [[0.0; 3]; 3],
        };
        me.gauss_reduce();
        Ok(me)
    }

    fn embed(&self, coords: &[i128; 3]) -> [f64; 3] {
        let roots = self.poly.cubic().roots();
        let val = |z: Complex64| -> Complex64 {
            (Complex64::new(coords[0] as f64, 0.0)
                + z * coords[1] as f64
                + z * z * coords[2] as f64)
                / self.den as f64
        };
        let real = roots.iter().all(|z| z.im == 0.0);
        if real {
            [val(roots[0]).re, val(roots[1]).re, val(roots[2]).re]
        } else {
            let w = val(roots[1]) * std::f64::consts::SQRT_2;
            [val(roots[0]).re, w.re, w.im]
        }
    }

    // Lagrange-Gauss reduction of the trace-zero plane, then embeddings.
    fn gauss_reduce(&mut self) {
        for i in 0..3 {
            self.emb[i] = self.embed(&self.basis[i]);
        }
        let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        for _ in 0..200 {
            if dot(&self.emb[1], &self.emb[1]) > dot(&self.emb[2], &self.emb[2]) {
                self.basis.swap(1, 2);
                self.emb.swap(1, 2);
            }
            let q = (dot(&self.emb[1], &self.emb[2]) / dot(&self.emb[1], &self.emb[1])).round();
            if q == 0.0 {
                break;
            }
            let qi = q as i128;
            for j in 0..3 {
                self.basis[2][j] -= qi * self.basis[1][j];
            }
            self.emb[2] = self.embed(&self.basis[2]);
        }
    }

    /// `|S_K(Y)|`: elements of `O_K \ Z` with trace in `{-1, 0, 1}` and every
    /// conjugate of absolute value below `y`.
    pub fn count(&self, y: &HeightBound, budget: u128) -> Result<u64> {
        let mut n = 0u64;
        self.visit(y, budget, |_| n += 1)?;
        Ok(n)
    }

    /// Characteristic polynomials of the elements counted by [`count`](Self::count).
    pub fn generators(&self, y: &HeightBound, budget: u128) -> Result<Vec<MonicCubic>> {
        let mut out = Vec::new();
        self.visit(y, budget, |f| out.push(f))?;
        out.sort_unstable();
        Ok(out)
    }

    fn visit(&self, y: &HeightBound, budget: u128, mut emit: impl FnMut(MonicCubic)) -> Result<()> {
        let yf = y.as_f64();
        let r2 = 3.0 * yf * yf * (1.0 + 1e-9) + 1e-9;
        let dot = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let (w1, w2) = (&self.emb[1], &self.emb[2]);
        let (g11, g12, g22) = (dot(w1, w1), dot(w1, w2), dot(w2, w2));
        let det = g11 * g22 - g12 * g12;
        if !(det > 0.0) {
            return Err(Error::Precision("degenerate trace-zero lattice".into()));
        }
        let area = std::f64::consts::PI * r2 / det.sqrt();
        let slices: Vec<i128> = (-1..=1).filter(|k| (k * self.g).abs() <= 1).collect();
        let est = (area + 4.0 * (r2 / g11).sqrt() + 4.0) * slices.len() as f64;
        if est > budget as f64 {
            return Err(Error::Budget {
                what: "lattice points",
                needed: est as u128,
                budget,
            });
        }
        for k in slices {
            let v0 = self.emb[0].map(|c| c * k as f64);
            let (b1, b2) = (dot(&v0, w1), dot(&v0, w2));
            // Center of the ellipse in (m1, m2) and the residual radius.
            let c1 = -(g22 * b1 - g12 * b2) / det;
            let c2 = -(g11 * b2 - g12 * b1) / det;
            let qmin = dot(&v0, &v0) + b1 * c1 + b2 * c2;
            let r = r2 - qmin;
            if r < 0.0 {
                continue;
            }
            let h2 = (r * g11 / det).sqrt() + 1e-9;
            for m2 in (c2 - h2).ceil() as i64..=(c2 + h2).floor() as i64 {
                let d2 = m2 as f64 - c2;
                let rem = r - det / g11 * d2 * d2;
                if rem < 0.0 {
                    continue;
                }
                let mid = c1 - g12 / g11 * d2;
                let h1 = (rem / g11).sqrt() + 1e-9;
                for m1 in (mid - h1).ceil() as i64..=(mid + h1).floor() as i64 {
                    if let Some(f) = self.check([k, m1 as i128, m2 as i128], y)? {
                        emit(f);
                    }
                }
            }
        }
        Ok(())
    }

    fn check(&self, c: [i128; 3], y: &HeightBound) -> Result<Option<MonicCubic>> {
        let mut q = [0i128; 3];
        for i in 0..3 {
            for j in 0..3 {
                q[j] = self.basis[i][j]
                    .checked_mul(c[i])
                    .and_then(|v| v.checked_add(q[j]))
                    .ok_or(Error::Overflow("lattice element"))?;
            }
        }
        if q[1] == 0 && q[2] == 0 {
            return Ok(None);
        }
        let (e1, e2, e3) = char_poly(&self.poly, q).ok_or(Error::Overflow("characteristic polynomial"))?;
        let d = self.den;
        let (d2, d3) = (d * d, d * d * d);
        if e1 % d != 0 || e2 % d2 != 0 || e3 % d3 != 0 {
            return Err(Error::Precision(format!(
                "non-integral element {q:?}/{d} in the maximal order of {}",
                self.poly
            )));
        }
        let (t, a, b) = (-e1 / d, e2 / d2, -e3 / d3);
        let small = |v: i128| i64::try_from(v).ok();
        let (Some(t), Some(a), Some(b)) = (small(t), small(a), small(b)) else {
            return Ok(None);
        };
        if !(-1..=1).contains(&t) || !y.admits(t, a, b) {
            return Ok(None);
        }
        Ok(Some(MonicCubic::new(t, a, b)?))
    }
}

/// `|S_K(Y)|` for the field of `rec`.
pub fn count_sk(rec: &FieldRecord, y: &HeightBound) -> Result<u64> {
    TraceSlices::new(&rec.canonical_rep)?.count(y, DEFAULT_LATTICE_BUDGET)
}

// Unimodular rows (e0, e1, e2) with tr e0 = g = gcd(traces) > 0 and
// tr e1 = tr e2 = 0.
fn split_trace(mut w: [i128; 3]) -> ([[i128; 3]; 3], i128) {
    let mut rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    loop {
        let nonzero: Vec<usize> = (0..3).filter(|&i| w[i] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let &i = nonzero.iter().min_by_key(|&&i| w[i].abs()).unwrap();
        for &j in &nonzero {
            if j != i {
                let q = w[j].div_euclid(w[i]);
                w[j] -= q * w[i];
                for k in 0..3 {
                    rows[j][k] -= q * rows[i][k];
                }
            }
        }
    }
    let i = (0..3).find(|&i| w[i] != 0).expect("trace form is nonzero");
    rows.swap(0, i);
    w.swap(0, i);
    if w[0] < 0 {
        rows[0] = rows[0].map(|v| -v);
        w[0] = -w[0];
    }
    (rows, w[0])
}

// Elementary symmetric functions (trace, principal minors, determinant) of
// multiplication by q0 + q1 alpha + q2 alpha^2.
fn char_poly(f: &MonicCubic, q: [i128; 3]) -> Option<(i128, i128, i128)> {
    let (t, a, b) = (f.t() as i128, f.a() as i128, f.b() as i128);
    let times_alpha = |v: [i128; 3]| -> Option<[i128; 3]> {
        Some([
            b.checked_mul(v[2])?.checked_neg()?,
            v[0].checked_sub(a.checked_mul(v[2])?)?,
            v[1].checked_sub(t.checked_mul(v[2])?)?,
        ])
    };
    let c0 = q;
    let c1 = times_alpha(c0)?;
    let c2 = times_alpha(c1)?;
    // m[row][col]
    let m = [[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]];
    let mul = |x: i128, y: i128| x.checked_mul(y);
    let minor = |i: usize, j: usize| -> Option<i128> {
        mul(m[i][i], m[j][j])?.checked_sub(mul(m[i][j], m[j][i])?)
    };
    let e1 = m[0][0].checked_add(m[1][1])?.checked_add(m[2][2])?;
    let e2 = minor(0, 1)?.checked_add(minor(0, 2)?)?.checked_add(minor(1, 2)?)?;
    let cof0 = mul(m[1][1], m[2][2])?.checked_sub(mul(m[1][2], m[2][1])?)?;
    let cof1 = mul(m[1][0], m[2][2])?.checked_sub(mul(m[1][2], m[2][0])?)?;
    let cof2 = mul(m[1][0], m[2][1])?.checked_sub(mul(m[1][1], m[2][0])?)?;
    let e3 = mul(m[0][0], cof0)?
        .checked_sub(mul(m[0][1], cof1)?)?
        .checked_add(mul(m[0][2], cof2)?)?;
    Some((e1, e2, e3))
}
