//! Inclusion-exclusion over the index, and the experiments built on it.
//!
//! Every count here is over irreducible polynomials. The sum
//! `sum_K |S_K(Y)|` is read through the pair bijection: one polynomial per
//! isomorphism class of pairs `(K, alpha)`.

pub mod diagnostics;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use crate::arith::sq_part;
use crate::arith::{divisors, isqrt, mobius};
use crate::census::lattice::{TraceSlices, DEFAULT_LATTICE_BUDGET};
use crate::census::scan::{scan, Hit, ScanSpec};
use crate::census::Census;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::poly::{HeightBound, DEFAULT_BOX_BUDGET};

/// Default `(kappa, delta1, delta2)`.
pub const DEFAULT_KAPPA: f64 = 0.02;
pub const DEFAULT_DELTA1: f64 = 0.10;
pub const DEFAULT_DELTA2: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SievePlan {
    pub x: f64,
    pub c: f64,
    pub kappa: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Drop both cutoffs and sum over every `(n, d)`.
    pub untruncated: bool,
}

impl SievePlan {
    pub fn new(x: f64, c: f64, kappa: f64, delta1: f64, delta2: f64) -> Result<Self> {
        let plan = Self { x, c, kappa, delta1, delta2, untruncated: false };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_defaults(x: f64, c: f64) -> Result<Self> {
        Self::new(x, c, DEFAULT_KAPPA, DEFAULT_DELTA1, DEFAULT_DELTA2)
    }

    pub fn untruncated(mut self) -> Self {
        self.untruncated = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("X", self.x), ("kappa", self.kappa), ("delta1", self.delta1), ("delta2", self.delta2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.c.is_finite() && self.c > 1.0) {
            return Err(Error::Config(format!("C = {} must exceed 1", self.c)));
        }
        Ok(())
    }

    /// `Y = C X^(1/4 + kappa)`.
    pub fn y(&self) -> Result<HeightBound> {
        HeightBound::from_f64(self.c * self.x.powf(0.25 + self.kappa))
    }

    /// Bound on `nd`.
    pub fn nd_cutoff(&self) -> f64 {
        if self.untruncated {
            f64::INFINITY
        } else {
            self.x.powf(0.25 + self.delta1)
        }
    }

    /// Bound on `sq(nd)`.
    pub fn sq_cutoff(&self) -> f64 {
        if self.untruncated {
            f64::INFINITY
        } else {
            self.x.powf(self.delta2)
        }
    }

    /// The five terms of the error budget `E(kappa, delta1, delta2)` with the
    /// epsilons dropped.
    pub fn error_budget(&self) -> [f64; 5] {
        let (x, k, d1, d2) = (self.x, self.kappa, self.delta1, self.delta2);
        [
            x.powf(1.0 + 6.0 * k - 2.0 * d1),
            x.powf(1.0 + 2.0 * k + 2.0 * d1 - d2 / 2.0),
            x.powf(1.0 + 2.0 * k - d2 / 9.0),
            x.powf(0.75 + 3.0 * k + 2.0 * d2),
            x.powf(0.75 + 2.0 * k + d1),
        ]
    }
}

/// Irreducible `f` with `h(f) < y` and `lo < |Disc(K_f)| < hi`.
pub fn scan_field_window(lo: f64, hi: f64, y: HeightBound, exec: &Exec) -> Result<Vec<Hit>> {
    let prefilter = |d: u128, sq: u128| (d as f64) < hi * sq as f64;
    let keep = |h: &Hit| {
        let m = h.field_disc.unsigned_abs() as f64;
        m > lo && m < hi
    };
    scan(
        &ScanSpec { y, prefilter: &prefilter, keep: &keep, budget: DEFAULT_BOX_BUDGET },
        exec,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    /// `sum_K |S_K(Y)| / |Aut K|` over census fields in the window.
    pub lhs: u64,
    /// Irreducible polynomials with `h < Y`, `n^2 X < |Disc| < delta n^2 X`, `n = ind`.
    pub rhs: u64,
    /// `sum_K |S_K(Y)|` without the automorphism correction.
    pub generators: u64,
    pub fields: usize,
}

/// Both sides of the pair-count identity on `X < |Disc K| < delta X`.
pub fn pair_count_two_ways(census: &Census, x: f64, y: HeightBound, delta: f64, exec: &Exec) -> Result<PairCount> {
    if !(delta > 1.0 && x > 0.0) {
        return Err(Error::Config(format!("window ({x}, {delta} X) is empty")));
    }
    let hi = delta * x;
    if hi > census.x {
        return Err(Error::Config(format!(
            "window reaches |Disc| = {hi} but the census only covers X = {}",
            census.x
        )));
    }
    let floor = HeightBound::from_f64(census.c * x.powf(0.25))?;
    if y.to_rational() < floor.to_rational() {
        return Err(Error::Config(format!(
            "Y = {} is below C X^(1/4) = {}",
            y.as_f64(),
            floor.as_f64()
        )));
    }
    let recs: Vec<_> = census
        .records
        .iter()
        .filter(|r| {
            let m = r.field_disc.unsigned_abs() as f64;
            m > x && m < hi
        })
        .collect();
    let counts = exec.map(&recs, |r| -> Result<(u64, u64)> {
        let n = TraceSlices::new(&r.canonical_rep)?.count(&y, DEFAULT_LATTICE_BUDGET)?;
        Ok((n, r.automorphisms()))
    });
    let (mut lhs, mut generators) = (0, 0);
    for c in counts {
        let (n, aut) = c?;
        generators += n;
        lhs += n / aut;
    }
    let hits = scan_field_window(x, hi, y, exec)?;
    for h in &hits {
        let d = h.f.discriminant()?.unsigned_abs();
        if h.index > isqrt(d) {
            return Err(Error::Overflow("index exceeds the square root of the discriminant"));
        }
    }
    Ok(PairCount { lhs, rhs: hits.len() as u64, generators, fields: recs.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveTerm {
    pub n: u64,
    pub d: u64,
    pub mu: i32,
    /// `#{f in Sigma_dn irreducible : h < Y, |Disc| < n^2 X}`.
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveReport {
    pub plan: SievePlan,
    pub y: f64,
    pub nd_cutoff: f64,
    pub sq_cutoff: f64,
    pub terms: Vec<SieveTerm>,
    pub main: i64,
    /// `sum_K |S_K(Y)|` over `|Disc K| < X`, counted as polynomials.
    pub exact: u64,
    pub residual: f64,
    pub error_budget: [f64; 5],
}

impl SieveReport {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.exact.max(1) as f64
    }

    /// Columns `n,d,mu,count,cumulative`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,d,mu,count,cumulative\n");
        let mut acc = 0i64;
        for t in &self.terms {
            acc += t.mu as i64 * t.count as i64;
            s.push_str(&format!("{},{},{},{},{}\n", t.n, t.d, t.mu, t.count, acc));
        }
        s
    }

    /// Plan, cutoffs, totals and budget; the per-term table is left to the CSV.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "plan": self.plan,
            "Y": self.y,
            "nd_cutoff": self.nd_cutoff,
            "sq_cutoff": self.sq_cutoff,
            "terms": self.terms.len(),
            "main": self.main,
            "exact": self.exact,
            "residual": self.residual,
            "relative_residual": self.relative_residual(),
            "error_budget": self.error_budget,
            "error_budget_total": self.error_budget.iter().sum::<f64>(),
        })
    }
}

/// The sieve of `sum_K |S_K(Y)|` over `|Disc K| < X` into the terms
/// `mu(d) #{f in Sigma_dn : h < Y, |Disc| < n^2 X}`, truncated at the
/// plan's cutoffs.
///
/// A polynomial lies in `Sigma_m` exactly when `m | ind(f)`, and it can only
/// contribute to a term when `|Disc K_f| < X`; one scan of those
/// polynomials fills every term at once.
pub fn truncated_sieve(plan: &SievePlan, exec: &Exec) -> Result<SieveReport> {
    plan.validate()?;
    let y = plan.y()?;
    let hits = scan_field_window(0.0, plan.x, y, exec)?;
    let (nd_cut, sq_cut) = (plan.nd_cutoff(), plan.sq_cutoff());
    let per_hit = exec.map(&hits, |h| -> Result<Vec<(u64, u64)>> {
        let big_n = u64::try_from(h.index).map_err(|_| Error::Overflow("index"))?;
        let disc = h.f.discriminant()?.unsigned_abs() as f64;
        let mut out = Vec::new();
        for n in divisors(big_n) {
            if disc >= (n as f64) * (n as f64) * plan.x {
                continue;
            }
            for d in divisors(big_n / n) {
                let m = n * d;
                if (m as f64) <= nd_cut && (sq_part(m) as f64) <= sq_cut {
                    out.push((n, d));
                }
            }
        }
        Ok(out)
    });
    let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for r in per_hit {
        for key in r? {
            *counts.entry(key).or_default() += 1;
        }
    }
    let terms: Vec<SieveTerm> = counts
        .into_iter()
        .map(|((n, d), count)| SieveTerm { n, d, mu: mobius(d), count })
        .collect();
    let main: i64 = terms.iter().map(|t| t.mu as i64 * t.count as i64).sum();
    let exact = hits.len() as u64;
    Ok(SieveReport {
        plan: *plan,
        y: y.as_f64(),
        nd_cutoff: nd_cut,
        sq_cutoff: sq_cut,
        terms,
        main,
        exact,
        residual: (main - exact as i64).abs() as f64,
        error_budget: plan.error_budget(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefull_parts() {
        assert_eq!(sq_part(12), 4);
        assert_eq!(sq_part(30), 1);
        assert_eq!(sq_part(72), 72);
    }

    #[test]
    fn untruncated_sieve_is_exact() {
        let plan = SievePlan::with_defaults(2000.0, 2.0).unwrap().untruncated();
        let r = truncated_sieve(&plan, &Exec::sequential()).unwrap();
        assert_eq!(r.main, r.exact as i64);
        assert_eq!(r.residual, 0.0);
        // Terms with mu(d) = 0 carry counts but no weight.
        assert!(r.terms.iter().any(|t| t.mu == 0 && t.count > 0));
        let nonzero: i64 = r.terms.iter().filter(|t| t.mu != 0).map(|t| t.mu as i64 * t.count as i64).sum();
        assert_eq!(nonzero, r.main);
        let csv = r.to_csv();
        assert!(csv.lines().last().unwrap().ends_with(&format!(",{}", r.exact)));
    }
}
