use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{row_b_range, HeightBound, MonicCubic};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Default cap on the size of the scanned coefficient box.
pub const DEFAULT_BOX_BUDGET: u128 = 200_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    Both,
}

impl Sign {
    pub fn admits(&self, disc: i128) -> bool {
        match self {
            Sign::Positive => disc > 0,
            Sign::Negative => disc < 0,
            Sign::Both => true,
        }
    }
}

/// `{f : h(f) < y, x_lo < |disc f| < x_hi, sign matches, t in trace_set}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub sign: Sign,
    pub y: HeightBound,
    pub trace_set: Vec<i64>,
    pub budget: u128,
}

impl RegionSpec {
    /// All trace classes, no discriminant window.
    pub fn height_only(y: HeightBound) -> Self {
        Self {
            x_lo: 0.0,
            x_hi: f64::INFINITY,
            sign: Sign::Both,
            y,
            trace_set: vec![-1, 0, 1],
            budget: DEFAULT_BOX_BUDGET,
        }
    }

    pub fn with_window(mut self, x_lo: f64, x_hi: f64, sign: Sign) -> Self {
        self.x_lo = x_lo;
        self.x_hi = x_hi;
        self.sign = sign;
        self
    }

    pub fn with_traces(mut self, traces: &[i64]) -> Self {
        self.trace_set = traces.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_lo >= 0.0 && self.x_lo < self.x_hi) {
            return Err(Error::Config(format!(
                "discriminant window ({}, {}) is empty or negative",
                self.x_lo, self.x_hi
            )));
        }
        if self.trace_set.is_empty() || self.trace_set.iter().any(|t| !(-1..=1).contains(t)) {
            return Err(Error::Config(
                "trace set must be a non-empty subset of {-1,0,1}".into(),
            ));
        }
        Ok(())
    }

    pub fn windowed(&self) -> bool {
        self.x_hi.is_finite() || self.x_lo > 0.0
    }

    /// Window and sign test on an exact discriminant.
    pub fn admits_disc(&self, disc: i128) -> bool {
        if !self.sign.admits(disc) {
            return false;
        }
        if !self.windowed() {
            return true;
        }
        let m = disc.unsigned_abs() as f64;
        m > self.x_lo && m < self.x_hi
    }

    /// Largest |A| scanned: the `3Y^2` box edge, clipped to `Y^2 + 1`, past
    /// which no row has admissible constants.
    pub fn a_max(&self) -> i64 {
        let yf = self.y.as_f64();
        let y2 = yf * yf;
        ((3.0 * y2).floor()).min(y2.ceil() + 1.0) as i64
    }

    pub fn b_max(&self) -> i64 {
        let yf = self.y.as_f64();
        (yf * yf * yf).floor() as i64
    }

    pub fn box_size(&self) -> u128 {
        let traces = self.trace_set.len() as u128;
        traces * (2 * self.a_max() as u128 + 1) * (2 * self.b_max() as u128 + 1)
    }

    pub fn check_budget(&self) -> Result<()> {
        let needed = self.box_size();
        if needed > self.budget {
            return Err(Error::Budget {
                what: "coefficient box",
                needed,
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Rows `(t, A)` in lexicographic order.
    pub fn rows(&self) -> Vec<(i64, i64)> {
        let mut traces = self.trace_set.clone();
        traces.sort_unstable();
        traces.dedup();
        let amax = self.a_max();
        traces
            .into_iter()
            .flat_map(|t| (-amax..=amax).map(move |a| (t, a)))
            .collect()
    }
}

/// A congruence condition modulo `modulus`. The predicate must depend only
/// on the coefficients modulo `modulus`.
#[derive(Clone)]
pub struct Congruence {
    pub modulus: u64,
    pub accept: Arc<dyn Fn(&MonicCubic) -> bool + Send + Sync>,
}

impl Congruence {
    pub fn new(modulus: u64, accept: impl Fn(&MonicCubic) -> bool + Send + Sync + 'static) -> Self {
        Self {
            modulus,
            accept: Arc::new(accept),
        }
    }
}

impl std::fmt::Debug for Congruence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Congruence(mod {})", self.modulus)
    }
}

/// All `f` in the region, in lexicographic `(t, A, B)` order.
pub fn enumerate_region(
    r: &RegionSpec,
    filter: Option<&Congruence>,
    exec: &Exec,
) -> Result<Vec<MonicCubic>> {
    r.validate()?;
    if let Some(c) = filter {
        if c.modulus == 0 {
            return Err(Error::Config("congruence modulus must be positive".into()));
        }
    }
    r.check_budget()?;
    let rows = r.rows();
    let per_row = exec.map(&rows, |&(t, a)| -> Result<Vec<MonicCubic>> {
        let mut out = Vec::new();
        if let Some((lo, hi)) = row_b_range(&r.y, t, a) {
            for b in lo..=hi {
                let f = MonicCubic::new_unchecked(t, a, b);
                if r.windowed() || r.sign != super::Sign::Both {
                    let d = f.discriminant()?;
                    if !r.admits_disc(d) {
                        continue;
                    }
                }
                if let Some(c) = filter {
                    if !(c.accept)(&f) {
                        continue;
                    }
                }
                out.push(f);
            }
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for row in per_row {
        all.extend(row?);
    }
    Ok(all)
}
