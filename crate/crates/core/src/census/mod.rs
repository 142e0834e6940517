//! From polynomials to isomorphism classes of cubic fields.
//!
//! A census up to `X` scans every irreducible `f` with `h(f) < C X^(1/4)`,
//! keeps those whose field discriminant is below `X` in absolute value,
//! and splits each discriminant group into isomorphism classes.

pub mod cache;
pub mod iso;
pub mod lattice;
pub mod scan;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::poly::{HeightBound, MonicCubic, DEFAULT_BOX_BUDGET};
pub use iso::isomorphic;
pub use lattice::count_sk;
use scan::{scan, Hit, ScanSpec};

/// Default completeness constant.
pub const DEFAULT_C: f64 = 2.0;
/// Safety factor applied on top of the completeness check.
pub const COMPLETENESS_SAFETY: f64 = 1.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Signature {
    TotallyReal,
    Complex,
}

impl Signature {
    pub fn of_disc(d: i128) -> Self {
        if d > 0 {
            Signature::TotallyReal
        } else {
            Signature::Complex
        }
    }

    /// `+` for totally real, `-` for complex.
    pub fn symbol(&self) -> char {
        match self {
            Signature::TotallyReal => '+',
            Signature::Complex => '-',
        }
    }
}

/// One isomorphism class of cubic field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub field_disc: i128,
    pub signature: Signature,
    pub canonical_rep: MonicCubic,
    pub rep_index: u128,
    /// `|S_K(Y)|` for the heights at which it is known.
    pub generator_count: Vec<(HeightBound, u64)>,
}

impl FieldRecord {
    /// Square discriminant: the field is Galois with group `C3`.
    pub fn is_cyclic(&self) -> bool {
        let d = self.field_disc;
        d > 0 && {
            let r = crate::arith::isqrt(d as u128) as i128;
            r * r == d
        }
    }

    /// Number of generators of the field among the roots of one polynomial.
    pub fn automorphisms(&self) -> u64 {
        if self.is_cyclic() {
            3
        } else {
            1
        }
    }

    /// Ordering used for output and caches: `(|field_disc|, sign)`, then the
    /// representative.
    pub fn sort_key(&self) -> (u128, i8, MonicCubic) {
        let s = if self.field_disc < 0 { 0 } else { 1 };
        (self.field_disc.unsigned_abs(), s, self.canonical_rep)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub x: f64,
    pub c: f64,
    pub y: HeightBound,
    pub records: Vec<FieldRecord>,
    pub n_plus: u64,
    pub n_minus: u64,
    /// Fields whose smallest known generator exceeds the completeness check.
    pub warnings: Vec<String>,
}

impl Census {
    /// Records with `|field_disc| < x`, for `x` at most the census bound.
    pub fn restricted(&self, x: f64) -> Result<Census> {
        if x > self.x {
            return Err(Error::Config(format!(
                "census covers X = {} but X = {x} was requested",
                self.x
            )));
        }
        let records: Vec<FieldRecord> = self
            .records
            .iter()
            .filter(|r| (r.field_disc.unsigned_abs() as f64) < x)
            .cloned()
            .collect();
        let (n_plus, n_minus) = signed_counts(&records);
        Ok(Census {
            x,
            c: self.c,
            y: height_for(x, self.c)?,
            records,
            n_plus,
            n_minus,
            warnings: Vec::new(),
        })
    }
}

pub(crate) fn signed_counts(records: &[FieldRecord]) -> (u64, u64) {
    let plus = records.iter().filter(|r| r.field_disc > 0).count() as u64;
    (plus, records.len() as u64 - plus)
}

/// Scan height `C X^(1/4)`.
pub fn height_for(x: f64, c: f64) -> Result<HeightBound> {
    if !(x.is_finite() && x >= 1.0) {
        return Err(Error::Config(format!("census bound X = {x} must be at least 1")));
    }
    if !(c.is_finite() && c > 1.0) {
        return Err(Error::Config(format!("completeness constant C = {c} must exceed 1")));
    }
    HeightBound::from_f64(c * x.powf(0.25))
}

/// All cubic fields with `|Disc| < x`, found through generators of height
/// below `c x^(1/4)`.
pub fn census(x: f64, c: f64, exec: &Exec) -> Result<Census> {
    let y = height_for(x, c)?;
    let prefilter = |d: u128, sq: u128| (d as f64) < x * sq as f64;
    let keep = |h: &Hit| (h.field_disc.unsigned_abs() as f64) < x;
    let hits = scan(
        &ScanSpec {
            y,
            prefilter: &prefilter,
            keep: &keep,
            budget: DEFAULT_BOX_BUDGET,
        },
        exec,
    )?;
    let mut groups: BTreeMap<i128, Vec<Hit>> = BTreeMap::new();
    for h in hits {
        groups.entry(h.field_disc).or_default().push(h);
    }
    let groups: Vec<(i128, Vec<Hit>)> = groups.into_iter().collect();
    let per_group = exec.map(&groups, |(d, hs)| classify(*d, hs, y));
    let mut records = Vec::new();
    for g in per_group {
        records.extend(g?);
    }
    records.sort_by_key(|r| r.sort_key());
    let warnings = completeness_warnings(&records, c);
    let (n_plus, n_minus) = signed_counts(&records);
    Ok(Census {
        x,
        c,
        y,
        records,
        n_plus,
        n_minus,
        warnings,
    })
}

// Split one discriminant group into isomorphism classes. Hits arrive in
// lexicographic order; the anchor of each class is its member of least
// index, which keeps the interpolated maps small.
fn classify(disc: i128, hits: &[Hit], y: HeightBound) -> Result<Vec<FieldRecord>> {
    let mut order: Vec<&Hit> = hits.iter().collect();
    order.sort_by_key(|h| (h.index, h.f));
    let mut classes: Vec<(Hit, Vec<Hit>)> = Vec::new();
    for h in order {
        let mut placed = false;
        for (anchor, members) in classes.iter_mut() {
            if iso::isomorphic_same_disc(&anchor.f, anchor.index, &h.f)? {
                members.push(*h);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((*h, vec![*h]));
        }
    }
    Ok(classes
        .into_iter()
        .map(|(_, members)| {
            let rep = members
                .iter()
                .copied()
                .min_by(|a, b| canonical_order(&a.f, &b.f))
                .expect("classes are non-empty");
            let mut rec = FieldRecord {
                field_disc: disc,
                signature: Signature::of_disc(disc),
                canonical_rep: rep.f,
                rep_index: rep.index,
                generator_count: Vec::new(),
            };
            rec.generator_count = vec![(y, members.len() as u64 * rec.automorphisms())];
            rec
        })
        .collect())
}

/// Height first, then `(t, A, B)`.
pub fn canonical_order(f: &MonicCubic, g: &MonicCubic) -> Ordering {
    compare_heights(f, g).then_with(|| f.cmp(g))
}

/// Exact comparison of root heights where it can be certified.
///
/// A strict inequality is accepted only after a rational radius separating
/// the two heights is checked exactly. `x -> -x` preserves the height, so
/// such pairs compare equal. Heights that agree to within the separation
/// resolution are also treated as equal.
pub fn compare_heights(f: &MonicCubic, g: &MonicCubic) -> Ordering {
    if f == g || (f.t() == -g.t() && f.a() == g.a() && f.b() == -g.b()) {
        return Ordering::Equal;
    }
    let (hf, hg) = (f.max_root_modulus(), g.max_root_modulus());
    let (lo, hi, ord) = match hf.partial_cmp(&hg) {
        Some(Ordering::Less) => (f, g, Ordering::Less),
        Some(Ordering::Greater) => (g, f, Ordering::Greater),
        _ => return Ordering::Equal,
    };
    let mid = 0.5 * (hf + hg);
    const SCALE: f64 = (1u64 << 40) as f64;
    let num = (mid * SCALE).round();
    if num < 1.0 || num > i64::MAX as f64 {
        return ord;
    }
    let Ok(r) = HeightBound::new(num as i64, 1 << 40) else {
        return ord;
    };
    if r.admits(lo.t(), lo.a(), lo.b()) && !r.admits(hi.t(), hi.a(), hi.b()) {
        ord
    } else {
        Ordering::Equal
    }
}

fn completeness_warnings(records: &[FieldRecord], c: f64) -> Vec<String> {
    records
        .iter()
        .filter_map(|r| {
            let bound = c * (r.field_disc.unsigned_abs() as f64).powf(0.25) / COMPLETENESS_SAFETY;
            let f = r.canonical_rep;
            if f.max_root_modulus() <= bound * (1.0 + 1e-12) {
                None
            } else {
                Some(format!(
                    "field {} has no generator of height <= {bound:.4}; smallest found is {f} (height {:.4})",
                    r.field_disc,
                    f.max_root_modulus()
                ))
            }
        })
        .collect()
}
