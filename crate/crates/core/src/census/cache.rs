//! Persistent census files.
//!
//! ```text
//! cubic-census v1 X=10000 C=2
//! -23 - 0 -1 -1 1
//! ...
//! ```
//!
//! One record per line, `field_disc sign t A B rep_index`, ordered by
//! `(|field_disc|, sign)`. Files are written to a temporary name and renamed,
//! so an interrupted write leaves no cache behind.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{census, height_for, signed_counts, Census, FieldRecord, Signature};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::index::full_index;
use crate::poly::MonicCubic;

pub const HEADER_PREFIX: &str = "cubic-census v1";

pub fn render(c: &Census) -> String {
    let mut s = format!("{HEADER_PREFIX} X={} C={}\n", c.x, c.c);
    for r in &c.records {
        let f = r.canonical_rep;
        s.push_str(&format!(
            "{} {} {} {} {} {}\n",
            r.field_disc,
            r.signature.symbol(),
            f.t(),
            f.a(),
            f.b(),
            r.rep_index
        ));
    }
    s
}

/// CSV with the cache columns plus the known generator counts.
pub fn render_csv(c: &Census) -> String {
    let mut s = String::from("field_disc,sign,t,A,B,rep_index,Y,generator_count\n");
    for r in &c.records {
        let f = r.canonical_rep;
        let (y, n) = match r.generator_count.last() {
            Some((y, n)) => (format!("{}", y.as_f64()), n.to_string()),
            None => (String::new(), String::new()),
        };
        s.push_str(&format!(
            "{},{},{},{},{},{},{y},{n}\n",
            r.field_disc,
            r.signature.symbol(),
            f.t(),
            f.a(),
            f.b(),
            r.rep_index
        ));
    }
    s
}

pub fn save_census(c: &Census, path: &Path) -> Result<()> {
    write_atomic(path, render(c).as_bytes())
}

/// Write `bytes` to `path` through a sibling temporary file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_census(path: &Path) -> Result<Census> {
    parse(&fs::read_to_string(path)?)
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Cache(format!("line {line}: {msg}"))
}

pub fn parse(text: &str) -> Result<Census> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let rest = header
        .strip_prefix(HEADER_PREFIX)
        .ok_or_else(|| bad(1, format!("expected header `{HEADER_PREFIX} X=.. C=..`")))?;
    let fields: Vec<&str> = rest.split_whitespace().collect();
    let value = |i: usize, key: &str| -> Result<f64> {
        fields
            .get(i)
            .and_then(|s| s.strip_prefix(key))
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| bad(1, format!("missing or malformed {key}")))
    };
    if fields.len() != 2 {
        return Err(bad(1, "header must carry exactly X= and C="));
    }
    let (x, c) = (value(0, "X=")?, value(1, "C=")?);
    let y = height_for(x, c).map_err(|e| bad(1, e))?;
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 6 {
            return Err(bad(n, "expected `field_disc sign t A B rep_index`"));
        }
        let int = |s: &str| s.parse::<i64>().map_err(|_| bad(n, format!("bad integer `{s}`")));
        let field_disc: i128 = parts[0].parse().map_err(|_| bad(n, "bad field_disc"))?;
        let rep_index: u128 = parts[5].parse().map_err(|_| bad(n, "bad rep_index"))?;
        let f = MonicCubic::new(int(parts[2])?, int(parts[3])?, int(parts[4])?).map_err(|e| bad(n, e))?;
        let signature = Signature::of_disc(field_disc);
        if parts[1] != signature.symbol().to_string() {
            return Err(bad(n, "sign does not match field_disc"));
        }
        let prof = full_index(&f).map_err(|e| bad(n, e))?;
        if prof.field_disc != field_disc || prof.total != rep_index {
            return Err(bad(n, format!("{f} does not have field_disc {field_disc} and index {rep_index}")));
        }
        if (field_disc.unsigned_abs() as f64) >= x {
            return Err(bad(n, "record beyond the census bound"));
        }
        records.push(FieldRecord {
            field_disc,
            signature,
            canonical_rep: f,
            rep_index,
            generator_count: Vec::new(),
        });
    }
    if !records.windows(2).all(|w| w[0].sort_key() < w[1].sort_key()) {
        return Err(Error::Cache("records are not in (|field_disc|, sign) order".into()));
    }
    let (n_plus, n_minus) = signed_counts(&records);
    Ok(Census {
        x,
        c,
        y,
        records,
        n_plus,
        n_minus,
        warnings: Vec::new(),
    })
}

/// Census up to `x`, served from the cache at `path` when it already covers
/// `x` with the same `c`, and otherwise computed and written back.
pub fn census_cached(x: f64, c: f64, path: &Path, exec: &Exec) -> Result<Census> {
    if path.exists() {
        let cached = load_census(path)?;
        if cached.c == c && cached.x >= x {
            return cached.restricted(x);
        }
    }
    let fresh = census(x, c, exec)?;
    save_census(&fresh, path)?;
    Ok(fresh)
}
