use std::path::PathBuf;

use cubic_core::archimedean::{
    heuristic_constant, region_volume, region_volume_mc, trace_zero_volume, trace_zero_volume_mc, SignatureSpec,
};
use cubic_core::arith::primes_up_to;
use cubic_core::census::cache::census_cached;
use cubic_core::census::census;
use cubic_core::densities::{
    euler_product_residue, local_mass, moment_truncation_bound, nu_prime_power, padic_index_moment, ratio_f64,
    sigma_euler,
};
use cubic_core::index::full_index;
use cubic_core::poly::{enumerate_region, HeightBound, RegionSpec, Sign};
use cubic_core::sieve::{truncated_sieve, SievePlan};
use cubic_core::verify::{run_all, run_check};
use cubic_core::{Error, Exec, Result};
use serde_json::json;

use crate::output::{emit, Report};
use crate::{Cli, Command};

/// Environment variable naming the directory for census caches.
pub const CACHE_DIR_VAR: &str = "CUBIC_CACHE_DIR";

/// Largest prime listed row by row in `masses`.
const MASS_TABLE_PRIMES: u64 = 13;

pub fn run(cli: &Cli) -> Result<u8> {
    let exec = Exec::parallel(cli.common.workers);
    let mut status = 0;
    let report = match &cli.command {
        Command::Enumerate { y, x, index } => enumerate(cli, *y, *x, *index, &exec)?,
        Command::Census { x, c, cache } => census_report(*x, *c, cache.clone(), &exec)?,
        Command::Densities { p_max, level } => densities(*p_max, *level)?,
        Command::Masses { p_max, level } => masses(*p_max, *level)?,
        Command::Constants { p_max, degree } => constants(*p_max, *degree)?,
        Command::Volumes { y, x, samples } => volumes(*y, *x, *samples, cli.common.seed, &exec)?,
        Command::Sieve { x, c, kappa, delta1, delta2, untruncated } => {
            let mut plan = SievePlan::new(*x, *c, *kappa, *delta1, *delta2)?;
            if *untruncated {
                plan = plan.untruncated();
            }
            sieve(&plan, &exec)?
        }
        Command::Verify { quick, only } => {
            let (r, ok) = verify(*quick, only, &exec);
            if !ok {
                status = 1;
            }
            r
        }
    };
    emit(&report.render(cli.common.format), cli.common.out.as_deref())?;
    Ok(status)
}

fn height(y: f64) -> Result<HeightBound> {
    HeightBound::from_f64(y)
}

fn enumerate(cli: &Cli, y: f64, x: Option<f64>, with_index: bool, exec: &Exec) -> Result<Report> {
    let hb = height(y)?;
    let mut region = RegionSpec::height_only(hb);
    if let Some(x) = x {
        region = region.with_window(0.0, x, Sign::Both);
    }
    region.budget = cli.common.budget;
    let polys = enumerate_region(&region, None, exec)?;
    let mut r = Report::new("enumerate")
        .param("y", format!("{}/{}", hb.numer(), hb.denom()))
        .param("x", x.map_or("inf".to_string(), |v| v.to_string()));
    r.columns = vec!["t", "A", "B", "disc"];
    if with_index {
        r.columns.extend(["irreducible", "index", "field_disc"]);
    }
    let rows = exec.map(&polys, |f| -> Result<Vec<String>> {
        let d = f.discriminant()?;
        let mut row = vec![f.t().to_string(), f.a().to_string(), f.b().to_string(), d.to_string()];
        if with_index {
            if d != 0 && f.is_irreducible() {
                let p = full_index(f)?;
                row.extend(["1".into(), p.total.to_string(), p.field_disc.to_string()]);
            } else {
                row.extend(["0".into(), String::new(), String::new()]);
            }
        }
        Ok(row)
    });
    r.rows = rows.into_iter().collect::<Result<_>>()?;
    r.summary = json!({ "count": polys.len() });
    Ok(r)
}

fn cache_path(explicit: Option<PathBuf>, c: f64) -> Option<PathBuf> {
    explicit.or_else(|| {
        std::env::var_os(CACHE_DIR_VAR).map(|dir| PathBuf::from(dir).join(format!("census-C{c}.txt")))
    })
}

fn census_report(x: f64, c: f64, cache: Option<PathBuf>, exec: &Exec) -> Result<Report> {
    let result = match cache_path(cache, c) {
        Some(path) => census_cached(x, c, &path, exec)?,
        None => census(x, c, exec)?,
    };
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let mut r = Report::new("census").param("x", x).param("c_const", c);
    r.columns = vec!["field_disc", "sign", "t", "A", "B", "rep_index"];
    r.rows = result
        .records
        .iter()
        .map(|rec| {
            let f = rec.canonical_rep;
            vec![
                rec.field_disc.to_string(),
                rec.signature.symbol().to_string(),
                f.t().to_string(),
                f.a().to_string(),
                f.b().to_string(),
                rec.rep_index.to_string(),
            ]
        })
        .collect();
    let cyclic = result.records.iter().filter(|r| r.is_cyclic()).count();
    r.summary = json!({
        "n_plus": result.n_plus,
        "n_minus": result.n_minus,
        "cyclic": cyclic,
        "height_bound": result.y.as_f64(),
        "warnings": result.warnings.len(),
    });
    Ok(r)
}

fn densities(p_max: u64, level: u32) -> Result<Report> {
    if level == 0 {
        return Err(Error::Config("level must be at least 1".into()));
    }
    let mut r = Report::new("densities").param("p_max", p_max).param("level", level);
    r.columns = vec!["quantity", "p", "l", "n", "exact", "value"];
    for p in primes_up_to(p_max) {
        for l in 1..=level {
            let v = nu_prime_power(p, l)?;
            r.rows.push(vec![
                "nu".into(),
                p.to_string(),
                l.to_string(),
                p.checked_pow(l).map_or(String::new(), |n| n.to_string()),
                v.to_string(),
                format!("{:.12e}", ratio_f64(&v)),
            ]);
        }
    }
    for n in 1..=12u64 {
        let s = sigma_euler(n, p_max.max(2))?;
        r.rows.push(vec!["sigma".into(), String::new(), String::new(), n.to_string(), String::new(), format!("{s:.12e}")]);
    }
    Ok(r)
}

fn masses(p_max: u64, level: u32) -> Result<Report> {
    let mut r = Report::new("masses").param("p_max", p_max).param("level", level);
    r.columns = vec!["p", "local_mass", "moment", "gap", "truncation_bound"];
    for p in primes_up_to(p_max.min(MASS_TABLE_PRIMES)) {
        let mass = local_mass(3, p);
        let moment = padic_index_moment(p, -1, level)?;
        let gap = ratio_f64(&(&mass - &moment));
        r.rows.push(vec![
            p.to_string(),
            mass.to_string(),
            format!("{:.12}", ratio_f64(&moment)),
            format!("{gap:.6e}"),
            format!("{:.6e}", moment_truncation_bound(p, level)?),
        ]);
    }
    let res = euler_product_residue(3, p_max)?;
    r.summary = json!({ "euler_product": res.value, "euler_product_error_bound": res.error_bound });
    Ok(r)
}

fn constants(p_max: u64, degree: u32) -> Result<Report> {
    if degree < 3 {
        return Err(Error::Config("degree must be at least 3".into()));
    }
    let mut r = Report::new("constants").param("p_max", p_max).param("degree", degree);
    r.columns = vec!["d", "r1", "r2", "constant", "error_bound"];
    for d in 3..=degree {
        for sig in SignatureSpec::all(d) {
            let c = heuristic_constant(d, Some(sig), p_max)?;
            r.rows.push(vec![
                d.to_string(),
                sig.r1.to_string(),
                sig.r2.to_string(),
                format!("{:.10}", c.value),
                format!("{:.2e}", c.error_bound),
            ]);
        }
        let c = heuristic_constant(d, None, p_max)?;
        r.rows.push(vec![d.to_string(), "all".into(), "all".into(), format!("{:.10}", c.value), format!("{:.2e}", c.error_bound)]);
    }
    Ok(r)
}

fn volumes(y: f64, x: Option<f64>, samples: u64, seed: u64, exec: &Exec) -> Result<Report> {
    let hb = height(y)?;
    let mut region = RegionSpec::height_only(hb);
    if let Some(x) = x {
        region = region.with_window(0.0, x, Sign::Both);
    }
    let mut r = Report::new("volumes")
        .param("y", format!("{}/{}", hb.numer(), hb.denom()))
        .param("x", x.map_or("inf".to_string(), |v| v.to_string()))
        .param("samples", samples)
        .param("seed", seed);
    r.columns = vec!["quantity", "method", "value", "abs_error"];
    let mut push = |q: &str, m: &str, v: f64, e: f64| {
        r.rows.push(vec![q.into(), m.into(), format!("{v:.10}"), format!("{e:.3e}")]);
    };
    let q = region_volume(&region)?;
    push("region", "quadrature", q.value, q.abs_error);
    let mc = region_volume_mc(&region, samples, seed, exec)?;
    push("region", "monte_carlo", mc.value, mc.abs_error);
    for sig in SignatureSpec::all(3) {
        let name = format!("trace_zero({},{})", sig.r1, sig.r2);
        let q = trace_zero_volume(sig)?;
        push(&name, "quadrature", q.value, q.abs_error);
        let mc = trace_zero_volume_mc(sig, samples, seed)?;
        push(&name, "monte_carlo", mc.value, mc.abs_error);
    }
    Ok(r)
}

fn sieve(plan: &SievePlan, exec: &Exec) -> Result<Report> {
    let rep = truncated_sieve(plan, exec)?;
    let mut r = Report::new("sieve")
        .param("x", plan.x)
        .param("c_const", plan.c)
        .param("kappa", plan.kappa)
        .param("delta1", plan.delta1)
        .param("delta2", plan.delta2)
        .param("untruncated", plan.untruncated);
    r.columns = vec!["n", "d", "mu", "count", "cumulative"];
    let mut acc = 0i64;
    for t in &rep.terms {
        acc += t.mu as i64 * t.count as i64;
        r.rows.push(vec![t.n.to_string(), t.d.to_string(), t.mu.to_string(), t.count.to_string(), acc.to_string()]);
    }
    r.summary = rep.summary_json();
    Ok(r)
}

fn verify(quick: bool, only: &[u32], exec: &Exec) -> (Report, bool) {
    let results = if only.is_empty() {
        run_all(quick, exec)
    } else {
        only.iter().map(|&id| run_check(id, exec)).collect()
    };
    for res in &results {
        eprintln!("{res}");
    }
    let mut r = Report::new("verify").param("quick", quick);
    r.columns = vec!["id", "name", "status", "detail", "seconds"];
    r.rows = results
        .iter()
        .map(|c| {
            let status = if c.skipped { "skip" } else if c.passed { "pass" } else { "fail" };
            vec![c.id.to_string(), c.name.into(), status.into(), c.detail.clone(), format!("{:.1}", c.seconds)]
        })
        .collect();
    let ok = results.iter().all(|c| c.passed || c.skipped);
    r.summary = json!({ "passed": results.iter().filter(|c| c.passed).count(), "total": results.len() });
    (r, ok)
}
