use cubic_core::arith::{divisors, mobius};
use cubic_core::census::{census, DEFAULT_C};
use cubic_core::exec::Exec;
use cubic_core::index::full_index;
use cubic_core::poly::{enumerate_region, HeightBound, RegionSpec};
use cubic_core::sieve::diagnostics::*;
use cubic_core::sieve::*;
use cubic_core::Error;

fn hb(y: f64) -> HeightBound {
    HeightBound::from_f64(y).unwrap()
}

#[test]
fn pair_count_identity_at_1000() {
    let c = census(2000.0, DEFAULT_C, &Exec::parallel(0)).unwrap();
    let y = HeightBound::integer(12).unwrap();
    let seq = pair_count_two_ways(&c, 1000.0, y, 2.0, &Exec::sequential()).unwrap();
    let par = pair_count_two_ways(&c, 1000.0, y, 2.0, &Exec::parallel(4)).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.lhs, seq.rhs);
    assert!(seq.rhs > 0 && seq.fields > 0);
    assert_eq!(seq.lhs, 7138);
}

#[test]
fn pair_count_refuses_windows_beyond_the_census() {
    let c = census(1000.0, DEFAULT_C, &Exec::sequential()).unwrap();
    let y = HeightBound::integer(12).unwrap();
    assert!(matches!(
        pair_count_two_ways(&c, 1000.0, y, 2.0, &Exec::sequential()),
        Err(Error::Config(_))
    ));
}

#[test]
fn pair_count_identity_on_small_windows() {
    let c = census(800.0, DEFAULT_C, &Exec::parallel(0)).unwrap();
    for (x, delta, y) in [(50.0, 4.0, 8.0), (100.0, 2.0, 15.0), (300.0, 2.5, 9.0)] {
        let r = pair_count_two_ways(&c, x, hb(y), delta, &Exec::parallel(0)).unwrap();
        assert_eq!(r.lhs, r.rhs, "X={x} delta={delta} Y={y}");
    }
}

#[test]
fn shrinking_the_cutoff_grows_the_residual() {
    let base = SievePlan::with_defaults(1e4, DEFAULT_C).unwrap();
    let halved = SievePlan { delta1: base.delta1 / 2.0, ..base };
    let a = truncated_sieve(&base, &Exec::parallel(0)).unwrap();
    let b = truncated_sieve(&halved, &Exec::parallel(0)).unwrap();
    assert_eq!(a.exact, b.exact);
    assert!(a.residual / 1e4 < b.residual / 1e4, "{} vs {}", a.residual, b.residual);
}

// Möbius inversion over d | D on a finite sample of indices.
#[test]
fn mobius_consistency() {
    let y = HeightBound::integer(9).unwrap();
    let sample: Vec<u128> = scan_field_window(0.0, 3000.0, y, &Exec::parallel(0))
        .unwrap()
        .iter()
        .map(|h| h.index)
        .collect();
    for big_d in [2u64, 6, 30] {
        for n in [1u128, 2, 3, 4] {
            let lhs: i64 = divisors(big_d)
                .into_iter()
                .map(|d| {
                    let m = d as u128 * n;
                    mobius(d) as i64 * sample.iter().filter(|&&i| i % m == 0).count() as i64
                })
                .sum();
            let rhs = sample
                .iter()
                .filter(|&&i| i % n == 0 && num_integer::gcd(i / n, big_d as u128) == 1)
                .count() as i64;
            assert_eq!(lhs, rhs, "D={big_d} n={n}");
        }
    }
}

#[test]
fn reducible_examples() {
    let one = reducible_diagnostic(1, &HeightBound::integer(1).unwrap()).unwrap();
    assert_eq!(one.count, 1);
    let y = HeightBound::integer(10).unwrap();
    let got = reducible_diagnostic(5, &y).unwrap();
    let brute = enumerate_region(&RegionSpec::height_only(y), None, &Exec::parallel(0))
        .unwrap()
        .into_iter()
        .filter(|f| !f.is_irreducible())
        .filter(|f| {
            let c = f.cubic();
            (0..25i128).any(|r| c.eval(r) % 25 == 0 && c.eval_derivative(r) % 5 == 0)
        })
        .count() as u64;
    assert_eq!(got.count, brute);
    assert_eq!(reducible_diagnostic(4, &y).unwrap_err(), Error::Config("n = 4 must be squarefree".into()));
}

#[test]
fn reducible_counts_grow_and_respect_the_bound() {
    for n in [1u64, 2, 3, 5, 6, 30] {
        let mut prev = 0;
        for y in [1i64, 3, 6, 10, 16] {
            let r = reducible_diagnostic(n, &HeightBound::integer(y).unwrap()).unwrap();
            assert!(r.count >= prev);
            assert!((r.count as f64) <= r.bound, "n={n} Y={y}: {} > {}", r.count, r.bound);
            prev = r.count;
        }
    }
}

#[test]
fn mha_ratio_near_one() {
    let x: f64 = 1000.0;
    let y = hb(DEFAULT_C * x.powf(0.27));
    let r = mha_ratio(1, x, 4.0, y, &Exec::parallel(0)).unwrap();
    assert!((0.9..=1.1).contains(&r.ratio), "{r:?}");
}

#[test]
fn mha_gap_shrinks_by_ten_thousand() {
    let gap = |x: f64| {
        let y = hb(DEFAULT_C * x.powf(0.27));
        (mha_ratio(1, x, 4.0, y, &Exec::parallel(0)).unwrap().ratio - 1.0).abs()
    };
    let (g2, g3, g4) = (gap(1e2), gap(1e3), gap(1e4));
    assert!(g4 < g3 && g4 < g2, "{g2} {g3} {g4}");
}

#[test]
fn mha_ratio_rejects_empty_windows() {
    // No cubic of height below 2 has |Disc| anywhere near 10^6.
    let r = mha_ratio(1, 1e6, 2.0, HeightBound::integer(2).unwrap(), &Exec::sequential());
    assert!(matches!(r, Err(Error::Config(_))));
}

#[test]
fn tail_mass_matches_recount() {
    let x: f64 = 1000.0;
    let y = hb(DEFAULT_C * x.powf(0.27));
    let mut prev = u64::MAX;
    for d1 in [0.05, 0.1, 0.2, 0.4] {
        let t = tail_mass(x, d1, y, &Exec::parallel(0)).unwrap();
        assert!(t.count <= prev);
        prev = t.count;
    }
    let t = tail_mass(x, 0.05, y, &Exec::parallel(0)).unwrap();
    let brute = enumerate_region(&RegionSpec::height_only(y), None, &Exec::parallel(0))
        .unwrap()
        .into_iter()
        .filter(|f| {
            let d = f.discriminant().unwrap();
            // ind^2 | Disc, so small discriminants cannot reach the threshold.
            d != 0 && (d.unsigned_abs() as f64) > t.threshold * t.threshold && f.is_irreducible()
        })
        .filter(|f| full_index(f).unwrap().total as f64 > t.threshold)
        .count() as u64;
    assert_eq!(t.count, brute);
    assert!(t.count > 0);
    // ind^2 <= |Disc| < (2Y)^6, so nothing survives a threshold of (2Y)^3.
    let big = (2.0 * y.as_f64()).powi(3).ln() / x.ln() - 0.25;
    assert_eq!(tail_mass(x, big, y, &Exec::parallel(0)).unwrap().count, 0);
}
