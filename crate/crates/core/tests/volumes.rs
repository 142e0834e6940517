use cubic_core::archimedean::*;
use cubic_core::poly::{enumerate_region, HeightBound, RegionSpec, Sign};
use cubic_core::Exec;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn slice(y: HeightBound) -> RegionSpec {
    RegionSpec::height_only(y).with_traces(&[0])
}

#[test]
fn trace_zero_slice_scales_like_y_to_the_fifth() {
    let unit = region_volume(&slice(HeightBound::integer(1).unwrap())).unwrap().value;
    for (n, d) in [(2, 1), (7, 2), (10, 1), (123, 10)] {
        let y = HeightBound::new(n, d).unwrap();
        let v = region_volume(&slice(y)).unwrap().value;
        assert!(rel(v, unit * y.as_f64().powi(5)) < 1e-6, "y={n}/{d}");
    }
}

#[test]
fn discriminant_window_scales_with_y_to_the_sixth() {
    for (y, x) in [(3i64, 100.0), (5, 4000.0), (8, 1.0e5)] {
        let yb = HeightBound::integer(y).unwrap();
        let big = region_volume(&slice(yb).with_window(0.0, x, Sign::Both)).unwrap().value;
        let unit = region_volume(
            &slice(HeightBound::integer(1).unwrap()).with_window(0.0, x / (y as f64).powi(6), Sign::Both),
        )
        .unwrap()
        .value;
        assert!(rel(big, unit * (y as f64).powi(5)) < 1e-6, "y={y} x={x}");
    }
}

#[test]
fn volumes_are_additive_over_windows() {
    let y = HeightBound::integer(6).unwrap();
    let base = RegionSpec::height_only(y);
    for sign in [Sign::Positive, Sign::Negative, Sign::Both] {
        let whole = region_volume(&base.clone().with_window(0.0, 5e4, sign)).unwrap().value;
        let left = region_volume(&base.clone().with_window(0.0, 1e3, sign)).unwrap().value;
        let right = region_volume(&base.clone().with_window(1e3, 5e4, sign)).unwrap().value;
        assert!(rel(left + right, whole) < 1e-7, "{sign:?} {left} {right} {whole}");
    }
    let pos = region_volume(&base.clone().with_window(0.0, f64::INFINITY, Sign::Positive)).unwrap().value;
    let neg = region_volume(&base.clone().with_window(0.0, f64::INFINITY, Sign::Negative)).unwrap().value;
    let all = region_volume(&base).unwrap().value;
    assert!(rel(pos + neg, all) < 1e-7);
}

#[test]
fn quadrature_and_monte_carlo_agree() {
    let y = HeightBound::new(5, 2).unwrap();
    for r in [
        RegionSpec::height_only(y),
        RegionSpec::height_only(y).with_window(5.0, 300.0, Sign::Negative),
        RegionSpec::height_only(y).with_traces(&[1]).with_window(1.0, 1e3, Sign::Positive),
    ] {
        let q = region_volume(&r).unwrap();
        let mc = region_volume_mc(&r, 400_000, DEFAULT_SEED, &Exec::sequential()).unwrap();
        assert!((q.value - mc.value).abs() <= mc.abs_error, "{r:?}: {} vs {} +- {}", q.value, mc.value, mc.abs_error);
    }
}

#[test]
fn monte_carlo_is_worker_independent() {
    let r = RegionSpec::height_only(HeightBound::integer(2).unwrap());
    let a = region_volume_mc(&r, 300_000, 7, &Exec::sequential()).unwrap();
    let b = region_volume_mc(&r, 300_000, 7, &Exec::parallel(4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lattice_count_tracks_volume() {
    // Integer points in the height region approach its area.
    let y = HeightBound::integer(12).unwrap();
    let r = RegionSpec::height_only(y);
    let count = enumerate_region(&r, None, &Exec::default()).unwrap().len() as f64;
    let vol = region_volume(&r).unwrap().value;
    assert!(rel(count, vol) < 0.02, "{count} vs {vol}");
}

#[test]
fn trace_zero_volume_monte_carlo() {
    let q = trace_zero_volume(SignatureSpec::new(3, 0)).unwrap();
    let mc = trace_zero_volume_mc(SignatureSpec::new(3, 0), 1_000_000, DEFAULT_SEED).unwrap();
    assert!((q.value - 9.0).abs() < 1e-6);
    assert!((mc.value - 9.0).abs() <= mc.abs_error);
    let q = trace_zero_volume(SignatureSpec::new(1, 1)).unwrap();
    let mc = trace_zero_volume_mc(SignatureSpec::new(1, 1), 1_000_000, DEFAULT_SEED).unwrap();
    assert!((q.value - mc.value).abs() <= mc.abs_error);
    assert!(q.value > 0.0);
}
