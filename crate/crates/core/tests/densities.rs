use cubic_core::arith::primes_up_to;
use cubic_core::densities::*;
use cubic_core::index::local_index;
use cubic_core::poly::{row_b_range, Cubic, HeightBound};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

// Index exponent of p for the class of (t, a, b) modulo m, via a lift with
// nonzero discriminant.
fn class_exponent(p: u64, t: i64, a: i64, b: i64, m: i64) -> u32 {
    (0..)
        .map(|k| Cubic::new(t, a, b + k * m))
        .find(|f| f.discriminant().unwrap() != 0)
        .map(|f| local_index(&f, p).unwrap())
        .unwrap()
}

fn n_divides_index(n: u64, t: i64, a: i64, b: i64, m: i64) -> bool {
    cubic_core::arith::factor(n as u128)
        .unwrap()
        .into_iter()
        .all(|(p, e)| class_exponent(p, t, a, b, m) >= e)
}

// Fraction of (t, A mod n^2, B mod n^2) whose lifts have n | ind.
fn brute_density(n: u64) -> BigRational {
    let m = (n * n) as i64;
    let mut hits = 0i64;
    for t in -1..=1 {
        for a in 0..m {
            for b in 0..m {
                if n_divides_index(n, t, a, b, m) {
                    hits += 1;
                }
            }
        }
    }
    rat(hits, 3 * m * m)
}

#[test]
fn sigma_p_matches_residue_enumeration() {
    for p in [2u64, 3, 5, 7] {
        assert_eq!(brute_density(p), rat(1, (p * p) as i64), "p={p}");
        assert_eq!(nu_sigma_p(p).unwrap().value, brute_density(p));
    }
}

#[test]
fn prime_powers_match_residue_enumeration() {
    for (p, l) in [(2u64, 2u32), (2, 3), (3, 2), (5, 2)] {
        let n = p.pow(l);
        assert_eq!(
            nu_sigma_n(n, DEFAULT_EXPONENT_CAP).unwrap().value,
            brute_density(n),
            "n={n}"
        );
    }
}

#[test]
fn joint_enumeration_confirms_multiplicativity() {
    for (m, n) in [(2u64, 3u64), (4, 3), (2, 9)] {
        let joint = brute_density(m * n);
        let prod = nu_sigma_n(m, 6).unwrap().value * nu_sigma_n(n, 6).unwrap().value;
        assert_eq!(joint, prod, "({m},{n})");
        assert_eq!(nu_sigma_n(m * n, 6).unwrap().value, joint);
    }
    assert_eq!(nu_sigma_n(6, 6).unwrap().value, rat(1, 36));
}

// The number of bad B mod n^2 depends only on (t, A mod n).
#[test]
fn bad_counts_depend_on_a_mod_n() {
    for n in [4u64, 6, 9] {
        let m = (n * n) as i64;
        for t in -1..=1 {
            let counts: Vec<usize> = (0..m)
                .map(|a| (0..m).filter(|&b| n_divides_index(n, t, a, b, m)).count())
                .collect();
            for a in 0..m as usize {
                assert_eq!(counts[a], counts[a % n as usize], "n={n} t={t} a={a}");
            }
        }
    }
}

#[test]
fn higher_levels_respect_the_shape_bound() {
    // nu(Sigma_{p^l}) for l >= 3 is dominated by the p^-5 coset of rescaled roots.
    for p in [2u64, 3, 5] {
        let nu3 = nu_prime_power(p, 3).unwrap().to_f64().unwrap();
        let p5 = (p as f64).powi(5);
        assert!(nu3 * p5 < 8.0, "p={p} nu3={nu3}");
        for l in 1..5 {
            assert!(nu_prime_power(p, l + 1).unwrap() <= nu_prime_power(p, l).unwrap());
        }
    }
}

#[test]
fn sigma_one_euler_product() {
    let expect: f64 = primes_up_to(100)
        .iter()
        .map(|&p| 1.0 - 1.0 / (p * p) as f64)
        .product();
    let got = sigma_euler(1, 100).unwrap();
    assert!((got - expect).abs() < 1e-12);
    assert!((got - 0.609_03).abs() < 1e-5);
    let limit = sigma_euler(1, 20_000).unwrap();
    assert!((limit - 6.0 / std::f64::consts::PI.powi(2)).abs() < 1e-4);
}

#[test]
fn truncated_mobius_sum_tracks_euler_product() {
    for n in [1u64, 2, 3, 4, 6] {
        let est = sigma_exact(n, 60).unwrap();
        let euler = sigma_euler(n, 2000).unwrap();
        let v = est.value.to_f64().unwrap();
        assert!(
            (v - euler).abs() <= est.tail_bound + 1e-3,
            "n={n}: {v} vs {euler}"
        );
        assert!(v >= -est.tail_bound);
    }
    let partial: f64 = (1..=30u64).map(|n| sigma_euler(n, 500).unwrap()).sum();
    assert!(partial <= 1.0 + 1e-9);
}

#[test]
fn sigma_two_matches_enumerated_frequency() {
    // Exact-index frequencies among polynomials in a height box.
    let y = HeightBound::integer(9).unwrap();
    let (mut total, mut two) = (0u64, 0u64);
    for t in -1..=1 {
        for a in -82..=82 {
            let Some((lo, hi)) = row_b_range(&y, t, a) else {
                continue;
            };
            for b in lo..=hi {
                let f = Cubic::new(t, a, b);
                if f.discriminant().unwrap() == 0 {
                    continue;
                }
                total += 1;
                let ind: u64 = [2u64, 3, 5, 7, 11, 13]
                    .iter()
                    .map(|&p| p.pow(local_index(&f, p).unwrap()))
                    .product();
                if ind == 2 {
                    two += 1;
                }
            }
        }
    }
    let freq = two as f64 / total as f64;
    let euler = sigma_euler(2, 2000).unwrap();
    assert!((freq - euler).abs() / euler < 0.08, "{freq} vs {euler}");
}

#[test]
fn empirical_frequency_of_p_dividing_index_at_height_40() {
    // Per row, count B in [lo, hi] whose class mod p^2 is bad.
    let y = HeightBound::integer(40).unwrap();
    for p in [2u64, 3, 5] {
        let m = (p * p) as i64;
        let (mut total, mut bad) = (0i128, 0i128);
        for t in -1..=1 {
            for a in -1601..=1601 {
                let Some((lo, hi)) = row_b_range(&y, t, a) else {
                    continue;
                };
                let bad_res: Vec<i64> = (0..m)
                    .filter(|&b| class_exponent(p, t, a, b, m) >= 1)
                    .collect();
                let len = (hi - lo + 1) as i128;
                total += len;
                for r in bad_res {
                    // B in [lo, hi] with B = r mod m
                    let first = lo + (r - lo).rem_euclid(m);
                    if first <= hi {
                        bad += ((hi - first) / m + 1) as i128;
                    }
                }
            }
        }
        let freq = bad as f64 / total as f64;
        let nu = 1.0 / (p * p) as f64;
        assert!((freq - nu).abs() / nu < 0.05, "p={p}: {freq}");
    }
}

#[test]
fn padic_moment_against_local_mass() {
    for p in [2u64, 3, 5, 7] {
        for level in [3u32, 4] {
            let gap = (local_mass(3, p) - padic_index_moment(p, -1, level).unwrap())
                .to_f64()
                .unwrap();
            let bound = moment_truncation_bound(p, level).unwrap();
            assert!(
                gap >= 0.0 && gap <= bound * (1.0 + 1e-9),
                "p={p} level={level} gap={gap} bound={bound}"
            );
            // The geometric tail is exact, not merely an upper bound.
            assert!(
                (bound - gap).abs() < 2e-3 * bound.max(1e-3),
                "p={p} level={level} gap={gap} bound={bound}"
            );
        }
        let mut prev = BigRational::one();
        for level in 1..=5 {
            let v = padic_index_moment(p, -1, level).unwrap();
            assert!(v >= prev);
            assert!(v <= local_mass(3, p), "p={p} level={level} v={v}");
            prev = v;
        }
    }
}

#[test]
fn residue_is_monotone_in_cutoff() {
    let mut prev = f64::INFINITY;
    for pm in [2u64, 3, 10, 100, 1000] {
        let v = euler_product_residue(3, pm).unwrap().value;
        assert!(v < prev);
        prev = v;
    }
}
