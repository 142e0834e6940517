use cubic_core::arith::valuation;
use cubic_core::index::{full_index, index_divisible_p, local_index, maximal_order_oracle};
use cubic_core::poly::{Cubic, MonicCubic};
use num_bigint::BigInt;
use proptest::prelude::*;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

#[test]
fn witness_engine_matches_round2_oracle_exhaustively() {
    let mut checked = 0;
    for t in -1..=1 {
        for a in -50..=50 {
            for b in -50..=50 {
                let f = MonicCubic::new(t, a, b).unwrap();
                let d = f.discriminant().unwrap();
                if d == 0 || !f.is_irreducible() {
                    continue;
                }
                let o = maximal_order_oracle(&f.cubic()).unwrap();
                for p in PRIMES {
                    let expect = (valuation(d, p) - valuation(o.disc, p)) / 2;
                    let got = local_index(&f.cubic(), p).unwrap();
                    assert_eq!(got, expect, "{f} at {p}");
                    assert_eq!(index_divisible_p(&f, p).unwrap(), got >= 1, "{f} at {p}");
                }
                let prof = full_index(&f).unwrap();
                assert_eq!(prof.field_disc, o.disc, "{f}");
                assert_eq!(BigInt::from(prof.total), o.index_over_monogenic());
                assert!(matches!(prof.field_disc.rem_euclid(4), 0 | 1), "{f}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 28_902);
}

// Index-4 elements need not come from a residue witness at level two: the
// divided-root branch can fire first.
#[test]
fn level_two_can_come_from_a_divided_root() {
    let f = Cubic::new(0, -4, -8);
    assert_eq!(local_index(&f, 2).unwrap(), 3);
    let level_two_witness =
        (0..4i128).any(|r| f.eval(r) % 16 == 0 && f.eval_derivative(r) % 4 == 0);
    assert!(!level_two_witness);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn translation_invariance(t in -1i64..=1, a in -200i64..200, b in -2000i64..2000, c in -6i64..=6) {
        let f = Cubic::new(t, a, b);
        prop_assume!(f.discriminant().unwrap() != 0);
        let g = f.shifted(c).unwrap();
        for p in PRIMES {
            prop_assert_eq!(local_index(&f, p).unwrap(), local_index(&g, p).unwrap());
        }
    }

    #[test]
    fn oracle_agrees_on_larger_coefficients(t in -1i64..=1, a in -3000i64..3000, b in -30000i64..30000) {
        let f = Cubic::new(t, a, b);
        prop_assume!(f.discriminant().unwrap() != 0 && f.is_irreducible());
        let o = maximal_order_oracle(&f).unwrap();
        let prof = cubic_core::index::full_index_general(&f).unwrap();
        prop_assert_eq!(prof.field_disc, o.disc);
    }

    // Rescaling a root by m multiplies the index by m^3.
    #[test]
    fn scaled_roots(a in -30i64..30, b in -30i64..30, m in 2i64..6) {
        let f = Cubic::new(0, a, b);
        prop_assume!(f.discriminant().unwrap() != 0 && f.is_irreducible());
        let g = Cubic::new(0, a * m * m, b * m * m * m);
        let pf = cubic_core::index::full_index_general(&f).unwrap();
        let pg = cubic_core::index::full_index_general(&g).unwrap();
        prop_assert_eq!(pf.field_disc, pg.field_disc);
        prop_assert_eq!(pg.total, pf.total * (m as u128).pow(3));
    }
}
