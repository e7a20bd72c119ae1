use cqiqa::stats::{boxplot_summary, krocc, ks_two_sample, mann_whitney_u, srocc};
use proptest::prelude::*;

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..30).prop_flat_map(|n| {
        (
            proptest::collection::vec(0i32..12, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
            proptest::collection::vec(0i32..12, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
        )
    })
}

fn not_constant(v: &[f64]) -> bool {
    v.iter().any(|x| *x != v[0])
}

proptest! {
    #[test]
    fn joint_permutation_leaves_coefficients_unchanged(
        (x, y) in pair(),
        seed in any::<u64>(),
    ) {
        prop_assume!(not_constant(&x) && not_constant(&y));
        let mut idx: Vec<usize> = (0..x.len()).collect();
        // deterministic shuffle from the seed
        let mut s = seed;
        for i in (1..idx.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let px: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
        let py: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        prop_assert_eq!(srocc(&x, &y).unwrap().to_bits(), srocc(&px, &py).unwrap().to_bits());
        prop_assert_eq!(krocc(&x, &y).unwrap().to_bits(), krocc(&px, &py).unwrap().to_bits());
    }

    #[test]
    fn strictly_increasing_transform_is_invisible((x, y) in pair()) {
        prop_assume!(not_constant(&x) && not_constant(&y));
        let r = srocc(&x, &y).unwrap();
        for h in [f64::exp as fn(f64) -> f64, |v: f64| v * v * v] {
            let hy: Vec<f64> = y.iter().map(|&v| h(v)).collect();
            prop_assert_eq!(srocc(&x, &hy).unwrap(), r);
            prop_assert_eq!(krocc(&x, &hy).unwrap(), krocc(&x, &y).unwrap());
        }
    }

    #[test]
    fn monotone_relation_gives_matching_signs(x in proptest::collection::vec(-50.0f64..50.0, 3..25), up in any::<bool>()) {
        prop_assume!(not_constant(&x));
        let y: Vec<f64> = x.iter().map(|v| if up { v.powi(3) + 1.0 } else { -2.0 * v }).collect();
        let (s, k) = (srocc(&x, &y).unwrap(), krocc(&x, &y).unwrap());
        prop_assert_eq!(s.signum(), k.signum());
        prop_assert!((-1.0..=1.0).contains(&s) && (-1.0..=1.0).contains(&k));
    }

    #[test]
    fn ks_against_itself(a in proptest::collection::vec(-5.0f64..5.0, 5..40)) {
        let r = ks_two_sample(&a, &a).unwrap();
        prop_assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
    }

    #[test]
    fn mann_whitney_swaps_to_complement(
        a in proptest::collection::vec(0i32..8, 5..15),
        b in proptest::collection::vec(0i32..8, 5..15),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let (ab, ba) = (mann_whitney_u(&a, &b).unwrap(), mann_whitney_u(&b, &a).unwrap());
        prop_assert!((ab.statistic + ba.statistic - (a.len() * b.len()) as f64).abs() < 1e-9);
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
    }

    #[test]
    fn boxplot_shape(v in proptest::collection::vec(-100.0f64..100.0, 4..60)) {
        let b = boxplot_summary(&v).unwrap();
        prop_assert!(b.q1 <= b.median && b.median <= b.q3);
        prop_assert!((b.iqr - (b.q3 - b.q1)).abs() < 1e-12);
        prop_assert!(b.lower_whisker >= b.q1 - 1.5 * b.iqr - 1e-9);
        prop_assert!(b.upper_whisker <= b.q3 + 1.5 * b.iqr + 1e-9);
        for o in &b.outliers {
            prop_assert!(*o < b.lower_whisker || *o > b.upper_whisker);
        }
        let inside = v.iter().filter(|x| **x >= b.lower_whisker && **x <= b.upper_whisker).count();
        prop_assert_eq!(inside + b.outliers.len(), v.len());
    }
}

#[test]
fn undefined_inputs_are_errors() {
    assert!(srocc(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    assert!(krocc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    assert!(srocc(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    assert!(srocc(&[1.0, f64::NAN, 3.0], &[1.0, 2.0, 3.0]).is_err());
}

#[test]
fn two_sample_tests_need_five_per_side() {
    let five = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert!(ks_two_sample(&five, &five[..4]).is_err());
    assert!(mann_whitney_u(&five[..4], &five).is_err());
}
