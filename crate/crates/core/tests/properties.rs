use arpsd::ar::{burg_recursion, levinson_durbin};
use arpsd::io::{format_recording_csv, parse_recording_csv};
use arpsd::preprocess::{biased_autocov, difference, periodogram};
use arpsd::spectral::{band_powers, threshold_psd};
use arpsd::types::{default_bands, default_montage, frequency_grid, Recording, SpectrumEstimate, TimeSeries};
use proptest::prelude::*;

fn signal(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, min..max)
}

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1e4f64, 2..200)
}

fn spec(values: Vec<f64>) -> SpectrumEstimate {
    SpectrumEstimate::new(frequency_grid(values.len()), values, 128.0).unwrap()
}

proptest! {
    #[test]
    fn cumulative_sum_inverts_differencing(x in signal(2, 100)) {
        let ts = TimeSeries::new(x.clone(), 128.0).unwrap();
        let d = difference(&ts, 1).unwrap();
        let mut rebuilt = vec![x[0]];
        for v in d.samples() {
            rebuilt.push(rebuilt.last().unwrap() + v);
        }
        for (a, b) in rebuilt.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn biased_autocovariance_is_bounded_and_positive_definite(x in signal(3, 120), frac in 0.0..1.0f64) {
        let ts = TimeSeries::new(x.clone(), 128.0).unwrap();
        let lag = ((x.len() - 1) as f64 * frac) as usize;
        let r = biased_autocov(&ts, lag).unwrap();
        let r0 = r.values()[0];
        prop_assert!(r.values().iter().all(|v| v.abs() <= r0 * (1.0 + 1e-12)));
        if r0 > 1e-9 && lag >= 1 {
            // a clean Levinson pass certifies positive definiteness
            if let Ok(fit) = levinson_durbin(&r, lag) {
                prop_assert!(fit.reflection_coeffs.iter().all(|k| k.abs() < 1.0));
            }
        }
    }

    #[test]
    fn periodogram_is_nonnegative(x in signal(1, 200), g in 1usize..300) {
        let p = periodogram(&TimeSeries::new(x, 128.0).unwrap(), g).unwrap();
        prop_assert!(p.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn burg_reflections_bounded_and_errors_monotone(x in signal(12, 200), p in 1usize..10) {
        if let Ok(fit) = burg_recursion(&x, p) {
            prop_assert!(fit.reflection_coeffs.iter().all(|k| k.abs() <= 1.0 + 1e-12));
            prop_assert!(fit.prediction_error_by_order.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0]));
        }
    }

    #[test]
    fn mask_survivors_shrink_with_k(v in spectrum(), k1 in -1.0..5.0f64, dk in 0.0..5.0f64) {
        let s = spec(v);
        let a: Vec<usize> = threshold_psd(&s, k1).survivors().collect();
        let b: Vec<usize> = threshold_psd(&s, k1 + dk).survivors().collect();
        prop_assert!(b.iter().all(|i| a.contains(i)));
    }

    #[test]
    fn mask_values_are_base_or_zero(v in spectrum(), k in 0.0..5.0f64) {
        let m = threshold_psd(&spec(v.clone()), k);
        for (i, (mv, bv)) in m.values.iter().zip(&v).enumerate() {
            prop_assert!(*mv == 0.0 || mv == bv);
            prop_assert_eq!(*mv == *bv && *bv >= k * m.mean_power, *bv >= k * m.mean_power, "index {}", i);
        }
        prop_assert!((0.0..=1.0).contains(&m.survivor_fraction));
    }

    #[test]
    fn k_above_peak_ratio_empties_mask(v in spectrum()) {
        let s = spec(v.clone());
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let max = v.iter().cloned().fold(0.0, f64::max);
        prop_assume!(mean > 0.0);
        let m = threshold_psd(&s, max / mean * 1.001 + 1e-9);
        prop_assert!(m.values.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn band_fractions_are_scale_invariant(v in prop::collection::vec(0.0..1e3f64, 65..300), c in 1e-3..1e3f64) {
        let a = band_powers(&spec(v.clone()), &default_bands()).unwrap();
        let b = band_powers(&spec(v.iter().map(|x| x * c).collect()), &default_bands()).unwrap();
        let total: f64 = a.per_band.values().map(|p| p.fraction).sum();
        prop_assert!(total <= 1.0 + 1e-12);
        for (name, pa) in &a.per_band {
            prop_assert!((pa.fraction - b.per_band[name].fraction).abs() < 1e-9);
        }
    }

    #[test]
    fn recording_csv_round_trip(values in prop::collection::vec(prop::collection::vec(-1e6..1e6f64, 18), 1..40)) {
        let montage = default_montage();
        let channels = montage
            .iter()
            .enumerate()
            .map(|(c, n)| (n.clone(), TimeSeries::new(values.iter().map(|row| row[c]).collect(), 128.0).unwrap()))
            .collect();
        let rec = Recording::new(channels).unwrap();
        let back = parse_recording_csv(&format_recording_csv(&rec, &[]), "mem", 1.0).unwrap();
        prop_assert_eq!(back, rec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn levinson_matches_dense_solve(seed in any::<u64>(), p in 1usize..=20) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = p + 30 + rng.random_range(0..100);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r: Vec<f64> = (0..=p).map(|l| x.iter().zip(&x[l..]).map(|(a, b)| a * b).sum::<f64>() / n as f64).collect();
        let fit = levinson_durbin(&arpsd::AutocovarianceSeq::new(r.clone()).unwrap(), p).unwrap();
        let a = fit.model.coeffs();
        // residual of the normal equations, then compare with a dense solve
        for l in 1..=p {
            let lhs: f64 = (1..=p).map(|i| a[i - 1] * r[l.abs_diff(i)]).sum();
            prop_assert!((lhs + r[l]).abs() < 1e-9 * r[0]);
        }
        let mut m: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| r[i.abs_diff(j)]).collect()).collect();
        let mut b: Vec<f64> = r[1..].iter().map(|v| -v).collect();
        for col in 0..p {
            let piv = (col..p).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
            m.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..p {
                let f = m[row][col] / m[col][col];
                let (pivot_rows, rest) = m.split_at_mut(row);
                for (x, y) in rest[0][col..].iter_mut().zip(&pivot_rows[col][col..]) {
                    *x -= f * y;
                }
                b[row] -= f * b[col];
            }
        }
        let mut sol = vec![0.0; p];
        for row in (0..p).rev() {
            let s: f64 = (row + 1..p).map(|c| m[row][c] * sol[c]).sum();
            sol[row] = (b[row] - s) / m[row][row];
        }
        for (x, y) in a.iter().zip(&sol) {
            prop_assert!((x - y).abs() < 1e-10, "{} vs {}", x, y);
        }
        prop_assert!(fit.prediction_error_by_order.windows(2).all(|w| w[1] <= w[0]));
    }
}
