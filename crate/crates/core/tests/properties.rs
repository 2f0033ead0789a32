use num_complex::Complex64;
use proptest::prelude::*;
use soliton_core::formats::{decode_sample, encode_sample, fmt_f64, to_json_string};
use soliton_core::functionals::FunctionalReport;
use soliton_core::grid::{FieldSample, GridSpec};

fn arb_grid() -> impl Strategy<Value = GridSpec> {
    (1usize..=3)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.1f64..50.0, n),
                prop::collection::vec(1usize..=6, n),
            )
        })
        .prop_map(|(extent, halves)| {
            GridSpec::new(extent, halves.into_iter().map(|m| 2 * m).collect()).unwrap()
        })
}

fn arb_sample() -> impl Strategy<Value = FieldSample> {
    (arb_grid(), -1e3f64..1e3).prop_flat_map(|(grid, time)| {
        let len = grid.len();
        let values = prop::collection::vec((any::<f64>(), any::<f64>()), len);
        (Just(grid), Just(time), values.clone(), values).prop_map(|(grid, time, a, b)| {
            let to_complex = |v: Vec<(f64, f64)>| {
                v.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect::<Vec<_>>()
            };
            FieldSample::new(grid, time, to_complex(a), to_complex(b), "sample").unwrap()
        })
    })
}

fn bits(values: &[Complex64]) -> Vec<(u64, u64)> {
    values
        .iter()
        .map(|z| (z.re.to_bits(), z.im.to_bits()))
        .collect()
}

proptest! {
    #[test]
    fn binary_layout_round_trips_bitwise(sample in arb_sample()) {
        let bytes = encode_sample(&sample);
        let back = decode_sample(&bytes).unwrap();
        prop_assert_eq!(&back.grid, &sample.grid);
        prop_assert_eq!(back.time.to_bits(), sample.time.to_bits());
        prop_assert_eq!(bits(&back.psi), bits(&sample.psi));
        prop_assert_eq!(bits(&back.psi_dot), bits(&sample.psi_dot));
    }

    #[test]
    fn truncated_binary_is_rejected(sample in arb_sample(), cut in 1usize..64) {
        let bytes = encode_sample(&sample);
        let cut = cut.min(bytes.len());
        prop_assert!(decode_sample(&bytes[..bytes.len() - cut]).is_err());
    }

    #[test]
    fn float_text_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let text = fmt_f64(x);
        prop_assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits());
        let json = to_json_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<f64>(&json).unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn flat_and_multi_indices_agree(grid in arb_grid()) {
        let strides = grid.strides();
        for index in 0..grid.len() {
            let multi = grid.multi_index(index);
            let flat: usize = multi.iter().zip(&strides).map(|(i, s)| i * s).sum();
            prop_assert_eq!(flat, index);
            let h = grid.spacing();
            for (j, x) in grid.point(index).iter().enumerate() {
                prop_assert!(x.abs() < grid.extent[j]);
                let expected = -grid.extent[j] + (multi[j] as f64 + 0.5) * h[j];
                prop_assert!((x - expected).abs() <= 1e-12 * grid.extent[j]);
            }
        }
    }

    #[test]
    fn stretch_scales_and_inverts(
        n in 1usize..=3,
        i0 in 0.01f64..10.0,
        ik in prop::collection::vec(0.01f64..10.0, 3),
        v0 in -5.0f64..5.0,
        omega in 0.0f64..0.99,
        factor in 0.1f64..10.0,
        axis in 0usize..3,
    ) {
        let axis = axis % n;
        let report = FunctionalReport::from_integrals(i0, ik[..n].to_vec(), v0, omega, 0);
        let s = report.stretched(axis, factor);
        prop_assert!((s.i0 - i0 * factor).abs() <= 1e-12 * s.i0.abs());
        prop_assert!((s.v0 - v0 * factor).abs() <= 1e-12 * s.v0.abs());
        for (j, (got, orig)) in s.i_k.iter().zip(&ik).enumerate() {
            let want = if j == axis { orig / factor } else { orig * factor };
            prop_assert!((got - want).abs() <= 1e-12 * want);
        }
        let back = s.stretched(axis, 1.0 / factor);
        prop_assert!((back.e0 - report.e0).abs() <= 1e-12 * (report.e0.abs() + i0 + v0.abs()));
    }

    #[test]
    fn stretching_an_isotropic_report_along_the_boost_axis_sets_the_defect_sign(
        n in 2usize..=3,
        i in 0.01f64..10.0,
        factor in 0.1f64..10.0,
    ) {
        let report = FunctionalReport::from_integrals(1.0, vec![i; n], 0.5, 0.8, 0);
        let d = report.stretched(0, factor).isotropy_defect;
        let expected = (n - 1) as f64 * i * (1.0 / factor - factor);
        prop_assert!((d - expected).abs() <= 1e-12 * (n as f64) * i * (factor + 1.0 / factor));
    }
}
