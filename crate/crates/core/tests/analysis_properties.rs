use cafewall::analysis::{self, Bucket, ScaleSegments};
use cafewall::experiments::{self, ExperimentConfig};
use cafewall::hough::{LineSegment, PixelPos};
use cafewall::stimulus::{self, StimulusSpec};
use proptest::prelude::*;

fn seg(x1: u32, y1: u32, x2: u32, y2: u32) -> LineSegment {
    LineSegment {
        p1: PixelPos::new(x1, y1),
        p2: PixelPos::new(x2, y2),
        rho_bin: 0,
        theta_bin: 0,
        theta_deg: 0.0,
        rho: 0.0,
        length_px: (x2 as f64 - x1 as f64).hypot(y2 as f64 - y1 as f64),
    }
}

#[test]
fn buckets_tile_the_half_circle() {
    let mut counts = [0usize; 4];
    for k in 0..1800 {
        let a = k as f64 / 10.0;
        let (b, dev) = analysis::bucket_of(a);
        assert!((-22.5..22.5).contains(&dev), "{a} -> {dev}");
        let back = (b.reference_deg() + dev).rem_euclid(180.0);
        assert!((back - a).abs() < 1e-9, "{a} reconstructs as {back}");
        let expected = match k {
            0..225 => Bucket::H,
            225..675 => Bucket::D1,
            675..1125 => Bucket::V,
            1125..1575 => Bucket::D2,
            _ => Bucket::H,
        };
        assert_eq!(b, expected, "angle {a}");
        counts[b as usize] += 1;
    }
    assert_eq!(counts, [450, 450, 450, 450]);
}

#[test]
fn boundaries_are_half_open() {
    assert_eq!(analysis::bucket_of(22.5), (Bucket::D1, -22.5));
    assert_eq!(analysis::bucket_of(67.5), (Bucket::V, -22.5));
    assert_eq!(analysis::bucket_of(112.5), (Bucket::D2, -22.5));
    assert_eq!(analysis::bucket_of(157.5), (Bucket::H, -22.5));
    assert_eq!(analysis::bucket_of(180.0), (Bucket::H, 0.0));
}

proptest! {
    #[test]
    fn mirroring_a_segment_swaps_diagonals_and_negates_deviation(
        x1 in 0u32..500, y1 in 0u32..500, x2 in 0u32..500, y2 in 0u32..500,
    ) {
        prop_assume!((x1, y1) != (x2, y2));
        let w = 500;
        let a = analysis::segment_angle(&seg(x1, y1, x2, y2)).unwrap();
        let m = analysis::segment_angle(&seg(w - 1 - x1, y1, w - 1 - x2, y2)).unwrap();
        let (ba, da) = analysis::bucket_of(a);
        let (bm, dm) = analysis::bucket_of(m);
        prop_assert!((0.0..180.0).contains(&a));
        // exact bucket boundaries are unreachable with integer endpoints except 0 and 90
        prop_assert_eq!(bm, ba.mirrored());
        prop_assert!((dm + da).abs() < 1e-9 || (da == 0.0 && dm == 0.0));
    }

    #[test]
    fn endpoint_order_does_not_matter(x1 in 0u32..300, y1 in 0u32..300, x2 in 0u32..300, y2 in 0u32..300) {
        prop_assume!((x1, y1) != (x2, y2));
        let a = analysis::segment_angle(&seg(x1, y1, x2, y2)).unwrap();
        let b = analysis::segment_angle(&seg(x2, y2, x1, y1)).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn stats_are_consistent(devs in prop::collection::vec(-22.5f64..22.5, 0..60)) {
        let st = analysis::TiltStats::from_deviations(8.0, Bucket::H, devs.clone());
        prop_assert_eq!(st.count, devs.len());
        if devs.is_empty() {
            prop_assert!(st.mean_abs_dev.is_none() && st.std_dev.is_none() && st.std_err.is_none());
        } else {
            let mean = st.mean_abs_dev.unwrap();
            prop_assert!((0.0..=22.5).contains(&mean));
            let se = st.std_err.unwrap();
            prop_assert!((se * (devs.len() as f64).sqrt() - st.std_dev.unwrap()).abs() < 1e-9);
        }
    }
}

/// Flipping the stimulus keeps each bucket's mean tilt (D1 and D2 trade
/// places) up to Hough quantisation, and keeps the same buckets populated.
#[test]
fn stimulus_statistics_are_mirror_covariant() {
    let img = stimulus::generate_cafe_wall(&StimulusSpec::default()).unwrap();
    let cfg = ExperimentConfig { sigmas: Some(vec![4.0, 16.0, 24.0]), ..ExperimentConfig::default() };
    let run = |im: &cafewall::GrayImage| {
        let out = experiments::analyze_image(im, &cfg, false).unwrap();
        let per: Vec<ScaleSegments> =
            out.into_iter().map(|o| ScaleSegments { scale: o.scale, segments: o.segments }).collect();
        analysis::aggregate(&per).unwrap()
    };
    let direct = run(&img);
    let flipped = run(&img.flip_horizontal());
    let mut compared = 0;
    for d in &direct {
        let f = flipped
            .iter()
            .find(|f| f.scale == d.scale && f.bucket == d.bucket.mirrored())
            .unwrap();
        assert_eq!(d.count == 0, f.count == 0, "scale {} bucket {}", d.scale, d.bucket);
        if let (Some(a), Some(b)) = (d.mean_abs_dev, f.mean_abs_dev) {
            assert!((a - b).abs() <= 1.0, "scale {} bucket {}: {a} vs {b}", d.scale, d.bucket);
            compared += 1;
        }
    }
    // H at 4 and 16, V at 16 and 24, both diagonals at 24
    assert!(compared >= 6, "only {compared} populated buckets");
}
