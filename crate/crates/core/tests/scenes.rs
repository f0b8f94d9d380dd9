use proptest::prelude::*;
use sltk_core::scene::*;
use sltk_core::{EdgeImage, Error, Point};

fn frames(script: &SceneScript) -> Vec<(sltk_core::Frame, GroundTruth)> {
    render(script).unwrap().collect()
}

#[test]
fn static_disk_has_constant_area() {
    let script = SceneScript::new(5, Shape::Disk, 30.0);
    for (frame, truth) in frames(&script) {
        assert_eq!(frame.dims(), (320, 240));
        assert_eq!(truth.area, 2_821);
        assert_eq!(truth.centroid, Some((80.0, 60.0)));
    }
}

#[test]
fn timestamps_follow_fps() {
    let script = SceneScript::new(4, Shape::Disk, 10.0);
    let ts: Vec<u64> = frames(&script)
        .iter()
        .map(|(f, _)| f.timestamp_ms)
        .collect();
    assert_eq!(ts, [0, 33, 66, 100]);
}

#[test]
fn brightness_jump_is_exact() {
    let mut script = SceneScript::new(52, Shape::Disk, 30.0);
    script.background = Background::Uniform([150, 120, 90]);
    script.brightness_jump = Some(BrightnessJump {
        frame: 50,
        offset: 40,
    });
    let all = frames(&script);
    assert_eq!(all[48].0.pixels(), all[49].0.pixels());
    for (a, b) in all[49].0.pixels().iter().zip(all[50].0.pixels()) {
        for c in 0..3 {
            assert_eq!(i32::from(b[c]) - i32::from(a[c]), 40);
        }
    }
    assert_eq!(all[49].1, all[50].1);
}

#[test]
fn occluding_half_the_disk_halves_the_area() {
    let mut script = SceneScript::new(1, Shape::Disk, 30.0);
    script.occlusions.push(Occlusion {
        x0: 80.0,
        y0: 0.0,
        x1: 160.0,
        y1: 120.0,
        color: [90, 140, 60],
    });
    let (frame, truth) = frames(&script).remove(0);
    let ratio = truth.area as f64 / 2_821.0;
    assert!((ratio - 0.5).abs() <= 0.025, "ratio {ratio}");
    assert_eq!(frame.get(200, 120), [90, 140, 60]);
}

#[test]
fn noise_stays_within_amplitude() {
    let mut script = SceneScript::new(3, Shape::Square, 40.0);
    script.noise = 6;
    script.seed = 9;
    let clean = frames(&SceneScript {
        noise: 0,
        ..script.clone()
    });
    let noisy = frames(&script);
    for ((a, _), (b, _)) in clean.iter().zip(&noisy) {
        let mut differs = false;
        for (p, q) in a.pixels().iter().zip(b.pixels()) {
            for c in 0..3 {
                assert!((i32::from(p[c]) - i32::from(q[c])).abs() <= 6);
                differs |= p[c] != q[c];
            }
        }
        assert!(differs);
    }
    assert_ne!(noisy[0].0.pixels(), noisy[1].0.pixels());
}

#[test]
fn motion_blur_mixes_along_the_path() {
    let mut script = SceneScript::new(2, Shape::Square, 20.0)
        .with_keyframes(&[
            Keyframe {
                frame: 0,
                x: 60.0,
                y: 60.0,
                size: 20.0,
            },
            Keyframe {
                frame: 1,
                x: 70.0,
                y: 60.0,
                size: 20.0,
            },
        ])
        .unwrap();
    script.motion_blur = 4;
    let all = frames(&script);
    let (frame, _) = &all[1];
    // fully covered only where every sub-position covers the pixel
    let row = 120;
    let values: Vec<u8> = (100..180).map(|x| frame.get(x, row)[0]).collect();
    assert!(values.iter().any(|&v| v > 20 && v < 230));
    assert!(values.contains(&20));
}

#[test]
fn keyframes_interpolate_and_hold() {
    let (centers, sizes) = expand_keyframes(
        &[
            Keyframe {
                frame: 2,
                x: 10.0,
                y: 20.0,
                size: 5.0,
            },
            Keyframe {
                frame: 6,
                x: 30.0,
                y: 20.0,
                size: 9.0,
            },
        ],
        9,
    )
    .unwrap();
    assert_eq!(centers[0], (10.0, 20.0));
    assert_eq!(centers[4], (20.0, 20.0));
    assert_eq!(sizes[5], 8.0);
    assert_eq!(centers[8], (30.0, 20.0));
    assert!(expand_keyframes(&[], 3).is_err());
}

#[test]
fn path_must_stay_in_bounds() {
    let script = SceneScript::new(3, Shape::Disk, 10.0)
        .with_keyframes(&[
            Keyframe {
                frame: 0,
                x: 80.0,
                y: 60.0,
                size: 10.0,
            },
            Keyframe {
                frame: 2,
                x: 200.0,
                y: 60.0,
                size: 10.0,
            },
        ])
        .unwrap();
    assert_eq!(
        render(&script).err(),
        Some(Error::PathOutOfBounds { frame: 2 })
    );
}

#[test]
fn hand_is_one_piece_with_five_fingers() {
    let mask = shape_mask(160, 120, Shape::Hand, (80.0, 70.0), 1.0);
    let edges = mask_edges(160, 120, &mask);
    let palm = flood_fill_oracle(&edges, Point::new(80, 75)).unwrap();
    for (x, y) in Shape::hand_finger_points() {
        let p = Point::new((80.0 + x).round() as i32, (70.0 + y).round() as i32);
        assert!(mask[p.y as usize * 160 + p.x as usize]);
        assert!(palm.contains(p), "{p:?}");
    }
    // non-convex: the gap between two fingertips is background
    let (a, b) = (
        Shape::hand_finger_points()[1],
        Shape::hand_finger_points()[2],
    );
    let mid = Point::new(
        (80.0 + (a.0 + b.0) / 2.0).round() as i32,
        (70.0 + (a.1 + b.1) / 2.0).round() as i32,
    );
    assert!(!mask[mid.y as usize * 160 + mid.x as usize]);
}

#[test]
fn oracle_examples() {
    let ring = ring_edges(160, 120, (80.0, 60.0), 30.0, 2.0);
    let region = flood_fill_oracle(&ring, Point::new(80, 60)).unwrap();
    let pi = core::f64::consts::PI;
    assert!(
        (pi * 29.0 * 29.0..=pi * 31.0 * 31.0).contains(&(region.area as f64)),
        "{}",
        region.area
    );
    assert_eq!(region.centroid, (80.0, 60.0));

    let boxed = EdgeImage::from_fn(160, 120, |x, y| {
        let border = |v: usize, lo: usize| v == lo || v == lo + 4;
        (border(x, 10) && (10..=14).contains(&y)) || (border(y, 10) && (10..=14).contains(&x))
    })
    .unwrap();
    assert!(flood_fill_oracle(&boxed, Point::new(12, 12)).unwrap().area <= 9);

    let free = EdgeImage::from_fn(160, 120, |_, _| false).unwrap();
    assert_eq!(
        flood_fill_oracle(&free, Point::new(3, 100)).unwrap().area,
        19_200
    );
    assert_eq!(
        flood_fill_oracle(&boxed, Point::new(10, 12)).err(),
        Some(Error::InnerOnEdge { x: 10, y: 12 })
    );
}

#[test]
fn oracle_agrees_with_rendered_truth() {
    for shape in [
        Shape::Disk,
        Shape::Square,
        Shape::Rect { aspect: 2.0 },
        Shape::Hand,
    ] {
        let size = if shape == Shape::Hand { 1.0 } else { 24.0 };
        let mask = shape_mask(160, 120, shape, (80.0, 62.0), size);
        let edges = mask_edges(160, 120, &mask);
        let region = flood_fill_oracle(&edges, Point::new(80, 66)).unwrap();
        let truth = mask.iter().filter(|&&m| m).count();
        let perimeter = mask
            .iter()
            .enumerate()
            .filter(|&(i, &m)| {
                let (x, y) = (i % 160, i / 160);
                m && [(0i32, 1i32), (1, 0), (0, -1), (-1, 0)]
                    .iter()
                    .any(|&(dx, dy)| {
                        let (nx, ny) = (x as i32 + dx, y as i32 + dy);
                        !mask[ny as usize * 160 + nx as usize]
                    })
            })
            .count();
        assert!(
            region.area.abs_diff(truth) <= 2 * perimeter,
            "{shape:?}: {} vs {truth}",
            region.area
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rendering_is_deterministic(seed in any::<u64>(), noise in 0u8..20, r in 5.0f64..40.0, x in 45.0f64..115.0) {
        let mut script = SceneScript::new(3, Shape::Disk, r);
        script.centers = vec![(x, 60.0), (x + 1.5, 60.0), (x + 3.0, 61.0)];
        script.noise = noise;
        script.seed = seed;
        script.background = Background::Checker { cell: 13, a: [200, 40, 40], b: [40, 40, 200] };
        let a = frames(&script);
        let b = frames(&script);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn truth_centroid_is_mask_mean(r in 3.0f64..40.0, x in 0.0f64..160.0, y in 0.0f64..120.0, hand in any::<bool>()) {
        let (shape, size) = if hand { (Shape::Hand, r / 20.0) } else { (Shape::Disk, r) };
        let mut script = SceneScript::new(1, shape, size);
        script.centers = vec![(x, y)];
        let (_, truth) = frames(&script).remove(0);
        let n = truth.mask.iter().filter(|&&m| m).count();
        prop_assert_eq!(truth.area, n);
        if n > 0 {
            let (sx, sy) = truth.mask.iter().enumerate().filter(|(_, &m)| m).fold((0.0, 0.0), |(a, b), (i, _)| (a + (i % 160) as f64, b + (i / 160) as f64));
            let (cx, cy) = truth.centroid.unwrap();
            prop_assert!((cx - sx / n as f64).abs() < 1e-9 && (cy - sy / n as f64).abs() < 1e-9);
        } else {
            prop_assert!(truth.centroid.is_none());
        }
    }

    #[test]
    fn oracle_region_is_edge_free(bits in prop::collection::vec(any::<bool>(), 40 * 30), ix in 0i32..40, iy in 0i32..30) {
        let edges = EdgeImage::from_fn(40, 30, |x, y| bits[y * 40 + x] && (x * 7 + y * 3) % 3 == 0).unwrap();
        let inner = Point::new(ix, iy);
        prop_assume!(!edges.is_edge(inner));
        let region = flood_fill_oracle(&edges, inner).unwrap();
        prop_assert!(region.contains(inner));
        for y in 0..30 {
            for x in 0..40 {
                let p = Point::new(x, y);
                prop_assert!(!(region.contains(p) && edges.is_edge(p)));
            }
        }
        prop_assert_eq!(region.mask.iter().filter(|&&m| m).count(), region.area);
    }
}
