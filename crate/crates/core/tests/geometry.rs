use cpn_core::Point2;

/// Twice the signed area of triangle `abc`; positive when counterclockwise.
fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

mod hull {
    use super::orient;
    use cpn_core::geometry::*;
    use cpn_core::*;
    use core::f64::consts::{FRAC_PI_4, SQRT_2, TAU};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(c: &[(f64, f64)]) -> Vec<Point2> {
        c.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    #[test]
    fn hull_drops_interior_point() {
        let p = pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0), (1.0, 1.0)]);
        let h = convex_hull(&p).unwrap();
        assert_eq!(h.len(), 4);
        assert!(!h.vertices().contains(&Point2::new(1.0, 1.0)));
        let h4 = convex_hull(&p[..4]).unwrap();
        let mut got: Vec<_> = h4.vertices().to_vec();
        got.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let mut want = p[..4].to_vec();
        want.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        assert_eq!(got, want);
    }

    #[test]
    fn hull_rejects_collinear() {
        let p = pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]);
        assert!(matches!(convex_hull(&p), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn hull_contains_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p: Vec<Point2> = (0..500)
            .map(|_| Point2::new(rng.gen_range(-100.0..100.0), rng.gen_range(-50.0..50.0)))
            .collect();
        let h = convex_hull(&p).unwrap();
        for q in &p {
            for (a, b) in h.edges() {
                let len = a.distance(b);
                assert!(orient(a, b, *q) / len >= -1e-9);
            }
        }
        for v in h.vertices() {
            assert!(p.contains(v));
        }
    }

    #[test]
    fn axis_aligned_rect_is_its_own_enclosure() {
        let p = Polygon::from_coords(&[(0.0, 0.0), (4.0, 0.0), (4.0, 2.0), (0.0, 2.0)]).unwrap();
        let r = min_area_rect(&p).unwrap();
        assert_eq!(r, RotatedRect { cx: 2.0, cy: 1.0, w: 4.0, h: 2.0, theta: 0.0 });
    }

    #[test]
    fn diamond_gives_quarter_turn_square() {
        let p = Polygon::from_coords(&[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]).unwrap();
        let r = min_area_rect(&p).unwrap();
        assert!((r.w - SQRT_2).abs() < 1e-12 && (r.h - SQRT_2).abs() < 1e-12);
        assert!((r.area() - 2.0).abs() < 1e-12);
        assert!((r.theta - FRAC_PI_4).abs() < 1e-12);
        assert!(r.cx.abs() < 1e-12 && r.cy.abs() < 1e-12);
    }

    fn sweep_oracle(points: &[Point2], steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        for k in 0..steps {
            let t = core::f64::consts::PI * k as f64 / steps as f64;
            let (s, c) = (libm::sin(t), libm::cos(t));
            let (mut a0, mut a1, mut b0, mut b1) =
                (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for p in points {
                let u = p.x * c + p.y * s;
                let v = -p.x * s + p.y * c;
                a0 = a0.min(u);
                a1 = a1.max(u);
                b0 = b0.min(v);
                b1 = b1.max(v);
            }
            best = best.min((a1 - a0) * (b1 - b0));
        }
        best
    }

    #[test]
    fn random_hulls_beat_orientation_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let n = rng.gen_range(3..40);
            let p: Vec<Point2> = (0..n)
                .map(|_| Point2::new(rng.gen_range(0.0..60.0), rng.gen_range(0.0..30.0)))
                .collect();
            let Ok(h) = convex_hull(&p) else { continue };
            let r = min_area_rect(&h).unwrap();
            let oracle = sweep_oracle(h.vertices(), 3600);
            assert!(r.area() <= oracle * (1.0 + 1e-6));
            for q in &p {
                assert!(r.contains(*q, 1e-6));
            }
        }
    }

    #[test]
    fn area_invariant_under_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let p: Vec<Point2> = (0..12)
                .map(|_| Point2::new(rng.gen_range(-20.0..20.0), rng.gen_range(-8.0..8.0)))
                .collect();
            let a = min_area_rect_of_points(&p).unwrap().area();
            let t = rng.gen_range(0.0..TAU);
            let (s, c) = (libm::sin(t), libm::cos(t));
            let q: Vec<Point2> = p.iter().map(|p| Point2::new(p.x * c - p.y * s, p.x * s + p.y * c)).collect();
            let b = min_area_rect_of_points(&q).unwrap().area();
            assert!((a - b).abs() <= 1e-6 * a);
        }
    }
}

mod iou {
    use cpn_core::geometry::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn trivial_cases() {
        let a = RotatedRect::new(0.0, 0.0, 2.0, 1.0, 0.4);
        assert_eq!(rotated_iou(&a, &a), 1.0);
        let far = a.translated(100.0, 0.0);
        assert_eq!(rotated_iou(&a, &far), 0.0);
        let u = RotatedRect::axis_aligned(0.5, 0.5, 1.0, 1.0);
        let half = RotatedRect::axis_aligned(1.0, 0.5, 1.0, 1.0);
        assert!((rotated_iou(&u, &half) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn contained_box() {
        let big = RotatedRect::new(0.0, 0.0, 10.0, 10.0, 0.3);
        let small = RotatedRect::new(0.5, -0.5, 2.0, 1.0, -0.7);
        assert!((rotated_iou(&big, &small) - 2.0 / 100.0).abs() < 1e-12);
    }

    #[test]
    fn touching_edges_have_zero_overlap() {
        let a = RotatedRect::axis_aligned(0.5, 0.5, 1.0, 1.0);
        let b = RotatedRect::axis_aligned(1.5, 0.5, 1.0, 1.0);
        assert!(rotated_iou(&a, &b) < 1e-9);
    }

    #[test]
    fn symmetric_bitwise_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let mut r = || {
                RotatedRect::new(
                    rng.gen_range(0.0..10.0),
                    rng.gen_range(0.0..10.0),
                    rng.gen_range(0.5..8.0),
                    rng.gen_range(0.5..8.0),
                    rng.gen_range(-3.2..3.2),
                )
            };
            let (a, b) = (r(), r());
            let ab = rotated_iou(&a, &b);
            let ba = rotated_iou(&b, &a);
            assert_eq!(ab.to_bits(), ba.to_bits());
            assert!((0.0..=1.0).contains(&ab));
        }
    }

    #[test]
    fn matches_monte_carlo_on_a_few_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let a = RotatedRect::new(5.0, 5.0, rng.gen_range(1.0..6.0), rng.gen_range(1.0..6.0), rng.gen_range(-1.5..1.5));
            let b = RotatedRect::new(
                5.0 + rng.gen_range(-2.0..2.0),
                5.0 + rng.gen_range(-2.0..2.0),
                rng.gen_range(1.0..6.0),
                rng.gen_range(1.0..6.0),
                rng.gen_range(-1.5..1.5),
            );
            let (mut inter, mut uni) = (0usize, 0usize);
            for _ in 0..100_000 {
                let p = Point2::new(rng.gen_range(-2.0..12.0), rng.gen_range(-2.0..12.0));
                let (ia, ib) = (a.contains(p, 0.0), b.contains(p, 0.0));
                inter += (ia && ib) as usize;
                uni += (ia || ib) as usize;
            }
            let mc = inter as f64 / uni.max(1) as f64;
            assert!((rotated_iou(&a, &b) - mc).abs() < 0.02);
        }
    }
}

mod midpoint {
    use cpn_core::geometry::*;
    use cpn_core::*;
    use cpn_core::geometry::rotated_iou;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(dalpha: f64, dbeta: f64) -> MidpointOffsetBox {
        MidpointOffsetBox { x: 0.0, y: 0.0, w: 1.0, h: 1.0, dalpha, dbeta }
    }

    #[test]
    fn half_offsets_give_the_external_box() {
        let b = MidpointOffsetBox { x: 3.0, y: 4.0, w: 6.0, h: 2.0, dalpha: 0.5, dbeta: 0.5 };
        let r = decode_midpoint_offsets(&b).unwrap();
        assert_eq!(r, RotatedRect { cx: 3.0, cy: 4.0, w: 6.0, h: 2.0, theta: 0.0 });
        let v = unit(0.5, 0.5).vertices();
        assert_eq!(v[0], Point2::new(0.5, -0.5));
        assert_eq!(v[1], Point2::new(0.5, 0.5));
        assert_eq!(v[2], Point2::new(-0.5, 0.5));
        assert_eq!(v[3], Point2::new(-0.5, -0.5));
    }

    #[test]
    fn decode_equals_rect_of_constructed_parallelogram() {
        // Independent construction from the edge midpoints.
        for &(da, db) in &[(0.0, 0.0), (0.2, -0.3), (-0.45, 0.1), (0.5, 0.5)] {
            let (w, h) = (8.0, 3.0);
            let top_mid = Point2::new(0.0, -h / 2.0);
            let right_mid = Point2::new(w / 2.0, 0.0);
            let p = [
                Point2::new(top_mid.x + da * w, top_mid.y),
                Point2::new(right_mid.x, right_mid.y + db * h),
                Point2::new(-(top_mid.x + da * w), -top_mid.y),
                Point2::new(-right_mid.x, -(right_mid.y + db * h)),
            ];
            let want = min_area_rect(&convex_hull(&p).unwrap()).unwrap();
            let got = decode_midpoint_offsets(&MidpointOffsetBox { x: 0.0, y: 0.0, w, h, dalpha: da, dbeta: db }).unwrap();
            assert!((got.area() - want.area()).abs() < 1e-12);
            assert!(rotated_iou(&got, &want) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn zero_offsets_give_inscribed_rhombus_rect() {
        let r = decode_midpoint_offsets(&unit(0.0, 0.0)).unwrap();
        // Rhombus through the edge midpoints of a unit square is a square of
        // side √2/2 turned by a quarter.
        assert!((r.w - libm::sqrt(0.5)).abs() < 1e-12);
        assert!((r.theta - core::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn offsets_are_clamped() {
        let a = decode_midpoint_offsets(&MidpointOffsetBox { x: 0.0, y: 0.0, w: 4.0, h: 2.0, dalpha: 3.0, dbeta: 0.7 }).unwrap();
        let b = decode_midpoint_offsets(&MidpointOffsetBox { x: 0.0, y: 0.0, w: 4.0, h: 2.0, dalpha: 0.5, dbeta: 0.5 }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        assert!(matches!(decode_midpoint_offsets(&unit(f64::NAN, 0.0)), Err(Error::InvalidInput(_))));
        assert!(matches!(decode_midpoint_offsets(&unit(0.5, -0.5)), Err(Error::DegenerateGeometry(_))));
        let anchor = RotatedRect::axis_aligned(0.0, 0.0, 4.0, 4.0);
        let tilted = RotatedRect::new(0.0, 0.0, 4.0, 4.0, 0.3);
        assert!(matches!(encode_midpoint_targets(&tilted, &anchor), Err(Error::InvalidInput(_))));
        let flat = RotatedRect { cx: 0.0, cy: 0.0, w: 0.0, h: 1.0, theta: 0.0 };
        assert!(matches!(encode_midpoint_targets(&anchor, &flat), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn encode_definitional_cases() {
        let anchor = RotatedRect::axis_aligned(10.0, 10.0, 8.0, 4.0);
        let d = encode_midpoint_targets(&anchor, &anchor).unwrap();
        assert_eq!(d, MidpointDeltas { dx: 0.0, dy: 0.0, dw: 0.0, dh: 0.0, dalpha: 0.5, dbeta: 0.5 });
        let shifted = anchor.translated(8.0, 0.0);
        let d = encode_midpoint_targets(&anchor, &shifted).unwrap();
        assert_eq!(d.dx, 1.0);
        assert_eq!(d.dy, 0.0);
    }

    #[test]
    fn offsets_round_trip_for_rectangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let anchor = RotatedRect::axis_aligned(0.0, 0.0, 10.0, 10.0);
        let mut checked = 0;
        while checked < 200 {
            let t = RotatedRect::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(2.0..20.0),
                rng.gen_range(2.0..20.0),
                rng.gen_range(-1.6..1.6),
            );
            let d = encode_midpoint_targets(&anchor, &t).unwrap();
            if d.dalpha.abs() > 0.4 || d.dbeta.abs() > 0.4 {
                continue;
            }
            checked += 1;
            let back = decode_midpoint_offsets(&d.apply(anchor.cx, anchor.cy, anchor.w, anchor.h)).unwrap();
            let again = encode_midpoint_targets(&anchor, &back).unwrap();
            assert!((again.dalpha - d.dalpha).abs() < 1e-6, "{d:?} {again:?}");
            assert!((again.dbeta - d.dbeta).abs() < 1e-6);
            assert!(rotated_iou(&back, &t) >= 0.99);
        }
    }
}

mod basics {
    use super::orient;
    use cpn_core::geometry::*;
    use cpn_core::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Star-shaped random polygon: sorted angles around a center with random
    /// radii.
    pub(crate) fn random_star(rng: &mut ChaCha8Rng, n: usize) -> Polygon {
        // Jittered even spacing keeps every angular gap below pi.
        let step = core::f64::consts::TAU / n as f64;
        let angles: Vec<f64> = (0..n).map(|i| (i as f64 + rng.gen_range(0.0..0.4)) * step).collect();
        let pts = angles
            .iter()
            .map(|&a| {
                let r = rng.gen_range(5.0..50.0);
                Point2::new(100.0 + r * libm::cos(a), 80.0 + r * libm::sin(a))
            })
            .collect();
        Polygon::new(pts).unwrap()
    }

    fn fan_area(p: &Polygon) -> f64 {
        // Triangles from an exterior reference point; signed sum.
        let o = Point2::new(-17.0, 3.0);
        p.edges().map(|(a, b)| 0.5 * orient(o, a, b)).sum()
    }

    #[test]
    fn unit_square_and_triangle() {
        let sq = Polygon::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        assert_eq!(polygon_area(&sq).unwrap(), 1.0);
        assert_eq!(polygon_perimeter(&sq), 4.0);
        let tri = Polygon::from_coords(&[(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]).unwrap();
        assert_eq!(polygon_area(&tri).unwrap(), 6.0);
        assert_eq!(polygon_perimeter(&tri), 12.0);
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let cw = Polygon::from_coords(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]).unwrap();
        assert!(cw.signed_area() > 0.0);
        assert_eq!(cw.vertices()[0], Point2::new(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_rings() {
        assert!(matches!(
            Polygon::from_coords(&[(0.0, 0.0), (1.0, 1.0)]),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            Polygon::from_coords(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            Polygon::from_coords(&[(0.0, 0.0), (f64::NAN, 1.0), (2.0, 0.0)]),
            Err(Error::InvalidInput(_))
        ));
        // bow tie
        assert!(matches!(
            Polygon::from_coords(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0)]),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn random_20gon_area_matches_fan_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_star(&mut rng, 20);
            let a = polygon_area(&p).unwrap();
            let oracle = fan_area(&p);
            assert!(((a - oracle) / oracle).abs() < 1e-9, "{a} vs {oracle}");
        }
    }

    #[test]
    fn perimeter_matches_edge_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_star(&mut rng, 17);
        let v = p.vertices();
        let mut oracle = 0.0;
        for i in 0..v.len() {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            oracle += libm::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
        }
        assert!((polygon_perimeter(&p) - oracle).abs() <= 1e-9 * oracle);
    }

    #[test]
    fn contains_basic() {
        let sq = Polygon::from_coords(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]).unwrap();
        assert!(sq.contains(Point2::new(2.0, 2.0)));
        assert!(!sq.contains(Point2::new(5.0, 2.0)));
    }

    proptest! {
        #[test]
        fn area_perimeter_translation_and_scale(seed in 0u64..1000, tx in -50.0f64..50.0, ty in -50.0f64..50.0, s in 0.2f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_star(&mut rng, 9);
            let a = polygon_area(&p).unwrap();
            let l = polygon_perimeter(&p);
            let moved = Polygon::new(p.vertices().iter().map(|q| Point2::new(q.x + tx, q.y + ty)).collect()).unwrap();
            prop_assert!((polygon_area(&moved).unwrap() - a).abs() <= 1e-9 * a);
            prop_assert!((polygon_perimeter(&moved) - l).abs() <= 1e-9 * l);
            let scaled = Polygon::new(p.vertices().iter().map(|q| Point2::new(q.x * s, q.y * s)).collect()).unwrap();
            prop_assert!((polygon_area(&scaled).unwrap() - a * s * s).abs() <= 1e-9 * a * s * s);
            prop_assert!((polygon_perimeter(&scaled) - l * s).abs() <= 1e-9 * l * s);
        }
    }
}

mod nms {
    use cpn_core::geometry::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(rect: RotatedRect, score: f64) -> Proposal {
        Proposal::new(rect, score, ProposalSource::Geometric)
    }

    /// Reference: repeatedly take the best remaining box, drop everything
    /// that overlaps it too much.
    fn brute_nms(props: &[Proposal], thr: f64) -> Vec<usize> {
        let mut alive: Vec<usize> = (0..props.len()).collect();
        let mut keep = Vec::new();
        while !alive.is_empty() {
            let mut best = alive[0];
            for &i in &alive {
                if props[i].score > props[best].score || (props[i].score == props[best].score && i < best) {
                    best = i;
                }
            }
            keep.push(best);
            alive.retain(|&j| j != best && rotated_iou(&props[best].rect, &props[j].rect) <= thr);
        }
        keep
    }

    #[test]
    fn small_cases() {
        let r = RotatedRect::new(5.0, 5.0, 4.0, 2.0, 0.2);
        assert_eq!(rotated_nms(&[p(r, 0.3)], 0.5).len(), 1);
        let kept = rotated_nms(&[p(r, 0.8), p(r, 0.9)], 0.5);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].score, 0.9);
        assert!(rotated_nms(&[], 0.5).is_empty());
    }

    #[test]
    fn ties_prefer_lower_index() {
        let r = RotatedRect::new(5.0, 5.0, 4.0, 2.0, 0.2);
        assert_eq!(rotated_nms_indices(&[p(r, 0.5), p(r, 0.5)], 0.5), [0]);
    }

    #[test]
    fn matches_brute_force_on_random_boxes() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for round in 0..5 {
            let props: Vec<Proposal> = (0..200)
                .map(|_| {
                    p(
                        RotatedRect::new(
                            rng.gen_range(0.0..60.0),
                            rng.gen_range(0.0..60.0),
                            rng.gen_range(3.0..15.0),
                            rng.gen_range(3.0..15.0),
                            rng.gen_range(-1.6..1.6),
                        ),
                        // coarse scores so ties actually happen
                        (rng.gen_range(0..20) as f64) / 20.0,
                    )
                })
                .collect();
            let thr = 0.3 + 0.1 * round as f64;
            let fast = rotated_nms_indices(&props, thr);
            assert_eq!(fast, brute_nms(&props, thr));
            for (k, &i) in fast.iter().enumerate() {
                for &j in &fast[k + 1..] {
                    assert!(rotated_iou(&props[i].rect, &props[j].rect) <= thr);
                }
            }
        }
    }
}

mod rect {
    use cpn_core::geometry::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn canonical_angle_prefers_small_theta() {
        let r = RotatedRect::new(0.0, 0.0, 4.0, 2.0, FRAC_PI_2);
        assert_eq!((r.w, r.h), (2.0, 4.0));
        assert!(r.theta.abs() < 1e-15);
        let r = RotatedRect::new(0.0, 0.0, 4.0, 2.0, PI + 0.1);
        assert!((r.theta - 0.1).abs() < 1e-12);
        assert_eq!((r.w, r.h), (4.0, 2.0));
        let r = RotatedRect::new(0.0, 0.0, 4.0, 2.0, -1.2);
        assert!((r.theta - (-1.2 + FRAC_PI_2)).abs() < 1e-12);
        assert_eq!((r.w, r.h), (2.0, 4.0));
    }

    #[test]
    fn quarter_turn_tie_goes_positive() {
        let r = RotatedRect::new(0.0, 0.0, 1.0, 1.0, -FRAC_PI_4);
        assert!((r.theta - FRAC_PI_4).abs() < 1e-12);
        let r = RotatedRect::new(0.0, 0.0, 1.0, 1.0, FRAC_PI_4);
        assert!((r.theta - FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn canonical_preserves_corner_set() {
        for k in 0..40 {
            let t = -3.0 + 0.15 * k as f64;
            let raw = RotatedRect { cx: 3.0, cy: -1.0, w: 5.0, h: 2.0, theta: t };
            let can = raw.canonical();
            assert!(can.theta > -FRAC_PI_4 - 1e-12 && can.theta <= FRAC_PI_4 + 1e-12);
            for c in raw.corners() {
                assert!(can
                    .corners()
                    .iter()
                    .any(|d| (c.x - d.x).abs() < 1e-9 && (c.y - d.y).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn corners_are_ccw() {
        let r = RotatedRect::new(1.0, 2.0, 3.0, 1.0, 0.3);
        let p = r.to_polygon().unwrap();
        assert!((p.signed_area() - 3.0).abs() < 1e-12);
        assert_eq!(p.vertices()[0], r.corners()[0]);
    }
}
