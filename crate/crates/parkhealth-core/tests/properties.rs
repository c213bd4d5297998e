//! Property tests for the core invariants: point membership against an
//! independent winding-number oracle, intersection bounds, conservation
//! of categorisation weight, disparity against the pairwise Gini, and
//! the shape of the statistical helpers.

use proptest::prelude::*;

use parkhealth_core::equity::disparity_index;
use parkhealth_core::eval::{f1_main, f1_weighted, Annotation, GoldLabel};
use parkhealth_core::geometry::{
    intersection_area_m2, MultiPolygon, Point, Ring, EARTH_RADIUS_M,
};
use parkhealth_core::lexicon::{
    categorize, clean_tags, ActivityCategory, Lexicon, LexiconEntry, Stoplists,
};
use parkhealth_core::osm::Tag;
use parkhealth_core::stats;
use parkhealth_core::validation::percentile_ranking;

// --- geometry --------------------------------------------------------------

/// Star-shaped polygon around a centre: strictly increasing angles keep it
/// simple, varying radii make it irregular.
fn star_ring(center: Point, spokes: &[(f64, f64)]) -> Ring {
    let n = spokes.len() as f64;
    let mut points: Vec<Point> = spokes
        .iter()
        .enumerate()
        .map(|(i, &(jitter, radius))| {
            let angle = core::f64::consts::TAU * (i as f64 + jitter) / n;
            Point::new(
                center.lon + radius * angle.cos(),
                center.lat + radius * angle.sin(),
            )
        })
        .collect();
    points.push(points[0]);
    Ring::new(points).expect("star polygons are valid rings")
}

fn arb_star() -> impl Strategy<Value = Ring> {
    (
        (-10.0..10.0f64, 35.0..55.0f64),
        prop::collection::vec((0.05..0.95f64, 0.004..0.02f64), 4..12),
    )
        .prop_map(|((lon, lat), spokes)| star_ring(Point::new(lon, lat), &spokes))
}

/// Signed-angle winding number; independent of the crossing-parity code
/// under test. Only meaningful away from the boundary.
fn winding_inside(ring: &Ring, p: Point) -> bool {
    let mut angle = 0.0f64;
    for w in ring.coords().windows(2) {
        let ax = w[0].lon - p.lon;
        let ay = w[0].lat - p.lat;
        let bx = w[1].lon - p.lon;
        let by = w[1].lat - p.lat;
        angle += (ax * by - ay * bx).atan2(ax * bx + ay * by);
    }
    angle.abs() > core::f64::consts::PI
}

fn dist2_to_boundary(ring: &Ring, p: Point) -> f64 {
    let mut best = f64::INFINITY;
    for w in ring.coords().windows(2) {
        let (ax, ay) = (w[0].lon, w[0].lat);
        let (bx, by) = (w[1].lon, w[1].lat);
        let (dx, dy) = (bx - ax, by - ay);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            ((p.lon - ax) * dx + (p.lat - ay) * dy) / len2
        } else {
            0.0
        };
        let t = t.clamp(0.0, 1.0);
        let (ex, ey) = (ax + t * dx - p.lon, ay + t * dy - p.lat);
        best = best.min(ex * ex + ey * ey);
    }
    best
}

proptest! {
    #[test]
    fn membership_matches_winding_oracle(
        ring in arb_star(),
        probes in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 32),
    ) {
        let bbox = ring.bbox();
        for (u, v) in probes {
            let p = Point::new(
                bbox.min_lon + u * (bbox.max_lon - bbox.min_lon),
                bbox.min_lat + v * (bbox.max_lat - bbox.min_lat),
            );
            // Near the boundary the oracle itself is ill-conditioned.
            if dist2_to_boundary(&ring, p) < 1e-14 {
                continue;
            }
            prop_assert_eq!(ring.contains(p), winding_inside(&ring, p));
        }
    }

    #[test]
    fn intersection_is_bounded_and_commutative(a in arb_star(), b in arb_star()) {
        let a = MultiPolygon::from_ring(a);
        let b = MultiPolygon::from_ring(b);
        let ab = intersection_area_m2(&a, &b);
        let ba = intersection_area_m2(&b, &a);
        prop_assert_eq!(ab.to_bits(), ba.to_bits());
        let bound = a.geodesic_area_m2().min(b.geodesic_area_m2());
        prop_assert!(ab >= 0.0);
        prop_assert!(ab <= bound * (1.0 + 1e-9) + 1e-6, "{ab} > min area {bound}");
    }

    #[test]
    fn self_intersection_is_the_area(ring in arb_star()) {
        let mp = MultiPolygon::from_ring(ring);
        let area = mp.geodesic_area_m2();
        let self_int = intersection_area_m2(&mp, &mp);
        prop_assert!(
            (self_int - area).abs() <= area * 1e-9 + 1e-9,
            "self intersection {self_int} != area {area}"
        );
    }

    #[test]
    fn rectangle_intersection_matches_closed_form(
        a in (-5.0..5.0f64, 40.0..50.0f64, 0.01..0.5f64, 0.01..0.5f64),
        b in (-5.0..5.0f64, 40.0..50.0f64, 0.01..0.5f64, 0.01..0.5f64),
    ) {
        let rect = |(lon, lat, w, h): (f64, f64, f64, f64)| {
            let ring = Ring::new(vec![
                Point::new(lon, lat),
                Point::new(lon + w, lat),
                Point::new(lon + w, lat + h),
                Point::new(lon, lat + h),
                Point::new(lon, lat),
            ])
            .unwrap();
            MultiPolygon::from_ring(ring)
        };
        let overlap_lon = (a.0 + a.2).min(b.0 + b.2) - a.0.max(b.0);
        let overlap_lat = (a.1 + a.3).min(b.1 + b.3) - a.1.max(b.1);
        let expected = if overlap_lon > 0.0 && overlap_lat > 0.0 {
            let lat0 = a.1.max(b.1).to_radians();
            let lat1 = (a.1 + a.3).min(b.1 + b.3).to_radians();
            EARTH_RADIUS_M * EARTH_RADIUS_M
                * overlap_lon.to_radians()
                * (lat1.sin() - lat0.sin()).abs()
        } else {
            0.0
        };
        let got = intersection_area_m2(&rect(a), &rect(b));
        if expected == 0.0 {
            prop_assert!(got.abs() < 1e-6, "expected empty, got {got}");
        } else {
            prop_assert!(
                (got - expected).abs() <= expected * 1e-9,
                "got {got}, expected {expected}"
            );
        }
    }
}

// --- categorisation ---------------------------------------------------------

fn arb_tag() -> impl Strategy<Value = Tag> {
    ("[a-d]{1,2}", "[a-d]{1,2}").prop_map(|(k, v)| Tag::new(k, v))
}

fn arb_lexicon() -> impl Strategy<Value = Lexicon> {
    prop::collection::btree_set(
        ("[a-d]{1,2}", "[a-d]{1,2}", 0usize..5),
        0..24,
    )
    .prop_map(|entries| {
        Lexicon::from_entries(entries.into_iter().map(|(key, value, c)| LexiconEntry {
            key,
            value,
            category: ActivityCategory::ALL[c],
        }))
        .expect("set input has no duplicates")
    })
}

proptest! {
    #[test]
    fn cleaning_is_idempotent_and_order_preserving(
        tags in prop::collection::vec(arb_tag(), 0..20),
        keys in prop::collection::btree_set("[a-d]{1,2}", 0..4),
        values in prop::collection::btree_set("[a-d]{1,2}", 0..4),
    ) {
        let stop = Stoplists::new(keys, values);
        let once = clean_tags(&tags, &stop);
        prop_assert_eq!(clean_tags(&once, &stop), once.clone());
        // Order: `once` is a subsequence of the input.
        let mut rest = once.iter();
        let mut cur = rest.next();
        for t in &tags {
            if Some(t) == cur {
                cur = rest.next();
            }
        }
        prop_assert_eq!(cur, None);
        // Exactly the stoplisted tags are gone.
        prop_assert_eq!(
            once.len(),
            tags.iter().filter(|t| !stop.drops(t)).count()
        );
    }

    #[test]
    fn categorisation_conserves_weight(
        tags in prop::collection::vec(arb_tag(), 0..20),
        lexicon in arb_lexicon(),
    ) {
        let w = categorize(&tags, &lexicon);
        let sum = w.sum();
        prop_assert!(
            sum.abs() < 1e-12 || (sum - 1.0).abs() < 1e-12,
            "weights sum to {sum}"
        );
        for (_, x) in w.iter() {
            prop_assert!((0.0..=1.0).contains(&x));
        }
    }
}

// --- disparity ---------------------------------------------------------------

fn gini_pairwise(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for &a in xs {
        for &b in xs {
            acc += (a - b).abs();
        }
    }
    acc / (2.0 * n * n * mean)
}

proptest! {
    #[test]
    fn disparity_bounded_and_matches_pairwise(
        scores in prop::collection::vec(-1000.0..1000.0f64, 2..40),
    ) {
        let d = disparity_index(&scores).unwrap();
        prop_assert!((0.0..=1.0).contains(&d), "disparity {d} out of range");
        let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max > min {
            let normalised: Vec<f64> =
                scores.iter().map(|s| (s - min) / (max - min)).collect();
            let oracle = gini_pairwise(&normalised);
            prop_assert!((d - oracle).abs() < 1e-12, "{d} vs oracle {oracle}");
        } else {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn disparity_is_affine_invariant(
        scores in prop::collection::vec(-100.0..100.0f64, 2..30),
        scale in 0.01..50.0f64,
        shift in -100.0..100.0f64,
    ) {
        let moved: Vec<f64> = scores.iter().map(|s| scale * s + shift).collect();
        let a = disparity_index(&scores).unwrap();
        let b = disparity_index(&moved).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

// --- statistics ----------------------------------------------------------------

proptest! {
    #[test]
    fn zscores_have_zero_mean_unit_spread(
        values in prop::collection::vec(-1000.0..1000.0f64, 2..50),
    ) {
        let z = stats::zscores(&values);
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        prop_assert!(mean.abs() < 1e-9);
        let var = z.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let constant = values.iter().all(|v| v == &values[0]);
        if constant {
            prop_assert!(z.iter().all(|&x| x == 0.0));
        } else {
            prop_assert!((var - 1.0).abs() < 1e-9, "variance {var}");
        }
    }

    #[test]
    fn t_cdf_shape(t in -8.0..8.0f64, df in 1.0..200.0f64) {
        let c = stats::t_cdf(t, df);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(stats::t_cdf(t + 0.5, df) >= c);
        let sym = stats::t_cdf(-t, df);
        prop_assert!((c + sym - 1.0).abs() < 1e-12);
    }

    #[test]
    fn welch_is_symmetric(
        a in prop::collection::vec(-50.0..50.0f64, 2..30),
        b in prop::collection::vec(-50.0..50.0f64, 2..30),
    ) {
        let ab = stats::welch_t(&a, &b).unwrap();
        let ba = stats::welch_t(&b, &a).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab.p));
        prop_assert!((ab.p - ba.p).abs() < 1e-12);
        prop_assert!((ab.t + ba.t).abs() < 1e-12);
    }
}

// --- evaluation -------------------------------------------------------------

fn arb_eval_case() -> impl Strategy<Value = (Vec<GoldLabel>, Vec<Annotation>)> {
    prop::collection::vec(
        (
            0usize..6,          // gold class
            0usize..6,          // main class
            0.0..100.0f64,      // main reliability
            0usize..6,          // secondary class
            0.0..100.0f64,      // secondary reliability
        ),
        1..40,
    )
    .prop_map(|rows| {
        let cat = |i: usize| (i < 5).then(|| ActivityCategory::ALL[i]);
        let mut gold = Vec::new();
        let mut anns = Vec::new();
        for (i, (g, m, mr, s, sr)) in rows.into_iter().enumerate() {
            let key = format!("k{i}");
            gold.push(GoldLabel {
                key: key.clone(),
                value: "v".to_string(),
                category: cat(g),
            });
            anns.push(Annotation {
                key,
                value: "v".to_string(),
                main: cat(m),
                main_reliability: mr,
                secondary: cat(s),
                secondary_reliability: sr,
            });
        }
        (gold, anns)
    })
}

proptest! {
    #[test]
    fn weighted_f1_at_threshold_one_is_main_f1(case in arb_eval_case()) {
        let (gold, anns) = case;
        let main = f1_main(&gold, &anns).unwrap();
        let weighted = f1_weighted(&gold, &anns, 1.0).unwrap();
        prop_assert_eq!(main.f1.to_bits(), weighted.f1.to_bits());
        prop_assert_eq!(main.precision.to_bits(), weighted.precision.to_bits());
        prop_assert_eq!(main.recall.to_bits(), weighted.recall.to_bits());
    }

    #[test]
    fn f1_stays_in_unit_interval(case in arb_eval_case(), th in 0.0..1.2f64) {
        let (gold, anns) = case;
        let report = f1_weighted(&gold, &anns, th).unwrap();
        prop_assert!((0.0..=1.0).contains(&report.f1));
        for m in &report.per_class {
            prop_assert!((0.0..=1.0).contains(&m.f1));
            prop_assert!(m.precision <= 1.0 && m.recall <= 1.0);
        }
    }
}

// --- ranking -----------------------------------------------------------------

proptest! {
    #[test]
    fn percentiles_stay_in_unit_interval(
        scores in prop::collection::vec(0.0..1.0f64, 1..50),
        pick in prop::collection::vec(0usize..50, 1..8),
    ) {
        let ranking: Vec<(String, f64)> = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| (format!("Park {i}"), s))
            .collect();
        let names: Vec<String> = pick
            .iter()
            .map(|i| format!("Park {}", i % scores.len()))
            .collect();
        let report = percentile_ranking(&names, &ranking).unwrap();
        prop_assert!((0.0..=1.0).contains(&report.mean_percentile));
        for p in &report.parks {
            prop_assert!((0.0..=1.0).contains(&p.percentile));
        }
        prop_assert!(report.unmatched.is_empty());
    }
}
