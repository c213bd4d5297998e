//! Acceptance gate: nine oracle- and property-based criteria, each printed
//! as one PASS/FAIL line. Oracles are implemented here from first
//! principles (ray casting, Monte Carlo, pairwise Gini, brute-force
//! confusion matrices, a frozen high-precision t-CDF table) so they share
//! no code with the library. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use parkhealth_core::equity::{self, ParkDistance};
use parkhealth_core::eval::{self, Annotation, GoldLabel};
use parkhealth_core::geometry::{
    intersection_area_m2, MultiPolygon, Point, Ring, EARTH_RADIUS_M,
};
use parkhealth_core::lexicon::{
    categorize, clean_tags, ActivityCategory, CategoryVector, FacilityCounts,
};
use parkhealth_core::osm::{ObjectStore, Tag};
use parkhealth_core::scoring::{
    combine_scores, fit_city_models, predict_average_park, FitKind, ParkCounts, Thresholds,
};
use parkhealth_core::stats;
use parkhealth_core::validation;

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

// --- criterion 1: geometry oracles ------------------------------------------

/// Classic ray-casting point-in-polygon, written against the open vertex
/// list. Ties on the boundary are unspecified; callers keep test points
/// away from edges.
fn ray_cast(ring: &[(f64, f64)], p: (f64, f64)) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = ring[i];
        let (xj, yj) = ring[j];
        if (yi > p.1) != (yj > p.1) {
            let cross = xj + (p.1 - yj) * (xi - xj) / (yi - yj);
            if p.0 < cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

fn min_edge_distance(ring: &[(f64, f64)], p: (f64, f64)) -> f64 {
    let n = ring.len();
    (0..n)
        .map(|i| segment_distance(ring[i], ring[(i + 1) % n], p))
        .fold(f64::INFINITY, f64::min)
}

/// Star-shaped polygon around `center`: sorted angles, random radii. Such
/// polygons are always simple.
fn star_polygon(
    rng: &mut ChaCha8Rng,
    center: (f64, f64),
    r_min: f64,
    r_max: f64,
) -> Vec<(f64, f64)> {
    loop {
        let n = rng.random_range(6..16);
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..core::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        if angles.len() < 5 {
            continue;
        }
        return angles
            .into_iter()
            .map(|t| {
                let r = rng.random_range(r_min..r_max);
                (center.0 + r * t.cos(), center.1 + r * t.sin())
            })
            .collect();
    }
}

fn to_multipolygon(vertices: &[(f64, f64)]) -> MultiPolygon {
    let mut points: Vec<Point> = vertices.iter().map(|&(x, y)| Point::new(x, y)).collect();
    points.push(points[0]);
    MultiPolygon::from_ring(Ring::new(points).expect("star polygons are valid rings"))
}

fn bbox_of(vertices: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in vertices {
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    }
    b
}

fn criterion_geometry() -> Result<(), String> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0_1);

    // Point-in-polygon against the ray-casting oracle, 1000 polygons.
    let mut tested = 0usize;
    for _ in 0..1000 {
        let center = (rng.random_range(-170.0..170.0), rng.random_range(-80.0..80.0));
        let poly = star_polygon(&mut rng, center, 0.001, 0.01);
        let mp = to_multipolygon(&poly);
        let (x0, y0, x1, y1) = bbox_of(&poly);
        let mut points = 0usize;
        while points < 10 {
            let p = (rng.random_range(x0..x1), rng.random_range(y0..y1));
            if min_edge_distance(&poly, p) < 1e-7 {
                continue; // boundary semantics are taken by definition, not sampled
            }
            points += 1;
            tested += 1;
            let want = ray_cast(&poly, p);
            let got = mp.contains(Point::new(p.0, p.1));
            check(got == want, || {
                format!("point_in_polygon disagrees with ray casting at {p:?}: {got} vs {want}")
            })?;
        }
    }
    check(tested == 10_000, || format!("expected 10000 point tests, ran {tested}"))?;

    // Intersection area against a 100k-sample Monte Carlo oracle, 50 pairs.
    // The polygons are nearly concentric so the intersection fills most of
    // the sampling box, keeping the Monte Carlo noise well under the 1%
    // tolerance at this sample count.
    for pair in 0..50 {
        let center = (rng.random_range(-90.0..90.0), rng.random_range(-60.0..60.0));
        let offset = (rng.random_range(-0.0006..0.0006), rng.random_range(-0.0006..0.0006));
        let a = star_polygon(&mut rng, center, 0.0075, 0.009);
        let b = star_polygon(
            &mut rng,
            (center.0 + offset.0, center.1 + offset.1),
            0.0075,
            0.009,
        );
        let core_area = intersection_area_m2(&to_multipolygon(&a), &to_multipolygon(&b));

        let (ax0, ay0, ax1, ay1) = bbox_of(&a);
        let (bx0, by0, bx1, by1) = bbox_of(&b);
        let (x0, y0, x1, y1) = (ax0.max(bx0), ay0.max(by0), ax1.min(bx1), ay1.min(by1));
        check(x0 < x1 && y0 < y1, || format!("pair {pair} does not overlap"))?;
        // Uniform sampling in (lon, sin lat) space is uniform in area.
        let (s0, s1) = (y0.to_radians().sin(), y1.to_radians().sin());
        let mut hits = 0u64;
        let samples = 100_000u64;
        for _ in 0..samples {
            let x = rng.random_range(x0..x1);
            let y = rng.random_range(s0..s1).asin().to_degrees();
            if ray_cast(&a, (x, y)) && ray_cast(&b, (x, y)) {
                hits += 1;
            }
        }
        let box_area =
            EARTH_RADIUS_M * EARTH_RADIUS_M * (x1 - x0).to_radians() * (s1 - s0);
        let mc_area = hits as f64 / samples as f64 * box_area;
        check(hits > 1000, || format!("pair {pair}: too few Monte Carlo hits ({hits})"))?;
        let rel = (core_area - mc_area).abs() / mc_area;
        check(rel <= 0.01, || {
            format!(
                "pair {pair}: intersection {core_area:.1} m2 vs Monte Carlo {mc_area:.1} m2 \
                 (rel {rel:.4})"
            )
        })?;
    }

    // A 1 km square on the equator measures 100 ha.
    let half = (500.0 / EARTH_RADIUS_M).to_degrees();
    let square = [
        (-half, -half),
        (half, -half),
        (half, half),
        (-half, half),
    ];
    let area_ha = to_multipolygon(&square).geodesic_area_ha();
    check((area_ha - 100.0).abs() <= 0.1, || {
        format!("1 km equatorial square: {area_ha} ha, want 100 +- 0.1")
    })?;

    let elapsed = started.elapsed();
    check(elapsed.as_secs() < 60, || format!("geometry oracles took {elapsed:?}"))
}

// --- criterion 2: regression correctness -------------------------------------

/// Eight parks, areas 2^0..2^7 ha, physical elements = 4 * area. All
/// numbers stay exact in f64, so the fit must be slope 1, intercept 2.
fn power_law_city() -> Vec<ParkCounts> {
    (0..8)
        .map(|i| {
            let area_ha = f64::powi(2.0, i);
            let mut counts = FacilityCounts::default();
            counts.elements = CategoryVector([4.0 * area_ha, 0.0, 0.0, 0.0, 0.0]);
            ParkCounts {
                park_id: format!("way/{i}"),
                name: None,
                area_ha,
                counts,
            }
        })
        .collect()
}

/// The power-law city with multiplicative noise, for nonzero residuals.
fn perturbed_city() -> Vec<ParkCounts> {
    let mut parks = power_law_city();
    for (i, park) in parks.iter_mut().enumerate() {
        let factor = if i % 2 == 0 { 2.0 } else { 0.5 };
        park.counts.elements.0[0] *= factor * (1.0 + i as f64 / 10.0);
    }
    parks
}

fn criterion_regression() -> Result<(), String> {
    let parks = power_law_city();
    let thresholds = Thresholds::default();
    let fits = fit_city_models(&parks, &thresholds).map_err(|e| e.to_string())?;
    let fit = fits
        .get(ActivityCategory::Physical, FitKind::Elements)
        .ok_or("no fit for physical elements")?;
    check(fit.n_included == 8, || format!("n_included {}", fit.n_included))?;
    check((fit.slope - 1.0).abs() < 1e-9, || format!("slope {}", fit.slope))?;
    check((fit.intercept - 2.0).abs() < 1e-9, || format!("intercept {}", fit.intercept))?;

    let predicted = predict_average_park(fit, 8.0);
    check((predicted - 32.0).abs() < 1e-9, || {
        format!("predicted count at 8 ha: {predicted}, want 32")
    })?;

    // Least squares balances the residuals of included parks exactly.
    let parks = perturbed_city();
    let fits = fit_city_models(&parks, &thresholds).map_err(|e| e.to_string())?;
    let scores = combine_scores(&parks, &fits, &thresholds);
    let residual_sum: f64 = scores
        .iter()
        .map(|s| s.per_category[0].residual_elements.unwrap_or(0.0))
        .sum();
    check(residual_sum.abs() < 1e-9, || format!("residual sum {residual_sum}"))
}

// --- criterion 3: score normalization ----------------------------------------

fn criterion_normalization() -> Result<(), String> {
    // Counts off the power law give nonzero residual variance. Only the
    // physical elements kind has data, so the combined physical score is
    // exactly the z-scored residual.
    let parks = perturbed_city();
    let thresholds = Thresholds::default();
    let fits = fit_city_models(&parks, &thresholds).map_err(|e| e.to_string())?;
    let scores = combine_scores(&parks, &fits, &thresholds);
    let zs: Vec<f64> = scores.iter().map(|s| s.per_category[0].combined).collect();
    let mean = stats::mean(&zs);
    let sd = stats::population_std(&zs);
    check(mean.abs() < 1e-9, || format!("z mean {mean}"))?;
    check((sd - 1.0).abs() < 1e-9, || format!("z sd {sd}"))?;

    // An exact power law has zero residual variance everywhere; the scores
    // must come out as exact zeros, not amplified rounding noise.
    let parks = power_law_city();
    let fits = fit_city_models(&parks, &thresholds).map_err(|e| e.to_string())?;
    let scores = combine_scores(&parks, &fits, &thresholds);
    for score in &scores {
        check(score.per_category[0].combined == 0.0, || {
            format!("sigma=0 score for {}: {}", score.park_id, score.per_category[0].combined)
        })?;
    }
    Ok(())
}

// --- criterion 4: disparity correctness ---------------------------------------

/// Pairwise mean-absolute-difference Gini over the min-max normalized
/// scores, the O(n^2) definition.
fn gini_oracle(scores: &[f64]) -> f64 {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return 0.0;
    }
    let normalized: Vec<f64> = scores.iter().map(|s| (s - min) / (max - min)).collect();
    let n = normalized.len() as f64;
    let mean = normalized.iter().sum::<f64>() / n;
    let pairwise: f64 = normalized
        .iter()
        .flat_map(|a| normalized.iter().map(move |b| (a - b).abs()))
        .sum();
    pairwise / (2.0 * n * n * mean)
}

fn criterion_disparity() -> Result<(), String> {
    let known = equity::disparity_index(&[1.0, 1.0, 1.0, 3.0]).map_err(|e| e.to_string())?;
    check(known == 0.75, || format!("disparity([1,1,1,3]) = {known}, want exactly 0.75"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0_4);
    for case in 0..100 {
        let n = rng.random_range(2..40);
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..100.0)).collect();
        let got = equity::disparity_index(&scores).map_err(|e| e.to_string())?;
        let want = gini_oracle(&scores);
        check((got - want).abs() < 1e-12, || {
            format!("case {case}: disparity {got} vs pairwise oracle {want}")
        })?;
        check((0.0..=1.0).contains(&got), || format!("case {case}: disparity {got} out of [0,1]"))?;

        let scale = rng.random_range(0.1..20.0);
        let shift = rng.random_range(-100.0..100.0);
        let transformed: Vec<f64> = scores.iter().map(|s| scale * s + shift).collect();
        let affine = equity::disparity_index(&transformed).map_err(|e| e.to_string())?;
        check((affine - got).abs() < 1e-12, || {
            format!("case {case}: affine transform moved disparity {got} -> {affine}")
        })?;
    }
    Ok(())
}

// --- criterion 5: quartile gradient -------------------------------------------

/// Standard normal via Box-Muller over ChaCha uniforms.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let u2 = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    (-2.0 * (1.0 - u1).ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

// Frozen t-distribution CDF probes, 17 significant digits.
const T_CDF_PROBES: [(f64, f64, f64); 20] = [
    (0.0, 1.0, 0.5),
    (0.5, 1.0, 0.64758361765043327),
    (-0.5, 1.0, 0.35241638234956673),
    (1.0, 2.0, 0.78867513459481288),
    (-1.0, 2.0, 0.21132486540518712),
    (2.0, 3.0, 0.93033701572057841),
    (-2.0, 3.0, 0.069662984279421588),
    (0.25, 4.5, 0.59320350848781683),
    (1.5, 5.0, 0.90304815987876328),
    (-1.5, 5.0, 0.096951840121236716),
    (3.0, 7.0, 0.99002893693400373),
    (-3.0, 7.0, 0.009971063065996269),
    (0.75, 10.0, 0.76473400230922905),
    (2.5, 12.5, 0.9863883710683061),
    (-2.5, 12.5, 0.013611628931693903),
    (4.0, 20.0, 0.99964823835343584),
    (-4.0, 20.0, 0.00035176164656415914),
    (1.0, 50.0, 0.83893717744987775),
    (5.0, 100.0, 0.99999877491329325),
    (-5.0, 100.0, 1.2250867067519002e-6),
];

fn criterion_quartiles() -> Result<(), String> {
    for &(t, df, want) in &T_CDF_PROBES {
        let got = stats::t_cdf(t, df);
        check((got - want).abs() < 1e-10, || {
            format!("t_cdf({t}, {df}) = {got}, oracle {want}")
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0_5);
    let parks: Vec<ParkDistance> = (0..200)
        .map(|i| {
            let distance_m = 400.0 + 35.0 * i as f64;
            ParkDistance {
                park_id: format!("way/{i}"),
                distance_m,
                score: -distance_m.log2() + 0.1 * standard_normal(&mut rng),
            }
        })
        .collect();
    let report = equity::quartile_analysis(&parks).map_err(|e| e.to_string())?;
    check(report.sizes == [50, 50, 50, 50], || format!("sizes {:?}", report.sizes))?;
    for q in 0..3 {
        check(report.mean_scores[q] > report.mean_scores[q + 1], || {
            format!("quartile means not strictly decreasing: {:?}", report.mean_scores)
        })?;
        check(report.welch[q].p < 0.001, || {
            format!("welch p between q{} and q{}: {}", q + 1, q + 2, report.welch[q].p)
        })?;
    }
    Ok(())
}

// --- criterion 6: weighted F1 reduction ---------------------------------------

const CLASSES: [Option<ActivityCategory>; 6] = [
    Some(ActivityCategory::Physical),
    Some(ActivityCategory::NatureAppreciation),
    Some(ActivityCategory::Environmental),
    Some(ActivityCategory::Social),
    Some(ActivityCategory::Cultural),
    None,
];

fn class_of(c: Option<ActivityCategory>) -> usize {
    c.map_or(5, |c| c.index())
}

fn random_eval_set(rng: &mut ChaCha8Rng) -> (Vec<GoldLabel>, Vec<Annotation>) {
    let n = rng.random_range(20..40);
    let mut gold = Vec::new();
    let mut annotations = Vec::new();
    for i in 0..n {
        let key = format!("k{i}");
        let value = format!("v{i}");
        gold.push(GoldLabel {
            key: key.clone(),
            value: value.clone(),
            category: CLASSES[rng.random_range(0..6)],
        });
        let secondary = if rng.random_range(0.0..1.0) < 0.6 {
            CLASSES[rng.random_range(0..5)]
        } else {
            None
        };
        annotations.push(Annotation {
            key,
            value,
            main: CLASSES[rng.random_range(0..6)],
            main_reliability: rng.random_range(0.0..100.0),
            secondary,
            secondary_reliability: rng.random_range(0.0..100.0),
        });
    }
    (gold, annotations)
}

/// Brute-force weighted F1: build explicit 6x6 main and secondary
/// confusion matrices (plus an absent-secondary column), blend them with
/// the per-class reliability ratio, and support-weight the class F1s.
fn f1_weighted_oracle(gold: &[GoldLabel], annotations: &[Annotation], threshold: f64) -> f64 {
    let mut main = [[0.0f64; 6]; 6]; // [gold][predicted]
    let mut sec = [[0.0f64; 6]; 6];
    let mut sec_absent = [0.0f64; 6];
    let mut support = [0.0f64; 6];
    let mut rel_main = vec![Vec::new(); 6];
    let mut rel_sec = vec![Vec::new(); 6];
    for g in gold {
        let a = annotations
            .iter()
            .find(|a| a.key == g.key && a.value == g.value)
            .expect("aligned sets");
        let gi = class_of(g.category);
        support[gi] += 1.0;
        let mi = class_of(a.main);
        main[gi][mi] += 1.0;
        rel_main[mi].push(a.main_reliability);
        let kept = a
            .secondary
            .filter(|_| threshold < 1.0 && a.secondary_reliability >= threshold * 100.0);
        match kept {
            Some(s) => {
                sec[gi][s.index()] += 1.0;
                rel_sec[s.index()].push(a.secondary_reliability);
            }
            None => sec_absent[gi] += 1.0,
        }
    }
    let mut f1_sum = 0.0;
    for c in 0..6 {
        let mean = |v: &Vec<f64>| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        let (m, s) = (mean(&rel_main[c]), mean(&rel_sec[c]));
        let ratio = if m + s > 0.0 { m / (m + s) } else { 1.0 };

        let tally = |matrix: &[[f64; 6]; 6], absent: &[f64; 6]| {
            let tp = matrix[c][c];
            let fp: f64 = (0..6).filter(|&g| g != c).map(|g| matrix[g][c]).sum();
            let fnc: f64 =
                (0..6).filter(|&p| p != c).map(|p| matrix[c][p]).sum::<f64>() + absent[c];
            (tp, fp, fnc)
        };
        let (tpm, fpm, fnm) = tally(&main, &[0.0; 6]);
        let (tps, fps, fns) = tally(&sec, &sec_absent);
        let tp = tpm * ratio + tps * (1.0 - ratio);
        let fp = fpm * ratio + fps * (1.0 - ratio);
        let fnc = fnm * ratio + fns * (1.0 - ratio);
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fnc > 0.0 { tp / (tp + fnc) } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        f1_sum += f1 * support[c];
    }
    f1_sum / support.iter().sum::<f64>()
}

fn criterion_weighted_f1() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0_6);
    for case in 0..10 {
        let (gold, annotations) = random_eval_set(&mut rng);

        let weighted = eval::f1_weighted(&gold, &annotations, 1.0).map_err(|e| e.to_string())?;
        let main = eval::f1_main(&gold, &annotations).map_err(|e| e.to_string())?;
        check(weighted.f1 == main.f1, || {
            format!("case {case}: threshold 1.0 f1 {} != f1_main {}", weighted.f1, main.f1)
        })?;

        for threshold in [0.0, 0.25, rng.random_range(0.0..1.0)] {
            let got = eval::f1_weighted(&gold, &annotations, threshold)
                .map_err(|e| e.to_string())?
                .f1;
            let want = f1_weighted_oracle(&gold, &annotations, threshold);
            check((got - want).abs() < 1e-12, || {
                format!("case {case} threshold {threshold}: f1 {got} vs oracle {want}")
            })?;
        }
    }
    Ok(())
}

// --- criterion 7: percentile metric -------------------------------------------

fn criterion_percentile() -> Result<(), String> {
    let ranking: Vec<(String, f64)> =
        (0..100).map(|i| (format!("park{i:03}"), i as f64)).collect();

    let top = validation::percentile_ranking(&["park099".to_string()], &ranking)
        .map_err(|e| e.to_string())?;
    check(top.mean_percentile == 1.0, || {
        format!("top park percentile {}, want exactly 1", top.mean_percentile)
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0_7);
    let mut total = 0.0;
    let trials = 1000;
    for _ in 0..trials {
        let mut picks: Vec<usize> = Vec::new();
        while picks.len() < 5 {
            let i = rng.random_range(0..100);
            if !picks.contains(&i) {
                picks.push(i);
            }
        }
        let names: Vec<String> = picks.iter().map(|i| format!("park{i:03}")).collect();
        let report =
            validation::percentile_ranking(&names, &ranking).map_err(|e| e.to_string())?;
        total += report.mean_percentile;
    }
    let mean = total / trials as f64;
    check((mean - 0.5).abs() <= 0.05, || {
        format!("random naming mean percentile {mean}, want 0.5 +- 0.05")
    })
}

// --- criterion 8: end-to-end determinism --------------------------------------

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn run_stage(out: &Path, stage: &str, jobs: &str) -> Result<(), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_parkhealth"))
        .current_dir(manifest())
        .args(["--config", "tests/fixtures/mini.toml", "--jobs", jobs, "--out"])
        .arg(out)
        .arg(stage)
        .output()
        .map_err(|e| format!("spawning the binary: {e}"))?;
    check(output.status.success(), || {
        format!("{stage} failed: {}", String::from_utf8_lossy(&output.stderr))
    })
}

fn walk(root: &Path, prefix: &Path, files: &mut Vec<PathBuf>) {
    for entry in fs::read_dir(root.join(prefix)).expect("readable directory") {
        let entry = entry.unwrap();
        let rel = prefix.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            walk(root, &rel, files);
        } else {
            files.push(rel);
        }
    }
}

fn tree_digest(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    walk(root, Path::new(""), &mut files);
    files.sort();
    files
        .into_iter()
        .map(|rel| {
            let bytes = fs::read(root.join(&rel)).expect("readable file");
            (rel, bytes)
        })
        .collect()
}

fn criterion_determinism() -> Result<(), String> {
    let started = Instant::now();
    let dirs: Vec<tempfile::TempDir> =
        (0..3).map(|_| tempfile::tempdir().expect("tempdir")).collect();
    for (dir, jobs) in dirs.iter().zip(["1", "1", "4"]) {
        for stage in ["ingest", "score", "equity", "export"] {
            run_stage(dir.path(), stage, jobs)?;
        }
    }
    let first = tree_digest(dirs[0].path());
    check(!first.is_empty(), || "pipeline produced no files".to_string())?;
    for (dir, label) in dirs[1..].iter().zip(["second run", "--jobs 4"]) {
        let other = tree_digest(dir.path());
        check(
            first.len() == other.len()
                && first.iter().zip(&other).all(|(a, b)| a == b),
            || format!("{label} produced different bytes"),
        )?;
    }
    let elapsed = started.elapsed();
    check(elapsed.as_secs() < 10, || format!("three pipeline runs took {elapsed:?}"))
}

// --- criterion 9: lexicon conservation ----------------------------------------

fn criterion_lexicon() -> Result<(), String> {
    let lexicon = parkhealth::config::builtin_lexicon();
    let stoplists = parkhealth::config::builtin_stoplists();

    let raw = parkhealth::xml::parse_file(&manifest().join("tests/fixtures/mini_city.osm"))
        .map_err(|e| e.to_string())?;
    let store =
        ObjectStore::from_raw(raw.nodes, raw.ways, raw.relations).map_err(|e| e.to_string())?;
    let mut matched = 0usize;
    for object in store.objects() {
        let weights = categorize(&clean_tags(object.tags(), &stoplists), &lexicon);
        let sum = weights.sum();
        if sum > 0.0 {
            matched += 1;
            check((sum - 1.0).abs() < 1e-12, || {
                format!("{}: category weights sum to {sum}", object.stable_id())
            })?;
        }
    }
    check(matched > 50, || format!("only {matched} fixture objects matched the lexicon"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0_9);
    let keys = ["amenity", "natural", "name", "material", "source", "leisure", "x"];
    let values = ["bench", "tree", "yes", "unknown", "park", "Bing", "v"];
    for _ in 0..10_000 {
        let tags: Vec<Tag> = (0..rng.random_range(0..8))
            .map(|_| {
                Tag::new(
                    keys[rng.random_range(0..keys.len())],
                    values[rng.random_range(0..values.len())],
                )
            })
            .collect();
        let once = clean_tags(&tags, &stoplists);
        let twice = clean_tags(&once, &stoplists);
        check(once == twice, || format!("clean_tags not idempotent on {tags:?}"))?;
    }
    Ok(())
}

// --- harness -------------------------------------------------------------------

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Result<(), String>); 9] = [
        ("geometry oracles", criterion_geometry),
        ("regression correctness", criterion_regression),
        ("score normalization", criterion_normalization),
        ("disparity correctness", criterion_disparity),
        ("quartile gradient", criterion_quartiles),
        ("weighted F1 reduction", criterion_weighted_f1),
        ("percentile metric", criterion_percentile),
        ("end-to-end determinism", criterion_determinism),
        ("lexicon conservation", criterion_lexicon),
    ];
    let mut failures = Vec::new();
    for (number, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_string());
            Err(msg)
        });
        match result {
            Ok(()) => println!("criterion {} ({name}): PASS", number + 1),
            Err(reason) => {
                println!("criterion {} ({name}): FAIL: {reason}", number + 1);
                failures.push(number + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed acceptance criteria: {failures:?}");
}
