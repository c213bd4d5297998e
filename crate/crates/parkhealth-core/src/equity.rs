//! Distributional analyses over park scores: the disparity index,
//! distance quartiles and the score-distance correlation.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::stats::{self, Welch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquityError {
    /// Fewer values than the analysis can say anything about.
    InsufficientParks { have: usize, need: usize },
    /// The input admits no index (fewer than two values).
    DegenerateInput,
}

impl fmt::Display for EquityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquityError::InsufficientParks { have, need } => {
                write!(f, "need at least {need} parks, have {have}")
            }
            EquityError::DegenerateInput => write!(f, "need at least 2 values"),
        }
    }
}

impl core::error::Error for EquityError {}

/// Disparity index of a score vector: min-max normalise, then take the
/// Gini coefficient of the normalised values. 0 means all parks score the
/// same; values near 1 mean the quality concentrates in few parks. A
/// constant vector has disparity 0 by convention.
pub fn disparity_index(scores: &[f64]) -> Result<f64, EquityError> {
    if scores.len() < 2 {
        return Err(EquityError::DegenerateInput);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &s in scores {
        min = min.min(s);
        max = max.max(s);
    }
    if !(max > min) {
        return Ok(0.0);
    }
    let span = max - min;
    let mut xs: Vec<f64> = scores.iter().map(|&s| (s - min) / span).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mut acc = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        acc += (2.0 * (i as f64 + 1.0) - n - 1.0) * x;
    }
    Ok(acc / (n * n * mean))
}

/// One park's distance to a reference point, with its overall score.
#[derive(Debug, Clone, PartialEq)]
pub struct ParkDistance {
    pub park_id: String,
    pub distance_m: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuartileReport {
    /// Group sizes, nearest quartile first. Sizes differ by at most one;
    /// remainders go to the nearer groups.
    pub sizes: [usize; 4],
    pub mean_scores: [f64; 4],
    /// Welch t-tests between adjacent quartiles: (q1, q2), (q2, q3), (q3, q4).
    pub welch: [Welch; 3],
}

/// Splits parks into four near-equal groups by distance (ascending, ties
/// broken by park id) and compares adjacent groups' scores.
pub fn quartile_analysis(parks: &[ParkDistance]) -> Result<QuartileReport, EquityError> {
    if parks.len() < 8 {
        return Err(EquityError::InsufficientParks { have: parks.len(), need: 8 });
    }
    let mut order: Vec<&ParkDistance> = parks.iter().collect();
    order.sort_by(|a, b| {
        a.distance_m
            .total_cmp(&b.distance_m)
            .then_with(|| a.park_id.cmp(&b.park_id))
    });

    let n = order.len();
    let base = n / 4;
    let rem = n % 4;
    let mut sizes = [0usize; 4];
    for (i, size) in sizes.iter_mut().enumerate() {
        *size = base + usize::from(i < rem);
    }

    let mut groups: [Vec<f64>; 4] = Default::default();
    let mut cursor = 0;
    for (i, size) in sizes.iter().enumerate() {
        groups[i] = order[cursor..cursor + size].iter().map(|p| p.score).collect();
        cursor += size;
    }

    let mut mean_scores = [0.0; 4];
    for (i, g) in groups.iter().enumerate() {
        mean_scores[i] = g.iter().sum::<f64>() / g.len() as f64;
    }
    let welch = [
        stats::welch_t(&groups[0], &groups[1]).expect("groups have >= 2 members"),
        stats::welch_t(&groups[1], &groups[2]).expect("groups have >= 2 members"),
        stats::welch_t(&groups[2], &groups[3]).expect("groups have >= 2 members"),
    ];
    Ok(QuartileReport { sizes, mean_scores, welch })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceCorrelation {
    pub pcc: f64,
    /// Set when either variable was constant; `pcc` is then 0 by fiat.
    pub degenerate: bool,
}

/// Pearson correlation between scores and log2 distance. Distances are
/// clamped to one metre so parks containing the reference point do not
/// blow up the logarithm.
pub fn distance_correlation(parks: &[ParkDistance]) -> Result<DistanceCorrelation, EquityError> {
    if parks.len() < 3 {
        return Err(EquityError::InsufficientParks { have: parks.len(), need: 3 });
    }
    let log_d: Vec<f64> = parks
        .iter()
        .map(|p| libm::log2(p.distance_m.max(1.0)))
        .collect();
    let scores: Vec<f64> = parks.iter().map(|p| p.score).collect();
    Ok(match stats::pearson(&log_d, &scores) {
        Some(pcc) => DistanceCorrelation { pcc, degenerate: false },
        None => DistanceCorrelation { pcc: 0.0, degenerate: true },
    })
}
