//! External validation: scoring independent per-park label counts with
//! the same regression machinery, correlating them with the map-derived
//! scores, and ranking named parks.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lexicon::{ActivityCategory, CategoryVector, FacilityCounts};
use crate::scoring::{
    combine_scores, fit_city_models, ParkCounts, ParkHealthScore, ScoringError, Thresholds,
};
use crate::stats;

/// Per-park label counts from an external source (image labels). Counts
/// play the role of elements; there is no space analogue.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalCounts {
    pub park_id: String,
    pub total_images: u64,
    pub labels: CategoryVector,
}

/// Category scores of one park derived from external counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalScore {
    pub park_id: String,
    pub total_images: u64,
    pub per_category: [f64; 5],
}

/// Scores external label counts with the same fit-and-z machinery used
/// for map counts. `areas` maps park ids to areas in hectares; counts
/// without a known area are skipped.
pub fn score_external(
    areas: &BTreeMap<String, f64>,
    counts: &[ExternalCounts],
    thresholds: &Thresholds,
) -> Result<Vec<ExternalScore>, ScoringError> {
    let mut rows: Vec<(&ExternalCounts, ParkCounts)> = counts
        .iter()
        .filter_map(|c| {
            let area_ha = *areas.get(&c.park_id)?;
            Some((
                c,
                ParkCounts {
                    park_id: c.park_id.clone(),
                    name: None,
                    area_ha,
                    counts: FacilityCounts {
                        elements: c.labels,
                        space_ha: CategoryVector::default(),
                    },
                },
            ))
        })
        .collect();
    rows.sort_by(|a, b| a.1.park_id.cmp(&b.1.park_id));
    let parks: Vec<ParkCounts> = rows.iter().map(|(_, p)| p.clone()).collect();
    let fits = fit_city_models(&parks, thresholds)?;
    let scores = combine_scores(&parks, &fits, thresholds);
    Ok(rows
        .iter()
        .zip(scores)
        .map(|((c, _), s)| ExternalScore {
            park_id: c.park_id.clone(),
            total_images: c.total_images,
            per_category: core::array::from_fn(|i| s.per_category[i].combined),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationError {
    /// Too few parks survive the joins and filters for a correlation.
    CitySkipped { have: usize, need: usize },
    /// No input rows at all.
    EmptyInput,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::CitySkipped { have, need } => {
                write!(f, "city skipped: {have} comparable parks, need {need}")
            }
            ValidationError::EmptyInput => write!(f, "no input rows"),
        }
    }
}

impl core::error::Error for ValidationError {}

pub const MIN_IMAGES: u64 = 250;
pub const MIN_COMPARABLE_PARKS: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    /// Parks that entered the correlations.
    pub n_parks: usize,
    /// Per-category Pearson correlation; `None` where a side is constant.
    pub pcc: [Option<f64>; 5],
    /// Mean over the defined per-category correlations, 0 if none.
    pub mean_pcc: f64,
}

/// Correlates map-derived category scores with external category scores
/// over the parks present on both sides with at least `min_images`.
pub fn correlate(
    map_scores: &[ParkHealthScore],
    external: &[ExternalScore],
    min_images: u64,
    min_parks: usize,
) -> Result<CorrelationReport, ValidationError> {
    let by_id: BTreeMap<&str, &ParkHealthScore> =
        map_scores.iter().map(|s| (s.park_id.as_str(), s)).collect();
    let mut pairs: Vec<(&ParkHealthScore, &ExternalScore)> = external
        .iter()
        .filter(|e| e.total_images >= min_images)
        .filter_map(|e| by_id.get(e.park_id.as_str()).map(|m| (*m, e)))
        .collect();
    pairs.sort_by(|a, b| a.1.park_id.cmp(&b.1.park_id));

    if pairs.len() < min_parks {
        return Err(ValidationError::CitySkipped { have: pairs.len(), need: min_parks });
    }

    let mut pcc = [None; 5];
    for category in ActivityCategory::ALL {
        let i = category.index();
        let xs: Vec<f64> = pairs.iter().map(|(m, _)| m.per_category[i].combined).collect();
        let ys: Vec<f64> = pairs.iter().map(|(_, e)| e.per_category[i]).collect();
        pcc[i] = stats::pearson(&xs, &ys);
    }
    let defined: Vec<f64> = pcc.iter().flatten().copied().collect();
    let mean_pcc = if defined.is_empty() {
        0.0
    } else {
        defined.iter().sum::<f64>() / defined.len() as f64
    };
    Ok(CorrelationReport { n_parks: pairs.len(), pcc, mean_pcc })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParkPercentile {
    pub name: String,
    /// Percentile of the best-scoring park with this name: 1 is the top
    /// of the ranking, 0 the bottom. Ties share their mean rank.
    pub percentile: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercentileReport {
    pub parks: Vec<ParkPercentile>,
    pub mean_percentile: f64,
    /// Names that matched no ranked park.
    pub unmatched: Vec<String>,
}

/// Looks up externally named parks (survey answers) in a scored ranking.
/// Matching is case-insensitive on the park name; when several ranked
/// parks share a name the best-scoring one is used. With a single ranked
/// park the percentile is 1 by convention.
pub fn percentile_ranking(
    names: &[String],
    ranking: &[(String, f64)],
) -> Result<PercentileReport, ValidationError> {
    if names.is_empty() || ranking.is_empty() {
        return Err(ValidationError::EmptyInput);
    }
    let n = ranking.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ranking[b].1.total_cmp(&ranking[a].1));

    // Fractional descending ranks: ties share the mean of their index run.
    let mut rank = alloc::vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && ranking[order[j + 1]].1 == ranking[order[i]].1 {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            rank[k] = shared;
        }
        i = j + 1;
    }
    let percentile_of = |idx: usize| {
        if n == 1 {
            1.0
        } else {
            1.0 - rank[idx] / (n - 1) as f64
        }
    };

    let mut parks = Vec::new();
    let mut unmatched = Vec::new();
    for name in names {
        let best = (0..n)
            .filter(|&i| ranking[i].0.eq_ignore_ascii_case(name))
            .map(percentile_of)
            .fold(None, |acc: Option<f64>, p| {
                Some(acc.map_or(p, |a| a.max(p)))
            });
        match best {
            Some(percentile) => {
                parks.push(ParkPercentile { name: name.clone(), percentile })
            }
            None => unmatched.push(name.clone()),
        }
    }
    if parks.is_empty() {
        return Err(ValidationError::EmptyInput);
    }
    let mean_percentile =
        parks.iter().map(|p| p.percentile).sum::<f64>() / parks.len() as f64;
    Ok(PercentileReport { parks, mean_percentile, unmatched })
}
