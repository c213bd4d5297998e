//! Per-city facility regressions and park health scores.
//!
//! For every (category, kind) pair a city gets one least-squares fit of
//! log2(count) against log2(area in hectares), computed over the parks at
//! or above the count threshold for that kind. A park's residual against
//! the fit says how it compares to a same-sized average park; residuals
//! are combined across kinds and categories via population z-scores.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lexicon::{ActivityCategory, FacilityCounts};
use crate::stats;

/// Area used when quoting "what would an average park have" predictions.
pub const DEFAULT_AVERAGE_PARK_HA: f64 = 8.0;

/// The two facility kinds fitted separately per category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FitKind {
    Elements,
    Spaces,
}

impl FitKind {
    pub const BOTH: [FitKind; 2] = [FitKind::Elements, FitKind::Spaces];

    pub fn label(self) -> &'static str {
        match self {
            FitKind::Elements => "elements",
            FitKind::Spaces => "spaces",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Minimum counts for a park to enter the regression of a kind. Parks
/// below the threshold are scored against the fit at half the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub min_elements: f64,
    pub min_space_ha: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { min_elements: 2.0, min_space_ha: 0.05 }
    }
}

impl Thresholds {
    pub fn min_count(&self, kind: FitKind) -> f64 {
        match kind {
            FitKind::Elements => self.min_elements,
            FitKind::Spaces => self.min_space_ha,
        }
    }

    /// Substitute count for parks below the threshold.
    pub fn floor(&self, kind: FitKind) -> f64 {
        self.min_count(kind) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub category: ActivityCategory,
    pub kind: FitKind,
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    /// Parks at or above the threshold that entered the fit.
    pub n_included: usize,
}

/// The up-to-ten fits of one city. A missing fit means fewer than two
/// parks reached the threshold for that (category, kind).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CityFits {
    fits: [[Option<RegressionFit>; 2]; 5],
}

impl CityFits {
    pub fn get(&self, category: ActivityCategory, kind: FitKind) -> Option<&RegressionFit> {
        self.fits[category.index()][kind.index()].as_ref()
    }

    /// Present fits in (category, kind) order.
    pub fn iter(&self) -> impl Iterator<Item = &RegressionFit> {
        self.fits.iter().flatten().filter_map(Option::as_ref)
    }
}

/// Input row for the scoring stage: one park with categorised counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ParkCounts {
    pub park_id: String,
    pub name: Option<String>,
    pub area_ha: f64,
    pub counts: FacilityCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoringError {
    /// Regressions need at least two parks.
    InsufficientData { parks: usize },
}

impl fmt::Display for ScoringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoringError::InsufficientData { parks } => {
                write!(f, "need at least 2 parks to fit city models, have {parks}")
            }
        }
    }
}

impl core::error::Error for ScoringError {}

fn count_of(counts: &FacilityCounts, category: ActivityCategory, kind: FitKind) -> f64 {
    match kind {
        FitKind::Elements => counts.elements[category],
        FitKind::Spaces => counts.space_ha[category],
    }
}

/// Fits the per-(category, kind) regressions of one city over the parks
/// meeting the count threshold. Pairs where fewer than two parks qualify,
/// or where the qualifying parks share one area, stay unfitted.
pub fn fit_city_models(
    parks: &[ParkCounts],
    thresholds: &Thresholds,
) -> Result<CityFits, ScoringError> {
    if parks.len() < 2 {
        return Err(ScoringError::InsufficientData { parks: parks.len() });
    }
    let mut fits = CityFits::default();
    for category in ActivityCategory::ALL {
        for kind in FitKind::BOTH {
            let min_count = thresholds.min_count(kind);
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for park in parks {
                let count = count_of(&park.counts, category, kind);
                if count >= min_count && park.area_ha > 0.0 {
                    xs.push(libm::log2(park.area_ha));
                    ys.push(libm::log2(count));
                }
            }
            fits.fits[category.index()][kind.index()] =
                stats::least_squares(&xs, &ys).map(|fit| RegressionFit {
                    category,
                    kind,
                    intercept: fit.intercept,
                    slope: fit.slope,
                    r_squared: fit.r_squared,
                    n_included: xs.len(),
                });
        }
    }
    Ok(fits)
}

/// Residual of one park against a fit: log2(count) minus the prediction
/// for the park's area. Counts below the threshold are replaced by half
/// the threshold so missing facilities still read as a deficit.
pub fn residual(count: f64, area_ha: f64, fit: &RegressionFit, thresholds: &Thresholds) -> f64 {
    let counted = if count >= thresholds.min_count(fit.kind) {
        count
    } else {
        thresholds.floor(fit.kind)
    };
    libm::log2(counted) - (fit.intercept + fit.slope * libm::log2(area_ha))
}

/// Expected raw count for an average park of the given area.
pub fn predict_average_park(fit: &RegressionFit, area_ha: f64) -> f64 {
    libm::exp2(fit.intercept + fit.slope * libm::log2(area_ha))
}

/// Scores of one park in one category.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CategoryScore {
    pub residual_elements: Option<f64>,
    pub residual_spaces: Option<f64>,
    /// Mean of the z-scored residuals of the kinds that have a fit; 0.0
    /// (the neutral score) when the city has no fit for either kind.
    pub combined: f64,
    pub sparse_elements: bool,
    pub sparse_spaces: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParkHealthScore {
    pub park_id: String,
    pub per_category: [CategoryScore; 5],
    /// Unweighted mean of the five combined category scores.
    pub overall: f64,
}

/// Scores every park against the city fits. Residuals are z-scored over
/// the whole park population per (category, kind); a category's combined
/// score is the mean of the available kind z-scores.
pub fn combine_scores(
    parks: &[ParkCounts],
    fits: &CityFits,
    thresholds: &Thresholds,
) -> Vec<ParkHealthScore> {
    let mut scores: Vec<ParkHealthScore> = parks
        .iter()
        .map(|p| ParkHealthScore {
            park_id: p.park_id.clone(),
            per_category: [CategoryScore::default(); 5],
            overall: 0.0,
        })
        .collect();

    for category in ActivityCategory::ALL {
        let mut kind_z: [Option<(Vec<f64>, Vec<f64>)>; 2] = [None, None];
        for kind in FitKind::BOTH {
            if let Some(fit) = fits.get(category, kind) {
                let residuals: Vec<f64> = parks
                    .iter()
                    .map(|p| residual(count_of(&p.counts, category, kind), p.area_ha, fit, thresholds))
                    .collect();
                let z = stats::zscores(&residuals);
                kind_z[kind.index()] = Some((residuals, z));
            }
        }
        for (i, park) in parks.iter().enumerate() {
            let slot = &mut scores[i].per_category[category.index()];
            let mut z_sum = 0.0;
            let mut z_n = 0;
            if let Some((res, z)) = &kind_z[FitKind::Elements.index()] {
                slot.residual_elements = Some(res[i]);
                z_sum += z[i];
                z_n += 1;
            }
            if let Some((res, z)) = &kind_z[FitKind::Spaces.index()] {
                slot.residual_spaces = Some(res[i]);
                z_sum += z[i];
                z_n += 1;
            }
            slot.combined = if z_n == 0 { 0.0 } else { z_sum / z_n as f64 };
            slot.sparse_elements =
                count_of(&park.counts, category, FitKind::Elements)
                    < thresholds.min_count(FitKind::Elements);
            slot.sparse_spaces =
                count_of(&park.counts, category, FitKind::Spaces)
                    < thresholds.min_count(FitKind::Spaces);
        }
    }

    for score in &mut scores {
        score.overall = score.per_category.iter().map(|c| c.combined).sum::<f64>() / 5.0;
    }
    scores
}

/// Pearson correlation between element and space residuals per category,
/// over all parks. `None` where either fit is missing or a residual
/// vector is constant.
pub fn residual_orthogonality(
    parks: &[ParkCounts],
    fits: &CityFits,
    thresholds: &Thresholds,
) -> [Option<f64>; 5] {
    let mut out = [None; 5];
    for category in ActivityCategory::ALL {
        let (Some(fe), Some(fs)) = (
            fits.get(category, FitKind::Elements),
            fits.get(category, FitKind::Spaces),
        ) else {
            continue;
        };
        let re: Vec<f64> = parks
            .iter()
            .map(|p| residual(count_of(&p.counts, category, FitKind::Elements), p.area_ha, fe, thresholds))
            .collect();
        let rs: Vec<f64> = parks
            .iter()
            .map(|p| residual(count_of(&p.counts, category, FitKind::Spaces), p.area_ha, fs, thresholds))
            .collect();
        out[category.index()] = stats::pearson(&re, &rs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::CategoryVector;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn park(id: &str, area_ha: f64, elements: [f64; 5], space_ha: [f64; 5]) -> ParkCounts {
        ParkCounts {
            park_id: id.to_string(),
            name: None,
            area_ha,
            counts: FacilityCounts {
                elements: CategoryVector(elements),
                space_ha: CategoryVector(space_ha),
            },
        }
    }

    // count = 4 * area across all categories and kinds; areas 1, 2, 4, ...
    // so every count clears both thresholds.
    fn proportional_city(n: usize) -> Vec<ParkCounts> {
        (0..n)
            .map(|i| {
                let area = libm::exp2(i as f64);
                let c = 4.0 * area;
                park(&format!("way/{i}"), area, [c; 5], [c; 5])
            })
            .collect()
    }

    #[test]
    fn proportional_city_fits_exactly() {
        let parks = proportional_city(6);
        let fits = fit_city_models(&parks, &Thresholds::default()).unwrap();
        let th = Thresholds::default();
        for category in ActivityCategory::ALL {
            for kind in FitKind::BOTH {
                let fit = fits.get(category, kind).unwrap();
                assert_abs_diff_eq!(fit.slope, 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(fit.intercept, 2.0, epsilon = 1e-12);
                assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
                // Residuals of included parks sum to zero by construction.
                let sum: f64 = parks
                    .iter()
                    .filter(|p| count_of(&p.counts, category, kind) >= th.min_count(kind))
                    .map(|p| {
                        residual(count_of(&p.counts, category, kind), p.area_ha, fit, &th)
                    })
                    .sum();
                assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-9);
                assert_abs_diff_eq!(
                    predict_average_park(fit, 8.0),
                    32.0,
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn threshold_excludes_sparse_parks_from_fit() {
        let th = Thresholds::default();
        let mut parks = proportional_city(4);
        // One park with a single element everywhere: below min_elements.
        parks.push(park("way/99", 2.0, [1.0; 5], [4.0; 5]));
        let fits = fit_city_models(&parks, &th).unwrap();
        let fit = fits.get(ActivityCategory::Physical, FitKind::Elements).unwrap();
        assert_eq!(fit.n_included, 4);
        // The fit itself is unchanged by the sparse park.
        assert_abs_diff_eq!(fit.slope, 1.0, epsilon = 1e-12);

        // The sparse park is scored at the floor of one element.
        let r = residual(1.0, 2.0, fit, &th);
        assert_abs_diff_eq!(r, libm::log2(1.0) - (2.0 + 1.0), epsilon = 1e-12);
        let score = &combine_scores(&parks, &fits, &th)[4];
        assert!(score.per_category[0].sparse_elements);
        assert!(!score.per_category[0].sparse_spaces);
    }

    #[test]
    fn too_few_parks_is_an_error() {
        let parks = proportional_city(1);
        assert_eq!(
            fit_city_models(&parks, &Thresholds::default()).unwrap_err(),
            ScoringError::InsufficientData { parks: 1 }
        );
    }

    #[test]
    fn unfitted_pairs_stay_none() {
        // Spaces all zero: no space fit anywhere.
        let parks = vec![
            park("way/1", 1.0, [4.0; 5], [0.0; 5]),
            park("way/2", 2.0, [8.0; 5], [0.0; 5]),
            park("way/3", 4.0, [16.0; 5], [0.0; 5]),
        ];
        let fits = fit_city_models(&parks, &Thresholds::default()).unwrap();
        for category in ActivityCategory::ALL {
            assert!(fits.get(category, FitKind::Elements).is_some());
            assert!(fits.get(category, FitKind::Spaces).is_none());
        }
        assert_eq!(fits.iter().count(), 5);
    }

    #[test]
    fn single_kind_fallback_uses_available_z() {
        let parks = vec![
            park("way/1", 1.0, [4.0; 5], [0.0; 5]),
            park("way/2", 2.0, [16.0; 5], [0.0; 5]),
            park("way/3", 4.0, [16.0; 5], [0.0; 5]),
        ];
        let th = Thresholds::default();
        let fits = fit_city_models(&parks, &th).unwrap();
        let scores = combine_scores(&parks, &fits, &th);
        for s in &scores {
            for c in &s.per_category {
                assert!(c.residual_spaces.is_none());
                assert!(c.residual_elements.is_some());
            }
        }
        // Combined equals the element z-score alone; z-scores have mean 0.
        let mean: f64 =
            scores.iter().map(|s| s.per_category[0].combined).sum::<f64>() / 3.0;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
        assert!(scores.iter().any(|s| s.per_category[0].combined != 0.0));
    }

    #[test]
    fn no_fits_at_all_scores_neutral() {
        // All counts below both thresholds: ten unfitted pairs.
        let parks = vec![
            park("way/1", 1.0, [1.0; 5], [0.01; 5]),
            park("way/2", 2.0, [1.0; 5], [0.02; 5]),
        ];
        let th = Thresholds::default();
        let fits = fit_city_models(&parks, &th).unwrap();
        assert_eq!(fits.iter().count(), 0);
        let scores = combine_scores(&parks, &fits, &th);
        for s in &scores {
            assert_eq!(s.overall, 0.0);
            for c in &s.per_category {
                assert_eq!(c.combined, 0.0);
                assert!(c.sparse_elements && c.sparse_spaces);
            }
        }
    }

    #[test]
    fn overall_is_category_mean() {
        let mut parks = proportional_city(5);
        // Perturb one category of one park.
        parks[0].counts.elements[ActivityCategory::Cultural] *= 4.0;
        let th = Thresholds::default();
        let fits = fit_city_models(&parks, &th).unwrap();
        let scores = combine_scores(&parks, &fits, &th);
        for s in &scores {
            let mean: f64 = s.per_category.iter().map(|c| c.combined).sum::<f64>() / 5.0;
            assert_abs_diff_eq!(s.overall, mean, epsilon = 1e-12);
        }
        // Combined z-scores have population mean zero per category.
        for ci in 0..5 {
            let mean: f64 =
                scores.iter().map(|s| s.per_category[ci].combined).sum::<f64>()
                    / scores.len() as f64;
            assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn orthogonality_detects_shared_structure() {
        // Elements and spaces deviate identically: correlation 1.
        let mut parks = proportional_city(6);
        for (i, p) in parks.iter_mut().enumerate() {
            let bump = libm::exp2((i % 3) as f64 * 0.25);
            p.counts.elements[ActivityCategory::Physical] *= bump;
            p.counts.space_ha[ActivityCategory::Physical] *= bump;
        }
        let th = Thresholds::default();
        let fits = fit_city_models(&parks, &th).unwrap();
        let ortho = residual_orthogonality(&parks, &fits, &th);
        assert_abs_diff_eq!(ortho[0].unwrap(), 1.0, epsilon = 1e-9);
        // Undisturbed categories have constant (zero) residuals: None.
        assert!(ortho[1].is_none());
    }
}
