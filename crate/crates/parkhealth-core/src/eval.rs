//! Annotation evaluation: support-weighted F1 over the five activity
//! categories plus an explicit "none" class, and a reliability-weighted
//! variant that blends a model's main and secondary answers.
//!
//! The main answer is always a prediction; a main answer of "none" is a
//! prediction of the none class. A secondary answer of "none" is the
//! absence of a second opinion: it contributes nothing to the confusion
//! counts and nothing to the reliability means.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use core::fmt;

use crate::lexicon::ActivityCategory;

pub const CLASS_COUNT: usize = 6;
const NONE_CLASS: usize = 5;

fn class_index(category: Option<ActivityCategory>) -> usize {
    category.map_or(NONE_CLASS, ActivityCategory::index)
}

pub fn class_label(index: usize) -> &'static str {
    if index == NONE_CLASS {
        "none"
    } else {
        ActivityCategory::ALL[index].label()
    }
}

/// One gold-annotated tag pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldLabel {
    pub key: String,
    pub value: String,
    /// `None` means the gold answer is "no category".
    pub category: Option<ActivityCategory>,
}

/// One model answer for a tag pair: a main category with a reliability in
/// [0, 100], and an optional secondary category with its own reliability.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub key: String,
    pub value: String,
    pub main: Option<ActivityCategory>,
    pub main_reliability: f64,
    pub secondary: Option<ActivityCategory>,
    pub secondary_reliability: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    EmptyGold,
    MissingPrediction { key: String, value: String },
    DuplicatePrediction { key: String, value: String },
    DuplicateGold { key: String, value: String },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::EmptyGold => write!(f, "gold set is empty"),
            EvalError::MissingPrediction { key, value } => {
                write!(f, "no prediction for gold pair {key}={value}")
            }
            EvalError::DuplicatePrediction { key, value } => {
                write!(f, "duplicate prediction for {key}={value}")
            }
            EvalError::DuplicateGold { key, value } => {
                write!(f, "duplicate gold pair {key}={value}")
            }
        }
    }
}

impl core::error::Error for EvalError {}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Blend weight of the main answer for one class: the mean main
/// reliability over the mean main plus mean secondary reliability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityRatio {
    pub ratio: f64,
    /// Set when neither answer carried any reliability for the class; the
    /// ratio then defaults to 1 (trust the main answer).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_class: [ClassMetrics; CLASS_COUNT],
    /// Support-weighted aggregates over all six classes.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Per-class blend weights; only present for the weighted variant.
    pub reliability: Option<[ReliabilityRatio; CLASS_COUNT]>,
}

/// F1 of the main answers alone.
pub fn f1_main(gold: &[GoldLabel], annotations: &[Annotation]) -> Result<EvalReport, EvalError> {
    score(gold, annotations, None)
}

/// Reliability-weighted F1. Secondary answers with a reliability below
/// `threshold` (a fraction of the 0-100 scale) are discarded; a threshold
/// of 1.0 or more discards every secondary answer, which makes the result
/// identical to [`f1_main`].
pub fn f1_weighted(
    gold: &[GoldLabel],
    annotations: &[Annotation],
    threshold: f64,
) -> Result<EvalReport, EvalError> {
    score(gold, annotations, Some(threshold))
}

fn effective_secondary(a: &Annotation, threshold: f64) -> Option<ActivityCategory> {
    let s = a.secondary?;
    if threshold >= 1.0 || a.secondary_reliability < threshold * 100.0 {
        None
    } else {
        Some(s)
    }
}

fn score(
    gold: &[GoldLabel],
    annotations: &[Annotation],
    threshold: Option<f64>,
) -> Result<EvalReport, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let mut index: BTreeMap<(&str, &str), &Annotation> = BTreeMap::new();
    for a in annotations {
        if index.insert((&a.key, &a.value), a).is_some() {
            return Err(EvalError::DuplicatePrediction { key: a.key.clone(), value: a.value.clone() });
        }
    }
    let mut seen_gold = BTreeSet::new();

    let mut support = [0u64; CLASS_COUNT];
    let mut tp_main = [0.0f64; CLASS_COUNT];
    let mut fp_main = [0.0f64; CLASS_COUNT];
    let mut fn_main = [0.0f64; CLASS_COUNT];
    let mut tp_sec = [0.0f64; CLASS_COUNT];
    let mut fp_sec = [0.0f64; CLASS_COUNT];
    let mut fn_sec = [0.0f64; CLASS_COUNT];
    let mut rel_main_sum = [0.0f64; CLASS_COUNT];
    let mut rel_main_n = [0u64; CLASS_COUNT];
    let mut rel_sec_sum = [0.0f64; CLASS_COUNT];
    let mut rel_sec_n = [0u64; CLASS_COUNT];

    for g in gold {
        if !seen_gold.insert((g.key.as_str(), g.value.as_str())) {
            return Err(EvalError::DuplicateGold { key: g.key.clone(), value: g.value.clone() });
        }
        let Some(a) = index.get(&(g.key.as_str(), g.value.as_str())) else {
            return Err(EvalError::MissingPrediction { key: g.key.clone(), value: g.value.clone() });
        };
        let gi = class_index(g.category);
        support[gi] += 1;

        let mi = class_index(a.main);
        if mi == gi {
            tp_main[mi] += 1.0;
        } else {
            fp_main[mi] += 1.0;
            fn_main[gi] += 1.0;
        }
        rel_main_sum[mi] += a.main_reliability;
        rel_main_n[mi] += 1;

        if let Some(th) = threshold {
            match effective_secondary(a, th) {
                Some(s) => {
                    let si = s.index();
                    rel_sec_sum[si] += a.secondary_reliability;
                    rel_sec_n[si] += 1;
                    if si == gi {
                        tp_sec[si] += 1.0;
                    } else {
                        fp_sec[si] += 1.0;
                        fn_sec[gi] += 1.0;
                    }
                }
                // An absent second opinion misses the gold class.
                None => fn_sec[gi] += 1.0,
            }
        }
    }

    let reliability = threshold.map(|_| {
        let mut ratios = [ReliabilityRatio { ratio: 1.0, degenerate: true }; CLASS_COUNT];
        for (c, slot) in ratios.iter_mut().enumerate() {
            let main_mean = if rel_main_n[c] > 0 {
                rel_main_sum[c] / rel_main_n[c] as f64
            } else {
                0.0
            };
            let sec_mean = if rel_sec_n[c] > 0 {
                rel_sec_sum[c] / rel_sec_n[c] as f64
            } else {
                0.0
            };
            if main_mean + sec_mean > 0.0 {
                *slot = ReliabilityRatio {
                    ratio: main_mean / (main_mean + sec_mean),
                    degenerate: false,
                };
            }
        }
        ratios
    });

    let mut per_class = [ClassMetrics::default(); CLASS_COUNT];
    for c in 0..CLASS_COUNT {
        let (tp, fp, fnc) = match &reliability {
            Some(ratios) => {
                let r = ratios[c].ratio;
                (
                    tp_main[c] * r + tp_sec[c] * (1.0 - r),
                    fp_main[c] * r + fp_sec[c] * (1.0 - r),
                    fn_main[c] * r + fn_sec[c] * (1.0 - r),
                )
            }
            None => (tp_main[c], fp_main[c], fn_main[c]),
        };
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fnc > 0.0 { tp / (tp + fnc) } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class[c] = ClassMetrics { precision, recall, f1, support: support[c] };
    }

    let total: u64 = support.iter().sum();
    let weight = |metric: fn(&ClassMetrics) -> f64| {
        per_class
            .iter()
            .map(|m| metric(m) * m.support as f64)
            .sum::<f64>()
            / total as f64
    };
    Ok(EvalReport {
        per_class,
        precision: weight(|m| m.precision),
        recall: weight(|m| m.recall),
        f1: weight(|m| m.f1),
        reliability,
    })
}
