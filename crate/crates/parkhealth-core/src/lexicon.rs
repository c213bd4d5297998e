//! Activity categories, the tag lexicon and tag cleaning.
//!
//! Facility tags map into five activity categories. Categorisation is
//! fractional: an object matching k distinct categories contributes 1/k to
//! each, so every categorised object has total weight exactly one.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::osm::{ParkRecord, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActivityCategory {
    Physical,
    NatureAppreciation,
    Environmental,
    Social,
    Cultural,
}

impl ActivityCategory {
    pub const ALL: [ActivityCategory; 5] = [
        ActivityCategory::Physical,
        ActivityCategory::NatureAppreciation,
        ActivityCategory::Environmental,
        ActivityCategory::Social,
        ActivityCategory::Cultural,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ActivityCategory::Physical => "physical",
            ActivityCategory::NatureAppreciation => "nature",
            ActivityCategory::Environmental => "environmental",
            ActivityCategory::Social => "social",
            ActivityCategory::Cultural => "cultural",
        }
    }

    pub fn parse(s: &str) -> Option<ActivityCategory> {
        let s = s.trim();
        ActivityCategory::ALL
            .into_iter()
            .find(|c| s.eq_ignore_ascii_case(c.label()))
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ActivityCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One value per activity category, indexed by [`ActivityCategory`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CategoryVector(pub [f64; 5]);

impl CategoryVector {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActivityCategory, f64)> + '_ {
        ActivityCategory::ALL.into_iter().map(|c| (c, self[c]))
    }

    pub fn add(&mut self, other: &CategoryVector) {
        for c in ActivityCategory::ALL {
            self[c] += other[c];
        }
    }
}

impl Index<ActivityCategory> for CategoryVector {
    type Output = f64;

    fn index(&self, c: ActivityCategory) -> &f64 {
        &self.0[c.index()]
    }
}

impl IndexMut<ActivityCategory> for CategoryVector {
    fn index_mut(&mut self, c: ActivityCategory) -> &mut f64 {
        &mut self.0[c.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub key: String,
    pub value: String,
    pub category: ActivityCategory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconError {
    DuplicateEntry {
        key: String,
        value: String,
        category: ActivityCategory,
    },
}

impl fmt::Display for LexiconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconError::DuplicateEntry { key, value, category } => {
                write!(f, "duplicate lexicon entry {key}={value} -> {category}")
            }
        }
    }
}

impl core::error::Error for LexiconError {}

/// Maps exact (key, value) tag pairs to the categories they indicate. A
/// pair may map to several categories, but each (pair, category) entry
/// must be unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    map: BTreeMap<String, BTreeMap<String, Vec<ActivityCategory>>>,
    entries: usize,
}

impl Lexicon {
    pub fn from_entries(
        entries: impl IntoIterator<Item = LexiconEntry>,
    ) -> Result<Lexicon, LexiconError> {
        let mut lexicon = Lexicon::default();
        for e in entries {
            let cats = lexicon
                .map
                .entry(e.key.clone())
                .or_default()
                .entry(e.value.clone())
                .or_default();
            if cats.contains(&e.category) {
                return Err(LexiconError::DuplicateEntry {
                    key: e.key,
                    value: e.value,
                    category: e.category,
                });
            }
            cats.push(e.category);
            cats.sort_unstable();
            lexicon.entries += 1;
        }
        Ok(lexicon)
    }

    pub fn categories(&self, key: &str, value: &str) -> &[ActivityCategory] {
        self.map
            .get(key)
            .and_then(|values| values.get(value))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn entry_count(&self) -> usize {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    /// Entries in (key, value, category) order, for reports.
    pub fn entries(&self) -> impl Iterator<Item = LexiconEntry> + '_ {
        self.map.iter().flat_map(|(k, values)| {
            values.iter().flat_map(move |(v, cats)| {
                cats.iter().map(move |&category| LexiconEntry {
                    key: k.clone(),
                    value: v.clone(),
                    category,
                })
            })
        })
    }
}

/// Stoplists applied before categorisation: whole keys (meta keys such as
/// editor bookkeeping) and whole values (non-descriptive values such as
/// `yes`) that never describe a facility.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplists {
    dropped_keys: BTreeSet<String>,
    dropped_values: BTreeSet<String>,
}

impl Stoplists {
    pub fn new(
        dropped_keys: impl IntoIterator<Item = String>,
        dropped_values: impl IntoIterator<Item = String>,
    ) -> Self {
        Stoplists {
            dropped_keys: dropped_keys.into_iter().collect(),
            dropped_values: dropped_values.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Stoplists::default()
    }

    pub fn drops(&self, tag: &Tag) -> bool {
        self.dropped_keys.contains(&tag.key) || self.dropped_values.contains(&tag.value)
    }

    pub fn dropped_keys(&self) -> impl Iterator<Item = &str> {
        self.dropped_keys.iter().map(String::as_str)
    }

    pub fn dropped_values(&self) -> impl Iterator<Item = &str> {
        self.dropped_values.iter().map(String::as_str)
    }
}

/// Removes stoplisted tags, preserving the original order.
pub fn clean_tags(tags: &[Tag], stoplists: &Stoplists) -> Vec<Tag> {
    tags.iter()
        .filter(|t| !stoplists.drops(t))
        .cloned()
        .collect()
}

/// Fractional categorisation: the distinct categories matched by any tag
/// split one unit of weight evenly. No match yields the zero vector.
pub fn categorize(tags: &[Tag], lexicon: &Lexicon) -> CategoryVector {
    let mut matched = [false; 5];
    for tag in tags {
        for c in lexicon.categories(&tag.key, &tag.value) {
            matched[c.index()] = true;
        }
    }
    let k = matched.iter().filter(|&&m| m).count();
    let mut weights = CategoryVector::default();
    if k == 0 {
        return weights;
    }
    let share = 1.0 / k as f64;
    for c in ActivityCategory::ALL {
        if matched[c.index()] {
            weights[c] = share;
        }
    }
    weights
}

/// Per-category facility counts of one park: categorised element counts
/// and categorised space overlap in hectares.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FacilityCounts {
    pub elements: CategoryVector,
    pub space_ha: CategoryVector,
}

/// Cleans and categorises every collected facility of a park. Elements
/// contribute their category weights directly; spaces contribute weights
/// scaled by the overlap area in hectares.
pub fn count_facilities(
    park: &ParkRecord,
    lexicon: &Lexicon,
    stoplists: &Stoplists,
) -> FacilityCounts {
    let mut counts = FacilityCounts::default();
    for element in &park.elements {
        let weights = categorize(&clean_tags(element.tags(), stoplists), lexicon);
        counts.elements.add(&weights);
    }
    for (space, overlap_ha) in &park.spaces {
        let weights = categorize(&clean_tags(space.tags(), stoplists), lexicon);
        for (c, w) in weights.iter() {
            counts.space_ha[c] += w * overlap_ha;
        }
    }
    counts
}
