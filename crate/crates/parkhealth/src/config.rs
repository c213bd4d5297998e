//! City configuration. One TOML file describes every city of a study run;
//! the pipeline commands all take the same `--config` and derive their
//! inputs from it. Relative paths are resolved against the config file's
//! directory so a study directory can be moved as a unit.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use parkhealth_core::geometry::Point;
use parkhealth_core::lexicon::{Lexicon, Stoplists};
use parkhealth_core::osm::{ParkRules, Tag};
use parkhealth_core::scoring::Thresholds;

use crate::error::{CliError, Result};
use crate::formats;

/// Study-selection guidance for cities; configs that fall short only warn.
const MIN_POPULATION: u64 = 650_000;
const MIN_INTERNET_PCT: f64 = 80.0;
const MIN_TAGGED_FRACTION: f64 = 0.125;

const BUILTIN_LEXICON: &str = include_str!("../data/lexicon.csv");
const BUILTIN_DROPPED_KEYS: &str = include_str!("../data/dropped_keys.txt");
const BUILTIN_DROPPED_VALUES: &str = include_str!("../data/dropped_values.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractFormat {
    Xml,
    Pbf,
}

#[derive(Debug, Clone)]
pub struct CityConfig {
    pub name: String,
    pub extract: PathBuf,
    pub format: ExtractFormat,
    pub center: Point,
    pub rules: ParkRules,
    pub thresholds: Thresholds,
    pub external_counts: Option<PathBuf>,
    pub survey: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub label_map: Option<PathBuf>,
    pub population: Option<u64>,
    pub internet_access_pct: Option<f64>,
    pub tagged_fraction: Option<f64>,
}

#[derive(Debug)]
pub struct Config {
    pub cities: Vec<CityConfig>,
    pub lexicon: Lexicon,
    pub stoplists: Stoplists,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    lexicon: Option<String>,
    dropped_keys: Option<String>,
    dropped_values: Option<String>,
    cities: BTreeMap<String, RawCity>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCity {
    extract: String,
    center: [f64; 2],
    format: Option<String>,
    park_tags: Option<Vec<String>>,
    min_elements: Option<f64>,
    min_space_ha: Option<f64>,
    external_counts: Option<String>,
    survey: Option<String>,
    gold: Option<String>,
    predictions: Option<String>,
    label_map: Option<String>,
    population: Option<u64>,
    internet_access_pct: Option<f64>,
    tagged_fraction: Option<f64>,
}

/// Loads and validates a config file. The second return value carries
/// study-criteria warnings; they are advisory and never fail the load.
pub fn load(path: &Path) -> Result<(Config, Vec<String>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if raw.cities.is_empty() {
        return Err(CliError::config(format!("{}: no cities defined", path.display())));
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let lexicon = match &raw.lexicon {
        Some(rel) => {
            let entries = formats::parse_lexicon(&base.join(rel))?;
            Lexicon::from_entries(entries)
                .map_err(|e| CliError::config(format!("{rel}: {e}")))?
        }
        None => builtin_lexicon(),
    };
    let dropped_keys = match &raw.dropped_keys {
        Some(rel) => formats::parse_stoplist(&base.join(rel))?,
        None => formats::parse_stoplist_str(BUILTIN_DROPPED_KEYS),
    };
    let dropped_values = match &raw.dropped_values {
        Some(rel) => formats::parse_stoplist(&base.join(rel))?,
        None => formats::parse_stoplist_str(BUILTIN_DROPPED_VALUES),
    };
    let stoplists = Stoplists::new(dropped_keys, dropped_values);

    let mut cities = Vec::new();
    let mut warnings = Vec::new();
    for (name, raw_city) in &raw.cities {
        cities.push(build_city(base, name, raw_city, &mut warnings)?);
    }
    Ok((Config { cities, lexicon, stoplists }, warnings))
}

/// The lexicon compiled into the binary; used when a config names none.
pub fn builtin_lexicon() -> Lexicon {
    let entries = formats::parse_lexicon_str("builtin lexicon", BUILTIN_LEXICON)
        .expect("bundled lexicon parses");
    Lexicon::from_entries(entries).expect("bundled lexicon has no duplicates")
}

pub fn builtin_stoplists() -> Stoplists {
    Stoplists::new(
        formats::parse_stoplist_str(BUILTIN_DROPPED_KEYS),
        formats::parse_stoplist_str(BUILTIN_DROPPED_VALUES),
    )
}

fn build_city(
    base: &Path,
    name: &str,
    raw: &RawCity,
    warnings: &mut Vec<String>,
) -> Result<CityConfig> {
    let fail = |message: String| CliError::config(format!("city {name:?}: {message}"));

    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(CliError::config(format!(
            "city name {name:?} is not usable as an output file name"
        )));
    }

    let [lon, lat] = raw.center;
    if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
        return Err(fail(format!("center ({lon}, {lat}) is out of range; order is [lon, lat]")));
    }

    let format = match raw.format.as_deref() {
        Some("xml") => ExtractFormat::Xml,
        Some("pbf") => ExtractFormat::Pbf,
        Some(other) => return Err(fail(format!("unknown extract format {other:?}"))),
        None => match Path::new(&raw.extract).extension().and_then(|e| e.to_str()) {
            Some("pbf") => ExtractFormat::Pbf,
            _ => ExtractFormat::Xml,
        },
    };
    if format == ExtractFormat::Pbf && !cfg!(feature = "pbf") {
        return Err(fail("extract format pbf requires a build with the `pbf` feature".into()));
    }

    let rules = match &raw.park_tags {
        None => ParkRules::default(),
        Some(specs) => {
            let mut tags = Vec::new();
            for spec in specs {
                let Some((key, value)) = spec.split_once('=') else {
                    return Err(fail(format!("park tag {spec:?} is not key=value")));
                };
                if key.is_empty() {
                    return Err(fail(format!("park tag {spec:?} has an empty key")));
                }
                tags.push(Tag::new(key, value));
            }
            if tags.is_empty() {
                return Err(fail("park_tags must not be empty".into()));
            }
            ParkRules::new(tags)
        }
    };

    let defaults = Thresholds::default();
    let thresholds = Thresholds {
        min_elements: raw.min_elements.unwrap_or(defaults.min_elements),
        min_space_ha: raw.min_space_ha.unwrap_or(defaults.min_space_ha),
    };
    if !(thresholds.min_elements > 0.0) || !(thresholds.min_space_ha > 0.0) {
        return Err(fail("thresholds must be positive".into()));
    }

    if let Some(pct) = raw.internet_access_pct {
        if !(0.0..=100.0).contains(&pct) {
            return Err(fail(format!("internet_access_pct {pct} is not a percentage")));
        }
        if pct < MIN_INTERNET_PCT {
            warnings.push(format!(
                "city {name:?}: internet access {pct}% is below the study threshold of {MIN_INTERNET_PCT}%"
            ));
        }
    }
    if let Some(pop) = raw.population {
        if pop < MIN_POPULATION {
            warnings.push(format!(
                "city {name:?}: population {pop} is below the study threshold of {MIN_POPULATION}"
            ));
        }
    }
    if let Some(fraction) = raw.tagged_fraction {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(fail(format!("tagged_fraction {fraction} is not a fraction")));
        }
        if fraction < MIN_TAGGED_FRACTION {
            warnings.push(format!(
                "city {name:?}: tagged fraction {fraction} is below the study threshold of {MIN_TAGGED_FRACTION}"
            ));
        }
    }

    let resolve = |rel: &Option<String>| rel.as_ref().map(|r| base.join(r));
    Ok(CityConfig {
        name: name.to_string(),
        extract: base.join(&raw.extract),
        format,
        center: Point { lon, lat },
        rules,
        thresholds,
        external_counts: resolve(&raw.external_counts),
        survey: resolve(&raw.survey),
        gold: resolve(&raw.gold),
        predictions: resolve(&raw.predictions),
        label_map: resolve(&raw.label_map),
        population: raw.population,
        internet_access_pct: raw.internet_access_pct,
        tagged_fraction: raw.tagged_fraction,
    })
}
