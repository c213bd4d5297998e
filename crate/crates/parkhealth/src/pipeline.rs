//! Per-city pipeline stages and the across-cities parallel runner. All
//! stages are pure functions of their inputs; the runner only changes how
//! work is scheduled, never what is computed, so results are independent
//! of `--jobs`.

use std::path::Path;

use parkhealth_core::lexicon::{count_facilities, Lexicon, Stoplists};
use parkhealth_core::osm::{
    assemble_parks, collect_facilities, AssemblyStats, IngestStats, ObjectStore, ParkRecord,
};
use parkhealth_core::scoring::ParkCounts;

use crate::config::{CityConfig, ExtractFormat};
use crate::error::{CliError, Result};
use crate::formats::CountRow;
use crate::xml;

pub struct CityIngest {
    pub parks: Vec<ParkRecord>,
    pub rows: Vec<CountRow>,
    pub stats: IngestStats,
    pub assembly: AssemblyStats,
}

/// Parses the extract and assembles park records, without counting.
pub fn load_parks(city: &CityConfig) -> Result<(Vec<ParkRecord>, IngestStats, AssemblyStats)> {
    let raw = match city.format {
        ExtractFormat::Xml => xml::parse_file(&city.extract)?,
        #[cfg(feature = "pbf")]
        ExtractFormat::Pbf => crate::pbf::parse_file(&city.extract)?,
        #[cfg(not(feature = "pbf"))]
        ExtractFormat::Pbf => {
            return Err(CliError::input("pbf support is not compiled in"));
        }
    };
    let store = ObjectStore::from_raw(raw.nodes, raw.ways, raw.relations)
        .map_err(|e| CliError::input(format!("{}: {e}", city.extract.display())))?;
    let (mut parks, assembly) = assemble_parks(&store, &city.rules);
    collect_facilities(&store, &mut parks);
    parks.sort_by(|a, b| a.park_id.cmp(&b.park_id));
    Ok((parks, store.stats().clone(), assembly))
}

/// Full ingest stage: parks plus categorised facility counts.
pub fn ingest_city(
    city: &CityConfig,
    lexicon: &Lexicon,
    stoplists: &Stoplists,
) -> Result<CityIngest> {
    let (parks, stats, assembly) = load_parks(city)?;
    let rows = parks
        .iter()
        .map(|park| CountRow {
            park: ParkCounts {
                park_id: park.park_id.clone(),
                name: park.name.clone(),
                area_ha: park.area_ha,
                counts: count_facilities(park, lexicon, stoplists),
            },
            lat: park.centroid.lat,
            lon: park.centroid.lon,
        })
        .collect();
    Ok(CityIngest { parks, rows, stats, assembly })
}

/// Line-oriented ingest summary written next to `counts.csv`.
pub fn ingest_report(city: &CityConfig, ingest: &CityIngest) -> String {
    let s = &ingest.stats;
    let elements: f64 = ingest.rows.iter().map(|r| r.park.counts.elements.sum()).sum();
    let space_ha: f64 = ingest.rows.iter().map(|r| r.park.counts.space_ha.sum()).sum();
    let mut out = String::new();
    for (key, value) in [
        ("city", city.name.clone()),
        ("extract", city.extract.display().to_string()),
        ("nodes", s.nodes.to_string()),
        ("ways", s.ways.to_string()),
        ("relations", s.relations.to_string()),
        ("tagged_nodes", s.tagged_nodes.to_string()),
        ("way_areas", s.way_areas.to_string()),
        ("relation_areas", s.relation_areas.to_string()),
        ("unresolved_refs", s.unresolved_refs.to_string()),
        ("open_ways", s.open_ways.to_string()),
        ("invalid_rings", s.invalid_rings.to_string()),
        ("dropped_relations", s.dropped_relations.to_string()),
        ("foreign_relations", s.foreign_relations.to_string()),
        ("duplicate_ids", s.duplicate_ids.to_string()),
        ("parks", ingest.assembly.parks.to_string()),
        ("dropped_parks", ingest.assembly.dropped_parks.to_string()),
        ("dropped_rings", ingest.assembly.dropped_rings.to_string()),
        ("categorised_elements", crate::formats::fmt_f64(elements)),
        ("categorised_space_ha", crate::formats::fmt_f64(space_ha)),
    ] {
        out.push_str(key);
        out.push_str(": ");
        out.push_str(&value);
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::input_in(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::input_in(path, e))
}

/// Runs `work` for every city, on up to `jobs` threads. Results come back
/// in city order; failures are per-city so one bad extract does not hide
/// the others' errors.
pub fn for_each_city<T, F>(cities: &[CityConfig], jobs: usize, work: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(&CityConfig) -> Result<T> + Sync,
{
    let jobs = jobs.max(1).min(cities.len().max(1));
    if jobs <= 1 || cities.len() <= 1 {
        return cities.iter().map(&work).collect();
    }

    let chunk = cities.len().div_ceil(jobs);
    let mut collected: Vec<Vec<Result<T>>> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for batch in cities.chunks(chunk) {
            let work = &work;
            handles.push(scope.spawn(move || batch.iter().map(work).collect::<Vec<_>>()));
        }
        for handle in handles {
            collected.push(handle.join().expect("city worker panicked"));
        }
    });
    collected.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use parkhealth_core::geometry::Point;

    fn city(name: &str) -> CityConfig {
        CityConfig {
            name: name.into(),
            extract: "unused.osm".into(),
            format: ExtractFormat::Xml,
            center: Point::new(0.0, 0.0),
            rules: Default::default(),
            thresholds: Default::default(),
            external_counts: None,
            survey: None,
            gold: None,
            predictions: None,
            label_map: None,
            population: None,
            internet_access_pct: None,
            tagged_fraction: None,
        }
    }

    #[test]
    fn results_keep_city_order_for_any_job_count() {
        let cities: Vec<CityConfig> = (0..7).map(|i| city(&format!("c{i}"))).collect();
        let expected: Vec<String> = cities.iter().map(|c| c.name.clone()).collect();
        for jobs in [1, 2, 3, 4, 16] {
            let results = for_each_city(&cities, jobs, |c| Ok(c.name.clone()));
            let names: Vec<String> = results.into_iter().map(|r| r.unwrap()).collect();
            assert_eq!(names, expected, "jobs={jobs}");
        }
    }

    #[test]
    fn failures_stay_with_their_city() {
        let cities: Vec<CityConfig> = (0..4).map(|i| city(&format!("c{i}"))).collect();
        let results = for_each_city(&cities, 2, |c| {
            if c.name == "c2" {
                Err(CliError::input("boom"))
            } else {
                Ok(())
            }
        });
        assert!(results[0].is_ok() && results[1].is_ok() && results[3].is_ok());
        assert!(results[2].is_err());
    }
}
