//! Tabular file formats. Every reader validates the header and reports
//! schema problems with the offending line number; every writer emits the
//! same stable column order so outputs diff cleanly between runs.
//!
//! Internal floats are written in Rust's shortest round-trip form. Missing
//! optional values are empty cells.

use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use parkhealth_core::eval::{Annotation, GoldLabel};
use parkhealth_core::lexicon::{ActivityCategory, CategoryVector, LexiconEntry};
use parkhealth_core::scoring::{CategoryScore, CityFits, FitKind, ParkCounts, ParkHealthScore};
use parkhealth_core::validation::ExternalCounts;

use crate::error::{CliError, Result};

/// Columns appended to the five identity columns of `counts.csv`, in order.
pub const COUNT_COLUMNS: [&str; 10] = [
    "elements_physical",
    "elements_nature",
    "elements_environmental",
    "elements_social",
    "elements_cultural",
    "space_ha_physical",
    "space_ha_nature",
    "space_ha_environmental",
    "space_ha_social",
    "space_ha_cultural",
];

pub const SCORE_COLUMNS: [&str; 5] = [
    "score_physical",
    "score_nature",
    "score_environmental",
    "score_social",
    "score_cultural",
];

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn open_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| CliError::input_in(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn check_header<R: std::io::Read>(
    path: &Path,
    reader: &mut csv::Reader<R>,
    expected: &[&str],
) -> Result<()> {
    let headers = reader
        .headers()
        .map_err(|e| CliError::input_at(path, 1, format!("unreadable header: {e}")))?;
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(CliError::input_at(
            path,
            1,
            format!("expected header {}, found {}", expected.join(","), found.join(",")),
        ));
    }
    Ok(())
}

fn records<R: std::io::Read>(
    path: &Path,
    reader: &mut csv::Reader<R>,
) -> Result<Vec<csv::StringRecord>> {
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::input_at(path, line, format!("bad row: {e}"))
        })?;
        rows.push(record);
    }
    Ok(rows)
}

fn field_f64(path: &Path, record: &csv::StringRecord, index: usize, name: &str) -> Result<f64> {
    let raw = &record[index];
    raw.parse().map_err(|_| {
        CliError::input_at(path, line_of(record), format!("{name} is not a number: {raw:?}"))
    })
}

fn field_u64(path: &Path, record: &csv::StringRecord, index: usize, name: &str) -> Result<u64> {
    let raw = &record[index];
    raw.parse().map_err(|_| {
        CliError::input_at(path, line_of(record), format!("{name} is not a count: {raw:?}"))
    })
}

fn field_category(
    path: &Path,
    record: &csv::StringRecord,
    index: usize,
) -> Result<ActivityCategory> {
    let raw = &record[index];
    ActivityCategory::parse(raw).ok_or_else(|| {
        CliError::input_at(path, line_of(record), format!("unknown category {raw:?}"))
    })
}

/// `none` (any case) is the explicit no-category answer.
fn field_optional_category(
    path: &Path,
    record: &csv::StringRecord,
    index: usize,
) -> Result<Option<ActivityCategory>> {
    let raw = &record[index];
    if raw.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    field_category(path, record, index).map(Some)
}

pub fn parse_lexicon(path: &Path) -> Result<Vec<LexiconEntry>> {
    let reader = open_reader(path)?;
    parse_lexicon_from(path, reader)
}

/// Parses lexicon rows from in-memory text; `name` labels error messages.
pub fn parse_lexicon_str(name: &str, text: &str) -> Result<Vec<LexiconEntry>> {
    let reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    parse_lexicon_from(Path::new(name), reader)
}

fn parse_lexicon_from<R: std::io::Read>(
    path: &Path,
    mut reader: csv::Reader<R>,
) -> Result<Vec<LexiconEntry>> {
    check_header(path, &mut reader, &["key", "value", "category"])?;
    let mut entries = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 3 {
            return Err(CliError::input_at(path, line_of(&record), "expected 3 columns"));
        }
        entries.push(LexiconEntry {
            key: record[0].to_string(),
            value: record[1].to_string(),
            category: field_category(path, &record, 2)?,
        });
    }
    Ok(entries)
}

/// One entry per line, `#` starts a comment, blank lines ignored.
pub fn parse_stoplist(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input_in(path, e))?;
    Ok(parse_stoplist_str(&text))
}

pub fn parse_stoplist_str(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn parse_gold(path: &Path) -> Result<Vec<GoldLabel>> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &["key", "value", "category"])?;
    let mut labels = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 3 {
            return Err(CliError::input_at(path, line_of(&record), "expected 3 columns"));
        }
        labels.push(GoldLabel {
            key: record[0].to_string(),
            value: record[1].to_string(),
            category: field_optional_category(path, &record, 2)?,
        });
    }
    Ok(labels)
}

pub fn parse_predictions(path: &Path) -> Result<Vec<Annotation>> {
    let mut reader = open_reader(path)?;
    check_header(
        path,
        &mut reader,
        &["key", "value", "main", "main_reliability", "secondary", "secondary_reliability"],
    )?;
    let mut annotations = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 6 {
            return Err(CliError::input_at(path, line_of(&record), "expected 6 columns"));
        }
        let main = field_optional_category(path, &record, 2)?;
        let main_reliability = field_reliability(path, &record, 3, "main_reliability")?;
        // An empty secondary cell means the annotator gave none; `none` is
        // treated the same way since it carries no category either.
        let secondary = if record[4].is_empty() {
            None
        } else {
            field_optional_category(path, &record, 4)?
        };
        let secondary_reliability = if record[5].is_empty() && secondary.is_none() {
            0.0
        } else {
            field_reliability(path, &record, 5, "secondary_reliability")?
        };
        annotations.push(Annotation {
            key: record[0].to_string(),
            value: record[1].to_string(),
            main,
            main_reliability,
            secondary,
            secondary_reliability,
        });
    }
    Ok(annotations)
}

fn field_reliability(
    path: &Path,
    record: &csv::StringRecord,
    index: usize,
    name: &str,
) -> Result<f64> {
    let value = field_f64(path, record, index, name)?;
    if !(0.0..=100.0).contains(&value) {
        return Err(CliError::input_at(
            path,
            line_of(record),
            format!("{name} must be in [0, 100], got {value}"),
        ));
    }
    Ok(value)
}

pub fn parse_external_counts(path: &Path) -> Result<Vec<ExternalCounts>> {
    let mut reader = open_reader(path)?;
    check_header(
        path,
        &mut reader,
        &["park_id", "total_images", "physical", "nature", "environmental", "social", "cultural"],
    )?;
    let mut counts = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 7 {
            return Err(CliError::input_at(path, line_of(&record), "expected 7 columns"));
        }
        let mut labels = CategoryVector::default();
        for category in ActivityCategory::ALL {
            let value = field_f64(path, &record, 2 + category.index(), category.label())?;
            if value < 0.0 {
                return Err(CliError::input_at(
                    path,
                    line_of(&record),
                    format!("negative label count {value}"),
                ));
            }
            labels[category] = value;
        }
        counts.push(ExternalCounts {
            park_id: record[0].to_string(),
            total_images: field_u64(path, &record, 1, "total_images")?,
            labels,
        });
    }
    Ok(counts)
}

/// Survey answers: which parks people name for an activity category.
pub fn parse_survey(path: &Path) -> Result<Vec<(ActivityCategory, String)>> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &["category", "park_name"])?;
    let mut rows = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 2 {
            return Err(CliError::input_at(path, line_of(&record), "expected 2 columns"));
        }
        rows.push((field_category(path, &record, 0)?, record[1].to_string()));
    }
    Ok(rows)
}

/// Free-text label to tag-pair mapping produced by the annotation step.
/// Parsed and validated for reporting; no command consumes it numerically.
pub fn parse_label_map(path: &Path) -> Result<Vec<(String, String, String)>> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &["label", "key", "value"])?;
    let mut rows = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 3 {
            return Err(CliError::input_at(path, line_of(&record), "expected 3 columns"));
        }
        rows.push((record[0].to_string(), record[1].to_string(), record[2].to_string()));
    }
    Ok(rows)
}

/// One `counts.csv` row: per-park facility counts plus the park centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRow {
    pub park: ParkCounts,
    pub lat: f64,
    pub lon: f64,
}

fn counts_header() -> Vec<&'static str> {
    let mut header = vec!["park_id", "name", "area_ha", "lat", "lon"];
    header.extend(COUNT_COLUMNS);
    header
}

pub fn write_counts(path: &Path, rows: &[CountRow]) -> Result<()> {
    let mut writer = open_writer(path)?;
    write_record(path, &mut writer, &counts_header())?;
    for row in rows {
        let mut record =
            vec![row.park.park_id.clone(), row.park.name.clone().unwrap_or_default()];
        record.push(fmt_f64(row.park.area_ha));
        record.push(fmt_f64(row.lat));
        record.push(fmt_f64(row.lon));
        for category in ActivityCategory::ALL {
            record.push(fmt_f64(row.park.counts.elements[category]));
        }
        for category in ActivityCategory::ALL {
            record.push(fmt_f64(row.park.counts.space_ha[category]));
        }
        write_record(path, &mut writer, &record)?;
    }
    finish(path, writer)
}

pub fn read_counts(path: &Path) -> Result<Vec<CountRow>> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &counts_header())?;
    let mut rows = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 15 {
            return Err(CliError::input_at(path, line_of(&record), "expected 15 columns"));
        }
        let mut counts = parkhealth_core::lexicon::FacilityCounts::default();
        for category in ActivityCategory::ALL {
            let i = category.index();
            counts.elements[category] =
                field_f64(path, &record, 5 + i, COUNT_COLUMNS[i])?;
            counts.space_ha[category] =
                field_f64(path, &record, 10 + i, COUNT_COLUMNS[5 + i])?;
        }
        rows.push(CountRow {
            park: ParkCounts {
                park_id: record[0].to_string(),
                name: (!record[1].is_empty()).then(|| record[1].to_string()),
                area_ha: field_f64(path, &record, 2, "area_ha")?,
                counts,
            },
            lat: field_f64(path, &record, 3, "lat")?,
            lon: field_f64(path, &record, 4, "lon")?,
        });
    }
    Ok(rows)
}

/// One `scores.csv` row. `sparse_flags` packs the per-category element and
/// space sparsity bits in category order: positions 2i and 2i+1.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub park_id: String,
    pub name: String,
    pub area_ha: f64,
    pub lat: f64,
    pub lon: f64,
    pub per_category: [f64; 5],
    pub overall: f64,
    pub sparse_flags: String,
}

impl ScoreRow {
    pub fn from_score(row: &CountRow, score: &ParkHealthScore) -> ScoreRow {
        let mut flags = String::with_capacity(10);
        for c in &score.per_category {
            flags.push(if c.sparse_elements { '1' } else { '0' });
            flags.push(if c.sparse_spaces { '1' } else { '0' });
        }
        ScoreRow {
            park_id: score.park_id.clone(),
            name: row.park.name.clone().unwrap_or_default(),
            area_ha: row.park.area_ha,
            lat: row.lat,
            lon: row.lon,
            per_category: core::array::from_fn(|i| score.per_category[i].combined),
            overall: score.overall,
            sparse_flags: flags,
        }
    }

    /// Rebuilds the score view used by downstream commands; per-kind
    /// residuals are not round-tripped through the file.
    pub fn to_health_score(&self) -> ParkHealthScore {
        ParkHealthScore {
            park_id: self.park_id.clone(),
            per_category: core::array::from_fn(|i| CategoryScore {
                residual_elements: None,
                residual_spaces: None,
                combined: self.per_category[i],
                sparse_elements: self.sparse_flags.as_bytes()[2 * i] == b'1',
                sparse_spaces: self.sparse_flags.as_bytes()[2 * i + 1] == b'1',
            }),
            overall: self.overall,
        }
    }
}

fn scores_header() -> Vec<&'static str> {
    let mut header = vec!["park_id", "name", "area_ha", "lat", "lon"];
    header.extend(SCORE_COLUMNS);
    header.push("overall");
    header.push("sparse_flags");
    header
}

pub fn write_scores(path: &Path, rows: &[ScoreRow]) -> Result<()> {
    let mut writer = open_writer(path)?;
    write_record(path, &mut writer, &scores_header())?;
    for row in rows {
        let mut record = vec![row.park_id.clone(), row.name.clone()];
        record.push(fmt_f64(row.area_ha));
        record.push(fmt_f64(row.lat));
        record.push(fmt_f64(row.lon));
        for value in row.per_category {
            record.push(fmt_f64(value));
        }
        record.push(fmt_f64(row.overall));
        record.push(row.sparse_flags.clone());
        write_record(path, &mut writer, &record)?;
    }
    finish(path, writer)
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoreRow>> {
    let mut reader = open_reader(path)?;
    check_header(path, &mut reader, &scores_header())?;
    let mut rows = Vec::new();
    for record in records(path, &mut reader)? {
        if record.len() != 12 {
            return Err(CliError::input_at(path, line_of(&record), "expected 12 columns"));
        }
        let flags = record[11].to_string();
        if flags.len() != 10 || !flags.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(CliError::input_at(
                path,
                line_of(&record),
                format!("sparse_flags must be 10 bits, got {flags:?}"),
            ));
        }
        let mut per_category = [0.0; 5];
        for (i, slot) in per_category.iter_mut().enumerate() {
            *slot = field_f64(path, &record, 5 + i, SCORE_COLUMNS[i])?;
        }
        rows.push(ScoreRow {
            park_id: record[0].to_string(),
            name: record[1].to_string(),
            area_ha: field_f64(path, &record, 2, "area_ha")?,
            lat: field_f64(path, &record, 3, "lat")?,
            lon: field_f64(path, &record, 4, "lon")?,
            per_category,
            overall: field_f64(path, &record, 10, "overall")?,
            sparse_flags: flags,
        });
    }
    Ok(rows)
}

pub fn write_fits(path: &Path, fits: &CityFits, average_park_ha: f64) -> Result<()> {
    let mut writer = open_writer(path)?;
    write_record(
        path,
        &mut writer,
        &["category", "kind", "n_included", "slope", "intercept", "r_squared", "predicted_avg_park"],
    )?;
    for category in ActivityCategory::ALL {
        for kind in FitKind::BOTH {
            let Some(fit) = fits.get(category, kind) else { continue };
            let predicted = parkhealth_core::scoring::predict_average_park(fit, average_park_ha);
            write_record(
                path,
                &mut writer,
                &[
                    category.label().to_string(),
                    kind.label().to_string(),
                    fit.n_included.to_string(),
                    fmt_f64(fit.slope),
                    fmt_f64(fit.intercept),
                    fmt_f64(fit.r_squared),
                    fmt_f64(predicted),
                ],
            )?;
        }
    }
    finish(path, writer)
}

pub fn open_writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::input_in(parent, e))?;
    }
    let file = File::create(path).map_err(|e| CliError::input_in(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_record<S: AsRef<[u8]>>(
    path: &Path,
    writer: &mut csv::Writer<File>,
    record: &[S],
) -> Result<()> {
    writer
        .write_record(record)
        .map_err(|e| CliError::input(format!("{}: write failed: {e}", path.display())))
}

pub fn finish(path: &Path, writer: csv::Writer<File>) -> Result<()> {
    writer
        .into_inner()
        .map_err(|e| CliError::input(format!("{}: write failed: {e}", path.display())))?
        .sync_all()
        .ok();
    Ok(())
}

/// Shortest representation that round-trips; this keeps goldens portable
/// without pinning a decimal width for internal tables.
pub fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

/// Empty cell for an undefined value.
pub fn fmt_opt_f64(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}
