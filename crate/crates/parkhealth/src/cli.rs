//! Command-line entry points. Each subcommand reads its declared inputs,
//! writes its declared outputs under `--out`, and nothing else; identical
//! inputs give byte-identical outputs whatever `--jobs` says. Exit codes:
//! 1 for input problems, 2 for configuration problems.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use parkhealth_core::equity;
use parkhealth_core::eval;
use parkhealth_core::geometry::{haversine_m, Point};
use parkhealth_core::lexicon::{ActivityCategory, Lexicon};
use parkhealth_core::scoring::{self, CityFits, ScoringError, DEFAULT_AVERAGE_PARK_HA};
use parkhealth_core::validation::{self, ValidationError, MIN_COMPARABLE_PARKS, MIN_IMAGES};

use crate::config::{self, Config};
use crate::error::{CliError, Result};
use crate::formats::{self, fmt_f64, fmt_opt_f64, ScoreRow};
use crate::geojson::{self, ParkFeature};
use crate::pipeline;

#[derive(Parser)]
#[command(name = "parkhealth", version, about = "Park health scoring pipeline")]
struct Cli {
    /// Study configuration file (TOML, one city per section).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for all generated files.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads; parallelism is across cities only.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse extracts, assemble parks, count categorised facilities.
    Ingest,
    /// Fit per-city regressions and score parks against them.
    Score,
    /// Within-city disparity, distance quartiles and correlation.
    Equity,
    /// Correlate scores with external counts and survey answers.
    Validate,
    /// Evaluate annotations against a gold standard.
    Eval(EvalArgs),
    /// Write scored park boundaries as GeoJSON.
    Export,
}

#[derive(Args)]
struct EvalArgs {
    /// Gold standard CSV; overrides the config's per-city files.
    #[arg(long, value_name = "PATH", requires = "predictions")]
    gold: Option<PathBuf>,
    /// Predictions CSV; used together with --gold.
    #[arg(long, value_name = "PATH", requires = "gold")]
    predictions: Option<PathBuf>,
    /// Reliability thresholds to sweep; default 0.0,0.1,...,1.0.
    #[arg(long, value_name = "T,T,...", value_delimiter = ',')]
    thresholds: Option<Vec<f64>>,
}

struct Ctx {
    out: PathBuf,
    jobs: usize,
    verbose: bool,
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { out: cli.out.clone(), jobs: cli.jobs, verbose: cli.verbose };
    match dispatch(&cli, &ctx) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli, ctx: &Ctx) -> Result<()> {
    match &cli.command {
        Command::Ingest => cmd_ingest(ctx, &load_config(cli)?),
        Command::Score => cmd_score(ctx, &load_config(cli)?),
        Command::Equity => cmd_equity(ctx, &load_config(cli)?),
        Command::Validate => cmd_validate(ctx, &load_config(cli)?),
        Command::Eval(args) => cmd_eval(ctx, cli, args),
        Command::Export => cmd_export(ctx, &load_config(cli)?),
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::config("missing --config PATH"))?;
    let (config, warnings) = config::load(path)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    Ok(config)
}

fn counts_path(out: &Path, city: &str) -> PathBuf {
    out.join("counts").join(format!("{city}.csv"))
}

fn report_path(out: &Path, city: &str) -> PathBuf {
    out.join("counts").join(format!("{city}.report.txt"))
}

fn scores_path(out: &Path, city: &str) -> PathBuf {
    out.join("scores").join(format!("{city}.csv"))
}

fn fits_path(out: &Path, city: &str) -> PathBuf {
    out.join("fits").join(format!("{city}.csv"))
}

fn geojson_path(out: &Path, city: &str) -> PathBuf {
    out.join("geojson").join(format!("{city}.geojson"))
}

/// Unwraps per-city results: the first failure is returned, later ones are
/// printed so no city's problem is hidden behind another's.
fn collect<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    let mut values = Vec::with_capacity(results.len());
    let mut first = None;
    for result in results {
        match result {
            Ok(value) => values.push(value),
            Err(e) if first.is_none() => first = Some(e),
            Err(e) => eprintln!("{e}"),
        }
    }
    match first {
        Some(e) => Err(e),
        None => Ok(values),
    }
}

fn staged_input(path: &Path, producer: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "{}: not found; run `parkhealth {producer}` first",
            path.display()
        )))
    }
}

fn cmd_ingest(ctx: &Ctx, config: &Config) -> Result<()> {
    let results = pipeline::for_each_city(&config.cities, ctx.jobs, |city| {
        let ingest = pipeline::ingest_city(city, &config.lexicon, &config.stoplists)?;
        formats::write_counts(&counts_path(&ctx.out, &city.name), &ingest.rows)?;
        pipeline::write_text(
            &report_path(&ctx.out, &city.name),
            &pipeline::ingest_report(city, &ingest),
        )?;
        let label_map = city
            .label_map
            .as_deref()
            .map(|p| summarize_label_map(p, &config.lexicon))
            .transpose()?;
        Ok((city.name.clone(), ingest, label_map))
    });
    for (name, ingest, label_map) in collect(results)? {
        println!(
            "city {name}: {} parks, {} dropped, {} objects skipped",
            ingest.rows.len(),
            ingest.assembly.dropped_parks,
            ingest.stats.unresolved_refs + ingest.stats.open_ways + ingest.stats.invalid_rings
        );
        if ctx.verbose {
            if let Some(summary) = label_map {
                println!("  {summary}");
            }
        }
    }
    Ok(())
}

/// The label map ties free-text annotation labels back to tag pairs. It is
/// validated and summarized here; no pipeline number depends on it.
fn summarize_label_map(path: &Path, lexicon: &Lexicon) -> Result<String> {
    let rows = formats::parse_label_map(path)?;
    let mapped = rows
        .iter()
        .filter(|(_, key, value)| !lexicon.categories(key, value).is_empty())
        .count();
    Ok(format!(
        "label map {}: {} labels, {mapped} with lexicon entries",
        path.display(),
        rows.len()
    ))
}

fn cmd_score(ctx: &Ctx, config: &Config) -> Result<()> {
    let results = pipeline::for_each_city(&config.cities, ctx.jobs, |city| {
        let input = counts_path(&ctx.out, &city.name);
        staged_input(&input, "ingest")?;
        let rows = formats::read_counts(&input)?;
        let parks: Vec<_> = rows.iter().map(|r| r.park.clone()).collect();
        let (fits, small) = match scoring::fit_city_models(&parks, &city.thresholds) {
            Ok(fits) => (fits, false),
            Err(ScoringError::InsufficientData { .. }) => (CityFits::default(), true),
        };
        let scores = scoring::combine_scores(&parks, &fits, &city.thresholds);
        let score_rows: Vec<ScoreRow> = rows
            .iter()
            .zip(&scores)
            .map(|(row, score)| ScoreRow::from_score(row, score))
            .collect();
        formats::write_scores(&scores_path(&ctx.out, &city.name), &score_rows)?;
        formats::write_fits(&fits_path(&ctx.out, &city.name), &fits, DEFAULT_AVERAGE_PARK_HA)?;
        Ok((city.name.clone(), score_rows.len(), fits.iter().count(), small))
    });
    for (name, parks, fits, small) in collect(results)? {
        println!("city {name}: scored {parks} parks against {fits} fits");
        if small {
            eprintln!("warning: city {name:?}: fewer than 2 parks, all scores are neutral");
        }
    }
    Ok(())
}

struct EquityOutcome {
    city: String,
    n_parks: usize,
    disparity: Option<f64>,
    correlation: Option<equity::DistanceCorrelation>,
    quartiles: Option<equity::QuartileReport>,
    warnings: Vec<String>,
}

fn cmd_equity(ctx: &Ctx, config: &Config) -> Result<()> {
    let results = pipeline::for_each_city(&config.cities, ctx.jobs, |city| {
        let input = scores_path(&ctx.out, &city.name);
        staged_input(&input, "score")?;
        let rows = formats::read_scores(&input)?;
        let mut outcome = EquityOutcome {
            city: city.name.clone(),
            n_parks: rows.len(),
            disparity: None,
            correlation: None,
            quartiles: None,
            warnings: Vec::new(),
        };
        let mut warn = |what: &str, e: &dyn std::fmt::Display| {
            outcome.warnings.push(format!("city {:?}: no {what}: {e}", city.name));
        };

        let overall: Vec<f64> = rows.iter().map(|r| r.overall).collect();
        match equity::disparity_index(&overall) {
            Ok(d) => outcome.disparity = Some(d),
            Err(e) => warn("disparity index", &e),
        }

        let distances: Vec<equity::ParkDistance> = rows
            .iter()
            .map(|r| equity::ParkDistance {
                park_id: r.park_id.clone(),
                distance_m: haversine_m(city.center, Point::new(r.lon, r.lat)),
                score: r.overall,
            })
            .collect();
        match equity::distance_correlation(&distances) {
            Ok(c) => outcome.correlation = Some(c),
            Err(e) => warn("distance correlation", &e),
        }
        match equity::quartile_analysis(&distances) {
            Ok(q) => outcome.quartiles = Some(q),
            Err(e) => warn("quartile analysis", &e),
        }
        Ok(outcome)
    });
    let outcomes = collect(results)?;

    let path = ctx.out.join("equity").join("disparity.csv");
    let mut writer = formats::open_writer(&path)?;
    formats::write_record(
        &path,
        &mut writer,
        &["city", "n_parks", "disparity", "distance_pcc", "distance_degenerate"],
    )?;
    for o in &outcomes {
        formats::write_record(
            &path,
            &mut writer,
            &[
                o.city.clone(),
                o.n_parks.to_string(),
                fmt_opt_f64(o.disparity),
                fmt_opt_f64(o.correlation.as_ref().map(|c| c.pcc)),
                o.correlation
                    .as_ref()
                    .map(|c| c.degenerate.to_string())
                    .unwrap_or_default(),
            ],
        )?;
    }
    formats::finish(&path, writer)?;

    let path = ctx.out.join("equity").join("quartiles.csv");
    let mut writer = formats::open_writer(&path)?;
    formats::write_record(
        &path,
        &mut writer,
        &["city", "quartile", "n_parks", "mean_score", "welch_t", "welch_df", "welch_p"],
    )?;
    for o in &outcomes {
        let Some(q) = &o.quartiles else { continue };
        for i in 0..4 {
            let test = (i < 3).then(|| &q.welch[i]);
            formats::write_record(
                &path,
                &mut writer,
                &[
                    o.city.clone(),
                    (i + 1).to_string(),
                    q.sizes[i].to_string(),
                    fmt_f64(q.mean_scores[i]),
                    fmt_opt_f64(test.map(|w| w.t)),
                    fmt_opt_f64(test.map(|w| w.df)),
                    fmt_opt_f64(test.map(|w| w.p)),
                ],
            )?;
        }
    }
    formats::finish(&path, writer)?;

    for o in &outcomes {
        for warning in &o.warnings {
            eprintln!("warning: {warning}");
        }
        println!(
            "city {}: {} parks, disparity {}",
            o.city,
            o.n_parks,
            o.disparity.map(fmt_f64).unwrap_or_else(|| "n/a".into())
        );
    }
    Ok(())
}

struct ValidateOutcome {
    city: String,
    correlation: Option<validation::CorrelationReport>,
    percentiles: Vec<(ActivityCategory, usize, validation::PercentileReport)>,
    warnings: Vec<String>,
}

fn cmd_validate(ctx: &Ctx, config: &Config) -> Result<()> {
    let results = pipeline::for_each_city(&config.cities, ctx.jobs, |city| {
        let mut outcome = ValidateOutcome {
            city: city.name.clone(),
            correlation: None,
            percentiles: Vec::new(),
            warnings: Vec::new(),
        };
        if city.external_counts.is_none() && city.survey.is_none() {
            return Ok(outcome);
        }
        let input = scores_path(&ctx.out, &city.name);
        staged_input(&input, "score")?;
        let rows = formats::read_scores(&input)?;

        if let Some(external_path) = &city.external_counts {
            let counts = formats::parse_external_counts(external_path)?;
            let areas: BTreeMap<String, f64> =
                rows.iter().map(|r| (r.park_id.clone(), r.area_ha)).collect();
            match validation::score_external(&areas, &counts, &city.thresholds) {
                Ok(external) => {
                    let health: Vec<_> = rows.iter().map(ScoreRow::to_health_score).collect();
                    match validation::correlate(
                        &health,
                        &external,
                        MIN_IMAGES,
                        MIN_COMPARABLE_PARKS,
                    ) {
                        Ok(report) => outcome.correlation = Some(report),
                        Err(e) => outcome
                            .warnings
                            .push(format!("city {:?}: no correlation: {e}", city.name)),
                    }
                }
                Err(e) => outcome
                    .warnings
                    .push(format!("city {:?}: no correlation: {e}", city.name)),
            }
        }

        if let Some(survey_path) = &city.survey {
            let survey = formats::parse_survey(survey_path)?;
            for category in ActivityCategory::ALL {
                let names: Vec<String> = survey
                    .iter()
                    .filter(|(c, _)| *c == category)
                    .map(|(_, name)| name.clone())
                    .collect();
                if names.is_empty() {
                    continue;
                }
                let ranking: Vec<(String, f64)> = rows
                    .iter()
                    .filter(|r| !r.name.is_empty())
                    .map(|r| (r.name.clone(), r.per_category[category.index()]))
                    .collect();
                match validation::percentile_ranking(&names, &ranking) {
                    Ok(report) => outcome.percentiles.push((category, names.len(), report)),
                    Err(ValidationError::EmptyInput) => outcome.warnings.push(format!(
                        "city {:?}: no named parks to rank for {}",
                        city.name,
                        category.label()
                    )),
                    Err(e) => outcome
                        .warnings
                        .push(format!("city {:?}: {}: {e}", city.name, category.label())),
                }
            }
        }
        Ok(outcome)
    });
    let outcomes = collect(results)?;

    let path = ctx.out.join("validation").join("validation.csv");
    let mut writer = formats::open_writer(&path)?;
    let mut header = vec!["city".to_string(), "n_parks".to_string()];
    header.extend(ActivityCategory::ALL.iter().map(|c| format!("pcc_{}", c.label())));
    header.push("mean_pcc".to_string());
    formats::write_record(&path, &mut writer, &header)?;
    for o in &outcomes {
        let Some(report) = &o.correlation else { continue };
        let mut record = vec![o.city.clone(), report.n_parks.to_string()];
        record.extend(report.pcc.iter().map(|p| fmt_opt_f64(*p)));
        record.push(fmt_f64(report.mean_pcc));
        formats::write_record(&path, &mut writer, &record)?;
    }
    formats::finish(&path, writer)?;

    let path = ctx.out.join("validation").join("percentiles.csv");
    let mut writer = formats::open_writer(&path)?;
    formats::write_record(&path, &mut writer, &["city", "category", "park_name", "percentile"])?;
    for o in &outcomes {
        for (category, _, report) in &o.percentiles {
            for park in &report.parks {
                formats::write_record(
                    &path,
                    &mut writer,
                    &[
                        o.city.clone(),
                        category.label().to_string(),
                        park.name.clone(),
                        fmt_f64(park.percentile),
                    ],
                )?;
            }
        }
    }
    formats::finish(&path, writer)?;

    let path = ctx.out.join("validation").join("percentile_summary.csv");
    let mut writer = formats::open_writer(&path)?;
    formats::write_record(
        &path,
        &mut writer,
        &["city", "category", "n_named", "n_matched", "mean_percentile"],
    )?;
    for o in &outcomes {
        for (category, n_named, report) in &o.percentiles {
            formats::write_record(
                &path,
                &mut writer,
                &[
                    o.city.clone(),
                    category.label().to_string(),
                    n_named.to_string(),
                    report.parks.len().to_string(),
                    fmt_f64(report.mean_percentile),
                ],
            )?;
        }
    }
    formats::finish(&path, writer)?;

    for o in &outcomes {
        for warning in &o.warnings {
            eprintln!("warning: {warning}");
        }
        if let Some(report) = &o.correlation {
            println!(
                "city {}: {} comparable parks, mean pcc {}",
                o.city,
                report.n_parks,
                fmt_f64(report.mean_pcc)
            );
        }
        if ctx.verbose {
            for (category, _, report) in &o.percentiles {
                for name in &report.unmatched {
                    println!("city {}: {} survey name {name:?} unmatched", o.city, category.label());
                }
            }
        }
    }
    Ok(())
}

fn cmd_eval(ctx: &Ctx, cli: &Cli, args: &EvalArgs) -> Result<()> {
    let pairs: Vec<(String, PathBuf, PathBuf)> = match (&args.gold, &args.predictions) {
        (Some(gold), Some(predictions)) => {
            vec![("-".to_string(), gold.clone(), predictions.clone())]
        }
        _ => {
            let config = load_config(cli)?;
            config
                .cities
                .iter()
                .filter_map(|c| match (&c.gold, &c.predictions) {
                    (Some(g), Some(p)) => Some((c.name.clone(), g.clone(), p.clone())),
                    _ => None,
                })
                .collect()
        }
    };
    if pairs.is_empty() {
        return Err(CliError::config(
            "no gold/prediction files: pass --gold/--predictions or configure them per city",
        ));
    }

    let thresholds = match &args.thresholds {
        Some(list) => {
            for t in list {
                if !t.is_finite() {
                    return Err(CliError::config(format!("threshold {t} is not finite")));
                }
            }
            list.clone()
        }
        None => (0..=10).map(|i| i as f64 / 10.0).collect(),
    };

    let eval_path = ctx.out.join("eval").join("eval.csv");
    let mut eval_writer = formats::open_writer(&eval_path)?;
    formats::write_record(
        &eval_path,
        &mut eval_writer,
        &["city", "threshold", "precision", "recall", "f1_weighted", "f1_main"],
    )?;
    let class_path = ctx.out.join("eval").join("eval_classes.csv");
    let mut class_writer = formats::open_writer(&class_path)?;
    formats::write_record(
        &class_path,
        &mut class_writer,
        &[
            "city",
            "threshold",
            "class",
            "precision",
            "recall",
            "f1",
            "support",
            "reliability_ratio",
            "degenerate",
        ],
    )?;

    for (city, gold_path, predictions_path) in &pairs {
        let gold = formats::parse_gold(gold_path)?;
        let annotations = formats::parse_predictions(predictions_path)?;
        let in_file = |e: eval::EvalError| {
            CliError::input(format!("{}: {e}", predictions_path.display()))
        };
        let main_report = eval::f1_main(&gold, &annotations).map_err(in_file)?;
        for &threshold in &thresholds {
            let report = eval::f1_weighted(&gold, &annotations, threshold).map_err(in_file)?;
            formats::write_record(
                &eval_path,
                &mut eval_writer,
                &[
                    city.clone(),
                    fmt_f64(threshold),
                    fmt_f64(report.precision),
                    fmt_f64(report.recall),
                    fmt_f64(report.f1),
                    fmt_f64(main_report.f1),
                ],
            )?;
            let reliability = report.reliability.expect("weighted report has ratios");
            for (index, metrics) in report.per_class.iter().enumerate() {
                formats::write_record(
                    &class_path,
                    &mut class_writer,
                    &[
                        city.clone(),
                        fmt_f64(threshold),
                        eval::class_label(index).to_string(),
                        fmt_f64(metrics.precision),
                        fmt_f64(metrics.recall),
                        fmt_f64(metrics.f1),
                        metrics.support.to_string(),
                        fmt_f64(reliability[index].ratio),
                        reliability[index].degenerate.to_string(),
                    ],
                )?;
            }
            if threshold >= 1.0 {
                let relation = if report.f1 == main_report.f1 { "==" } else { "!=" };
                println!(
                    "city {city}: threshold {}: f1_weighted {relation} f1_main",
                    fmt_f64(threshold)
                );
            }
        }
        println!(
            "city {city}: {} gold rows, f1_main {}",
            gold.len(),
            fmt_f64(main_report.f1)
        );
    }
    formats::finish(&eval_path, eval_writer)?;
    formats::finish(&class_path, class_writer)?;
    Ok(())
}

fn cmd_export(ctx: &Ctx, config: &Config) -> Result<()> {
    let results = pipeline::for_each_city(&config.cities, ctx.jobs, |city| {
        let input = scores_path(&ctx.out, &city.name);
        staged_input(&input, "score")?;
        let rows = formats::read_scores(&input)?;
        let (parks, _, _) = pipeline::load_parks(city)?;
        let boundaries: BTreeMap<&str, _> =
            parks.iter().map(|p| (p.park_id.as_str(), &p.boundary)).collect();
        let features: Vec<ParkFeature<'_>> = rows
            .iter()
            .map(|row| {
                boundaries
                    .get(row.park_id.as_str())
                    .map(|boundary| ParkFeature { score: row, boundary })
                    .ok_or_else(|| {
                        CliError::input(format!(
                            "{}: park {} is not in {}; stale scores?",
                            input.display(),
                            row.park_id,
                            city.extract.display()
                        ))
                    })
            })
            .collect::<Result<_>>()?;
        geojson::write_geojson(&geojson_path(&ctx.out, &city.name), &features)?;
        Ok((city.name.clone(), features.len()))
    });
    for (name, features) in collect(results)? {
        println!("city {name}: exported {features} features");
    }
    Ok(())
}
