//! Command-line pipeline around `parkhealth-core`: OSM extract parsing,
//! city configuration, CSV staging files between subcommands, and GeoJSON
//! export. Everything here is IO and orchestration; the numeric substance
//! lives in the core crate.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod geojson;
#[cfg(feature = "pbf")]
pub mod pbf;
pub mod pipeline;
pub mod xml;
