//! GeoJSON export. The document is assembled by hand so the byte layout
//! is fully pinned: coordinates with 6 decimals, scores with 4, one
//! feature per line. Rings follow RFC 7946 winding (outer rings
//! counterclockwise, holes clockwise).

use std::path::Path;

use parkhealth_core::geometry::{MultiPolygon, Ring};

use crate::error::{CliError, Result};
use crate::formats::ScoreRow;

pub struct ParkFeature<'a> {
    pub score: &'a ScoreRow,
    pub boundary: &'a MultiPolygon,
}

pub fn write_geojson(path: &Path, parks: &[ParkFeature<'_>]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::input_in(parent, e))?;
    }
    std::fs::write(path, feature_collection(parks)).map_err(|e| CliError::input_in(path, e))
}

pub fn feature_collection(parks: &[ParkFeature<'_>]) -> String {
    let mut out = String::from("{\"type\":\"FeatureCollection\",\"features\":[\n");
    for (i, park) in parks.iter().enumerate() {
        out.push_str(&feature(park));
        if i + 1 < parks.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]}\n");
    out
}

fn feature(park: &ParkFeature<'_>) -> String {
    let mut out = String::from("{\"type\":\"Feature\",\"properties\":{");
    let s = park.score;
    push_kv_str(&mut out, "park_id", &s.park_id);
    out.push(',');
    push_kv_str(&mut out, "name", &s.name);
    out.push(',');
    push_kv_num(&mut out, "area_ha", s.area_ha, 4);
    out.push(',');
    push_kv_num(&mut out, "lat", s.lat, 6);
    out.push(',');
    push_kv_num(&mut out, "lon", s.lon, 6);
    for (label, value) in [
        ("score_physical", s.per_category[0]),
        ("score_nature", s.per_category[1]),
        ("score_environmental", s.per_category[2]),
        ("score_social", s.per_category[3]),
        ("score_cultural", s.per_category[4]),
        ("overall", s.overall),
    ] {
        out.push(',');
        push_kv_num(&mut out, label, value, 4);
    }
    out.push(',');
    push_kv_str(&mut out, "sparse_flags", &s.sparse_flags);
    out.push_str("},\"geometry\":");
    out.push_str(&geometry(park.boundary));
    out.push('}');
    out
}

fn geometry(boundary: &MultiPolygon) -> String {
    let polygons = boundary.polygons();
    if polygons.len() == 1 {
        format!("{{\"type\":\"Polygon\",\"coordinates\":{}}}", polygon_rings(&polygons[0]))
    } else {
        let parts: Vec<String> = polygons.iter().map(polygon_rings).collect();
        format!("{{\"type\":\"MultiPolygon\",\"coordinates\":[{}]}}", parts.join(","))
    }
}

fn polygon_rings(polygon: &parkhealth_core::geometry::PolygonWithHoles) -> String {
    let mut rings = vec![ring_coords(polygon.outer(), true)];
    for hole in polygon.holes() {
        rings.push(ring_coords(hole, false));
    }
    format!("[{}]", rings.join(","))
}

fn ring_coords(ring: &Ring, counterclockwise: bool) -> String {
    let coords = ring.coords();
    let flip = planar_winding_is_ccw(ring) != counterclockwise;
    let mut parts = Vec::with_capacity(coords.len());
    let emit = |p: &parkhealth_core::geometry::Point| {
        format!("[{},{}]", fmt_fixed(p.lon, 6), fmt_fixed(p.lat, 6))
    };
    if flip {
        parts.extend(coords.iter().rev().map(emit));
    } else {
        parts.extend(coords.iter().map(emit));
    }
    format!("[{}]", parts.join(","))
}

/// Planar shoelace orientation; adequate for winding at park scale.
fn planar_winding_is_ccw(ring: &Ring) -> bool {
    let mut doubled = 0.0;
    for (a, b) in ring.edges() {
        doubled += a.lon * b.lat - b.lon * a.lat;
    }
    doubled > 0.0
}

fn push_kv_str(out: &mut String, key: &str, value: &str) {
    out.push('"');
    out.push_str(key);
    out.push_str("\":");
    out.push_str(&serde_json::to_string(value).expect("strings always serialize"));
}

fn push_kv_num(out: &mut String, key: &str, value: f64, decimals: usize) {
    out.push('"');
    out.push_str(key);
    out.push_str("\":");
    out.push_str(&fmt_fixed(value, decimals));
}

/// Fixed decimals, never `-0.0000`.
fn fmt_fixed(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}
