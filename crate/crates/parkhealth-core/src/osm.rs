//! OpenStreetMap object model: raw elements as they come out of a parser,
//! their resolution into tagged point/area objects, park assembly and the
//! collection of facilities (elements and overlapping spaces) per park.
//!
//! Parsers live in the companion crate; this module is pure data plumbing.
//! Resolution is forgiving: unresolvable references, unclosed ways and
//! invalid rings are counted in [`IngestStats`] instead of failing the
//! whole extract.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{
    intersection_area_m2, Bbox, MultiPolygon, Point, PolygonWithHoles, Ring,
};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tag {
    pub key: String,
    pub value: String,
}

impl Tag {
    pub fn new(key: impl Into<String>, value: impl Into<String>) -> Self {
        Tag { key: key.into(), value: value.into() }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.key, self.value)
    }
}

/// Which OSM element an object came from. Ways and relations can share
/// numeric ids, so identity is always the (origin, id) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementOrigin {
    Node,
    Way,
    Relation,
}

impl fmt::Display for ElementOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementOrigin::Node => "node",
            ElementOrigin::Way => "way",
            ElementOrigin::Relation => "relation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Node,
    Area,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectGeometry {
    Point(Point),
    Area(MultiPolygon),
}

/// A resolved OSM object: a point or an area with its ordered tag list.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedObject {
    pub origin: ElementOrigin,
    pub id: i64,
    tags: Vec<Tag>,
    pub geometry: ObjectGeometry,
}

impl TaggedObject {
    /// Builds an object, keeping the first occurrence of each tag key so
    /// the tag list stays an insertion-ordered set.
    pub fn new(origin: ElementOrigin, id: i64, tags: Vec<Tag>, geometry: ObjectGeometry) -> Self {
        let mut seen = BTreeSet::new();
        let tags = tags
            .into_iter()
            .filter(|t| seen.insert(t.key.clone()))
            .collect();
        TaggedObject { origin, id, tags, geometry }
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags
            .iter()
            .find(|t| t.key == key)
            .map(|t| t.value.as_str())
    }

    pub fn has_tag(&self, key: &str, value: &str) -> bool {
        self.tag(key) == Some(value)
    }

    pub fn kind(&self) -> ObjectKind {
        match self.geometry {
            ObjectGeometry::Point(_) => ObjectKind::Node,
            ObjectGeometry::Area(_) => ObjectKind::Area,
        }
    }

    /// Stable identifier of the form `way/42`, unique across the store.
    pub fn stable_id(&self) -> String {
        format!("{}/{}", self.origin, self.id)
    }

    pub fn bbox(&self) -> Option<Bbox> {
        match &self.geometry {
            ObjectGeometry::Point(p) => Some(Bbox {
                min_lon: p.lon,
                min_lat: p.lat,
                max_lon: p.lon,
                max_lat: p.lat,
            }),
            ObjectGeometry::Area(mp) => mp.bbox(),
        }
    }
}

// --- raw parser output ----------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct RawNode {
    pub id: i64,
    pub lon: f64,
    pub lat: f64,
    pub tags: Vec<Tag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawWay {
    pub id: i64,
    pub refs: Vec<i64>,
    pub tags: Vec<Tag>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawMemberType {
    Node,
    Way,
    Relation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawMember {
    pub member_type: RawMemberType,
    pub id: i64,
    pub role: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRelation {
    pub id: i64,
    pub members: Vec<RawMember>,
    pub tags: Vec<Tag>,
}

impl RawRelation {
    fn is_multipolygon(&self) -> bool {
        self.tags
            .iter()
            .any(|t| t.key == "type" && t.value == "multipolygon")
    }
}

/// Counters filled while resolving raw elements. Nothing here is fatal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Raw element counts as parsed.
    pub nodes: u64,
    pub ways: u64,
    pub relations: u64,
    /// Materialized objects.
    pub tagged_nodes: u64,
    pub way_areas: u64,
    pub relation_areas: u64,
    /// Skips and repairs.
    pub unresolved_refs: u64,
    pub open_ways: u64,
    pub invalid_rings: u64,
    pub dropped_relations: u64,
    pub foreign_relations: u64,
    pub duplicate_ids: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreError {
    /// The extract parsed but contained no elements at all.
    EmptyExtract,
}

impl fmt::Display for StoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoreError::EmptyExtract => write!(f, "extract contains no objects"),
        }
    }
}

impl core::error::Error for StoreError {}

/// All resolved objects of one extract, id-sorted, plus resolution stats.
#[derive(Debug, Clone)]
pub struct ObjectStore {
    objects: Vec<Arc<TaggedObject>>,
    stats: IngestStats,
}

impl ObjectStore {
    pub fn from_raw(
        nodes: Vec<RawNode>,
        ways: Vec<RawWay>,
        relations: Vec<RawRelation>,
    ) -> Result<ObjectStore, StoreError> {
        if nodes.is_empty() && ways.is_empty() && relations.is_empty() {
            return Err(StoreError::EmptyExtract);
        }
        let mut stats = IngestStats {
            nodes: nodes.len() as u64,
            ways: ways.len() as u64,
            relations: relations.len() as u64,
            ..IngestStats::default()
        };
        let mut objects: Vec<Arc<TaggedObject>> = Vec::new();

        let mut coords: BTreeMap<i64, Point> = BTreeMap::new();
        let mut node_tags: BTreeMap<i64, &RawNode> = BTreeMap::new();
        for n in &nodes {
            if coords.contains_key(&n.id) {
                stats.duplicate_ids += 1;
                continue;
            }
            coords.insert(n.id, Point::new(n.lon, n.lat));
            if !n.tags.is_empty() {
                node_tags.insert(n.id, n);
            }
        }
        for (id, n) in &node_tags {
            objects.push(Arc::new(TaggedObject::new(
                ElementOrigin::Node,
                *id,
                n.tags.clone(),
                ObjectGeometry::Point(coords[id]),
            )));
            stats.tagged_nodes += 1;
        }

        let mut way_index: BTreeMap<i64, &RawWay> = BTreeMap::new();
        for w in &ways {
            if way_index.contains_key(&w.id) {
                stats.duplicate_ids += 1;
            } else {
                way_index.insert(w.id, w);
            }
        }

        for (id, w) in &way_index {
            let Some(points) = resolve_refs(&w.refs, &coords, &mut stats) else {
                continue;
            };
            if w.refs.len() < 2 || w.refs.first() != w.refs.last() {
                stats.open_ways += 1;
                continue;
            }
            let Some(ring) = build_ring(points, &mut stats) else {
                continue;
            };
            objects.push(Arc::new(TaggedObject::new(
                ElementOrigin::Way,
                *id,
                w.tags.clone(),
                ObjectGeometry::Area(MultiPolygon::from_ring(ring)),
            )));
            stats.way_areas += 1;
        }

        let mut rel_seen = BTreeSet::new();
        for r in &relations {
            if !rel_seen.insert(r.id) {
                stats.duplicate_ids += 1;
                continue;
            }
            if !r.is_multipolygon() {
                stats.foreign_relations += 1;
                continue;
            }
            if let Some(mp) = assemble_multipolygon(r, &way_index, &coords, &mut stats) {
                objects.push(Arc::new(TaggedObject::new(
                    ElementOrigin::Relation,
                    r.id,
                    r.tags.clone(),
                    ObjectGeometry::Area(mp),
                )));
                stats.relation_areas += 1;
            } else {
                stats.dropped_relations += 1;
            }
        }

        objects.sort_by(|a, b| (a.origin, a.id).cmp(&(b.origin, b.id)));
        Ok(ObjectStore { objects, stats })
    }

    pub fn objects(&self) -> &[Arc<TaggedObject>] {
        &self.objects
    }

    pub fn stats(&self) -> &IngestStats {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

fn resolve_refs(
    refs: &[i64],
    coords: &BTreeMap<i64, Point>,
    stats: &mut IngestStats,
) -> Option<Vec<Point>> {
    let mut points = Vec::with_capacity(refs.len());
    let mut missing = 0;
    for r in refs {
        match coords.get(r) {
            Some(p) => points.push(*p),
            None => missing += 1,
        }
    }
    if missing > 0 {
        stats.unresolved_refs += missing;
        return None;
    }
    Some(points)
}

// Collapses consecutive duplicate coordinates and validates the ring shape.
fn build_ring(mut points: Vec<Point>, stats: &mut IngestStats) -> Option<Ring> {
    points.dedup();
    if points.first() != points.last() {
        // Duplicate collapse can only remove repeats, so an open result
        // means the input was degenerate.
        stats.invalid_rings += 1;
        return None;
    }
    match Ring::new(points) {
        Ok(ring) => Some(ring),
        Err(_) => {
            stats.invalid_rings += 1;
            None
        }
    }
}

fn assemble_multipolygon(
    relation: &RawRelation,
    way_index: &BTreeMap<i64, &RawWay>,
    coords: &BTreeMap<i64, Point>,
    stats: &mut IngestStats,
) -> Option<MultiPolygon> {
    let mut outer_paths: Vec<Vec<i64>> = Vec::new();
    let mut inner_paths: Vec<Vec<i64>> = Vec::new();
    for m in &relation.members {
        if m.member_type != RawMemberType::Way {
            continue;
        }
        let Some(way) = way_index.get(&m.id) else {
            stats.unresolved_refs += 1;
            continue;
        };
        match m.role.as_str() {
            // An empty role is the legacy spelling of "outer".
            "outer" | "" => outer_paths.push(way.refs.clone()),
            "inner" => inner_paths.push(way.refs.clone()),
            _ => {}
        }
    }

    let outer_rings = stitch_and_resolve(outer_paths, coords, stats);
    let inner_rings = stitch_and_resolve(inner_paths, coords, stats);
    if outer_rings.is_empty() {
        return None;
    }

    let mut holes: Vec<Vec<Ring>> = alloc::vec![Vec::new(); outer_rings.len()];
    for hole in inner_rings {
        let slot = outer_rings
            .iter()
            .position(|outer| hole.coords().iter().all(|&p| outer.contains(p)));
        match slot {
            Some(i) => holes[i].push(hole),
            None => stats.invalid_rings += 1,
        }
    }

    let polygons = outer_rings
        .into_iter()
        .zip(holes)
        .map(|(outer, holes)| {
            PolygonWithHoles::new(outer, holes).expect("holes pre-checked against outer")
        })
        .collect();
    Some(MultiPolygon::new(polygons))
}

// Joins way fragments end-to-end on shared node refs into closed rings,
// then resolves them to validated coordinate rings.
fn stitch_and_resolve(
    paths: Vec<Vec<i64>>,
    coords: &BTreeMap<i64, Point>,
    stats: &mut IngestStats,
) -> Vec<Ring> {
    let mut pool: Vec<Vec<i64>> = paths.into_iter().filter(|p| p.len() >= 2).collect();
    let mut rings = Vec::new();
    while !pool.is_empty() {
        let mut cur = pool.remove(0);
        loop {
            if cur.first() == cur.last() {
                if let Some(points) = resolve_refs(&cur, coords, stats) {
                    if let Some(ring) = build_ring(points, stats) {
                        rings.push(ring);
                    }
                }
                break;
            }
            let last = *cur.last().expect("paths are non-empty");
            let next = pool.iter().position(|p| {
                p.first() == Some(&last) || p.last() == Some(&last)
            });
            match next {
                Some(i) => {
                    let mut p = pool.remove(i);
                    if p.last() == Some(&last) {
                        p.reverse();
                    }
                    cur.pop();
                    cur.extend(p);
                }
                None => {
                    stats.invalid_rings += 1;
                    break;
                }
            }
        }
    }
    rings
}

// --- parks -----------------------------------------------------------------

/// Tag rules selecting park areas; an object matches when it carries any of
/// the listed tags.
#[derive(Debug, Clone, PartialEq)]
pub struct ParkRules {
    tags: Vec<Tag>,
}

impl ParkRules {
    pub fn new(tags: Vec<Tag>) -> Self {
        ParkRules { tags }
    }

    pub fn matches(&self, object: &TaggedObject) -> bool {
        self.tags.iter().any(|t| object.has_tag(&t.key, &t.value))
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }
}

impl Default for ParkRules {
    fn default() -> Self {
        ParkRules::new(alloc::vec![Tag::new("leisure", "park")])
    }
}

/// A park with its boundary and the facilities collected inside it.
#[derive(Debug, Clone)]
pub struct ParkRecord {
    pub park_id: String,
    pub name: Option<String>,
    pub boundary: MultiPolygon,
    pub area_ha: f64,
    pub centroid: Point,
    /// Point objects inside the boundary (boundary-inclusive).
    pub elements: Vec<Arc<TaggedObject>>,
    /// Area objects with a positive boundary overlap, in hectares.
    pub spaces: Vec<(Arc<TaggedObject>, f64)>,
    /// Ids of larger parks whose boundary contains this park's centroid.
    pub contained_in: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AssemblyStats {
    pub parks: u64,
    pub dropped_parks: u64,
    pub dropped_rings: u64,
}

/// Turns park-rule matches into [`ParkRecord`]s. Non-simple rings are
/// dropped with a warning count; a park without a valid outer ring or with
/// zero area is dropped entirely.
pub fn assemble_parks(store: &ObjectStore, rules: &ParkRules) -> (Vec<ParkRecord>, AssemblyStats) {
    let mut stats = AssemblyStats::default();
    let mut parks = Vec::new();
    for obj in store.objects() {
        let ObjectGeometry::Area(mp) = &obj.geometry else {
            continue;
        };
        if !rules.matches(obj) {
            continue;
        }
        let mut members = Vec::new();
        for poly in mp.polygons() {
            if !poly.outer().is_simple() {
                stats.dropped_rings += 1;
                continue;
            }
            let mut holes = Vec::new();
            for hole in poly.holes() {
                if hole.is_simple() {
                    holes.push(hole.clone());
                } else {
                    stats.dropped_rings += 1;
                }
            }
            members.push(
                PolygonWithHoles::new(poly.outer().clone(), holes)
                    .expect("holes validated at store build"),
            );
        }
        if members.is_empty() {
            stats.dropped_parks += 1;
            continue;
        }
        let boundary = MultiPolygon::new(members);
        let area_ha = boundary.geodesic_area_ha();
        if !(area_ha > 0.0) {
            stats.dropped_parks += 1;
            continue;
        }
        let centroid = boundary.centroid().expect("boundary is non-empty");
        parks.push(ParkRecord {
            park_id: obj.stable_id(),
            name: obj.tag("name").map(String::from),
            boundary,
            area_ha,
            centroid,
            elements: Vec::new(),
            spaces: Vec::new(),
            contained_in: Vec::new(),
        });
    }
    parks.sort_by(|a, b| a.park_id.cmp(&b.park_id));

    let containment: Vec<Vec<String>> = parks
        .iter()
        .map(|p| {
            parks
                .iter()
                .filter(|q| {
                    q.park_id != p.park_id
                        && q.area_ha > p.area_ha
                        && q.boundary.contains(p.centroid)
                })
                .map(|q| q.park_id.clone())
                .collect()
        })
        .collect();
    for (park, inside) in parks.iter_mut().zip(containment) {
        park.contained_in = inside;
    }

    stats.parks = parks.len() as u64;
    (parks, stats)
}

/// Fills `elements` and `spaces` for every park: tagged points inside the
/// boundary (boundary-inclusive) and tagged areas with positive overlap.
/// An object lying in two overlapping parks is collected by both; a park
/// never collects itself as a space.
pub fn collect_facilities(store: &ObjectStore, parks: &mut [ParkRecord]) {
    let bboxes: Vec<Bbox> = parks
        .iter()
        .map(|p| p.boundary.bbox().expect("park boundary is non-empty"))
        .collect();
    for obj in store.objects() {
        if obj.tags().is_empty() {
            continue;
        }
        match &obj.geometry {
            ObjectGeometry::Point(p) => {
                for (park, bbox) in parks.iter_mut().zip(&bboxes) {
                    if bbox.contains(*p) && park.boundary.contains(*p) {
                        park.elements.push(obj.clone());
                    }
                }
            }
            ObjectGeometry::Area(mp) => {
                let Some(obj_bbox) = mp.bbox() else {
                    continue;
                };
                let stable = obj.stable_id();
                for (park, bbox) in parks.iter_mut().zip(&bboxes) {
                    if park.park_id == stable || !bbox.intersects(&obj_bbox) {
                        continue;
                    }
                    let overlap_m2 = intersection_area_m2(mp, &park.boundary);
                    if overlap_m2 > 0.0 {
                        park.spaces.push((obj.clone(), overlap_m2 / 1e4));
                    }
                }
            }
        }
    }
}
