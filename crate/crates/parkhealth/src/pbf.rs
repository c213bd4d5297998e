//! PBF extract parser, enabled with the `pbf` feature. Produces the same
//! raw element lists as the XML parser; errors reference element ids since
//! the format has no useful line numbers.

use std::path::Path;

use osmpbf::{Element, ElementReader};

use parkhealth_core::osm::{RawMember, RawMemberType, RawNode, RawRelation, RawWay, Tag};

use crate::error::{CliError, Result};
use crate::xml::RawExtract;

pub fn parse_file(path: &Path) -> Result<RawExtract> {
    let reader = ElementReader::from_path(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut extract = RawExtract { nodes: Vec::new(), ways: Vec::new(), relations: Vec::new() };
    let mut bad: Option<String> = None;

    reader
        .for_each(|element| match element {
            Element::Node(n) => {
                let tags = n.tags().map(|(k, v)| Tag::new(k, v)).collect();
                push_node(&mut extract, &mut bad, n.id(), n.lon(), n.lat(), tags);
            }
            Element::DenseNode(n) => {
                let tags = n.tags().map(|(k, v)| Tag::new(k, v)).collect();
                push_node(&mut extract, &mut bad, n.id(), n.lon(), n.lat(), tags);
            }
            Element::Way(w) => {
                extract.ways.push(RawWay {
                    id: w.id(),
                    refs: w.refs().collect(),
                    tags: w.tags().map(|(k, v)| Tag::new(k, v)).collect(),
                });
            }
            Element::Relation(r) => {
                let mut members = Vec::new();
                for m in r.members() {
                    let role = match m.role() {
                        Ok(role) => role.to_string(),
                        Err(e) => {
                            bad.get_or_insert(format!("relation {}: bad role: {e}", r.id()));
                            String::new()
                        }
                    };
                    members.push(RawMember {
                        member_type: match m.member_type {
                            osmpbf::RelMemberType::Node => RawMemberType::Node,
                            osmpbf::RelMemberType::Way => RawMemberType::Way,
                            osmpbf::RelMemberType::Relation => RawMemberType::Relation,
                        },
                        id: m.member_id,
                        role,
                    });
                }
                extract.relations.push(RawRelation {
                    id: r.id(),
                    members,
                    tags: r.tags().map(|(k, v)| Tag::new(k, v)).collect(),
                });
            }
        })
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;

    match bad {
        Some(message) => Err(CliError::input(format!("{}: {message}", path.display()))),
        None => Ok(extract),
    }
}

fn push_node(
    extract: &mut RawExtract,
    bad: &mut Option<String>,
    id: i64,
    lon: f64,
    lat: f64,
    tags: Vec<Tag>,
) {
    if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
        bad.get_or_insert(format!("node {id} has out-of-range coordinates ({lon}, {lat})"));
        return;
    }
    extract.nodes.push(RawNode { id, lat, lon, tags });
}
