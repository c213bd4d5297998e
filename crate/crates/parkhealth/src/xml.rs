//! OSM XML extract parser. Produces the raw element lists consumed by
//! `parkhealth_core::osm::ObjectStore::from_raw`; resolution and geometry
//! checks happen there. Anything unparseable is a hard input error with a
//! line number; unknown elements are skipped.

use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use parkhealth_core::osm::{RawMember, RawMemberType, RawNode, RawRelation, RawWay, Tag};

use crate::error::{CliError, Result};

#[derive(Debug)]
pub struct RawExtract {
    pub nodes: Vec<RawNode>,
    pub ways: Vec<RawWay>,
    pub relations: Vec<RawRelation>,
}

pub fn parse_file(path: &Path) -> Result<RawExtract> {
    let data = std::fs::read(path).map_err(|e| CliError::input_in(path, e))?;
    parse_bytes(&data).map_err(|e| CliError::input_at(path, line_of(&data, e.position), e.message))
}

struct ParseError {
    position: usize,
    message: String,
}

fn line_of(data: &[u8], position: usize) -> u64 {
    let end = position.min(data.len());
    data[..end].iter().filter(|&&b| b == b'\n').count() as u64 + 1
}

enum Current {
    Node(RawNode),
    Way(RawWay),
    Relation(RawRelation),
}

fn parse_bytes(data: &[u8]) -> std::result::Result<RawExtract, ParseError> {
    let mut reader = Reader::from_reader(data);
    reader.config_mut().trim_text(true);
    let mut extract = RawExtract { nodes: Vec::new(), ways: Vec::new(), relations: Vec::new() };
    let mut current: Option<Current> = None;

    loop {
        let event = match reader.read_event() {
            Err(e) => {
                return Err(ParseError {
                    position: reader.error_position() as usize,
                    message: format!("malformed XML: {e}"),
                })
            }
            Ok(event) => event,
        };
        // Position after the event: the line its closing `>` sits on.
        let position = reader.buffer_position() as usize;
        match event {
            Event::Eof => break,
            Event::Start(e) => {
                if let Some(element) = handle_open(&e, &mut current, position)? {
                    current = Some(element);
                }
            }
            Event::Empty(e) => {
                if let Some(element) = handle_open(&e, &mut current, position)? {
                    push(&mut extract, element);
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"node" | b"way" | b"relation" => {
                    let Some(element) = current.take() else {
                        return Err(ParseError {
                            position,
                            message: "unexpected closing element".into(),
                        });
                    };
                    push(&mut extract, element);
                }
                _ => {}
            },
            _ => {}
        }
    }
    if current.is_some() {
        return Err(ParseError {
            position: data.len(),
            message: "unterminated element at end of file".into(),
        });
    }
    Ok(extract)
}

fn push(extract: &mut RawExtract, element: Current) {
    match element {
        Current::Node(n) => extract.nodes.push(n),
        Current::Way(w) => extract.ways.push(w),
        Current::Relation(r) => extract.relations.push(r),
    }
}

/// Handles an opening (or self-closing) element. Returns the element when
/// it is complete in itself (an untagged self-closing node/way/relation is
/// pushed by the caller of the Empty event); children mutate `current`.
fn handle_open(
    e: &BytesStart<'_>,
    current: &mut Option<Current>,
    position: usize,
) -> std::result::Result<Option<Current>, ParseError> {
    let fail = |message: String| ParseError { position, message };
    match e.name().as_ref() {
        b"node" => {
            if current.is_some() {
                return Err(fail("nested <node>".into()));
            }
            let a = Attrs::read(e, position)?;
            let node = RawNode {
                id: a.required_i64("id")?,
                lat: a.required_f64("lat")?,
                lon: a.required_f64("lon")?,
                tags: Vec::new(),
            };
            if !(-180.0..=180.0).contains(&node.lon) || !(-90.0..=90.0).contains(&node.lat) {
                return Err(fail(format!(
                    "node {} has out-of-range coordinates ({}, {})",
                    node.id, node.lon, node.lat
                )));
            }
            Ok(Some(Current::Node(node)))
        }
        b"way" => {
            if current.is_some() {
                return Err(fail("nested <way>".into()));
            }
            let a = Attrs::read(e, position)?;
            Ok(Some(Current::Way(RawWay {
                id: a.required_i64("id")?,
                refs: Vec::new(),
                tags: Vec::new(),
            })))
        }
        b"relation" => {
            if current.is_some() {
                return Err(fail("nested <relation>".into()));
            }
            let a = Attrs::read(e, position)?;
            Ok(Some(Current::Relation(RawRelation {
                id: a.required_i64("id")?,
                members: Vec::new(),
                tags: Vec::new(),
            })))
        }
        b"tag" => {
            let a = Attrs::read(e, position)?;
            let tag = Tag::new(a.required("k")?, a.required("v")?);
            match current {
                Some(Current::Node(n)) => n.tags.push(tag),
                Some(Current::Way(w)) => w.tags.push(tag),
                Some(Current::Relation(r)) => r.tags.push(tag),
                None => return Err(fail("<tag> outside of an element".into())),
            }
            Ok(None)
        }
        b"nd" => {
            let a = Attrs::read(e, position)?;
            let node_ref = a.required_i64("ref")?;
            match current {
                Some(Current::Way(w)) => w.refs.push(node_ref),
                _ => return Err(fail("<nd> outside of a <way>".into())),
            }
            Ok(None)
        }
        b"member" => {
            let a = Attrs::read(e, position)?;
            let member_type = match a.required("type")?.as_str() {
                "node" => RawMemberType::Node,
                "way" => RawMemberType::Way,
                "relation" => RawMemberType::Relation,
                other => return Err(fail(format!("unknown member type {other:?}"))),
            };
            let member = RawMember {
                member_type,
                id: a.required_i64("ref")?,
                role: a.get("role").unwrap_or_default(),
            };
            match current {
                Some(Current::Relation(r)) => r.members.push(member),
                _ => return Err(fail("<member> outside of a <relation>".into())),
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

struct Attrs {
    pairs: Vec<(String, String)>,
    position: usize,
}

impl Attrs {
    fn read(e: &BytesStart<'_>, position: usize) -> std::result::Result<Attrs, ParseError> {
        let mut pairs = Vec::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| ParseError {
                position,
                message: format!("bad attribute: {err}"),
            })?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr
                .unescape_value()
                .map_err(|err| ParseError {
                    position,
                    message: format!("bad attribute value: {err}"),
                })?
                .into_owned();
            pairs.push((key, value));
        }
        Ok(Attrs { pairs, position })
    }

    fn get(&self, key: &str) -> Option<String> {
        self.pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
    }

    fn required(&self, key: &str) -> std::result::Result<String, ParseError> {
        self.get(key).ok_or_else(|| ParseError {
            position: self.position,
            message: format!("missing required attribute {key:?}"),
        })
    }

    fn required_i64(&self, key: &str) -> std::result::Result<i64, ParseError> {
        let raw = self.required(key)?;
        raw.parse().map_err(|_| ParseError {
            position: self.position,
            message: format!("attribute {key:?} is not an integer: {raw:?}"),
        })
    }

    fn required_f64(&self, key: &str) -> std::result::Result<f64, ParseError> {
        let raw = self.required(key)?;
        raw.parse().map_err(|_| ParseError {
            position: self.position,
            message: format!("attribute {key:?} is not a number: {raw:?}"),
        })
    }
}
