//! Core analysis primitives for scoring the health-promotion potential of
//! urban parks from OpenStreetMap data.
//!
//! The pipeline built on top of this crate works roughly like this: an OSM
//! extract is resolved into geometries ([`osm`]), park polygons are
//! assembled and the facilities inside each park are collected, tags are
//! cleaned and mapped to activity categories ([`lexicon`]), per-city
//! regressions of facility counts against park area produce residual scores
//! ([`scoring`]), and the score distributions feed equity and validation
//! analyses ([`equity`], [`validation`]). Classifier output used to build a
//! lexicon can be evaluated with [`eval`].
//!
//! The crate is `no_std` (with `alloc`), so the algorithmic core stays free
//! of platform dependencies. IO, file formats and the command line live in
//! the companion `parkhealth` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod equity;
pub mod eval;
pub mod geometry;
pub mod lexicon;
pub mod osm;
pub mod scoring;
pub mod stats;
pub mod validation;
