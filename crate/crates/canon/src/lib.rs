//! Verification toolkit for reproducible builds of archive-packaged
//! artifacts.
//!
//! The pipeline compares a reference artifact against a rebuilt artifact,
//! canonicalizes away spurious non-determinism with a taxonomy-keyed rule
//! catalog, re-compares, and classifies whatever differences remain by root
//! cause. See the `canon` binary for the command-line surface.

pub mod archive;
pub mod classfile;
pub mod corpus;
pub mod diff;
pub mod fetch;
pub mod gav;
pub mod manifest;
pub mod properties;
pub mod rules;
pub mod sbom;
pub mod stabilize;
pub mod taxonomy;
pub mod verify;

pub use archive::{detect_format, parse_archive, write_archive, Archive, ArchiveError, Compression, Entry, FormatKind, Trailer};
pub use rules::{list_rules, ProfileName, RuleProfile, ZIP_TIMESTAMP_FLOOR};
pub use taxonomy::{Mitigation, Reason, TaxonomyCause};
pub use verify::{verify_batch, verify_pair, Verdict, VerdictStatus};
