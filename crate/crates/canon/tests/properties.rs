//! Property tests: round-trip fidelity and payload conservation over
//! generated archives, plus idempotence of the embedded-file
//! canonicalizers on adversarial text.

use canon::archive::{parse_archive, write_archive, Archive, Compression, Entry, FormatKind, Trailer};
use canon::properties::canonicalize_properties;
use canon::rules::RuleProfile;
use canon::stabilize::stabilize_archive;
use proptest::collection::vec;
use proptest::prelude::*;
use std::collections::BTreeMap;

const S_IFREG: u16 = 0o100_000;
const S_IFDIR: u16 = 0o040_000;

fn path_segment() -> impl Strategy<Value = String> {
    "[a-z0-9_.-]{1,12}".prop_filter("dots alone are not path segments", |s| s != "." && s != "..")
}

fn entry_path() -> impl Strategy<Value = Vec<u8>> {
    vec(path_segment(), 1..4).prop_map(|segments| segments.join("/").into_bytes())
}

#[derive(Clone, Debug)]
struct GenEntry {
    path: Vec<u8>,
    payload: Vec<u8>,
    mtime: i64,
    perm: u16,
    directory: bool,
    deflate: bool,
    owner: bool,
    extra: Option<Vec<u8>>,
}

fn gen_entry() -> impl Strategy<Value = GenEntry> {
    (
        entry_path(),
        vec(any::<u8>(), 0..200),
        // Keep ZIP mtimes inside the 32-bit extended-timestamp range.
        -1_000_000i64..2_000_000_000,
        0u16..0o1000,
        any::<bool>(),
        any::<bool>(),
        any::<bool>(),
        proptest::option::of(vec(any::<u8>(), 0..8)),
    )
        .prop_map(|(path, payload, mtime, perm, directory, deflate, owner, extra)| GenEntry {
            path,
            payload,
            mtime,
            perm,
            directory,
            deflate,
            owner,
            extra,
        })
}

fn build_archive(format: FormatKind, raw: Vec<GenEntry>) -> Archive {
    let mut archive = Archive::new(format);
    if format == FormatKind::Zip {
        archive.trailer = Trailer::ZipComment(Vec::new());
    }
    let mut seen = std::collections::BTreeSet::new();
    for spec in raw {
        let mut entry = if spec.directory {
            Entry::directory(&spec.path)
        } else {
            Entry::file(&spec.path, spec.payload.clone())
        };
        if !seen.insert(entry.path.clone()) {
            continue;
        }
        entry.mtime = spec.mtime;
        match format {
            FormatKind::Zip => {
                entry.unix_mode = if spec.directory { S_IFDIR | spec.perm } else { spec.perm };
                entry.compression = if spec.deflate && !spec.directory { Compression::Deflate } else { Compression::Store };
                if let Some(extra) = &spec.extra {
                    // Avoid the tags the writer itself manages.
                    entry.extra_fields.push((0x6049, extra.clone()));
                }
            }
            FormatKind::Tar => {
                entry.unix_mode = if spec.directory { S_IFDIR | spec.perm } else { S_IFREG | spec.perm };
                if spec.owner {
                    entry.owner_user = b"builder".to_vec();
                    entry.owner_group = b"wheel".to_vec();
                }
            }
            _ => unreachable!(),
        }
        archive.entries.push(entry);
    }
    archive
}

/// A small valid classfile to use as corruption fodder.
fn sample_class() -> Vec<u8> {
    canon::corpus::classgen::greeter_class(&canon::corpus::classgen::GreeterShape::default())
}

fn payload_multiset(archive: &Archive) -> BTreeMap<(Vec<u8>, Vec<u8>), usize> {
    let mut out = BTreeMap::new();
    for e in &archive.entries {
        *out.entry((e.path.clone(), e.payload.clone())).or_insert(0) += 1;
    }
    out
}

proptest! {
    #[test]
    fn zip_round_trip_preserves_modeled_fields(raw in vec(gen_entry(), 0..10)) {
        let archive = build_archive(FormatKind::Zip, raw);
        let bytes = write_archive(&archive).unwrap();
        let reparsed = parse_archive(&bytes).unwrap().archive;
        prop_assert_eq!(&reparsed, &archive);
        prop_assert_eq!(write_archive(&reparsed).unwrap(), bytes);
    }

    #[test]
    fn tar_round_trip_preserves_modeled_fields(raw in vec(gen_entry(), 1..10)) {
        let archive = build_archive(FormatKind::Tar, raw);
        let bytes = write_archive(&archive).unwrap();
        let reparsed = parse_archive(&bytes).unwrap().archive;
        prop_assert_eq!(&reparsed, &archive);
        prop_assert_eq!(write_archive(&reparsed).unwrap(), bytes);
    }

    #[test]
    fn payload_multiset_is_invariant_under_round_trip(raw in vec(gen_entry(), 0..10)) {
        let archive = build_archive(FormatKind::Zip, raw);
        let reparsed = parse_archive(&write_archive(&archive).unwrap()).unwrap().archive;
        prop_assert_eq!(payload_multiset(&archive), payload_multiset(&reparsed));
    }

    #[test]
    fn stabilize_is_idempotent_and_order_confluent(raw in vec(gen_entry(), 0..8), rotate in 0usize..8) {
        let archive = build_archive(FormatKind::Zip, raw);
        let mut permuted = archive.clone();
        if !permuted.entries.is_empty() {
            let by = rotate % permuted.entries.len();
            permuted.entries.rotate_left(by);
        }
        let profile = RuleProfile::default_profile();
        let once = write_archive(&stabilize_archive(&archive, &profile).archive).unwrap();
        let from_permuted = write_archive(&stabilize_archive(&permuted, &profile).archive).unwrap();
        prop_assert_eq!(&once, &from_permuted, "permutation must not affect the stabilized bytes");
        let reparsed = parse_archive(&once).unwrap().archive;
        let twice = write_archive(&stabilize_archive(&reparsed, &profile).archive).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn properties_canonicalization_is_idempotent(lines in vec("[ -~]{0,40}", 0..20)) {
        let text = lines.join("\n").into_bytes();
        let once = canonicalize_properties(&text);
        prop_assert_eq!(canonicalize_properties(&once), once);
    }

    #[test]
    fn corrupted_inputs_error_instead_of_panicking(
        raw in vec(gen_entry(), 1..6),
        flips in vec((any::<proptest::sample::Index>(), any::<u8>()), 1..12),
        truncate_to in any::<proptest::sample::Index>(),
    ) {
        // Start from valid bytes of each format, then damage them. Parsing
        // must always return (with either result), never panic.
        let zip = write_archive(&build_archive(FormatKind::Zip, raw.clone())).unwrap();
        let tar = write_archive(&build_archive(FormatKind::Tar, raw)).unwrap();
        let class = {
            let cf = canon::classfile::parse_classfile(&sample_class()).unwrap();
            canon::classfile::write_classfile(&cf).unwrap()
        };
        for original in [&zip, &tar, &class] {
            let mut damaged = original.clone();
            for (index, mask) in &flips {
                let at = index.index(damaged.len());
                damaged[at] ^= mask | 1;
            }
            let _ = parse_archive(&damaged);
            let _ = canon::classfile::parse_classfile(&damaged);
            let cut = truncate_to.index(damaged.len() + 1);
            damaged.truncate(cut);
            let _ = parse_archive(&damaged);
            let _ = canon::classfile::parse_classfile(&damaged);
        }
    }

    #[test]
    fn gzip_round_trip(payload in vec(any::<u8>(), 0..500), name in "[a-z0-9.-]{0,16}", mtime in 0i64..4_000_000_000) {
        let mut entry = Entry::file(name.as_bytes(), payload);
        entry.mtime = mtime;
        entry.compression = Compression::Deflate;
        let archive = Archive {
            format: FormatKind::Gzip,
            entries: vec![entry],
            trailer: Trailer::GzipHeader { os: 3, comment: None },
        };
        let bytes = write_archive(&archive).unwrap();
        let reparsed = parse_archive(&bytes).unwrap().archive;
        prop_assert_eq!(reparsed, archive);
    }
}
