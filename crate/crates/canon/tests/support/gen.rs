//! Deterministic random-archive generator for property-style checks.

use canon::archive::{write_archive, Archive, Compression, Entry, FormatKind, Trailer};
use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

const MANIFEST_TEMPLATE: &[u8] = b"Manifest-Version: 1.0\r\nBuilt-By: root\r\nBnd-LastModified: 1647431421514\r\nExport-Package: b.pkg,a.pkg\r\n\r\n";
const PROPERTIES_TEMPLATE: &[u8] = b"#Generated by Apache Maven\nversion=1.0\nartifactId=demo\ngroupId=org.example\n";
const SBOM_TEMPLATE: &[u8] = b"{\"bomFormat\": \"CycloneDX\", \"serialNumber\": \"urn:uuid:x\", \"metadata\": {\"timestamp\": \"2022-04-20T20:27:33Z\"}, \"components\": []}";

fn random_path(rng: &mut ChaCha8Rng, index: usize) -> Vec<u8> {
    let dirs = ["", "lib/", "META-INF/", "org/example/", "docs/"];
    let dir = dirs[rng.random_range(0..dirs.len())];
    format!("{dir}entry-{index:02}-{:04x}", rng.random_range(0..0x10000u32)).into_bytes()
}

fn random_entry(rng: &mut ChaCha8Rng, index: usize, nested: Option<&[u8]>) -> Entry {
    let kind = rng.random_range(0..10u32);
    let (path, payload): (Vec<u8>, Vec<u8>) = match kind {
        0 => (b"META-INF/MANIFEST.MF".to_vec(), MANIFEST_TEMPLATE.to_vec()),
        1 => {
            let mut p = random_path(rng, index);
            p.extend_from_slice(b".properties");
            (p, PROPERTIES_TEMPLATE.to_vec())
        }
        2 => {
            let mut p = random_path(rng, index);
            p.extend_from_slice(b"-cyclonedx.json");
            (p, SBOM_TEMPLATE.to_vec())
        }
        3 if nested.is_some() => {
            let mut p = random_path(rng, index);
            p.extend_from_slice(b".jar");
            (p, nested.unwrap().to_vec())
        }
        4 => {
            let p = random_path(rng, index);
            return {
                let mut e = Entry::directory(&p);
                e.mtime = rng.random_range(0..2_000_000_000);
                e.unix_mode = 0o040_000 | rng.random_range(0..0o1000) as u16;
                e
            };
        }
        _ => {
            let mut payload = vec![0u8; rng.random_range(0..64)];
            rng.fill_bytes(&mut payload);
            (random_path(rng, index), payload)
        }
    };
    let mut entry = Entry::file(&path, payload);
    entry.mtime = rng.random_range(-1000..2_000_000_000);
    entry.unix_mode = 0o100_000 | rng.random_range(0..0o1000) as u16;
    entry.compression = if rng.random_bool(0.5) { Compression::Deflate } else { Compression::Store };
    if rng.random_bool(0.2) {
        entry.owner_user = b"someone".to_vec();
        entry.owner_group = b"staff".to_vec();
    }
    if rng.random_bool(0.15) {
        entry.extra_fields.push((0x0A0A, vec![rng.random(); 4]));
    }
    entry
}

/// A random ZIP archive with up to eight unique entries, occasionally
/// containing a nested archive, a manifest, properties, or an SBOM.
pub fn random_archive(rng: &mut ChaCha8Rng) -> Archive {
    let nested_inner = {
        let mut inner = Archive::new(FormatKind::Zip);
        inner.trailer = Trailer::ZipComment(Vec::new());
        let mut e = Entry::file(b"inner.txt", b"nested".to_vec());
        e.mtime = rng.random_range(0..2_000_000_000);
        inner.entries.push(e);
        write_archive(&inner).expect("inner archive serializes")
    };
    let mut archive = Archive::new(FormatKind::Zip);
    archive.trailer = Trailer::ZipComment(Vec::new());
    let count = rng.random_range(0..8);
    for i in 0..count {
        let entry = random_entry(rng, i, Some(&nested_inner));
        if archive.entries.iter().any(|e| e.path == entry.path) {
            continue;
        }
        archive.entries.push(entry);
    }
    archive
}
