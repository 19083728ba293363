//! Lossless in-memory model of ZIP/JAR, tar, and gzip containers.
//!
//! Parsing keeps every metadata field the stabilizer needs to inspect or
//! rewrite; writing is deterministic, so identical [`Archive`] values always
//! serialize to identical bytes, on any host.

mod gzip;
mod tar;
mod zip;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use zip::ZipWriteOptions;

/// Container format, detected from leading magic bytes only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormatKind {
    Zip,
    Tar,
    Gzip,
    /// Anything unrecognized; compared as raw bytes, never an error.
    Opaque,
}

/// Entry payload compression inside the container.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Compression {
    Store,
    /// Deflate at an unknown original level; payloads are held decompressed
    /// and recompressed at one fixed effort on write. Bit-identical
    /// recompression of third-party streams is not promised.
    Deflate,
}

/// One archive member, fully decompressed, with normalized metadata.
///
/// Paths use forward slashes and directory entries end with `/`. Fields a
/// format cannot express are held at their documented defaults (mtime 0,
/// empty owners, mode 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub path: Vec<u8>,
    pub payload: Vec<u8>,
    /// Seconds since the Unix epoch.
    pub mtime: i64,
    /// Unix permission and file-type bits; 0 when the producer recorded none.
    pub unix_mode: u16,
    pub owner_user: Vec<u8>,
    pub owner_group: Vec<u8>,
    pub compression: Compression,
    /// Format-specific extension records, e.g. ZIP central-directory extra
    /// fields, in original order. Extended-timestamp fields are folded into
    /// `mtime` at parse time and regenerated on write.
    pub extra_fields: Vec<(u16, Vec<u8>)>,
    pub is_directory: bool,
}

impl Entry {
    /// New file entry with default metadata.
    pub fn file(path: &[u8], payload: Vec<u8>) -> Self {
        Entry {
            path: path.to_vec(),
            payload,
            mtime: 0,
            unix_mode: 0,
            owner_user: Vec::new(),
            owner_group: Vec::new(),
            compression: Compression::Store,
            extra_fields: Vec::new(),
            is_directory: false,
        }
    }

    /// New directory entry; the path gains a trailing `/` if missing.
    pub fn directory(path: &[u8]) -> Self {
        let mut p = path.to_vec();
        if !p.ends_with(b"/") {
            p.push(b'/');
        }
        Entry { is_directory: true, ..Entry::file(&p, Vec::new()) }
    }

    /// Final path segment, ignoring a trailing directory slash.
    pub fn basename(&self) -> &[u8] {
        let p = if self.path.ends_with(b"/") { &self.path[..self.path.len() - 1] } else { &self.path[..] };
        match p.iter().rposition(|&b| b == b'/') {
            Some(i) => &p[i + 1..],
            None => p,
        }
    }

    pub fn path_lossy(&self) -> String {
        String::from_utf8_lossy(&self.path).into_owned()
    }

    /// Any executable bit in the permission portion of the mode.
    pub fn is_executable(&self) -> bool {
        self.unix_mode & 0o111 != 0
    }
}

/// Format-specific framing kept so that parse→write is lossless.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Trailer {
    #[default]
    None,
    /// ZIP end-of-central-directory comment bytes.
    ZipComment(Vec<u8>),
    /// Gzip header operating-system byte and optional FCOMMENT text.
    GzipHeader { os: u8, comment: Option<Vec<u8>> },
}

/// A parsed container: ordered entries plus framing metadata.
///
/// For ZIP the entry order is the central-directory order at parse time.
/// Gzip holds exactly one entry whose path is the FNAME header field (empty
/// when absent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Archive {
    pub format: FormatKind,
    pub entries: Vec<Entry>,
    pub trailer: Trailer,
}

impl Archive {
    pub fn new(format: FormatKind) -> Self {
        Archive { format, entries: Vec::new(), trailer: Trailer::None }
    }

    pub fn entry(&self, path: &[u8]) -> Option<&Entry> {
        self.entries.iter().find(|e| e.path == path)
    }
}

/// Result of a parse, carrying non-fatal observations (for example local
/// versus central ZIP header disagreements) alongside the archive.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub archive: Archive,
    pub notes: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ArchiveError {
    /// The input cannot be safely modeled and must be compared as opaque
    /// bytes instead.
    #[error("malformed archive: {0}")]
    Malformed(String),
    /// A payload exceeds the format's 32-bit limits and ZIP64 is disabled.
    #[error("entry too large for non-ZIP64 archive: {0}")]
    EntryTooLarge(String),
}

/// Detect the container format from leading magic bytes.
///
/// ZIP is `PK` at offset 0, gzip is `1F 8B`, tar is `ustar` at offset 257.
/// Anything else is [`FormatKind::Opaque`]; detection never fails.
pub fn detect_format(bytes: &[u8]) -> FormatKind {
    if bytes.len() >= 2 && bytes[0] == 0x50 && bytes[1] == 0x4B {
        return FormatKind::Zip;
    }
    if bytes.len() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B {
        return FormatKind::Gzip;
    }
    if bytes.len() >= 262 && &bytes[257..262] == b"ustar" {
        return FormatKind::Tar;
    }
    FormatKind::Opaque
}

/// Parse a container into the lossless model.
///
/// Every payload comes back fully decompressed and byte-exact; absent
/// metadata gets the documented defaults. Fails with
/// [`ArchiveError::Malformed`] when the input cannot be modeled, in which
/// case callers fall back to opaque byte comparison.
pub fn parse_archive(bytes: &[u8]) -> Result<Parsed, ArchiveError> {
    let parsed = match detect_format(bytes) {
        FormatKind::Zip => zip::parse(bytes),
        FormatKind::Tar => tar::parse(bytes),
        FormatKind::Gzip => gzip::parse(bytes),
        FormatKind::Opaque => Err(ArchiveError::Malformed("no container magic".into())),
    }?;
    let mut seen = std::collections::BTreeSet::new();
    for entry in &parsed.archive.entries {
        if !seen.insert(&entry.path) {
            return Err(ArchiveError::Malformed(format!("duplicate entry path {}", entry.path_lossy())));
        }
    }
    Ok(parsed)
}

/// Serialize an archive deterministically.
///
/// Identical archives produce identical bytes across runs and hosts, and
/// `parse_archive(write_archive(a))` preserves entry paths, payloads,
/// mtimes, modes, owners, and order.
pub fn write_archive(archive: &Archive) -> Result<Vec<u8>, ArchiveError> {
    match archive.format {
        FormatKind::Zip => zip::write(archive, &ZipWriteOptions::default()),
        FormatKind::Tar => tar::write(archive),
        FormatKind::Gzip => gzip::write(archive),
        FormatKind::Opaque => Err(ArchiveError::Malformed("cannot write an opaque archive".into())),
    }
}

/// ZIP write with explicit options; other formats ignore them.
pub fn write_archive_with(archive: &Archive, zip_options: &ZipWriteOptions) -> Result<Vec<u8>, ArchiveError> {
    match archive.format {
        FormatKind::Zip => zip::write(archive, zip_options),
        _ => write_archive(archive),
    }
}

pub(crate) fn deflate_compress(data: &[u8]) -> Vec<u8> {
    use std::io::Write;
    // Fixed effort so recompression is deterministic across hosts.
    let mut enc = flate2::write::DeflateEncoder::new(Vec::new(), flate2::Compression::new(6));
    enc.write_all(data).expect("in-memory deflate cannot fail");
    enc.finish().expect("in-memory deflate cannot fail")
}

pub(crate) fn deflate_decompress(data: &[u8], size_hint: usize) -> Result<Vec<u8>, ArchiveError> {
    use std::io::Read;
    let mut out = Vec::with_capacity(size_hint);
    let mut dec = flate2::read::DeflateDecoder::new(data);
    dec.read_to_end(&mut out).map_err(|e| ArchiveError::Malformed(format!("bad deflate stream: {e}")))?;
    Ok(out)
}
