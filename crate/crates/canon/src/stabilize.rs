//! The canonicalization engine: applies a profile's enabled rules to an
//! archive, recursing into nested containers, and reports which rules
//! actually changed something.

use crate::archive::{detect_format, parse_archive, write_archive, Archive, Compression, Entry, FormatKind, Trailer};
use crate::classfile::{canonicalize_classfile, parse_classfile, write_classfile, CanonicalizeOptions};
use crate::manifest::{canonicalize_manifest_with, ManifestOptions};
use crate::properties::{canonicalize_properties_with, PropertiesOptions};
use crate::rules::{id, RuleProfile};
use crate::sbom::{canonicalize_sbom_with, SbomOptions};
use std::collections::BTreeSet;

/// Result of stabilizing one archive tree.
#[derive(Clone, Debug)]
pub struct Stabilized {
    pub archive: Archive,
    /// Ids of enabled rules whose transform changed at least one byte or
    /// removed at least one entry.
    pub applied_rule_ids: BTreeSet<&'static str>,
    /// Non-fatal observations: recursion limits, malformed embedded files
    /// left untouched, unsortable headers.
    pub notes: Vec<String>,
}

const GIT_FILE_RULES: &[&str] = &[
    id::VERSIONING_COMMIT_COUNT,
    id::VERSIONING_GIT_TAGS,
    id::VERSIONING_BRANCH_NAME,
    id::VERSIONING_LOCAL_BRANCH,
    id::VERSIONING_COMMIT_TIMEZONE,
    id::VERSIONING_REMOTE_URL,
];

fn ends_with_ci(path: &[u8], suffix: &[u8]) -> bool {
    path.len() >= suffix.len() && path[path.len() - suffix.len()..].eq_ignore_ascii_case(suffix)
}

fn is_signature_file(entry: &Entry) -> bool {
    entry.path.starts_with(b"META-INF/")
        && (ends_with_ci(&entry.path, b".SF")
            || ends_with_ci(&entry.path, b".RSA")
            || ends_with_ci(&entry.path, b".DSA")
            || ends_with_ci(&entry.path, b".EC"))
}

fn is_git_file(entry: &Entry) -> bool {
    entry.basename() == b"git.properties" || entry.basename() == b"git.json"
}

fn is_maven_pom_properties(entry: &Entry) -> bool {
    entry.path.starts_with(b"META-INF/maven/") && entry.basename() == b"pom.properties"
}

fn is_module_info(entry: &Entry) -> bool {
    entry.basename() == b"module-info.class"
}

fn looks_like_sbom(entry: &Entry) -> bool {
    let base = entry.basename().to_ascii_lowercase();
    let named_like_bom = base.windows(9).any(|w| w == b"cyclonedx")
        || base.ends_with(b".cdx.json")
        || base.ends_with(b".cdx.xml")
        || base == b"bom.json"
        || base == b"bom.xml";
    if !named_like_bom {
        return false;
    }
    base.ends_with(b".json") || base.ends_with(b".xml")
}

/// Remove embedded versioning files: `git.properties`/`git.json` anywhere,
/// and `pom.properties` under `META-INF/maven/`.
pub fn strip_versioning_entries(archive: &Archive) -> Archive {
    let mut out = archive.clone();
    out.entries.retain(|e| !is_git_file(e) && !is_maven_pom_properties(e));
    out
}

/// Normalize permission bits: 0644 for plain files, 0755 for anything that
/// had an executable bit and for directories. File-type bits pass through.
fn normalize_mode(entry: &Entry) -> u16 {
    let type_bits = entry.unix_mode & 0o170_000;
    let perm = if entry.is_directory || entry.is_executable() { 0o755 } else { 0o644 };
    type_bits | perm
}

struct Engine<'p> {
    profile: &'p RuleProfile,
    applied: BTreeSet<&'static str>,
    notes: Vec<String>,
}

impl Engine<'_> {
    fn mark(&mut self, rule_id: &'static str) {
        self.applied.insert(rule_id);
    }

    fn note(&mut self, entry: &Entry, message: &str) {
        self.notes.push(format!("{}: {message}", entry.path_lossy()));
    }

    fn stabilize(&mut self, archive: &Archive, depth_remaining: u32) -> Archive {
        let mut out = Archive::new(archive.format);
        out.trailer = archive.trailer.clone();
        let enabled = |rule: &str| self.profile.enabled(rule);

        for entry in &archive.entries {
            // Entry-removal rules first; a removed entry needs no rewriting.
            if enabled(id::JAR_SIGNATURE_FILES) && is_signature_file(entry) {
                self.mark(id::JAR_SIGNATURE_FILES);
                continue;
            }
            if is_git_file(entry) && GIT_FILE_RULES.iter().any(|r| enabled(r)) {
                for rule in GIT_FILE_RULES.iter().filter(|r| enabled(r)) {
                    self.mark(rule);
                }
                continue;
            }
            if enabled(id::VERSIONING_POM_PROPERTIES) && is_maven_pom_properties(entry) {
                self.mark(id::VERSIONING_POM_PROPERTIES);
                continue;
            }
            if enabled(id::CLASSFILE_MODULE_INFO) && is_module_info(entry) {
                self.mark(id::CLASSFILE_MODULE_INFO);
                continue;
            }

            let mut entry = entry.clone();
            self.rewrite_payload(&mut entry, depth_remaining);
            self.normalize_metadata(&mut entry, archive.format);
            out.entries.push(entry);
        }

        if self.profile.enabled(id::ARCHIVE_ENTRY_ORDER) && archive.format != FormatKind::Gzip {
            let before: Vec<&[u8]> = out.entries.iter().map(|e| e.path.as_slice()).collect();
            let mut sorted = before.clone();
            sorted.sort();
            if before != sorted {
                self.mark(id::ARCHIVE_ENTRY_ORDER);
            }
            out.entries.sort_by(|a, b| a.path.cmp(&b.path));
        }

        if self.profile.enabled(id::GZIP_HEADER) && archive.format == FormatKind::Gzip {
            let mut changed = false;
            if let Some(e) = out.entries.first_mut() {
                if !e.path.is_empty() || e.mtime != 0 {
                    changed = true;
                }
                e.path.clear();
                e.mtime = 0;
            }
            if out.trailer != (Trailer::GzipHeader { os: 0, comment: None }) {
                changed = true;
            }
            out.trailer = Trailer::GzipHeader { os: 0, comment: None };
            if changed {
                self.mark(id::GZIP_HEADER);
            }
        }
        out
    }

    /// Content rules: nested archives recurse, known embedded file types
    /// are canonicalized in place. Failures leave the payload untouched
    /// with a note.
    fn rewrite_payload(&mut self, entry: &mut Entry, depth_remaining: u32) {
        if entry.is_directory || entry.payload.is_empty() {
            return;
        }
        if detect_format(&entry.payload) != FormatKind::Opaque {
            if depth_remaining == 0 {
                self.note(entry, "nested archive beyond recursion depth limit; left untouched");
                return;
            }
            match parse_archive(&entry.payload) {
                Ok(parsed) => {
                    let inner = self.stabilize(&parsed.archive, depth_remaining - 1);
                    match write_archive(&inner) {
                        Ok(bytes) => entry.payload = bytes,
                        Err(e) => self.note(entry, &format!("nested archive rewrite failed: {e}")),
                    }
                }
                Err(e) => self.note(entry, &format!("nested archive unparsable, compared opaque: {e}")),
            }
            return;
        }

        if entry.path == b"META-INF/MANIFEST.MF" {
            let options = ManifestOptions::from_profile(self.profile);
            if options.remove_attributes.is_empty() && !options.sort_attributes && !options.sort_values && !options.remove_entry_digests {
                return;
            }
            match canonicalize_manifest_with(&entry.payload, &options) {
                Ok(result) => {
                    for name in &result.removed_attributes {
                        if let Some(rule) = self
                            .profile
                            .enabled_rules()
                            .find(|r| matches!(r.action, crate::rules::RuleAction::ManifestRemoveAttribute(a) if a.eq_ignore_ascii_case(name)))
                        {
                            self.mark(rule.id);
                        }
                    }
                    if result.removed_digests {
                        self.mark(id::MANIFEST_ENTRY_DIGESTS);
                    }
                    if result.reordered_attributes {
                        self.mark(id::MANIFEST_ATTRIBUTE_ORDER);
                    }
                    if result.reordered_values {
                        self.mark(id::MANIFEST_VALUE_ORDER);
                    }
                    for n in result.notes {
                        self.note(entry, &n);
                    }
                    entry.payload = result.text;
                }
                Err(e) => self.note(entry, &format!("manifest left untouched: {e}")),
            }
            return;
        }

        if looks_like_sbom(entry) {
            let options = SbomOptions::from_profile(self.profile);
            if !(options.remove_serial_number
                || options.remove_timestamp
                || options.remove_licenses
                || options.remove_descriptions
                || options.remove_external_references)
            {
                return;
            }
            match canonicalize_sbom_with(&entry.payload, &options) {
                Ok(text) => {
                    if text != entry.payload {
                        for (flag, rule) in [
                            (options.remove_serial_number, id::SBOM_SERIAL_NUMBER),
                            (options.remove_timestamp, id::SBOM_TIMESTAMP),
                            (options.remove_licenses, id::SBOM_LICENSE),
                            (options.remove_descriptions, id::SBOM_DESCRIPTION),
                            (options.remove_external_references, id::SBOM_EXTERNAL_REFERENCES),
                        ] {
                            if flag {
                                self.mark(rule);
                            }
                        }
                        entry.payload = text;
                    }
                }
                Err(e) => self.note(entry, &format!("SBOM left untouched: {e}")),
            }
            return;
        }

        if ends_with_ci(&entry.path, b".properties") {
            let options = PropertiesOptions::from_profile(self.profile);
            if !(options.remove_comments || options.sort_keys || options.remove_m2e) {
                return;
            }
            let result = canonicalize_properties_with(&entry.payload, &options);
            if result.removed_comments {
                self.mark(id::PROPERTIES_COMMENTS);
            }
            if result.removed_m2e {
                self.mark(id::PROPERTIES_M2E);
            }
            if result.reordered {
                self.mark(id::PROPERTIES_KEY_ORDER);
            }
            entry.payload = result.text;
            return;
        }

        if ends_with_ci(&entry.path, b".class") && !is_module_info(entry) {
            let sort_members = self.profile.enabled(id::CLASSFILE_STRUCTURAL);
            let strip_debug = self.profile.enabled(id::CLASSFILE_DEBUG_ATTRIBUTES);
            if !sort_members && !strip_debug {
                return;
            }
            let options = CanonicalizeOptions { sort_members, strip_debug, sort_annotation_arrays: false };
            match parse_classfile(&entry.payload)
                .and_then(|cf| canonicalize_classfile(&cf, &options))
                .and_then(|cf| write_classfile(&cf))
            {
                Ok(bytes) => {
                    if bytes != entry.payload {
                        if sort_members {
                            self.mark(id::CLASSFILE_STRUCTURAL);
                        }
                        if strip_debug {
                            self.mark(id::CLASSFILE_DEBUG_ATTRIBUTES);
                        }
                        entry.payload = bytes;
                    }
                }
                Err(e) => self.note(entry, &format!("classfile left uncanonicalized: {e}")),
            }
        }
    }

    fn normalize_metadata(&mut self, entry: &mut Entry, format: FormatKind) {
        let enabled = |rule: &str| self.profile.enabled(rule);
        if enabled(id::ARCHIVE_ENTRY_MTIME) && format != FormatKind::Gzip && entry.mtime != self.profile.fixed_timestamp {
            entry.mtime = self.profile.fixed_timestamp;
            self.mark(id::ARCHIVE_ENTRY_MTIME);
        }
        if enabled(id::ARCHIVE_COMPRESSION) && format == FormatKind::Zip && entry.compression != Compression::Store {
            entry.compression = Compression::Store;
            self.mark(id::ARCHIVE_COMPRESSION);
        }
        if enabled(id::ARCHIVE_UNIX_MODE) && format != FormatKind::Gzip {
            let mode = normalize_mode(entry);
            if entry.unix_mode != mode {
                entry.unix_mode = mode;
                self.mark(id::ARCHIVE_UNIX_MODE);
            }
        }
        if enabled(id::ARCHIVE_OWNERSHIP) && (!entry.owner_user.is_empty() || !entry.owner_group.is_empty()) {
            entry.owner_user.clear();
            entry.owner_group.clear();
            self.mark(id::ARCHIVE_OWNERSHIP);
        }
        if enabled(id::ARCHIVE_EXTRA_FIELDS) && !entry.extra_fields.is_empty() {
            entry.extra_fields.clear();
            self.mark(id::ARCHIVE_EXTRA_FIELDS);
        }
    }
}

/// Stabilize an archive under a profile: entries sorted, timestamps fixed,
/// compression stored, ownership and modes normalized, per-entry rules
/// applied, nested archives recursively rewritten up to the profile's depth
/// limit. Idempotent: stabilizing the output changes nothing.
pub fn stabilize_archive(archive: &Archive, profile: &RuleProfile) -> Stabilized {
    let mut engine = Engine { profile, applied: BTreeSet::new(), notes: Vec::new() };
    let archive = engine.stabilize(archive, profile.recursion_depth_limit);
    Stabilized { archive, applied_rule_ids: engine.applied, notes: engine.notes }
}
