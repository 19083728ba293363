//! JAR manifest canonicalization.
//!
//! Manifests are parsed after unfolding 72-byte continuation lines, edited
//! at the logical attribute level, then refolded with CRLF endings and a
//! final blank line, matching the framing the `jar` tool emits.

use crate::rules::{id, RuleProfile};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    /// The input has no `Name: value` key-colon structure; callers fall
    /// back to opaque comparison.
    #[error("not a manifest: {0}")]
    NotAManifest(String),
}

/// Attribute names whose comma-separated values are sorted. Commas inside
/// quoted strings are not separators (OSGi header grammar).
const SORTED_VALUE_ATTRIBUTES: &[&str] =
    &["Export-Package", "Import-Package", "Include-Resource", "Private-Package", "Provide-Capability"];

/// Which manifest edits to perform; derived from a profile's enabled rules.
#[derive(Clone, Debug, Default)]
pub struct ManifestOptions {
    /// Attribute names removed wherever they appear (case-insensitive).
    pub remove_attributes: Vec<String>,
    /// Drop `*-Digest` attributes from per-entry sections, and any section
    /// left holding nothing but its `Name`.
    pub remove_entry_digests: bool,
    /// Sort attributes within each section (`Manifest-Version` stays first)
    /// and named sections by their `Name` value.
    pub sort_attributes: bool,
    /// Sort the comma-separated values of the OSGi list attributes.
    pub sort_values: bool,
}

impl ManifestOptions {
    pub fn from_profile(profile: &RuleProfile) -> Self {
        let mut remove_attributes = Vec::new();
        for rule in profile.enabled_rules() {
            if let crate::rules::RuleAction::ManifestRemoveAttribute(name) = rule.action {
                remove_attributes.push(name.to_string());
            }
        }
        ManifestOptions {
            remove_attributes,
            remove_entry_digests: profile.enabled(id::MANIFEST_ENTRY_DIGESTS),
            sort_attributes: profile.enabled(id::MANIFEST_ATTRIBUTE_ORDER),
            sort_values: profile.enabled(id::MANIFEST_VALUE_ORDER),
        }
    }
}

/// Outcome of a canonicalization pass: the rewritten bytes, which edits
/// actually changed something, and non-fatal observations.
#[derive(Clone, Debug)]
pub struct CanonicalizedManifest {
    pub text: Vec<u8>,
    pub removed_attributes: Vec<String>,
    pub removed_digests: bool,
    pub reordered_attributes: bool,
    pub reordered_values: bool,
    pub notes: Vec<String>,
}

struct Section {
    attributes: Vec<(Vec<u8>, Vec<u8>)>,
}

impl Section {
    fn name_value(&self) -> Option<&[u8]> {
        self.attributes
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(b"Name"))
            .map(|(_, v)| v.as_slice())
    }
}

fn split_physical_lines(text: &[u8]) -> Vec<&[u8]> {
    let mut lines = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < text.len() {
        match text[i] {
            b'\n' => {
                lines.push(&text[start..i]);
                i += 1;
                start = i;
            }
            b'\r' => {
                lines.push(&text[start..i]);
                i += if text.get(i + 1) == Some(&b'\n') { 2 } else { 1 };
                start = i;
            }
            _ => i += 1,
        }
    }
    if start < text.len() {
        lines.push(&text[start..]);
    }
    lines
}

fn parse_sections(text: &[u8]) -> Result<Vec<Section>, ManifestError> {
    // Unfold: a line starting with a single space continues the previous one.
    let mut logical: Vec<Vec<Vec<u8>>> = vec![Vec::new()]; // per section, list of logical lines
    for line in split_physical_lines(text) {
        if line.is_empty() {
            if !logical.last().unwrap().is_empty() {
                logical.push(Vec::new());
            }
            continue;
        }
        if line[0] == b' ' {
            match logical.last_mut().unwrap().last_mut() {
                Some(prev) => prev.extend_from_slice(&line[1..]),
                None => return Err(ManifestError::NotAManifest("continuation line with nothing to continue".into())),
            }
        } else {
            logical.last_mut().unwrap().push(line.to_vec());
        }
    }
    logical.retain(|s| !s.is_empty());
    if logical.is_empty() {
        return Err(ManifestError::NotAManifest("empty input".into()));
    }

    let mut sections = Vec::with_capacity(logical.len());
    for raw in logical {
        let mut attributes = Vec::with_capacity(raw.len());
        for line in raw {
            let colon = line
                .iter()
                .position(|&b| b == b':')
                .ok_or_else(|| ManifestError::NotAManifest("line without key-colon structure".into()))?;
            let key = &line[..colon];
            if key.is_empty() || !key.iter().all(|&b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_') {
                return Err(ManifestError::NotAManifest(format!(
                    "invalid attribute name {:?}",
                    String::from_utf8_lossy(key)
                )));
            }
            let mut value = &line[colon + 1..];
            if value.first() == Some(&b' ') {
                value = &value[1..];
            }
            attributes.push((key.to_vec(), value.to_vec()));
        }
        sections.push(Section { attributes });
    }
    Ok(sections)
}

/// Split a header value on top-level commas. Double quotes guard commas;
/// backslash escapes the next character inside quotes. Returns `None` for
/// an unbalanced quote, in which case the value is left untouched.
fn split_top_level_commas(value: &[u8]) -> Option<Vec<Vec<u8>>> {
    let mut parts = Vec::new();
    let mut current = Vec::new();
    let mut in_quotes = false;
    let mut i = 0;
    while i < value.len() {
        let b = value[i];
        match b {
            b'"' => {
                in_quotes = !in_quotes;
                current.push(b);
            }
            b'\\' if in_quotes && i + 1 < value.len() => {
                current.push(b);
                current.push(value[i + 1]);
                i += 1;
            }
            b',' if !in_quotes => {
                parts.push(std::mem::take(&mut current));
            }
            _ => current.push(b),
        }
        i += 1;
    }
    if in_quotes {
        return None;
    }
    parts.push(current);
    Some(parts)
}

fn fold_line(out: &mut Vec<u8>, key: &[u8], value: &[u8]) {
    let mut line = Vec::with_capacity(key.len() + value.len() + 2);
    line.extend_from_slice(key);
    line.extend_from_slice(b": ");
    line.extend_from_slice(value);
    let mut rest = &line[..];
    let mut first = true;
    while !rest.is_empty() {
        let budget = if first { 72 } else { 71 };
        let take = rest.len().min(budget);
        if !first {
            out.push(b' ');
        }
        out.extend_from_slice(&rest[..take]);
        out.extend_from_slice(b"\r\n");
        rest = &rest[take..];
        first = false;
    }
    if first {
        out.extend_from_slice(b"\r\n");
    }
}

/// Canonicalize manifest text with the edits the profile enables.
pub fn canonicalize_manifest(text: &[u8], profile: &RuleProfile) -> Result<CanonicalizedManifest, ManifestError> {
    canonicalize_manifest_with(text, &ManifestOptions::from_profile(profile))
}

pub fn canonicalize_manifest_with(text: &[u8], options: &ManifestOptions) -> Result<CanonicalizedManifest, ManifestError> {
    let mut sections = parse_sections(text)?;
    let mut outcome = CanonicalizedManifest {
        text: Vec::new(),
        removed_attributes: Vec::new(),
        removed_digests: false,
        reordered_attributes: false,
        reordered_values: false,
        notes: Vec::new(),
    };

    for (index, section) in sections.iter_mut().enumerate() {
        section.attributes.retain(|(k, _)| {
            let hit = options.remove_attributes.iter().any(|r| k.eq_ignore_ascii_case(r.as_bytes()));
            if hit {
                outcome.removed_attributes.push(String::from_utf8_lossy(k).into_owned());
            }
            !hit
        });

        if options.remove_entry_digests && index > 0 {
            let before = section.attributes.len();
            section
                .attributes
                .retain(|(k, _)| !k.to_ascii_lowercase().ends_with(b"-digest"));
            if section.attributes.len() != before {
                outcome.removed_digests = true;
            }
        }

        if options.sort_values {
            for (key, value) in section.attributes.iter_mut() {
                if !SORTED_VALUE_ATTRIBUTES.iter().any(|a| key.eq_ignore_ascii_case(a.as_bytes())) {
                    continue;
                }
                match split_top_level_commas(value) {
                    Some(mut parts) if parts.len() > 1 => {
                        let original = parts.clone();
                        parts.sort();
                        if parts != original {
                            outcome.reordered_values = true;
                        }
                        *value = parts.join(&b","[..]);
                    }
                    Some(_) => {}
                    None => outcome.notes.push(format!(
                        "unbalanced quote in {} value; left unsorted",
                        String::from_utf8_lossy(key)
                    )),
                }
            }
        }

        if options.sort_attributes {
            let original: Vec<Vec<u8>> = section.attributes.iter().map(|(k, _)| k.clone()).collect();
            section.attributes.sort_by(|(a, _), (b, _)| {
                // Manifest-Version leads the main section, Name leads entry
                // sections; everything else sorts by name bytes.
                let lead = if index == 0 { &b"Manifest-Version"[..] } else { &b"Name"[..] };
                let rank = |k: &[u8]| -> u8 {
                    if k.eq_ignore_ascii_case(lead) {
                        0
                    } else {
                        1
                    }
                };
                rank(a).cmp(&rank(b)).then_with(|| a.cmp(b))
            });
            if original != section.attributes.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>() {
                outcome.reordered_attributes = true;
            }
        }
    }

    // Entry sections reduced to a bare Name (signature digests removed)
    // carry no information; drop them so signed and unsigned manifests
    // converge.
    if options.remove_entry_digests {
        let before = sections.len();
        let mut kept = vec![sections.remove(0)];
        kept.extend(sections.into_iter().filter(|s| {
            !(s.attributes.len() == 1 && s.attributes[0].0.eq_ignore_ascii_case(b"Name"))
        }));
        sections = kept;
        if sections.len() != before {
            outcome.removed_digests = true;
        }
    }

    if options.sort_attributes && sections.len() > 2 {
        let original: Vec<Option<Vec<u8>>> = sections[1..].iter().map(|s| s.name_value().map(<[u8]>::to_vec)).collect();
        sections[1..].sort_by(|a, b| a.name_value().cmp(&b.name_value()));
        if original != sections[1..].iter().map(|s| s.name_value().map(<[u8]>::to_vec)).collect::<Vec<_>>() {
            outcome.reordered_attributes = true;
        }
    }

    let mut out = Vec::with_capacity(text.len());
    for section in &sections {
        for (key, value) in &section.attributes {
            fold_line(&mut out, key, value);
        }
        out.extend_from_slice(b"\r\n");
    }
    outcome.text = out;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_options() -> ManifestOptions {
        ManifestOptions::from_profile(&RuleProfile::default_profile())
    }

    fn aggressive_options() -> ManifestOptions {
        ManifestOptions::from_profile(&RuleProfile::aggressive())
    }

    fn text(result: &CanonicalizedManifest) -> String {
        String::from_utf8(result.text.clone()).unwrap()
    }

    #[test]
    fn built_by_is_removed_under_default() {
        let input = b"Manifest-Version: 1.0\r\nBuilt-By: root\r\nArchiver-Version: Plexus Archiver\r\n\r\n";
        let out = canonicalize_manifest_with(input, &default_options()).unwrap();
        assert!(!text(&out).contains("Built-By"));
        assert!(text(&out).contains("Archiver-Version: Plexus Archiver"));
        assert_eq!(out.removed_attributes, vec!["Built-By"]);
    }

    #[test]
    fn export_package_values_are_sorted() {
        let input = b"Manifest-Version: 1.0\r\nExport-Package: org.slf4j.ext;version=\"2.0.6\",org.slf4j.agent;version=\"2.0.6\"\r\n\r\n";
        let out = canonicalize_manifest_with(input, &default_options()).unwrap();
        let body = text(&out).replace("\r\n ", ""); // unfold for the assertion
        let agent = body.find("org.slf4j.agent").unwrap();
        let ext = body.find("org.slf4j.ext").unwrap();
        assert!(agent < ext, "agent must sort before ext: {body}");
        assert!(out.reordered_values);
    }

    #[test]
    fn quoted_commas_are_not_separators() {
        let input = b"Manifest-Version: 1.0\r\nExport-Package: z.pkg;uses:=\"b,a\",a.pkg\r\n\r\n";
        let out = canonicalize_manifest_with(input, &default_options()).unwrap();
        let body = text(&out).replace("\r\n ", "");
        assert!(body.contains("a.pkg,z.pkg;uses:=\"b,a\""), "{body}");
    }

    #[test]
    fn minimal_manifest_is_stable_modulo_framing() {
        let input = b"Manifest-Version: 1.0\n";
        let out = canonicalize_manifest_with(input, &default_options()).unwrap();
        assert_eq!(text(&out), "Manifest-Version: 1.0\r\n\r\n");
    }

    #[test]
    fn long_values_fold_at_72_bytes() {
        let long = "x".repeat(200);
        let input = format!("Manifest-Version: 1.0\r\nImplementation-Title: {long}\r\n\r\n");
        let out = canonicalize_manifest_with(input.as_bytes(), &default_options()).unwrap();
        for line in text(&out).split("\r\n") {
            assert!(line.len() <= 72, "line over 72 bytes: {line:?}");
        }
        // Unfolding recovers the original value.
        let unfolded = text(&out).replace("\r\n ", "");
        assert!(unfolded.contains(&format!("Implementation-Title: {long}")));
    }

    #[test]
    fn canonicalization_is_idempotent() {
        let input = b"Manifest-Version: 1.0\r\nBuilt-By: root\r\nBnd-LastModified: 1647431421514\r\nExport-Package: b.pkg,a.pkg\r\nZ-Attr: 1\r\nA-Attr: 2\r\n\r\nName: org/x/A.class\r\nSHA-256-Digest: abcd\r\n\r\n";
        let once = canonicalize_manifest_with(input, &default_options()).unwrap();
        let twice = canonicalize_manifest_with(&once.text, &default_options()).unwrap();
        assert_eq!(once.text, twice.text);
    }

    #[test]
    fn aggressive_also_strips_rebuild_process_attributes() {
        let input = b"Manifest-Version: 1.0\r\nBuild-Jdk: 1.8.0_292\r\nCreated-By: Apache Maven\r\nSCM-Revision: c48c286d\r\n\r\n";
        let kept = canonicalize_manifest_with(input, &default_options()).unwrap();
        assert!(text(&kept).contains("Build-Jdk"), "default keeps Build-Jdk for classification");
        let gone = canonicalize_manifest_with(input, &aggressive_options()).unwrap();
        assert!(!text(&gone).contains("Build-Jdk"));
        assert!(!text(&gone).contains("Created-By"));
        assert!(!text(&gone).contains("SCM-Revision"));
    }

    #[test]
    fn signed_entry_sections_disappear_with_their_digests() {
        let input = b"Manifest-Version: 1.0\r\n\r\nName: org/x/A.class\r\nSHA-256-Digest: abcd\r\n\r\nName: org/x/B.class\r\nSHA-256-Digest: efgh\r\n\r\n";
        let out = canonicalize_manifest_with(input, &default_options()).unwrap();
        assert_eq!(text(&out), "Manifest-Version: 1.0\r\n\r\n");
        assert!(out.removed_digests);
    }

    #[test]
    fn attributes_sort_with_manifest_version_first() {
        let input = b"Z-Attr: z\r\nManifest-Version: 1.0\r\nA-Attr: a\r\n\r\n";
        let out = canonicalize_manifest_with(input, &default_options()).unwrap();
        assert_eq!(text(&out), "Manifest-Version: 1.0\r\nA-Attr: a\r\nZ-Attr: z\r\n\r\n");
    }

    #[test]
    fn non_manifest_input_is_rejected() {
        assert!(canonicalize_manifest_with(b"just some text\nwithout structure\n", &default_options()).is_err());
        assert!(canonicalize_manifest_with(b"", &default_options()).is_err());
        assert!(canonicalize_manifest_with(b"bad key: value\r\n", &default_options()).is_err());
    }

    #[test]
    fn unbalanced_quote_is_flagged_not_sorted() {
        let input = b"Manifest-Version: 1.0\r\nExport-Package: b;x=\"unterminated,a\r\n\r\n";
        let out = canonicalize_manifest_with(input, &default_options()).unwrap();
        assert!(!out.notes.is_empty());
        assert!(text(&out).contains("b;x=\"unterminated,a"));
    }
}
