//! CycloneDX SBOM canonicalization.
//!
//! JSON documents are edited structurally and re-serialized with sorted
//! object keys, two-space indentation, and LF endings. XML documents are
//! handled as removed-fields-by-pattern over the serialized tree. Volatile
//! identifiers (`serialNumber`, `metadata.timestamp`) and externally
//! sourced component metadata (`licenses`, `description`,
//! `externalReferences`) are deleted.

use crate::rules::{id, RuleProfile};
use serde_json::Value;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SbomError {
    /// Neither CycloneDX JSON nor CycloneDX-namespaced XML; callers fall
    /// back to opaque comparison.
    #[error("not an SBOM: {0}")]
    NotAnSbom(String),
}

#[derive(Clone, Debug)]
pub struct SbomOptions {
    pub remove_serial_number: bool,
    pub remove_timestamp: bool,
    pub remove_licenses: bool,
    pub remove_descriptions: bool,
    pub remove_external_references: bool,
}

impl SbomOptions {
    pub fn from_profile(profile: &RuleProfile) -> Self {
        SbomOptions {
            remove_serial_number: profile.enabled(id::SBOM_SERIAL_NUMBER),
            remove_timestamp: profile.enabled(id::SBOM_TIMESTAMP),
            remove_licenses: profile.enabled(id::SBOM_LICENSE),
            remove_descriptions: profile.enabled(id::SBOM_DESCRIPTION),
            remove_external_references: profile.enabled(id::SBOM_EXTERNAL_REFERENCES),
        }
    }

    pub fn all() -> Self {
        SbomOptions {
            remove_serial_number: true,
            remove_timestamp: true,
            remove_licenses: true,
            remove_descriptions: true,
            remove_external_references: true,
        }
    }
}

/// Canonicalize an SBOM with every deletion enabled.
pub fn canonicalize_sbom(text: &[u8]) -> Result<Vec<u8>, SbomError> {
    canonicalize_sbom_with(text, &SbomOptions::all())
}

pub fn canonicalize_sbom_with(text: &[u8], options: &SbomOptions) -> Result<Vec<u8>, SbomError> {
    if let Ok(mut value) = serde_json::from_slice::<Value>(text) {
        let is_cyclonedx = value
            .as_object()
            .and_then(|o| o.get("bomFormat"))
            .and_then(Value::as_str)
            .is_some_and(|f| f == "CycloneDX");
        if !is_cyclonedx {
            return Err(SbomError::NotAnSbom("JSON without bomFormat: \"CycloneDX\"".into()));
        }
        edit_json(&mut value, options, false);
        // serde_json objects are ordered maps over sorted keys, so plain
        // pretty-printing yields the canonical key order.
        let mut out = Vec::with_capacity(text.len());
        let formatter = serde_json::ser::PrettyFormatter::with_indent(b"  ");
        let mut serializer = serde_json::Serializer::with_formatter(&mut out, formatter);
        serde::Serialize::serialize(&value, &mut serializer).expect("serializing a Value cannot fail");
        out.push(b'\n');
        return Ok(out);
    }
    canonicalize_xml(text, options)
}

/// Walk the JSON tree deleting volatile and external-metadata fields.
/// `in_component` is true inside `components` array elements and the
/// `metadata.component` object.
fn edit_json(value: &mut Value, options: &SbomOptions, in_component: bool) {
    if let Value::Object(map) = value {
        if options.remove_serial_number {
            map.remove("serialNumber");
        }
        if in_component {
            if options.remove_descriptions {
                map.remove("description");
            }
            if options.remove_licenses {
                map.remove("licenses");
            }
            if options.remove_external_references {
                map.remove("externalReferences");
            }
        }
        let keys: Vec<String> = map.keys().cloned().collect();
        for key in keys {
            let child_is_component = key == "component";
            match key.as_str() {
                "metadata" => {
                    if let Some(meta) = map.get_mut("metadata") {
                        if options.remove_timestamp {
                            if let Value::Object(m) = meta {
                                m.remove("timestamp");
                            }
                        }
                        edit_json(meta, options, false);
                    }
                }
                "components" => {
                    if let Some(Value::Array(items)) = map.get_mut("components") {
                        for item in items {
                            edit_json(item, options, true);
                        }
                    }
                }
                _ => {
                    if let Some(child) = map.get_mut(&key) {
                        edit_json(child, options, child_is_component);
                    }
                }
            }
        }
    } else if let Value::Array(items) = value {
        for item in items {
            edit_json(item, options, in_component);
        }
    }
}

struct XmlPatterns {
    serial: regex::bytes::Regex,
    timestamp: regex::bytes::Regex,
    description: regex::bytes::Regex,
    licenses: regex::bytes::Regex,
    external_refs: regex::bytes::Regex,
}

fn xml_patterns() -> &'static XmlPatterns {
    static PATTERNS: OnceLock<XmlPatterns> = OnceLock::new();
    PATTERNS.get_or_init(|| XmlPatterns {
        serial: regex::bytes::Regex::new(r#"\s+serialNumber="[^"]*""#).unwrap(),
        timestamp: regex::bytes::Regex::new(r"(?s)[ \t]*<timestamp>.*?</timestamp>\r?\n?").unwrap(),
        description: regex::bytes::Regex::new(r"(?s)[ \t]*<description>.*?</description>\r?\n?").unwrap(),
        licenses: regex::bytes::Regex::new(r"(?s)[ \t]*<licenses>.*?</licenses>\r?\n?").unwrap(),
        external_refs: regex::bytes::Regex::new(r"(?s)[ \t]*<externalReferences>.*?</externalReferences>\r?\n?").unwrap(),
    })
}

fn canonicalize_xml(text: &[u8], options: &SbomOptions) -> Result<Vec<u8>, SbomError> {
    let head = &text[..text.len().min(4096)];
    let looks_xml = head.iter().find(|&&b| !b.is_ascii_whitespace()) == Some(&b'<');
    let has_namespace = head.windows(9).any(|w| w.eq_ignore_ascii_case(b"cyclonedx"));
    if !looks_xml || !has_namespace {
        return Err(SbomError::NotAnSbom("neither CycloneDX JSON nor CycloneDX XML".into()));
    }
    let p = xml_patterns();
    let mut out = text.to_vec();
    if options.remove_serial_number {
        out = p.serial.replace_all(&out, &b""[..]).into_owned();
    }
    if options.remove_timestamp {
        out = p.timestamp.replace_all(&out, &b""[..]).into_owned();
    }
    if options.remove_descriptions {
        out = p.description.replace_all(&out, &b""[..]).into_owned();
    }
    if options.remove_licenses {
        out = p.licenses.replace_all(&out, &b""[..]).into_owned();
    }
    if options.remove_external_references {
        out = p.external_refs.replace_all(&out, &b""[..]).into_owned();
    }
    // Normalize line endings to LF.
    let mut normalized = Vec::with_capacity(out.len());
    let mut i = 0;
    while i < out.len() {
        if out[i] == b'\r' {
            normalized.push(b'\n');
            if out.get(i + 1) == Some(&b'\n') {
                i += 1;
            }
        } else {
            normalized.push(out[i]);
        }
        i += 1;
    }
    Ok(normalized)
}
