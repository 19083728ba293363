//! Java properties canonicalization.
//!
//! Comment lines carry generation timestamps and are dropped wholesale;
//! key/value pairs are sorted by key bytes and re-emitted as `key=value`
//! with LF endings. Backslash line continuations are not interpreted;
//! generated pom.properties never use them.

use crate::rules::{id, RuleProfile};

#[derive(Clone, Debug)]
pub struct PropertiesOptions {
    pub remove_comments: bool,
    pub sort_keys: bool,
    pub remove_m2e: bool,
}

impl PropertiesOptions {
    pub fn from_profile(profile: &RuleProfile) -> Self {
        PropertiesOptions {
            remove_comments: profile.enabled(id::PROPERTIES_COMMENTS),
            sort_keys: profile.enabled(id::PROPERTIES_KEY_ORDER),
            remove_m2e: profile.enabled(id::PROPERTIES_M2E),
        }
    }

    pub fn all() -> Self {
        PropertiesOptions { remove_comments: true, sort_keys: true, remove_m2e: true }
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalizedProperties {
    pub text: Vec<u8>,
    pub removed_comments: bool,
    pub removed_m2e: bool,
    pub reordered: bool,
}

/// Canonicalize properties text with every edit enabled. Properties syntax
/// is permissive, so this never fails.
pub fn canonicalize_properties(text: &[u8]) -> Vec<u8> {
    canonicalize_properties_with(text, &PropertiesOptions::all()).text
}

pub fn canonicalize_properties_with(text: &[u8], options: &PropertiesOptions) -> CanonicalizedProperties {
    let mut pairs: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    let mut removed_comments = false;
    let mut removed_m2e = false;

    for line in text.split(|&b| b == b'\n') {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        let body = {
            let start = line.iter().position(|&b| b != b' ' && b != b'\t').unwrap_or(line.len());
            &line[start..]
        };
        if body.is_empty() {
            continue;
        }
        if body[0] == b'#' || body[0] == b'!' {
            if options.remove_comments {
                removed_comments = true;
                continue;
            }
            // A kept comment sorts as a key with no value.
            pairs.push((body.to_vec(), Vec::new()));
            continue;
        }
        let sep = body.iter().position(|&b| b == b'=' || b == b':');
        let (key, value) = match sep {
            Some(i) => {
                let mut value = &body[i + 1..];
                while value.first() == Some(&b' ') || value.first() == Some(&b'\t') {
                    value = &value[1..];
                }
                (trim_ascii(&body[..i]).to_vec(), value.to_vec())
            }
            None => (trim_ascii(body).to_vec(), Vec::new()),
        };
        if options.remove_m2e && key.starts_with(b"m2e.") {
            removed_m2e = true;
            continue;
        }
        pairs.push((key, value));
    }

    let original = pairs.clone();
    if options.sort_keys {
        pairs.sort();
    }
    let reordered = pairs != original;

    let mut out = Vec::with_capacity(text.len());
    for (key, value) in &pairs {
        out.extend_from_slice(key);
        if !(value.is_empty() && (key.starts_with(b"#") || key.starts_with(b"!"))) {
            out.push(b'=');
            out.extend_from_slice(value);
        }
        out.push(b'\n');
    }
    CanonicalizedProperties { text: out, removed_comments, removed_m2e, reordered }
}

fn trim_ascii(s: &[u8]) -> &[u8] {
    let start = s.iter().position(|&b| b != b' ' && b != b'\t').unwrap_or(s.len());
    let end = s.iter().rposition(|&b| b != b' ' && b != b'\t').map_or(start, |i| i + 1);
    &s[start..end]
}
