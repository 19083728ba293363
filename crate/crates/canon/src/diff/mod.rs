//! Recursive difference engine: a diffoscope-style tree of differences
//! between two artifacts, with archives recursed, text diffed line-wise,
//! and classfiles compared through structural listings.

mod classify;
pub mod unified;

pub use classify::classify;
pub use unified::{render_hunks, unified_text_diff, DiffLine, Hunk};

use crate::archive::{detect_format, parse_archive, Archive, Entry, FormatKind, Trailer};
use crate::classfile::{describe_classfile, parse_classfile};
use crate::taxonomy::TaxonomyCause;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    ArchiveMetadata,
    EntryPresence,
    EntryMetadata,
    TextContent,
    ClassfileContent,
    OpaqueBinary,
}

/// One node of the difference tree. Leaf `TextContent` nodes always carry a
/// non-empty unified diff; metadata nodes carry a small pseudo-diff of the
/// changed fields.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiffNode {
    pub path: String,
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unified_diff: Option<String>,
    pub causes: Vec<TaxonomyCause>,
    pub children: Vec<DiffNode>,
}

impl DiffNode {
    fn new(path: &str, kind: NodeKind) -> Self {
        DiffNode { path: path.to_string(), kind, unified_diff: None, causes: Vec::new(), children: Vec::new() }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a DiffNode)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }

    /// Total node count, root included.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(DiffNode::size).sum::<usize>()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CauseCount {
    #[serde(flatten)]
    pub cause: TaxonomyCause,
    pub count: usize,
}

/// The comparison result: digests of both inputs and, when they differ, the
/// difference tree. `root` is absent exactly when the inputs are
/// byte-identical.
#[derive(Clone, Debug)]
pub struct DiffReport {
    pub reference_digest: String,
    pub rebuild_digest: String,
    pub root: Option<DiffNode>,
    /// Leaf-cause counts, populated by [`classify`].
    pub stats: Vec<CauseCount>,
}

impl DiffReport {
    pub fn identical(&self) -> bool {
        self.root.is_none()
    }

    pub fn leaf_causes(&self) -> Vec<&TaxonomyCause> {
        let mut out = Vec::new();
        if let Some(root) = &self.root {
            root.walk(&mut |node| {
                if node.is_leaf() {
                    out.extend(node.causes.iter());
                }
            });
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.root.as_ref().map_or(0, DiffNode::size)
    }

    /// Stable JSON rendering: digests, the node list (empty when
    /// identical), and per-cause stats.
    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<&DiffNode> = self.root.as_ref().into_iter().collect();
        serde_json::json!({
            "reference_digest": self.reference_digest,
            "rebuild_digest": self.rebuild_digest,
            "nodes": nodes,
            "stats": self.stats,
        })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Compare two artifacts, recursing into nested archives down to `depth`
/// container levels. Byte-identical inputs yield a report with no root
/// node; malformed containers degrade to opaque byte comparison.
pub fn diff_artifacts(reference: &[u8], rebuild: &[u8], depth: u32) -> DiffReport {
    let reference_digest = sha256_hex(reference);
    let rebuild_digest = sha256_hex(rebuild);
    if reference == rebuild {
        return DiffReport { reference_digest, rebuild_digest, root: None, stats: Vec::new() };
    }
    let root = compare_bytes("", reference, rebuild, depth);
    DiffReport { reference_digest, rebuild_digest, root: Some(root), stats: Vec::new() }
}

fn join_path(base: &str, leaf: &str) -> String {
    if base.is_empty() {
        leaf.to_string()
    } else {
        format!("{base}/{leaf}")
    }
}

/// Text heuristic: valid UTF-8 with less than 1% replacement characters
/// and either a known text extension or no NUL bytes.
fn looks_like_text(path: &str, bytes: &[u8]) -> bool {
    if bytes.is_empty() {
        return true;
    }
    let decoded = String::from_utf8_lossy(bytes);
    let replacements = decoded.chars().filter(|&c| c == '\u{FFFD}').count();
    if replacements * 100 >= decoded.chars().count().max(1) {
        return false;
    }
    const TEXT_EXTENSIONS: &[&str] = &[
        ".txt", ".md", ".xml", ".json", ".properties", ".mf", ".sf", ".yaml", ".yml", ".html", ".css", ".js", ".sh",
        ".bat", ".csv", ".sql", ".java", ".kt", ".scala", ".pom", ".dtd", ".xsd", ".notice", ".license",
    ];
    let lower = path.to_ascii_lowercase();
    let known_extension = TEXT_EXTENSIONS.iter().any(|e| lower.ends_with(e));
    known_extension || !bytes.contains(&0)
}

fn compare_bytes(path: &str, a: &[u8], b: &[u8], depth: u32) -> DiffNode {
    let format_a = detect_format(a);
    let format_b = detect_format(b);
    if format_a == format_b && format_a != FormatKind::Opaque && depth > 0 {
        match (parse_archive(a), parse_archive(b)) {
            (Ok(pa), Ok(pb)) => return compare_archives(path, &pa.archive, &pb.archive, depth),
            _ => return opaque_node(path, a, b, Some("container unparsable on at least one side")),
        }
    }
    if format_a != format_b && format_a != FormatKind::Opaque && format_b != FormatKind::Opaque {
        return opaque_node(path, a, b, Some(&format!("container types differ: {format_a:?} vs {format_b:?}")));
    }
    if a.starts_with(&0xCAFE_BABEu32.to_be_bytes()) && b.starts_with(&0xCAFE_BABEu32.to_be_bytes()) {
        if let (Ok(ca), Ok(cb)) = (parse_classfile(a), parse_classfile(b)) {
            let mut node = DiffNode::new(path, NodeKind::ClassfileContent);
            let hunks = unified_text_diff(&describe_classfile(&ca), &describe_classfile(&cb));
            if hunks.is_empty() {
                // Same structure, different raw encoding (pool layout).
                node.unified_diff = Some("constant pool layout differs; structure is identical\n".to_string());
            } else {
                node.unified_diff = Some(render_hunks(&hunks));
            }
            return node;
        }
        return opaque_node(path, a, b, Some("classfile unparsable on at least one side"));
    }
    if looks_like_text(path, a) && looks_like_text(path, b) {
        let text_a = String::from_utf8_lossy(a);
        let text_b = String::from_utf8_lossy(b);
        let hunks = unified_text_diff(&text_a, &text_b);
        if !hunks.is_empty() {
            let mut node = DiffNode::new(path, NodeKind::TextContent);
            node.unified_diff = Some(render_hunks(&hunks));
            return node;
        }
        // Bytes differ but lossy text does not (encoding-level difference).
        return opaque_node(path, a, b, Some("difference is not visible in lossy text"));
    }
    opaque_node(path, a, b, None)
}

fn opaque_node(path: &str, a: &[u8], b: &[u8], note: Option<&str>) -> DiffNode {
    let mut node = DiffNode::new(path, NodeKind::OpaqueBinary);
    let mut diff = format!(
        "- size: {}, sha256: {}\n+ size: {}, sha256: {}\n",
        a.len(),
        sha256_hex(a),
        b.len(),
        sha256_hex(b)
    );
    if let Some(n) = note {
        diff.push_str(&format!("  note: {n}\n"));
    }
    node.unified_diff = Some(diff);
    node
}

fn trailer_diff(a: &Trailer, b: &Trailer) -> Option<String> {
    if a == b {
        return None;
    }
    let describe = |t: &Trailer| match t {
        Trailer::None => "none".to_string(),
        Trailer::ZipComment(c) => format!("zip comment: {:?}", String::from_utf8_lossy(c)),
        Trailer::GzipHeader { os, comment } => format!(
            "gzip os: {os}, comment: {:?}",
            comment.as_deref().map(String::from_utf8_lossy).unwrap_or_default()
        ),
    };
    Some(format!("- {}\n+ {}\n", describe(a), describe(b)))
}

fn entry_metadata_diff(a: &Entry, b: &Entry) -> Option<String> {
    let mut lines = String::new();
    let mut field = |name: &str, va: String, vb: String| {
        if va != vb {
            lines.push_str(&format!("- {name}: {va}\n+ {name}: {vb}\n"));
        }
    };
    field("mtime", a.mtime.to_string(), b.mtime.to_string());
    field("mode", format!("{:06o}", a.unix_mode), format!("{:06o}", b.unix_mode));
    field(
        "owner",
        format!("{}:{}", String::from_utf8_lossy(&a.owner_user), String::from_utf8_lossy(&a.owner_group)),
        format!("{}:{}", String::from_utf8_lossy(&b.owner_user), String::from_utf8_lossy(&b.owner_group)),
    );
    field("compression", format!("{:?}", a.compression), format!("{:?}", b.compression));
    field("extra-fields", format!("{:?}", a.extra_fields), format!("{:?}", b.extra_fields));
    field("name", a.path_lossy(), b.path_lossy());
    if lines.is_empty() {
        None
    } else {
        Some(lines)
    }
}

fn compare_archives(path: &str, a: &Archive, b: &Archive, depth: u32) -> DiffNode {
    let mut node = DiffNode::new(path, NodeKind::ArchiveMetadata);

    if let Some(diff) = trailer_diff(&a.trailer, &b.trailer) {
        let mut child = DiffNode::new(&join_path(path, "[archive framing]"), NodeKind::ArchiveMetadata);
        child.unified_diff = Some(diff);
        node.children.push(child);
    }

    if a.format == FormatKind::Gzip && b.format == FormatKind::Gzip {
        // Gzip holds exactly one member; align by position, not name.
        let (ea, eb) = (&a.entries[0], &b.entries[0]);
        let member = if ea.path.is_empty() { "[gzip member]".to_string() } else { ea.path_lossy() };
        let child_path = join_path(path, &member);
        if let Some(diff) = entry_metadata_diff(ea, eb) {
            let mut child = DiffNode::new(&child_path, NodeKind::EntryMetadata);
            child.unified_diff = Some(diff);
            node.children.push(child);
        }
        if ea.payload != eb.payload {
            node.children.push(compare_bytes(&child_path, &ea.payload, &eb.payload, depth - 1));
        }
        return node;
    }

    let index = |archive: &'_ Archive| -> BTreeMap<Vec<u8>, usize> {
        archive.entries.iter().enumerate().map(|(i, e)| (e.path.clone(), i)).collect()
    };
    let map_a = index(a);
    let map_b = index(b);

    for entry in &a.entries {
        if !map_b.contains_key(&entry.path) {
            let mut child = DiffNode::new(&join_path(path, &entry.path_lossy()), NodeKind::EntryPresence);
            child.unified_diff = Some(format!("- present only in reference ({} bytes)\n", entry.payload.len()));
            node.children.push(child);
        }
    }
    for entry in &b.entries {
        if !map_a.contains_key(&entry.path) {
            let mut child = DiffNode::new(&join_path(path, &entry.path_lossy()), NodeKind::EntryPresence);
            child.unified_diff = Some(format!("+ present only in rebuild ({} bytes)\n", entry.payload.len()));
            node.children.push(child);
        }
    }

    // Order comparison over the common subsequence of paths.
    let common_a: Vec<&[u8]> = a.entries.iter().map(|e| e.path.as_slice()).filter(|p| map_b.contains_key(*p)).collect();
    let common_b: Vec<&[u8]> = b.entries.iter().map(|e| e.path.as_slice()).filter(|p| map_a.contains_key(*p)).collect();
    if common_a != common_b {
        let mut child = DiffNode::new(&join_path(path, "[entry order]"), NodeKind::ArchiveMetadata);
        let render = |paths: &[&[u8]]| {
            let shown: Vec<String> = paths.iter().take(20).map(|p| String::from_utf8_lossy(p).into_owned()).collect();
            let suffix = if paths.len() > 20 { ", ..." } else { "" };
            format!("{}{}", shown.join(", "), suffix)
        };
        child.unified_diff = Some(format!("- order: {}\n+ order: {}\n", render(&common_a), render(&common_b)));
        node.children.push(child);
    }

    for entry in &a.entries {
        let Some(&bi) = map_b.get(&entry.path) else { continue };
        let other = &b.entries[bi];
        let child_path = join_path(path, &entry.path_lossy());
        if let Some(diff) = entry_metadata_diff(entry, other) {
            let mut child = DiffNode::new(&child_path, NodeKind::EntryMetadata);
            child.unified_diff = Some(diff);
            node.children.push(child);
        }
        if entry.payload != other.payload {
            node.children.push(compare_bytes(&child_path, &entry.payload, &other.payload, depth - 1));
        }
    }
    node
}
