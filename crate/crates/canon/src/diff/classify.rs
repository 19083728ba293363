//! Cause classification: each difference node is labeled with taxonomy
//! causes from the catalog's pattern table, gated by path and node-kind
//! context so that, for example, a timestamp inside a classfile summary
//! reads as bytecode trouble rather than a manifest problem.

use super::{DiffNode, DiffReport, NodeKind};
use crate::rules::{self, RuleMeta, EPOCH_MILLIS_PATTERN, ISO8601_PATTERN};
use crate::taxonomy::{Reason, TaxonomyCause};
use regex::Regex;
use std::collections::BTreeSet;
use std::sync::OnceLock;

struct Patterns {
    by_rule: Vec<(&'static RuleMeta, Regex)>,
    iso8601: Regex,
    epoch_millis: Regex,
    /// `Wed Apr 20 20:27:33 CEST 2022` style dates from java.util.Date.
    weekday_date: Regex,
    member_line: Regex,
}

fn patterns() -> &'static Patterns {
    static PATTERNS: OnceLock<Patterns> = OnceLock::new();
    PATTERNS.get_or_init(|| Patterns {
        by_rule: rules::RULES
            .iter()
            .filter_map(|r| r.pattern.map(|p| (r, Regex::new(p).expect("catalog pattern"))))
            .collect(),
        iso8601: Regex::new(ISO8601_PATTERN).unwrap(),
        epoch_millis: Regex::new(EPOCH_MILLIS_PATTERN).unwrap(),
        weekday_date: Regex::new(r"(Mon|Tue|Wed|Thu|Fri|Sat|Sun) [A-Z][a-z]{2} +\d{1,2} \d{2}:\d{2}:\d{2}").unwrap(),
        member_line: Regex::new(r"(?m)^[+-](method|field) ").unwrap(),
    })
}

fn basename(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

fn is_manifest_path(path: &str) -> bool {
    basename(path).eq_ignore_ascii_case("MANIFEST.MF")
}

fn is_git_file_path(path: &str) -> bool {
    matches!(basename(path), "git.properties" | "git.json")
}

fn is_properties_path(path: &str) -> bool {
    path.to_ascii_lowercase().ends_with(".properties")
}

fn is_sbom_path(path: &str) -> bool {
    let base = basename(path).to_ascii_lowercase();
    base.contains("cyclonedx")
        || base.ends_with(".cdx.json")
        || base.ends_with(".cdx.xml")
        || base == "bom.json"
        || base == "bom.xml"
        || base.ends_with(".spdx.json")
}

fn is_shell_path(path: &str) -> bool {
    let lower = path.to_ascii_lowercase();
    lower.ends_with(".sh") || lower.ends_with(".bat") || lower.contains("/bin/")
}

fn has_timestamp(p: &Patterns, diff: &str) -> bool {
    p.iso8601.is_match(diff) || p.epoch_millis.is_match(diff) || p.weekday_date.is_match(diff)
}

/// Add the causes of catalog rules whose id starts with `prefix` and whose
/// pattern matches the diff text.
fn apply_catalog_patterns(prefix: &str, diff: &str, out: &mut BTreeSet<TaxonomyCause>) {
    for (rule, regex) in &patterns().by_rule {
        if rule.id.starts_with(prefix) && regex.is_match(diff) {
            out.insert(rule.cause());
        }
    }
}

/// True when the removed and added lines contain the same content in a
/// different order (a pure reordering).
fn is_pure_reordering(diff: &str) -> bool {
    let mut removed = BTreeSet::new();
    let mut added = BTreeSet::new();
    for line in diff.lines() {
        if let Some(rest) = line.strip_prefix('-') {
            removed.insert(rest);
        } else if let Some(rest) = line.strip_prefix('+') {
            added.insert(rest);
        }
    }
    !removed.is_empty() && removed == added
}

/// Only added/removed lines participate in pattern matching; context lines
/// would smuggle in causes for content that did not change.
fn changed_lines(diff: &str) -> String {
    diff.lines()
        .filter(|l| l.starts_with('+') || l.starts_with('-'))
        .flat_map(|l| [l, "\n"])
        .collect()
}

fn classify_node(node: &DiffNode) -> Vec<TaxonomyCause> {
    let p = patterns();
    let full_diff = node.unified_diff.as_deref().unwrap_or("");
    let diff = &changed_lines(full_diff);
    let mut causes: BTreeSet<TaxonomyCause> = BTreeSet::new();

    match node.kind {
        NodeKind::EntryPresence => {
            causes.insert(TaxonomyCause::new(Reason::Filesystem, "Inconsistent Build Configuration", "Files removed or added"));
            let lower = node.path.to_ascii_lowercase();
            if lower.ends_with(".sf") || lower.ends_with(".rsa") || lower.ends_with(".dsa") || lower.ends_with(".ec") {
                causes.insert(TaxonomyCause::new(Reason::BuildManifest, "Environment", "Signed JARs"));
            }
        }
        NodeKind::EntryMetadata => {
            for line in diff.lines() {
                let field = line.trim_start_matches(['-', '+', ' ']);
                if field.starts_with("mtime:") {
                    causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "File metadata"));
                } else if field.starts_with("mode:") {
                    causes.insert(TaxonomyCause::new(Reason::Filesystem, "Environment", "Permissions"));
                } else if field.starts_with("owner:") {
                    causes.insert(TaxonomyCause::new(Reason::Filesystem, "Environment", "Ownership"));
                } else if field.starts_with("compression:") {
                    causes.insert(TaxonomyCause::new(Reason::Filesystem, "Environment", "Size"));
                } else if field.starts_with("extra-fields:") {
                    causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "File metadata"));
                } else if field.starts_with("name:") {
                    causes.insert(TaxonomyCause::new(Reason::Filesystem, "Environment", "Absolute Paths"));
                }
            }
        }
        NodeKind::ArchiveMetadata => {
            if diff.contains("order:") {
                causes.insert(TaxonomyCause::new(Reason::Filesystem, "Environment", "Order of files in archive"));
            }
            if diff.contains("gzip") {
                causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "File metadata"));
            }
        }
        NodeKind::ClassfileContent => {
            if basename(&node.path) == "module-info.class" {
                causes.insert(TaxonomyCause::new(Reason::JvmBytecode, "Embedded Metadata", "Java/project version"));
            }
            apply_catalog_patterns("classfile.debug", diff, &mut causes);
            if p.member_line.is_match(diff) || (diff.contains("method ") && is_pure_reordering(diff)) {
                causes.insert(TaxonomyCause::new(Reason::JvmBytecode, "JDK Version", "Refactoring"));
            }
            if diff.contains("lambda$") {
                causes.insert(TaxonomyCause::new(Reason::JvmBytecode, "Generated Code", "Java Compiler"));
            }
            if has_timestamp(p, diff) {
                causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "JVM bytecode"));
            }
            if causes.is_empty() {
                // Instruction-level deltas with no structural signal.
                causes.insert(TaxonomyCause::new(Reason::JvmBytecode, "JDK Version", "Optimization and de-optimization"));
            }
        }
        NodeKind::TextContent => {
            if is_manifest_path(&node.path) {
                apply_catalog_patterns("manifest.", diff, &mut causes);
                if is_pure_reordering(diff) {
                    causes.insert(TaxonomyCause::new(
                        Reason::BuildManifest,
                        "Inconsistent Build Configuration",
                        "Order of properties and their values",
                    ));
                }
                if has_timestamp(p, diff) {
                    causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "Build manifest"));
                }
            } else if is_git_file_path(&node.path) {
                apply_catalog_patterns("versioning.", diff, &mut causes);
            } else if is_sbom_path(&node.path) {
                apply_catalog_patterns("sbom.", diff, &mut causes);
                if causes.is_empty() {
                    causes.insert(TaxonomyCause::new(
                        Reason::Sbom,
                        "Inconsistent Build Configuration",
                        "Modification of components",
                    ));
                }
            } else if is_properties_path(&node.path) {
                apply_catalog_patterns("properties.", diff, &mut causes);
                if is_pure_reordering(diff) {
                    causes.insert(TaxonomyCause::new(
                        Reason::BuildManifest,
                        "Inconsistent Build Configuration",
                        "Order of properties and their values",
                    ));
                }
                if has_timestamp(p, diff) {
                    causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "Build manifest"));
                }
            } else if is_shell_path(&node.path) && has_timestamp(p, diff) {
                causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "Shell scripts"));
            } else if has_timestamp(p, diff) {
                causes.insert(TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "Documentation"));
            }
            if let Some((rule, regex)) = patterns().by_rule.iter().find(|(r, _)| r.id == rules::id::FILESYSTEM_ABSOLUTE_PATHS) {
                if regex.is_match(diff) {
                    causes.insert(rule.cause());
                }
            }
        }
        NodeKind::OpaqueBinary => {
            if node.path.to_ascii_lowercase().ends_with(".class") {
                causes.insert(TaxonomyCause::new(Reason::JvmBytecode, "JDK Version", "Optimization and de-optimization"));
            }
            if full_diff.contains("container types differ") {
                causes.insert(TaxonomyCause::new(Reason::Filesystem, "Inconsistent Build Configuration", "Type"));
            }
        }
    }

    if causes.is_empty() {
        causes.insert(TaxonomyCause::unknown(match node.kind {
            NodeKind::TextContent => "unclassified text difference",
            NodeKind::OpaqueBinary => "unclassified binary difference",
            _ => "unclassified difference",
        }));
    }
    causes.into_iter().collect()
}

fn classify_tree(node: &mut DiffNode) -> BTreeSet<TaxonomyCause> {
    let mut union: BTreeSet<TaxonomyCause> = BTreeSet::new();
    for child in node.children.iter_mut() {
        union.extend(classify_tree(child));
    }
    if node.is_leaf() {
        node.causes = classify_node(node);
        union.extend(node.causes.iter().cloned());
    } else {
        // Interior nodes: union of child causes plus whatever the node's
        // own diff text contributes.
        let own: BTreeSet<TaxonomyCause> = if node.unified_diff.is_some() {
            classify_node(node).into_iter().collect()
        } else {
            BTreeSet::new()
        };
        union.extend(own);
        node.causes = union.iter().cloned().collect();
    }
    union
}

/// Label every node of the report with taxonomy causes and recompute
/// per-cause leaf statistics. Every leaf ends up with at least one cause;
/// unmatched differences count as `Unknown`.
pub fn classify(mut report: DiffReport) -> DiffReport {
    let mut counts: std::collections::BTreeMap<TaxonomyCause, usize> = Default::default();
    if let Some(root) = report.root.as_mut() {
        classify_tree(root);
        root.walk(&mut |node| {
            if node.is_leaf() {
                for cause in &node.causes {
                    *counts.entry(cause.clone()).or_insert(0) += 1;
                }
            }
        });
    }
    report.stats = counts.into_iter().map(|(cause, count)| super::CauseCount { cause, count }).collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::diff_artifacts;

    fn text_node(path: &str, diff: &str) -> DiffNode {
        DiffNode {
            path: path.into(),
            kind: NodeKind::TextContent,
            unified_diff: Some(diff.into()),
            causes: Vec::new(),
            children: Vec::new(),
        }
    }

    fn causes_of(node: DiffNode) -> Vec<TaxonomyCause> {
        let report = DiffReport {
            reference_digest: "0".repeat(64),
            rebuild_digest: "1".repeat(64),
            root: Some(node),
            stats: Vec::new(),
        };
        let classified = classify(report);
        classified.root.unwrap().causes
    }

    #[test]
    fn built_by_hunk_maps_to_environment_cause() {
        let causes = causes_of(text_node(
            "META-INF/MANIFEST.MF",
            "@@ -2 +2 @@\n-Built-By: root\n+Built-By: aman\n",
        ));
        assert!(causes.contains(&TaxonomyCause::new(Reason::BuildManifest, "Environment", "Built-By")), "{causes:?}");
    }

    #[test]
    fn pom_properties_timestamp_comment_gets_both_causes() {
        let causes = causes_of(text_node(
            "META-INF/maven/ch.qos.logback.db/logback-classic-db/pom.properties",
            "@@ -1,2 +1,2 @@\n-#Wed Apr 20 20:27:33 CEST 2022\n+#Wed Jan 29 08:18:40 UTC 2025\n version=1.2.11.1\n",
        ));
        assert!(causes.contains(&TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "Build manifest")), "{causes:?}");
        assert!(
            causes.contains(&TaxonomyCause::new(Reason::BuildManifest, "Dynamic Properties", "pom.properties comment")),
            "{causes:?}"
        );
    }

    #[test]
    fn git_tags_hunk_maps_to_tag_count() {
        let causes = causes_of(text_node(
            "BOOT-INF/classes/git.properties",
            "@@ -3 +3 @@\n-git.tags=5\n+git.tags=7\n",
        ));
        assert!(
            causes.contains(&TaxonomyCause::new(Reason::VersioningProperties, "Source Repository State", "Number of Git tags")),
            "{causes:?}"
        );
    }

    #[test]
    fn sbom_serial_number_is_classified() {
        let causes = causes_of(text_node(
            "demo-1.0-cyclonedx.json",
            "@@ -3 +3 @@\n-  \"serialNumber\": \"urn:uuid:aaa\",\n+  \"serialNumber\": \"urn:uuid:bbb\",\n",
        ));
        assert!(causes.contains(&TaxonomyCause::new(Reason::Sbom, "Dynamic Properties", "SerialNumber")), "{causes:?}");
    }

    #[test]
    fn empty_report_has_empty_stats() {
        let report = diff_artifacts(b"same", b"same", 3);
        let classified = classify(report);
        assert!(classified.stats.is_empty());
        assert!(classified.leaf_causes().is_empty());
    }

    #[test]
    fn every_leaf_gets_at_least_one_cause() {
        let report = diff_artifacts(b"one text\n", b"two text\n", 3);
        let classified = classify(report);
        let root = classified.root.unwrap();
        root.walk(&mut |n| {
            if n.is_leaf() {
                assert!(!n.causes.is_empty());
            }
        });
        assert!(!classified.stats.is_empty());
    }

    #[test]
    fn container_type_mismatch_is_a_filesystem_type_cause() {
        let zip = crate::write_archive(&crate::Archive {
            format: crate::FormatKind::Zip,
            entries: vec![crate::Entry::file(b"a", b"x".to_vec())],
            trailer: crate::Trailer::ZipComment(Vec::new()),
        })
        .unwrap();
        let mut tar_entry = crate::Entry::file(b"a", b"x".to_vec());
        tar_entry.unix_mode = 0o100_644;
        let tar = crate::write_archive(&crate::Archive {
            format: crate::FormatKind::Tar,
            entries: vec![tar_entry],
            trailer: crate::Trailer::None,
        })
        .unwrap();
        let report = classify(diff_artifacts(&zip, &tar, 3));
        let causes = report.leaf_causes();
        assert!(
            causes.iter().any(|c| c.fine_grained == "Type"),
            "{causes:?}"
        );
    }

    #[test]
    fn timestamp_in_classfile_context_stays_bytecode() {
        let node = DiffNode {
            path: "com/x/Gen.class".into(),
            kind: NodeKind::ClassfileContent,
            unified_diff: Some("-  @0 -> Str(\"2022-04-20T20:27:33\")\n+  @0 -> Str(\"2025-01-29T08:18:40\")\n".into()),
            causes: Vec::new(),
            children: Vec::new(),
        };
        let causes = causes_of(node);
        assert!(causes.contains(&TaxonomyCause::new(Reason::Timestamps, "Build-time Variability", "JVM bytecode")), "{causes:?}");
        assert!(causes.iter().all(|c| c.reason != Reason::BuildManifest));
    }
}
