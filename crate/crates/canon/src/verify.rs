//! The end-to-end pipeline: raw comparison, symmetric stabilization of
//! both sides, re-comparison, verdict.

use crate::archive::{detect_format, parse_archive, write_archive, FormatKind};
use crate::diff::{classify, diff_artifacts, DiffReport};
use crate::rules::{ProfileName, RuleProfile};
use crate::stabilize::stabilize_archive;
use crate::taxonomy::TaxonomyCause;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerdictStatus {
    Unreproducible,
    ReproducibleAfterCanonicalization,
    Reproducible,
}

impl VerdictStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictStatus::Reproducible => "reproducible",
            VerdictStatus::ReproducibleAfterCanonicalization => "reproducible-after-canonicalization",
            VerdictStatus::Unreproducible => "unreproducible",
        }
    }

    /// CI exit code: clean, clean-after-canonicalization, and dirty must be
    /// distinguishable.
    pub fn exit_code(&self) -> i32 {
        match self {
            VerdictStatus::Reproducible => 0,
            VerdictStatus::ReproducibleAfterCanonicalization => 10,
            VerdictStatus::Unreproducible => 20,
        }
    }
}

/// Outcome of verifying one reference/rebuild pair.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub profile_used: ProfileName,
    pub raw_report: DiffReport,
    /// Absent when the raw bytes already matched.
    pub canonical_report: Option<DiffReport>,
    /// Rules that modified either side during stabilization, sorted.
    pub applied_rule_ids: Vec<String>,
    pub notes: Vec<String>,
    /// Stabilized bytes of both sides, for `--out` audits.
    pub stabilized_reference: Vec<u8>,
    pub stabilized_rebuild: Vec<u8>,
}

impl Verdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": self.status.as_str(),
            "profile": self.profile_used.as_str(),
            "applied_rule_ids": self.applied_rule_ids,
            "notes": self.notes,
            "raw": self.raw_report.to_json(),
            "canonical": self.canonical_report.as_ref().map(|r| r.to_json()),
        })
    }
}

/// Stabilize one side: parseable containers are rewritten canonically,
/// anything else passes through untouched for byte-wise comparison.
fn canonical_bytes(input: &[u8], profile: &RuleProfile, side: &str, applied: &mut BTreeSet<&'static str>, notes: &mut Vec<String>) -> Vec<u8> {
    if detect_format(input) == FormatKind::Opaque {
        notes.push(format!("{side}: not a recognized container; compared as opaque bytes"));
        return input.to_vec();
    }
    match parse_archive(input) {
        Ok(parsed) => {
            for n in parsed.notes {
                notes.push(format!("{side}: {n}"));
            }
            let stabilized = stabilize_archive(&parsed.archive, profile);
            applied.extend(stabilized.applied_rule_ids.iter());
            for n in stabilized.notes {
                notes.push(format!("{side}: {n}"));
            }
            match write_archive(&stabilized.archive) {
                Ok(bytes) => bytes,
                Err(e) => {
                    notes.push(format!("{side}: stabilized rewrite failed ({e}); compared as opaque bytes"));
                    input.to_vec()
                }
            }
        }
        Err(e) => {
            notes.push(format!("{side}: container unparsable ({e}); compared as opaque bytes"));
            input.to_vec()
        }
    }
}

/// Verify one pair: raw comparison, then symmetric canonical comparison
/// under the profile. Deterministic for fixed inputs and profile.
pub fn verify_pair(reference: &[u8], rebuild: &[u8], profile: &RuleProfile) -> Verdict {
    let depth = profile.recursion_depth_limit;
    let raw_report = classify(diff_artifacts(reference, rebuild, depth));

    if raw_report.identical() {
        return Verdict {
            status: VerdictStatus::Reproducible,
            profile_used: profile.name,
            raw_report,
            canonical_report: None,
            applied_rule_ids: Vec::new(),
            notes: Vec::new(),
            stabilized_reference: reference.to_vec(),
            stabilized_rebuild: rebuild.to_vec(),
        };
    }

    let mut applied = BTreeSet::new();
    let mut notes = Vec::new();
    let stabilized_reference = canonical_bytes(reference, profile, "reference", &mut applied, &mut notes);
    let stabilized_rebuild = canonical_bytes(rebuild, profile, "rebuild", &mut applied, &mut notes);
    let canonical_report = classify(diff_artifacts(&stabilized_reference, &stabilized_rebuild, depth));
    let status = if canonical_report.identical() {
        VerdictStatus::ReproducibleAfterCanonicalization
    } else {
        VerdictStatus::Unreproducible
    };

    Verdict {
        status,
        profile_used: profile.name,
        raw_report,
        canonical_report: Some(canonical_report),
        applied_rule_ids: applied.into_iter().map(str::to_string).collect(),
        notes,
        stabilized_reference,
        stabilized_rebuild,
    }
}

/// One batch work item, as read from pairs.json.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairDescriptor {
    pub id: String,
    pub reference_path: String,
    pub rebuild_path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_cause: Option<TaxonomyCause>,
}

#[derive(Clone, Debug)]
pub struct PairResult {
    pub id: String,
    pub verdict: Option<Verdict>,
    /// Missing or unreadable inputs are recorded; the batch continues.
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchCounts {
    pub reproducible: usize,
    pub after_canonicalization: usize,
    pub unreproducible: usize,
    pub errors: usize,
}

#[derive(Debug)]
pub struct BatchSummary {
    pub results: Vec<PairResult>,
    pub counts: BatchCounts,
    /// Leaf-cause counts aggregated over every pair's raw report.
    pub cause_stats: Vec<(TaxonomyCause, usize)>,
}

impl BatchSummary {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "counts": self.counts,
            "cause_stats": self.cause_stats.iter().map(|(cause, count)| {
                serde_json::json!({"reason": cause.reason, "root_cause": cause.root_cause, "fine_grained": cause.fine_grained, "count": count})
            }).collect::<Vec<_>>(),
            "pairs": self.results.iter().map(|r| {
                match (&r.verdict, &r.error) {
                    (Some(v), _) => serde_json::json!({"id": r.id, "status": v.status.as_str()}),
                    (None, Some(e)) => serde_json::json!({"id": r.id, "error": e}),
                    _ => serde_json::json!({"id": r.id}),
                }
            }).collect::<Vec<_>>(),
        })
    }
}

/// Verify a batch of pairs in parallel (bounded by `jobs`), preserving the
/// descriptor order in the output.
pub fn verify_batch(pairs: &[PairDescriptor], profile: &RuleProfile, jobs: usize) -> BatchSummary {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool construction cannot fail with positive size");
    let results: Vec<PairResult> = pool.install(|| {
        use rayon::prelude::*;
        pairs
            .par_iter()
            .map(|pair| {
                let reference = std::fs::read(&pair.reference_path);
                let rebuild = std::fs::read(&pair.rebuild_path);
                match (reference, rebuild) {
                    (Ok(a), Ok(b)) => PairResult { id: pair.id.clone(), verdict: Some(verify_pair(&a, &b, profile)), error: None },
                    (Err(e), _) => PairResult {
                        id: pair.id.clone(),
                        verdict: None,
                        error: Some(format!("missing input {}: {e}", pair.reference_path)),
                    },
                    (_, Err(e)) => PairResult {
                        id: pair.id.clone(),
                        verdict: None,
                        error: Some(format!("missing input {}: {e}", pair.rebuild_path)),
                    },
                }
            })
            .collect()
    });

    let mut counts = BatchCounts::default();
    let mut causes: std::collections::BTreeMap<TaxonomyCause, usize> = Default::default();
    for result in &results {
        match &result.verdict {
            Some(v) => {
                match v.status {
                    VerdictStatus::Reproducible => counts.reproducible += 1,
                    VerdictStatus::ReproducibleAfterCanonicalization => counts.after_canonicalization += 1,
                    VerdictStatus::Unreproducible => counts.unreproducible += 1,
                }
                for stat in &v.raw_report.stats {
                    *causes.entry(stat.cause.clone()).or_insert(0) += stat.count;
                }
            }
            None => counts.errors += 1,
        }
    }
    BatchSummary { results, counts, cause_stats: causes.into_iter().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::{Archive, Entry, Trailer};

    fn jar(entries: Vec<Entry>) -> Vec<u8> {
        let archive = Archive { format: FormatKind::Zip, entries, trailer: Trailer::ZipComment(Vec::new()) };
        write_archive(&archive).unwrap()
    }

    #[test]
    fn identical_pair_is_reproducible() {
        let bytes = jar(vec![Entry::file(b"a.txt", b"x".to_vec())]);
        let verdict = verify_pair(&bytes, &bytes, &RuleProfile::default_profile());
        assert_eq!(verdict.status, VerdictStatus::Reproducible);
        assert!(verdict.canonical_report.is_none());
        assert!(verdict.applied_rule_ids.is_empty());
    }

    #[test]
    fn order_and_mtime_differences_canonicalize_under_archive_only() {
        let mut e1 = Entry::file(b"a.txt", b"a".to_vec());
        e1.mtime = 1_647_431_421;
        let mut e2 = Entry::file(b"b.txt", b"b".to_vec());
        e2.mtime = 1_735_860_648;
        let reference = jar(vec![e1.clone(), e2.clone()]);
        let mut e1r = e1;
        e1r.mtime = 900_000_000;
        let rebuild = jar(vec![e2, e1r]);
        let verdict = verify_pair(&reference, &rebuild, &RuleProfile::archive_only());
        assert_eq!(verdict.status, VerdictStatus::ReproducibleAfterCanonicalization);
        assert!(verdict.applied_rule_ids.iter().any(|r| r == "archive.entry-mtime"));
    }

    #[test]
    fn payload_change_survives_every_profile() {
        let reference = jar(vec![Entry::file(b"doc.txt", b"original text\n".to_vec())]);
        let rebuild = jar(vec![Entry::file(b"doc.txt", b"Original text\n".to_vec())]);
        for profile in [RuleProfile::archive_only(), RuleProfile::default_profile(), RuleProfile::aggressive()] {
            let verdict = verify_pair(&reference, &rebuild, &profile);
            assert_eq!(verdict.status, VerdictStatus::Unreproducible, "profile {:?}", profile.name);
        }
    }

    #[test]
    fn verdict_is_symmetric() {
        let a = jar(vec![Entry::file(b"a.txt", b"1".to_vec())]);
        let mut entry = Entry::file(b"a.txt", b"1".to_vec());
        entry.mtime = 999_999_999;
        let b = jar(vec![entry]);
        let profile = RuleProfile::default_profile();
        assert_eq!(verify_pair(&a, &b, &profile).status, verify_pair(&b, &a, &profile).status);
    }

    #[test]
    fn opaque_inputs_compare_bytewise_only() {
        let verdict = verify_pair(b"plain text", b"plain text", &RuleProfile::default_profile());
        assert_eq!(verdict.status, VerdictStatus::Reproducible);
        let verdict = verify_pair(b"plain text", b"other text", &RuleProfile::aggressive());
        assert_eq!(verdict.status, VerdictStatus::Unreproducible);
        assert!(verdict.notes.iter().any(|n| n.contains("opaque")));
    }

    #[test]
    fn one_sided_archive_is_unreproducible_with_note() {
        let archive = jar(vec![Entry::file(b"a.txt", b"x".to_vec())]);
        let verdict = verify_pair(&archive, b"not an archive", &RuleProfile::default_profile());
        assert_eq!(verdict.status, VerdictStatus::Unreproducible);
        assert!(verdict.notes.iter().any(|n| n.starts_with("rebuild:")));
    }

    #[test]
    fn manifest_difference_inside_tar_gz_canonicalizes_under_default() {
        let build = |user: &str| {
            let manifest = format!("Manifest-Version: 1.0\r\nBuilt-By: {user}\r\n\r\n");
            let jar = jar(vec![Entry::file(b"META-INF/MANIFEST.MF", manifest.into_bytes())]);
            let mut tar_entry = Entry::file(b"dist/app.jar", jar);
            tar_entry.unix_mode = 0o100_644;
            tar_entry.mtime = 1_650_000_000;
            let tar = Archive { format: FormatKind::Tar, entries: vec![tar_entry], trailer: Trailer::None };
            let tar_bytes = write_archive(&tar).unwrap();
            let mut member = Entry::file(b"app.tar", tar_bytes);
            member.compression = crate::archive::Compression::Deflate;
            member.mtime = 1_650_000_001;
            let gz = Archive {
                format: FormatKind::Gzip,
                entries: vec![member],
                trailer: Trailer::GzipHeader { os: 3, comment: None },
            };
            write_archive(&gz).unwrap()
        };
        let (reference, rebuild) = (build("root"), build("aman"));
        let default = verify_pair(&reference, &rebuild, &RuleProfile::default_profile());
        assert_eq!(default.status, VerdictStatus::ReproducibleAfterCanonicalization, "notes: {:?}", default.notes);
        let archive_only = verify_pair(&reference, &rebuild, &RuleProfile::archive_only());
        assert_eq!(archive_only.status, VerdictStatus::Unreproducible);
        // The raw report reaches the nested manifest.
        let root = default.raw_report.root.as_ref().unwrap();
        let mut found = false;
        root.walk(&mut |node| {
            if node.path.ends_with("META-INF/MANIFEST.MF") {
                found = true;
            }
        });
        assert!(found, "nested manifest surfaced in the diff tree");
    }

    #[test]
    fn batch_counts_three_statuses() {
        let dir = tempfile::tempdir().unwrap();
        let write = |name: &str, bytes: &[u8]| {
            let path = dir.path().join(name);
            std::fs::write(&path, bytes).unwrap();
            path.to_string_lossy().into_owned()
        };
        let same = jar(vec![Entry::file(b"a.txt", b"x".to_vec())]);
        let mut shifted_entry = Entry::file(b"a.txt", b"x".to_vec());
        shifted_entry.mtime = 1_600_000_000;
        let shifted = jar(vec![shifted_entry]);
        let changed = jar(vec![Entry::file(b"a.txt", b"y".to_vec())]);

        let pairs = vec![
            PairDescriptor {
                id: "r".into(),
                reference_path: write("r-ref", &same),
                rebuild_path: write("r-reb", &same),
                expected_cause: None,
            },
            PairDescriptor {
                id: "rac".into(),
                reference_path: write("rac-ref", &same),
                rebuild_path: write("rac-reb", &shifted),
                expected_cause: None,
            },
            PairDescriptor {
                id: "u".into(),
                reference_path: write("u-ref", &same),
                rebuild_path: write("u-reb", &changed),
                expected_cause: None,
            },
            PairDescriptor {
                id: "missing".into(),
                reference_path: dir.path().join("nope").to_string_lossy().into_owned(),
                rebuild_path: write("m-reb", &same),
                expected_cause: None,
            },
        ];
        let summary = verify_batch(&pairs, &RuleProfile::default_profile(), 2);
        assert_eq!(
            summary.counts,
            BatchCounts { reproducible: 1, after_canonicalization: 1, unreproducible: 1, errors: 1 }
        );
        // Output preserves descriptor order.
        let ids: Vec<&str> = summary.results.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, vec!["r", "rac", "u", "missing"]);
    }

    #[test]
    fn empty_batch_is_all_zero() {
        let summary = verify_batch(&[], &RuleProfile::default_profile(), 1);
        assert_eq!(summary.counts, BatchCounts::default());
        assert!(summary.results.is_empty());
    }
}
