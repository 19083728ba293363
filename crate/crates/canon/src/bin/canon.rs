//! `canon`: verify reproducibility of archive artifacts, canonicalize away
//! spurious non-determinism, and classify what remains.
//!
//! Exit codes for `compare`: 0 reproducible, 10 reproducible after
//! canonicalization, 20 unreproducible, 2 operational error.

use canon::corpus::generate_taxonomy_corpus;
use canon::diff::{DiffNode, DiffReport};
use canon::rules::{list_rules, ProfileName, RuleProfile, ZIP_TIMESTAMP_FLOOR};
use canon::stabilize::stabilize_archive;
use canon::verify::{verify_batch, verify_pair, PairDescriptor, Verdict, VerdictStatus};
use canon::{parse_archive, write_archive};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "canon", version, about = "Reproducible-build verification for archive artifacts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileArg {
    Archive,
    Default,
    Aggressive,
}

impl From<ProfileArg> for ProfileName {
    fn from(value: ProfileArg) -> Self {
        match value {
            ProfileArg::Archive => ProfileName::ArchiveOnly,
            ProfileArg::Default => ProfileName::Default,
            ProfileArg::Aggressive => ProfileName::Aggressive,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compare a reference artifact against a rebuild artifact.
    Compare {
        reference: PathBuf,
        rebuild: PathBuf,
        #[arg(long, value_enum, default_value = "default")]
        profile: ProfileArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Nested-container recursion depth.
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Fixed timestamp (seconds since epoch, >= 315532800). Defaults to
        /// SOURCE_DATE_EPOCH when set and valid, else 1980-01-01.
        #[arg(long)]
        timestamp: Option<i64>,
        /// Write both stabilized artifacts into this directory for audit.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonicalize one artifact and write the stabilized bytes.
    Stabilize {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "default")]
        profile: ProfileArg,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long)]
        timestamp: Option<i64>,
    },
    /// Print the canonicalization rule catalog.
    Rules {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Verify a list of reference/rebuild pairs described by a pairs.json
    /// file; relative paths resolve against the file's directory.
    Batch {
        pairs: PathBuf,
        #[arg(long, value_enum, default_value = "default")]
        profile: ProfileArg,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, default_value_t = 4)]
        jobs: usize,
        #[arg(long)]
        timestamp: Option<i64>,
    },
    /// Generate the synthetic fixture corpus (one pair per cause).
    Corpus {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 20220420)]
        seed: u64,
    },
}

fn resolve_profile(name: ProfileArg, depth: u32, timestamp: Option<i64>) -> Result<RuleProfile, String> {
    let mut profile = RuleProfile::named(name.into());
    profile.recursion_depth_limit = depth;
    let timestamp = timestamp.or_else(|| {
        // SOURCE_DATE_EPOCH is honored when at or above the ZIP floor.
        std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.parse::<i64>().ok())
            .filter(|&v| v >= ZIP_TIMESTAMP_FLOOR)
    });
    match timestamp {
        Some(seconds) => profile.with_timestamp(seconds).map_err(|e| e.to_string()),
        None => Ok(profile),
    }
}

fn print_node(node: &DiffNode, indent: usize) {
    let pad = "  ".repeat(indent);
    let causes: Vec<String> = node.causes.iter().map(|c| c.to_string()).collect();
    println!(
        "{pad}{} [{:?}] {}",
        if node.path.is_empty() { "(artifact)" } else { &node.path },
        node.kind,
        causes.join(", ")
    );
    if node.children.is_empty() {
        if let Some(diff) = &node.unified_diff {
            for line in diff.lines().take(40) {
                println!("{pad}    {line}");
            }
            if diff.lines().count() > 40 {
                println!("{pad}    ... ({} more lines)", diff.lines().count() - 40);
            }
        }
    }
    for child in &node.children {
        print_node(child, indent + 1);
    }
}

fn print_report(label: &str, report: &DiffReport) {
    println!("{label}:");
    println!("  reference sha256: {}", report.reference_digest);
    println!("  rebuild   sha256: {}", report.rebuild_digest);
    match &report.root {
        None => println!("  artifacts are byte-identical"),
        Some(root) => {
            print_node(root, 1);
            if !report.stats.is_empty() {
                println!("  causes:");
                for stat in &report.stats {
                    println!("    {} x{}", stat.cause, stat.count);
                }
            }
        }
    }
}

fn print_verdict_text(verdict: &Verdict) {
    println!("verdict: {}", verdict.status.as_str());
    println!("profile: {}", verdict.profile_used.as_str());
    if !verdict.applied_rule_ids.is_empty() {
        println!("applied rules: {}", verdict.applied_rule_ids.join(", "));
    }
    for note in &verdict.notes {
        println!("note: {note}");
    }
    print_report("raw comparison", &verdict.raw_report);
    if let Some(canonical) = &verdict.canonical_report {
        print_report("canonical comparison", canonical);
    }
}

fn run() -> Result<i32, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Compare { reference, rebuild, profile, format, depth, timestamp, out } => {
            let profile = resolve_profile(profile, depth, timestamp)?;
            let reference_bytes = std::fs::read(&reference).map_err(|e| format!("{}: {e}", reference.display()))?;
            let rebuild_bytes = std::fs::read(&rebuild).map_err(|e| format!("{}: {e}", rebuild.display()))?;
            let verdict = verify_pair(&reference_bytes, &rebuild_bytes, &profile);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                let write = |name: &str, bytes: &[u8]| -> Result<(), String> {
                    let path = dir.join(name);
                    std::fs::write(&path, bytes).map_err(|e| format!("{}: {e}", path.display()))
                };
                write("reference.stabilized", &verdict.stabilized_reference)?;
                write("rebuild.stabilized", &verdict.stabilized_rebuild)?;
            }
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&verdict.to_json()).expect("verdict serializes")),
                Format::Text => print_verdict_text(&verdict),
            }
            Ok(verdict.status.exit_code())
        }
        Command::Stabilize { input, output, profile, depth, timestamp } => {
            let profile = resolve_profile(profile, depth, timestamp)?;
            let bytes = std::fs::read(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            let parsed = parse_archive(&bytes).map_err(|e| format!("{}: {e}", input.display()))?;
            let stabilized = stabilize_archive(&parsed.archive, &profile);
            for note in &stabilized.notes {
                eprintln!("note: {note}");
            }
            let out_bytes = write_archive(&stabilized.archive).map_err(|e| e.to_string())?;
            std::fs::write(&output, out_bytes).map_err(|e| format!("{}: {e}", output.display()))?;
            if !stabilized.applied_rule_ids.is_empty() {
                let ids: Vec<&str> = stabilized.applied_rule_ids.iter().copied().collect();
                eprintln!("applied rules: {}", ids.join(", "));
            }
            Ok(0)
        }
        Command::Rules { format } => {
            let rules = list_rules();
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rules).expect("catalog serializes")),
                Format::Text => {
                    for rule in rules {
                        let profiles: Vec<&str> = rule.profiles.iter().map(|p| p.as_str()).collect();
                        println!(
                            "{:40} {:60} {:25} [{}]",
                            rule.id,
                            rule.cause.to_string(),
                            rule.mitigation.to_string(),
                            profiles.join(", ")
                        );
                    }
                }
            }
            Ok(0)
        }
        Command::Batch { pairs, profile, format, jobs, timestamp } => {
            let profile = resolve_profile(profile, 3, timestamp)?;
            let bytes = std::fs::read(&pairs).map_err(|e| format!("{}: {e}", pairs.display()))?;
            let mut descriptors: Vec<PairDescriptor> =
                serde_json::from_slice(&bytes).map_err(|e| format!("{}: {e}", pairs.display()))?;
            let base = pairs.parent().unwrap_or(Path::new("."));
            for d in descriptors.iter_mut() {
                let resolve = |p: &str| -> String {
                    let path = Path::new(p);
                    if path.is_absolute() {
                        p.to_string()
                    } else {
                        base.join(path).to_string_lossy().into_owned()
                    }
                };
                d.reference_path = resolve(&d.reference_path);
                d.rebuild_path = resolve(&d.rebuild_path);
            }
            let summary = verify_batch(&descriptors, &profile, jobs);
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&summary.to_json()).expect("summary serializes")),
                Format::Text => {
                    for result in &summary.results {
                        match (&result.verdict, &result.error) {
                            (Some(v), _) => println!("{:40} {}", result.id, v.status.as_str()),
                            (None, Some(e)) => println!("{:40} error: {e}", result.id),
                            _ => {}
                        }
                    }
                    println!(
                        "total: {} reproducible, {} after canonicalization, {} unreproducible, {} errors",
                        summary.counts.reproducible,
                        summary.counts.after_canonicalization,
                        summary.counts.unreproducible,
                        summary.counts.errors
                    );
                }
            }
            if summary.counts.errors > 0 {
                return Ok(2);
            }
            let worst = summary
                .results
                .iter()
                .filter_map(|r| r.verdict.as_ref().map(|v| v.status))
                .min()
                .unwrap_or(VerdictStatus::Reproducible);
            Ok(worst.exit_code())
        }
        Command::Corpus { out_dir, seed } => {
            std::fs::create_dir_all(&out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
            let descriptors = generate_taxonomy_corpus(seed, &out_dir).map_err(|e| e.to_string())?;
            println!("wrote {} pairs under {}", descriptors.len(), out_dir.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when stdout closes early (`canon rules | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
