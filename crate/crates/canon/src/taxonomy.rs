//! The cause taxonomy used to label differences between reference and
//! rebuild artifacts.
//!
//! A cause is a `(reason, root cause, fine-grained cause)` triple drawn from
//! a closed catalog. Every catalog triple carries the mitigation that is
//! allowed to act on it: only causes whose mitigation is
//! [`Mitigation::CanonicalizeByRebuilder`] may be rewritten by the
//! stabilizer; the others are classified and reported, never touched.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Top-level reason for an unreproducible difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Reason {
    BuildManifest,
    Sbom,
    Filesystem,
    JvmBytecode,
    VersioningProperties,
    Timestamps,
    Unknown,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reason::BuildManifest => "build-manifest",
            Reason::Sbom => "sbom",
            Reason::Filesystem => "filesystem",
            Reason::JvmBytecode => "jvm-bytecode",
            Reason::VersioningProperties => "versioning-properties",
            Reason::Timestamps => "timestamps",
            Reason::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Who is expected to resolve a cause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mitigation {
    /// The rebuilder may rewrite the bytes away before comparison.
    CanonicalizeByRebuilder,
    /// The original build process must change; classification only.
    FixBuildProcess,
    /// The rebuild process must change; classification only.
    FixRebuildProcess,
}

impl fmt::Display for Mitigation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mitigation::CanonicalizeByRebuilder => "canonicalize-by-rebuilder",
            Mitigation::FixBuildProcess => "fix-build-process",
            Mitigation::FixRebuildProcess => "fix-rebuild-process",
        };
        f.write_str(s)
    }
}

/// A `(reason, root cause, fine-grained cause)` triple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TaxonomyCause {
    pub reason: Reason,
    pub root_cause: String,
    pub fine_grained: String,
}

impl TaxonomyCause {
    pub fn new(reason: Reason, root_cause: &str, fine_grained: &str) -> Self {
        TaxonomyCause {
            reason,
            root_cause: root_cause.to_string(),
            fine_grained: fine_grained.to_string(),
        }
    }

    /// Free-form cause for differences no pattern recognizes.
    pub fn unknown(detail: &str) -> Self {
        TaxonomyCause::new(Reason::Unknown, "Unknown", detail)
    }

    /// Whether the triple is drawn from the closed catalog. `Unknown`
    /// reasons are always permitted with free-form detail.
    pub fn is_cataloged(&self) -> bool {
        self.reason == Reason::Unknown
            || CATALOG
                .iter()
                .any(|row| row.reason == self.reason && row.root_cause == self.root_cause && row.fine_grained == self.fine_grained)
    }

    /// Mitigation recorded in the catalog for this triple, if cataloged.
    pub fn catalog_mitigation(&self) -> Option<Mitigation> {
        CATALOG
            .iter()
            .find(|row| row.reason == self.reason && row.root_cause == self.root_cause && row.fine_grained == self.fine_grained)
            .map(|row| row.mitigation)
    }
}

impl fmt::Display for TaxonomyCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.reason, self.root_cause, self.fine_grained)
    }
}

/// One row of the closed cause catalog.
#[derive(Clone, Copy, Debug)]
pub struct CatalogRow {
    pub reason: Reason,
    pub root_cause: &'static str,
    pub fine_grained: &'static str,
    pub mitigation: Mitigation,
}

const fn row(reason: Reason, root_cause: &'static str, fine_grained: &'static str, mitigation: Mitigation) -> CatalogRow {
    CatalogRow { reason, root_cause, fine_grained, mitigation }
}

use Mitigation::{CanonicalizeByRebuilder as Canon, FixBuildProcess as FixBuild, FixRebuildProcess as FixRebuild};
use Reason::*;

/// The closed cause catalog. Root causes and fine-grained causes follow the
/// upstream naming observed in real Maven release diffs; the mitigation
/// column controls which causes the stabilizer may rewrite.
pub const CATALOG: &[CatalogRow] = &[
    // Build manifest (MANIFEST.MF, pom.properties)
    row(BuildManifest, "Environment", "Built-By", Canon),
    row(BuildManifest, "Environment", "Signed JARs", Canon),
    row(BuildManifest, "Environment", "Os-Version", Canon),
    row(BuildManifest, "Environment", "Eclipse Properties", Canon),
    row(BuildManifest, "Rebuild Process", "Implementation-Build-Java-Vendor", FixRebuild),
    row(BuildManifest, "Rebuild Process", "Created-By", FixRebuild),
    row(BuildManifest, "Rebuild Process", "Originally-Created-By", FixRebuild),
    row(BuildManifest, "Rebuild Process", "SCM-Revision", FixRebuild),
    row(BuildManifest, "Rebuild Process", "Build-Jdk", FixRebuild),
    row(BuildManifest, "Dynamic Properties", "SCM-Git-Branch", FixBuild),
    // Bnd-LastModified is an embedded timestamp; stripping it before
    // comparison is an accepted alternative to fixing the build, so the
    // default profile may remove it.
    row(BuildManifest, "Dynamic Properties", "Bnd-LastModified", Canon),
    row(BuildManifest, "Dynamic Properties", "pom.properties comment", Canon),
    row(BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values", Canon),
    // Software bill of materials
    row(Sbom, "Java Vendor", "Removal of hash algorithms", FixRebuild),
    row(Sbom, "Inconsistent Build Configuration", "Addition of components", FixBuild),
    row(Sbom, "Inconsistent Build Configuration", "Removal of components", FixBuild),
    row(Sbom, "Inconsistent Build Configuration", "Modification of components", FixBuild),
    row(Sbom, "Dynamic Properties", "Timestamp", Canon),
    row(Sbom, "Dynamic Properties", "SerialNumber", Canon),
    row(Sbom, "External Metadata", "License", Canon),
    row(Sbom, "External Metadata", "Description of components", Canon),
    row(Sbom, "External Metadata", "ExternalReferences", Canon),
    // Filesystem
    row(Filesystem, "Environment", "Permissions", Canon),
    row(Filesystem, "Environment", "Ownership", Canon),
    row(Filesystem, "Environment", "Size", Canon),
    row(Filesystem, "Environment", "Absolute Paths", Canon),
    row(Filesystem, "Environment", "Order of files in archive", Canon),
    row(Filesystem, "Inconsistent Build Configuration", "Type", FixBuild),
    row(Filesystem, "Inconsistent Build Configuration", "Files removed or added", FixBuild),
    // JVM bytecode
    row(JvmBytecode, "JDK Version", "Debug information", FixBuild),
    row(JvmBytecode, "JDK Version", "Optimization and de-optimization", FixBuild),
    row(JvmBytecode, "JDK Version", "Refactoring", FixBuild),
    row(JvmBytecode, "Embedded Metadata", "Embedded environment data", FixBuild),
    row(JvmBytecode, "Embedded Metadata", "Java/project version", FixBuild),
    row(JvmBytecode, "Generated Code", "Java Compiler", Canon),
    row(JvmBytecode, "Generated Code", "Maven Plugins", FixRebuild),
    // Versioning properties (git.properties / git.json)
    row(VersioningProperties, "Source Repository State", "Number of commits", Canon),
    row(VersioningProperties, "Source Repository State", "Number of Git tags", Canon),
    row(VersioningProperties, "Source Repository State", "Branch name", Canon),
    row(VersioningProperties, "Source Repository State", "Local branch name", Canon),
    row(VersioningProperties, "Source Repository State", "Timezone of commit", Canon),
    row(VersioningProperties, "Source Repository State", "Remote URL", Canon),
    // Timestamps
    row(Timestamps, "Build-time Variability", "Documentation", FixBuild),
    row(Timestamps, "Build-time Variability", "Shell scripts", FixBuild),
    row(Timestamps, "Build-time Variability", "Executable binaries", FixBuild),
    row(Timestamps, "Build-time Variability", "JVM bytecode", FixBuild),
    row(Timestamps, "Build-time Variability", "Build manifest", FixBuild),
    row(Timestamps, "Build-time Variability", "File metadata", Canon),
];

/// Number of catalog rows whose mitigation is canonicalize-by-rebuilder.
pub fn canonicalizable_cause_count() -> usize {
    CATALOG.iter().filter(|r| r.mitigation == Canon).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_all_six_reasons() {
        for reason in [BuildManifest, Sbom, Filesystem, JvmBytecode, VersioningProperties, Timestamps] {
            assert!(CATALOG.iter().any(|r| r.reason == reason), "missing reason {reason:?}");
        }
    }

    #[test]
    fn catalog_rows_are_unique() {
        for (i, a) in CATALOG.iter().enumerate() {
            for b in &CATALOG[i + 1..] {
                assert!(
                    !(a.reason == b.reason && a.root_cause == b.root_cause && a.fine_grained == b.fine_grained),
                    "duplicate row {}/{}/{}",
                    a.reason,
                    a.root_cause,
                    a.fine_grained
                );
            }
        }
    }

    #[test]
    fn cataloged_lookup_works() {
        let cause = TaxonomyCause::new(BuildManifest, "Environment", "Built-By");
        assert!(cause.is_cataloged());
        assert_eq!(cause.catalog_mitigation(), Some(Canon));
        assert!(TaxonomyCause::unknown("whatever").is_cataloged());
        assert!(!TaxonomyCause::new(BuildManifest, "Environment", "No-Such-Attr").is_cataloged());
    }
}
