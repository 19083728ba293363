//! The canonicalization rule catalog and the profiles that enable it.
//!
//! Every rule is keyed to a cause triple from the [`crate::taxonomy`]
//! catalog. Rules whose mitigation is not canonicalize-by-rebuilder never
//! rewrite bytes in the archive-only or default profiles; the aggressive
//! profile additionally erases fix-the-process attributes for exploratory
//! triage, which is why a few rules carry a fix-* mitigation together with
//! an aggressive-only transform.

use crate::taxonomy::{Mitigation, Reason, TaxonomyCause};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Earliest timestamp a ZIP entry can carry (1980-01-01T00:00:00Z).
pub const ZIP_TIMESTAMP_FLOOR: i64 = 315_532_800;

/// Default nesting depth for recursive stabilization, enough for
/// jar-in-zip-in-tar.gz source releases.
pub const DEFAULT_RECURSION_DEPTH: u32 = 3;

/// Built-in profile names, ordered by rule-set inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProfileName {
    /// Generic archive stabilizers only: file order, timestamps,
    /// compression, modes, ownership, gzip header fields.
    ArchiveOnly,
    /// Archive stabilizers plus manifest, properties, SBOM, versioning-file
    /// and signature canonicalization. Rewrites only causes the taxonomy
    /// assigns to the rebuilder.
    Default,
    /// Everything, including erasure of fix-the-process manifest attributes
    /// and structural classfile canonicalization.
    Aggressive,
}

impl ProfileName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileName::ArchiveOnly => "archive",
            ProfileName::Default => "default",
            ProfileName::Aggressive => "aggressive",
        }
    }
}

impl std::str::FromStr for ProfileName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "archive" | "archive-only" => Ok(ProfileName::ArchiveOnly),
            "default" => Ok(ProfileName::Default),
            "aggressive" => Ok(ProfileName::Aggressive),
            other => Err(format!("unknown profile {other:?} (expected archive|default|aggressive)")),
        }
    }
}

/// What the stabilization engine does when a rule is enabled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleAction {
    /// Identity transform; the rule exists for classification.
    Classify,
    SortEntries,
    FixEntryMtime,
    StoreCompression,
    NormalizeMode,
    ClearOwnership,
    ClearExtraFields,
    ZeroGzipHeader,
    RemoveSignatureFiles,
    RemoveGitFiles,
    RemovePomProperties,
    RemoveModuleInfo,
    /// Remove one named manifest attribute everywhere it appears.
    ManifestRemoveAttribute(&'static str),
    ManifestRemoveEntryDigests,
    ManifestSortAttributes,
    ManifestSortValues,
    PropertiesRemoveComments,
    PropertiesSortKeys,
    PropertiesRemoveM2e,
    SbomRemoveSerialNumber,
    SbomRemoveTimestamp,
    SbomRemoveLicenses,
    SbomRemoveDescriptions,
    SbomRemoveExternalReferences,
    ClassfileStructural,
    ClassfileStripDebug,
}

/// One catalog entry.
#[derive(Clone, Copy, Debug)]
pub struct RuleMeta {
    pub id: &'static str,
    pub reason: Reason,
    pub root_cause: &'static str,
    pub fine_grained: &'static str,
    pub mitigation: Mitigation,
    /// Smallest built-in profile whose stabilization applies the transform;
    /// `None` for classifier-only rules.
    pub min_profile: Option<ProfileName>,
    pub action: RuleAction,
    /// Classifier regex associated with the rule, when pattern-based.
    pub pattern: Option<&'static str>,
}

impl RuleMeta {
    pub fn cause(&self) -> TaxonomyCause {
        TaxonomyCause::new(self.reason, self.root_cause, self.fine_grained)
    }
}

pub mod id {
    pub const ARCHIVE_ENTRY_ORDER: &str = "archive.entry-order";
    pub const ARCHIVE_ENTRY_MTIME: &str = "archive.entry-mtime";
    pub const ARCHIVE_COMPRESSION: &str = "archive.compression";
    pub const ARCHIVE_UNIX_MODE: &str = "archive.unix-mode";
    pub const ARCHIVE_OWNERSHIP: &str = "archive.ownership";
    pub const ARCHIVE_EXTRA_FIELDS: &str = "archive.extra-fields";
    pub const GZIP_HEADER: &str = "gzip.header";

    pub const MANIFEST_BUILT_BY: &str = "manifest.built-by";
    pub const MANIFEST_OS_VERSION: &str = "manifest.os-version";
    pub const MANIFEST_BND_LAST_MODIFIED: &str = "manifest.bnd-last-modified";
    pub const MANIFEST_ENTRY_DIGESTS: &str = "manifest.entry-digests";
    pub const MANIFEST_ATTRIBUTE_ORDER: &str = "manifest.attribute-order";
    pub const MANIFEST_VALUE_ORDER: &str = "manifest.value-order";
    pub const JAR_SIGNATURE_FILES: &str = "jar.signature-files";
    pub const PROPERTIES_COMMENTS: &str = "properties.comments";
    pub const PROPERTIES_KEY_ORDER: &str = "properties.key-order";
    pub const PROPERTIES_M2E: &str = "properties.m2e";
    pub const VERSIONING_POM_PROPERTIES: &str = "versioning.pom-properties";
    pub const VERSIONING_COMMIT_COUNT: &str = "versioning.commit-count";
    pub const VERSIONING_GIT_TAGS: &str = "versioning.git-tags";
    pub const VERSIONING_BRANCH_NAME: &str = "versioning.branch-name";
    pub const VERSIONING_LOCAL_BRANCH: &str = "versioning.local-branch";
    pub const VERSIONING_COMMIT_TIMEZONE: &str = "versioning.commit-timezone";
    pub const VERSIONING_REMOTE_URL: &str = "versioning.remote-url";
    pub const SBOM_SERIAL_NUMBER: &str = "sbom.serial-number";
    pub const SBOM_TIMESTAMP: &str = "sbom.timestamp";
    pub const SBOM_LICENSE: &str = "sbom.license";
    pub const SBOM_DESCRIPTION: &str = "sbom.description";
    pub const SBOM_EXTERNAL_REFERENCES: &str = "sbom.external-references";

    pub const MANIFEST_BUILD_JDK: &str = "manifest.build-jdk";
    pub const MANIFEST_BUILD_JDK_SPEC: &str = "manifest.build-jdk-spec";
    pub const MANIFEST_CREATED_BY: &str = "manifest.created-by";
    pub const MANIFEST_ORIGINALLY_CREATED_BY: &str = "manifest.originally-created-by";
    pub const MANIFEST_IMPL_BUILD_JAVA_VENDOR: &str = "manifest.implementation-build-java-vendor";
    pub const MANIFEST_SCM_REVISION: &str = "manifest.scm-revision";
    pub const MANIFEST_SCM_GIT_BRANCH: &str = "manifest.scm-git-branch";
    pub const CLASSFILE_STRUCTURAL: &str = "classfile.structural";
    pub const CLASSFILE_DEBUG_ATTRIBUTES: &str = "classfile.debug-attributes";
    pub const CLASSFILE_MODULE_INFO: &str = "classfile.module-info";

    pub const SBOM_HASH_ALGORITHMS: &str = "sbom.hash-algorithms";
    pub const SBOM_COMPONENTS_ADDED: &str = "sbom.components-added";
    pub const SBOM_COMPONENTS_REMOVED: &str = "sbom.components-removed";
    pub const SBOM_COMPONENTS_MODIFIED: &str = "sbom.components-modified";
    pub const FILESYSTEM_ENTRY_PRESENCE: &str = "filesystem.entry-presence";
    pub const FILESYSTEM_FILE_TYPE: &str = "filesystem.file-type";
    pub const FILESYSTEM_ABSOLUTE_PATHS: &str = "filesystem.absolute-paths";
    pub const CLASSFILE_GENERATED_CODE: &str = "classfile.generated-code";
    pub const CLASSFILE_MAVEN_PLUGINS: &str = "classfile.maven-plugins";
    pub const CLASSFILE_OPTIMIZATION: &str = "classfile.optimization";
    pub const CLASSFILE_EMBEDDED_DATA: &str = "classfile.embedded-data";
    pub const TIMESTAMPS_DOCUMENTATION: &str = "timestamps.documentation";
    pub const TIMESTAMPS_SHELL_SCRIPTS: &str = "timestamps.shell-scripts";
    pub const TIMESTAMPS_BINARIES: &str = "timestamps.binaries";
    pub const TIMESTAMPS_BYTECODE: &str = "timestamps.bytecode";
    pub const TIMESTAMPS_MANIFEST: &str = "timestamps.manifest";
}

use Mitigation::{CanonicalizeByRebuilder as Canon, FixBuildProcess as FixBuild, FixRebuildProcess as FixRebuild};
use ProfileName::{Aggressive, ArchiveOnly, Default as DefaultP};
use Reason::*;
use RuleAction::*;

#[allow(clippy::too_many_arguments)]
const fn rule(
    id: &'static str,
    reason: Reason,
    root_cause: &'static str,
    fine_grained: &'static str,
    mitigation: Mitigation,
    min_profile: Option<ProfileName>,
    action: RuleAction,
    pattern: Option<&'static str>,
) -> RuleMeta {
    RuleMeta { id, reason, root_cause, fine_grained, mitigation, min_profile, action, pattern }
}

/// ISO-8601 timestamp pattern used across pattern rules.
pub const ISO8601_PATTERN: &str = r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}";
/// Millisecond epoch runs (13 digits) as emitted by Bnd-LastModified and
/// friends.
pub const EPOCH_MILLIS_PATTERN: &str = r"\b1\d{12}\b";

/// The rule catalog, in stable output order.
pub const RULES: &[RuleMeta] = &[
    // Generic archive stabilizers.
    rule(id::ARCHIVE_ENTRY_ORDER, Filesystem, "Environment", "Order of files in archive", Canon, Some(ArchiveOnly), SortEntries, None),
    rule(id::ARCHIVE_ENTRY_MTIME, Timestamps, "Build-time Variability", "File metadata", Canon, Some(ArchiveOnly), FixEntryMtime, None),
    rule(id::ARCHIVE_COMPRESSION, Filesystem, "Environment", "Size", Canon, Some(ArchiveOnly), StoreCompression, None),
    rule(id::ARCHIVE_UNIX_MODE, Filesystem, "Environment", "Permissions", Canon, Some(ArchiveOnly), NormalizeMode, None),
    rule(id::ARCHIVE_OWNERSHIP, Filesystem, "Environment", "Ownership", Canon, Some(ArchiveOnly), ClearOwnership, None),
    rule(id::ARCHIVE_EXTRA_FIELDS, Timestamps, "Build-time Variability", "File metadata", Canon, Some(ArchiveOnly), ClearExtraFields, None),
    rule(id::GZIP_HEADER, Timestamps, "Build-time Variability", "File metadata", Canon, Some(ArchiveOnly), ZeroGzipHeader, None),
    // Manifest and properties canonicalization.
    rule(id::MANIFEST_BUILT_BY, BuildManifest, "Environment", "Built-By", Canon, Some(DefaultP), ManifestRemoveAttribute("Built-By"), Some(r"(?m)^[+-]Built-By:")),
    rule(id::MANIFEST_OS_VERSION, BuildManifest, "Environment", "Os-Version", Canon, Some(DefaultP), ManifestRemoveAttribute("Os-Version"), Some(r"(?m)^[+-]Os-Version:")),
    rule(id::MANIFEST_BND_LAST_MODIFIED, BuildManifest, "Dynamic Properties", "Bnd-LastModified", Canon, Some(DefaultP), ManifestRemoveAttribute("Bnd-LastModified"), Some(r"(?m)^[+-]Bnd-LastModified:")),
    rule(id::MANIFEST_ENTRY_DIGESTS, BuildManifest, "Environment", "Signed JARs", Canon, Some(DefaultP), ManifestRemoveEntryDigests, Some(r"(?m)^[+-][A-Za-z0-9-]+-Digest:")),
    rule(id::MANIFEST_ATTRIBUTE_ORDER, BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values", Canon, Some(DefaultP), ManifestSortAttributes, None),
    rule(id::MANIFEST_VALUE_ORDER, BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values", Canon, Some(DefaultP), ManifestSortValues, Some(r"(?m)^[+-](Export-Package|Import-Package|Include-Resource|Private-Package|Provide-Capability):")),
    rule(id::JAR_SIGNATURE_FILES, BuildManifest, "Environment", "Signed JARs", Canon, Some(DefaultP), RemoveSignatureFiles, None),
    rule(id::PROPERTIES_COMMENTS, BuildManifest, "Dynamic Properties", "pom.properties comment", Canon, Some(DefaultP), PropertiesRemoveComments, Some(r"(?m)^[+-]#")),
    rule(id::PROPERTIES_KEY_ORDER, BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values", Canon, Some(DefaultP), PropertiesSortKeys, None),
    rule(id::PROPERTIES_M2E, BuildManifest, "Environment", "Eclipse Properties", Canon, Some(DefaultP), PropertiesRemoveM2e, Some(r"(?m)^[+-]m2e\.")),
    rule(id::VERSIONING_POM_PROPERTIES, BuildManifest, "Dynamic Properties", "pom.properties comment", Canon, Some(DefaultP), RemovePomProperties, None),
    // git.properties / git.json removal covers the whole source-repository
    // state row family.
    rule(id::VERSIONING_COMMIT_COUNT, VersioningProperties, "Source Repository State", "Number of commits", Canon, Some(DefaultP), RemoveGitFiles, Some(r"(?m)^[+-]git\.(total\.commit\.count|commit\.count)")),
    rule(id::VERSIONING_GIT_TAGS, VersioningProperties, "Source Repository State", "Number of Git tags", Canon, Some(DefaultP), RemoveGitFiles, Some(r"(?m)^[+-]git\.tags")),
    rule(id::VERSIONING_BRANCH_NAME, VersioningProperties, "Source Repository State", "Branch name", Canon, Some(DefaultP), RemoveGitFiles, Some(r#"(?m)^[+-]\s*"?(git\.)?branch"?[=:]"#)),
    rule(id::VERSIONING_LOCAL_BRANCH, VersioningProperties, "Source Repository State", "Local branch name", Canon, Some(DefaultP), RemoveGitFiles, Some(r"(?m)^[+-]git\.local\.branch")),
    rule(id::VERSIONING_COMMIT_TIMEZONE, VersioningProperties, "Source Repository State", "Timezone of commit", Canon, Some(DefaultP), RemoveGitFiles, Some(r"(?m)^[+-]git\.commit\.(time|author\.time)")),
    rule(id::VERSIONING_REMOTE_URL, VersioningProperties, "Source Repository State", "Remote URL", Canon, Some(DefaultP), RemoveGitFiles, Some(r"(?m)^[+-]git\.remote\.origin\.url")),
    // SBOM canonicalization.
    rule(id::SBOM_SERIAL_NUMBER, Sbom, "Dynamic Properties", "SerialNumber", Canon, Some(DefaultP), SbomRemoveSerialNumber, Some(r#"serialNumber|urn:uuid"#)),
    rule(id::SBOM_TIMESTAMP, Sbom, "Dynamic Properties", "Timestamp", Canon, Some(DefaultP), SbomRemoveTimestamp, Some(r#""timestamp""#)),
    rule(id::SBOM_LICENSE, Sbom, "External Metadata", "License", Canon, Some(DefaultP), SbomRemoveLicenses, Some(r#""licenses"|licenseListVersion"#)),
    rule(id::SBOM_DESCRIPTION, Sbom, "External Metadata", "Description of components", Canon, Some(DefaultP), SbomRemoveDescriptions, Some(r#""description""#)),
    rule(id::SBOM_EXTERNAL_REFERENCES, Sbom, "External Metadata", "ExternalReferences", Canon, Some(DefaultP), SbomRemoveExternalReferences, Some(r#""externalReferences""#)),
    // Aggressive-only erasure of fix-the-process manifest attributes.
    rule(id::MANIFEST_BUILD_JDK, BuildManifest, "Rebuild Process", "Build-Jdk", FixRebuild, Some(Aggressive), ManifestRemoveAttribute("Build-Jdk"), Some(r"(?m)^[+-]Build-Jdk:")),
    rule(id::MANIFEST_BUILD_JDK_SPEC, BuildManifest, "Rebuild Process", "Build-Jdk", FixRebuild, Some(Aggressive), ManifestRemoveAttribute("Build-Jdk-Spec"), Some(r"(?m)^[+-]Build-Jdk-Spec:")),
    rule(id::MANIFEST_CREATED_BY, BuildManifest, "Rebuild Process", "Created-By", FixRebuild, Some(Aggressive), ManifestRemoveAttribute("Created-By"), Some(r"(?m)^[+-]Created-By:")),
    rule(id::MANIFEST_ORIGINALLY_CREATED_BY, BuildManifest, "Rebuild Process", "Originally-Created-By", FixRebuild, Some(Aggressive), ManifestRemoveAttribute("Originally-Created-By"), Some(r"(?m)^[+-]Originally-Created-By:")),
    rule(id::MANIFEST_IMPL_BUILD_JAVA_VENDOR, BuildManifest, "Rebuild Process", "Implementation-Build-Java-Vendor", FixRebuild, Some(Aggressive), ManifestRemoveAttribute("Implementation-Build-Java-Vendor"), Some(r"(?m)^[+-]Implementation-Build-Java-Vendor:")),
    rule(id::MANIFEST_SCM_REVISION, BuildManifest, "Rebuild Process", "SCM-Revision", FixRebuild, Some(Aggressive), ManifestRemoveAttribute("SCM-Revision"), Some(r"(?m)^[+-]SCM-Revision:")),
    rule(id::MANIFEST_SCM_GIT_BRANCH, BuildManifest, "Dynamic Properties", "SCM-Git-Branch", FixBuild, Some(Aggressive), ManifestRemoveAttribute("SCM-Git-Branch"), Some(r"(?m)^[+-]SCM-Git-Branch:")),
    // Structural classfile canonicalization.
    rule(id::CLASSFILE_STRUCTURAL, JvmBytecode, "JDK Version", "Refactoring", FixBuild, Some(Aggressive), ClassfileStructural, None),
    rule(id::CLASSFILE_DEBUG_ATTRIBUTES, JvmBytecode, "JDK Version", "Debug information", FixBuild, Some(Aggressive), ClassfileStripDebug, Some(r"SourceFile|LineNumberTable|LocalVariableTable")),
    rule(id::CLASSFILE_MODULE_INFO, JvmBytecode, "Embedded Metadata", "Java/project version", FixBuild, Some(Aggressive), RemoveModuleInfo, None),
    // Classifier-only rules: these rows are reported, never rewritten.
    rule(id::SBOM_HASH_ALGORITHMS, Sbom, "Java Vendor", "Removal of hash algorithms", FixRebuild, None, Classify, Some(r#""alg"\s*:\s*"SHA3?-"#)),
    rule(id::SBOM_COMPONENTS_ADDED, Sbom, "Inconsistent Build Configuration", "Addition of components", FixBuild, None, Classify, None),
    rule(id::SBOM_COMPONENTS_REMOVED, Sbom, "Inconsistent Build Configuration", "Removal of components", FixBuild, None, Classify, None),
    rule(id::SBOM_COMPONENTS_MODIFIED, Sbom, "Inconsistent Build Configuration", "Modification of components", FixBuild, None, Classify, None),
    rule(id::FILESYSTEM_ENTRY_PRESENCE, Filesystem, "Inconsistent Build Configuration", "Files removed or added", FixBuild, None, Classify, None),
    rule(id::FILESYSTEM_FILE_TYPE, Filesystem, "Inconsistent Build Configuration", "Type", FixBuild, None, Classify, None),
    // No generic rewrite exists for embedded absolute paths; detection only.
    rule(id::FILESYSTEM_ABSOLUTE_PATHS, Filesystem, "Environment", "Absolute Paths", Canon, None, Classify, Some(r"(?m)^[+-].*(/home/|/root/|/Users/|C:\\)")),
    // Synthetic-name canonicalization would need cross-class consistency;
    // lambda renames are reported, not rewritten.
    rule(id::CLASSFILE_GENERATED_CODE, JvmBytecode, "Generated Code", "Java Compiler", Canon, None, Classify, Some(r"lambda\$|\$\d+")),
    rule(id::CLASSFILE_MAVEN_PLUGINS, JvmBytecode, "Generated Code", "Maven Plugins", FixRebuild, None, Classify, None),
    rule(id::CLASSFILE_OPTIMIZATION, JvmBytecode, "JDK Version", "Optimization and de-optimization", FixBuild, None, Classify, Some(r"invokevirtual|invokeinterface|checkcast")),
    rule(id::CLASSFILE_EMBEDDED_DATA, JvmBytecode, "Embedded Metadata", "Embedded environment data", FixBuild, None, Classify, None),
    rule(id::TIMESTAMPS_DOCUMENTATION, Timestamps, "Build-time Variability", "Documentation", FixBuild, None, Classify, None),
    rule(id::TIMESTAMPS_SHELL_SCRIPTS, Timestamps, "Build-time Variability", "Shell scripts", FixBuild, None, Classify, None),
    rule(id::TIMESTAMPS_BINARIES, Timestamps, "Build-time Variability", "Executable binaries", FixBuild, None, Classify, None),
    rule(id::TIMESTAMPS_BYTECODE, Timestamps, "Build-time Variability", "JVM bytecode", FixBuild, None, Classify, Some(ISO8601_PATTERN)),
    rule(id::TIMESTAMPS_MANIFEST, Timestamps, "Build-time Variability", "Build manifest", FixBuild, None, Classify, Some(EPOCH_MILLIS_PATTERN)),
];

pub fn rule_by_id(id: &str) -> Option<&'static RuleMeta> {
    RULES.iter().find(|r| r.id == id)
}

/// Machine-readable catalog row, exported by `canon rules --format json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RuleListing {
    pub id: String,
    pub cause: TaxonomyCause,
    pub mitigation: Mitigation,
    pub profiles: Vec<ProfileName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
}

/// The catalog as stable, ordered listings: rule id, cause triple,
/// mitigation, and the built-in profiles whose stabilization applies it.
pub fn list_rules() -> Vec<RuleListing> {
    RULES
        .iter()
        .map(|r| RuleListing {
            id: r.id.to_string(),
            cause: r.cause(),
            mitigation: r.mitigation,
            profiles: match r.min_profile {
                Some(ProfileName::ArchiveOnly) => vec![ProfileName::ArchiveOnly, ProfileName::Default, ProfileName::Aggressive],
                Some(ProfileName::Default) => vec![ProfileName::Default, ProfileName::Aggressive],
                Some(ProfileName::Aggressive) => vec![ProfileName::Aggressive],
                None => Vec::new(),
            },
            pattern: r.pattern.map(str::to_string),
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("fixed timestamp {0} is before the ZIP floor {ZIP_TIMESTAMP_FLOOR} (1980-01-01)")]
    TimestampBelowFloor(i64),
}

/// A set of enabled rules plus the knobs stabilization needs.
#[derive(Clone, Debug)]
pub struct RuleProfile {
    pub name: ProfileName,
    pub enabled_rule_ids: BTreeSet<&'static str>,
    /// Timestamp applied to every entry, seconds since the epoch. Never
    /// below [`ZIP_TIMESTAMP_FLOOR`].
    pub fixed_timestamp: i64,
    pub recursion_depth_limit: u32,
}

impl RuleProfile {
    pub fn named(name: ProfileName) -> Self {
        let enabled_rule_ids = RULES
            .iter()
            .filter(|r| r.min_profile.is_some_and(|min| min <= name))
            .map(|r| r.id)
            .collect();
        RuleProfile {
            name,
            enabled_rule_ids,
            fixed_timestamp: ZIP_TIMESTAMP_FLOOR,
            recursion_depth_limit: DEFAULT_RECURSION_DEPTH,
        }
    }

    pub fn archive_only() -> Self {
        Self::named(ProfileName::ArchiveOnly)
    }

    pub fn default_profile() -> Self {
        Self::named(ProfileName::Default)
    }

    pub fn aggressive() -> Self {
        Self::named(ProfileName::Aggressive)
    }

    pub fn with_timestamp(mut self, seconds: i64) -> Result<Self, ProfileError> {
        if seconds < ZIP_TIMESTAMP_FLOOR {
            return Err(ProfileError::TimestampBelowFloor(seconds));
        }
        self.fixed_timestamp = seconds;
        Ok(self)
    }

    pub fn enabled(&self, rule_id: &str) -> bool {
        self.enabled_rule_ids.contains(rule_id)
    }

    /// Enabled rules in catalog order.
    pub fn enabled_rules(&self) -> impl Iterator<Item = &'static RuleMeta> + '_ {
        RULES.iter().filter(|r| self.enabled(r.id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{canonicalizable_cause_count, CATALOG};

    #[test]
    fn rule_ids_are_unique() {
        let mut seen = BTreeSet::new();
        for r in RULES {
            assert!(seen.insert(r.id), "duplicate rule id {}", r.id);
        }
    }

    #[test]
    fn every_rule_cause_is_cataloged() {
        for r in RULES {
            assert!(r.cause().is_cataloged(), "rule {} uses uncataloged cause {}", r.id, r.cause());
        }
    }

    #[test]
    fn every_canonicalizable_row_maps_to_a_rule() {
        for row in CATALOG.iter().filter(|row| row.mitigation == Mitigation::CanonicalizeByRebuilder) {
            assert!(
                RULES.iter().any(|r| r.reason == row.reason && r.root_cause == row.root_cause && r.fine_grained == row.fine_grained),
                "no rule for canonicalizable cause {}/{}/{}",
                row.reason,
                row.root_cause,
                row.fine_grained
            );
        }
        assert!(RULES.len() >= canonicalizable_cause_count());
    }

    #[test]
    fn non_canonicalizable_rules_never_rewrite_below_aggressive() {
        // The mitigation column governs who may rewrite: fix-* rules carry
        // an identity transform in archive-only and default.
        for r in RULES.iter().filter(|r| r.mitigation != Mitigation::CanonicalizeByRebuilder) {
            assert!(
                r.min_profile.is_none() || r.min_profile == Some(ProfileName::Aggressive),
                "rule {} would rewrite under default despite mitigation {}",
                r.id,
                r.mitigation
            );
        }
    }

    #[test]
    fn profiles_nest_by_inclusion() {
        let archive = RuleProfile::archive_only();
        let default = RuleProfile::default_profile();
        let aggressive = RuleProfile::aggressive();
        assert!(archive.enabled_rule_ids.is_subset(&default.enabled_rule_ids));
        assert!(default.enabled_rule_ids.is_subset(&aggressive.enabled_rule_ids));
        assert!(archive.enabled_rule_ids.len() < default.enabled_rule_ids.len());
        assert!(default.enabled_rule_ids.len() < aggressive.enabled_rule_ids.len());
    }

    #[test]
    fn expected_listing_entries_are_present() {
        let listings = list_rules();
        let built_by = listings.iter().find(|l| l.id == "manifest.built-by").unwrap();
        assert_eq!(built_by.cause, TaxonomyCause::new(Reason::BuildManifest, "Environment", "Built-By"));
        let serial = listings.iter().find(|l| l.id == "sbom.serial-number").unwrap();
        assert_eq!(serial.mitigation, Mitigation::CanonicalizeByRebuilder);
    }

    #[test]
    fn timestamp_floor_is_enforced() {
        assert!(RuleProfile::default_profile().with_timestamp(0).is_err());
        let p = RuleProfile::default_profile().with_timestamp(1_600_000_000).unwrap();
        assert_eq!(p.fixed_timestamp, 1_600_000_000);
    }

    #[test]
    fn classifier_patterns_compile() {
        for r in RULES {
            if let Some(p) = r.pattern {
                regex::Regex::new(p).unwrap_or_else(|e| panic!("rule {} pattern: {e}", r.id));
            }
        }
    }
}
