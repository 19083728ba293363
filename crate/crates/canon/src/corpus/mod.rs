//! Synthetic fixture corpus: one reference/rebuild pair per fine-grained
//! unreproducibility cause that is exercisable at desk scale, plus two
//! negative controls. Deterministic for a fixed seed.

pub mod classgen;

use crate::archive::{write_archive, Archive, Compression, Entry, FormatKind, Trailer};
use crate::rules::id;
use crate::taxonomy::{Reason, TaxonomyCause};
use crate::verify::{PairDescriptor, VerdictStatus};
use classgen::{greeter_class, module_info_class, GreeterShape};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Expected verdict per built-in profile, derived from the rule catalog's
/// profile membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedVerdicts {
    pub archive_only: VerdictStatus,
    pub default: VerdictStatus,
    pub aggressive: VerdictStatus,
}

const RAC: VerdictStatus = VerdictStatus::ReproducibleAfterCanonicalization;
const UNREPRO: VerdictStatus = VerdictStatus::Unreproducible;

impl ExpectedVerdicts {
    fn rac_from_archive_only() -> Self {
        ExpectedVerdicts { archive_only: RAC, default: RAC, aggressive: RAC }
    }

    fn rac_from_default() -> Self {
        ExpectedVerdicts { archive_only: UNREPRO, default: RAC, aggressive: RAC }
    }

    fn rac_from_aggressive() -> Self {
        ExpectedVerdicts { archive_only: UNREPRO, default: UNREPRO, aggressive: RAC }
    }

    fn never() -> Self {
        ExpectedVerdicts { archive_only: UNREPRO, default: UNREPRO, aggressive: UNREPRO }
    }
}

/// One generated pair with its label and per-profile expectations.
#[derive(Clone, Debug)]
pub struct CorpusPair {
    pub id: &'static str,
    pub file_extension: &'static str,
    pub reference: Vec<u8>,
    pub rebuild: Vec<u8>,
    pub expected_cause: TaxonomyCause,
    /// Catalog rule whose transform makes the pair converge, when any.
    pub rule_id: Option<&'static str>,
    pub expected: ExpectedVerdicts,
}

/// Sidecar record written next to pairs.json for the acceptance suite.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusExpectation {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<String>,
    pub expected_cause: TaxonomyCause,
    pub verdicts: ExpectedVerdicts,
}

const BASE_MTIME: i64 = 1_647_431_421;
const REBUILD_MTIME: i64 = 1_735_860_648;

const MANIFEST_ATTRIBUTES: &[(&str, &str)] = &[
    ("Manifest-Version", "1.0"),
    ("Archiver-Version", "Plexus Archiver"),
    ("Built-By", "root"),
    ("Bnd-LastModified", "1647431421514"),
    ("Build-Jdk", "1.8.0_292"),
    ("Created-By", "Apache Maven"),
    ("Implementation-Build-Java-Vendor", "AdoptOpenJDK"),
    ("Os-Version", "5.15.0-1035-azure"),
    ("SCM-Revision", "c48c286d"),
    ("SCM-Git-Branch", "master"),
    (
        "Export-Package",
        "org.slf4j.ext;version=\"2.0.6\",org.slf4j.agent;version=\"2.0.6\"",
    ),
];

fn render_manifest(attributes: &[(&str, &str)]) -> Vec<u8> {
    let mut out = Vec::new();
    for (key, value) in attributes {
        out.extend_from_slice(key.as_bytes());
        out.extend_from_slice(b": ");
        out.extend_from_slice(value.as_bytes());
        out.extend_from_slice(b"\r\n");
    }
    out.extend_from_slice(b"\r\n");
    out
}

fn manifest_with(replace: &[(&str, &str)]) -> Vec<u8> {
    let mut attributes: Vec<(&str, &str)> = MANIFEST_ATTRIBUTES.to_vec();
    for (key, value) in replace {
        if let Some(slot) = attributes.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        } else {
            attributes.push((key, value));
        }
    }
    render_manifest(&attributes)
}

const POM_PROPERTIES: &str =
    "#Generated by Apache Maven\n#Wed Apr 20 20:27:33 CEST 2022\nversion=1.0.0\ngroupId=org.example\nartifactId=demo\n";
const APP_PROPERTIES: &str = "endpoint=https://example.invalid/api\nretries=3\n";
const GIT_PROPERTIES: &str =
    "git.branch=main\ngit.remote.origin.url=https://github.com/example/demo.git\ngit.tags=5\ngit.total.commit.count=120\n";
const APPLICATION_TXT: &str = "Hello from the demo application.\nIt keeps a few lines of plain text.\nGoodbye.\n";

fn sbom_json(serial: &str, timestamp: &str, license: &str) -> Vec<u8> {
    format!(
        "{{\n  \"bomFormat\": \"CycloneDX\",\n  \"specVersion\": \"1.4\",\n  \"serialNumber\": \"urn:uuid:{serial}\",\n  \"version\": 1,\n  \"metadata\": {{\n    \"timestamp\": \"{timestamp}\"\n  }},\n  \"components\": [\n    {{\n      \"type\": \"library\",\n      \"name\": \"slf4j-api\",\n      \"version\": \"2.0.6\",\n      \"licenses\": [{{\"license\": {{\"id\": \"{license}\"}}}}],\n      \"description\": \"The slf4j API\",\n      \"externalReferences\": [{{\"type\": \"vcs\", \"url\": \"https://github.com/qos-ch/slf4j\"}}],\n      \"hashes\": [{{\"alg\": \"SHA-256\", \"content\": \"f00d\"}}]\n    }}\n  ]\n}}\n"
    )
    .into_bytes()
}

struct JarBuilder {
    entries: Vec<Entry>,
}

impl JarBuilder {
    fn file(&mut self, path: &[u8], payload: Vec<u8>) -> &mut Entry {
        let mut entry = Entry::file(path, payload);
        entry.mtime = BASE_MTIME;
        entry.unix_mode = 0o100_644;
        self.entries.push(entry);
        self.entries.last_mut().expect("just pushed")
    }

    fn replace(&mut self, path: &[u8], payload: Vec<u8>) {
        let entry = self
            .entries
            .iter_mut()
            .find(|e| e.path == path)
            .unwrap_or_else(|| panic!("no entry {}", String::from_utf8_lossy(path)));
        entry.payload = payload;
    }

    fn remove(&mut self, path: &[u8]) {
        self.entries.retain(|e| e.path != path);
    }

    fn entry_mut(&mut self, path: &[u8]) -> &mut Entry {
        self.entries
            .iter_mut()
            .find(|e| e.path == path)
            .unwrap_or_else(|| panic!("no entry {}", String::from_utf8_lossy(path)))
    }

    fn build(&self) -> Vec<u8> {
        let archive = Archive {
            format: FormatKind::Zip,
            entries: self.entries.clone(),
            trailer: Trailer::ZipComment(Vec::new()),
        };
        write_archive(&archive).expect("fixture jar serializes")
    }
}

fn base_jar(rng: &mut ChaCha8Rng) -> JarBuilder {
    let mut data = vec![0u8; 256];
    rng.fill_bytes(&mut data);
    data[0] = 0; // keep the payload unmistakably binary

    let mut jar = JarBuilder { entries: Vec::new() };
    let mut meta_inf = Entry::directory(b"META-INF");
    meta_inf.mtime = BASE_MTIME;
    meta_inf.unix_mode = 0o040_755;
    jar.entries.push(meta_inf);
    jar.file(b"META-INF/MANIFEST.MF", manifest_with(&[]));
    jar.file(b"META-INF/maven/org.example/demo/pom.properties", POM_PROPERTIES.into());
    jar.file(b"META-INF/sbom/demo-1.0-cyclonedx.json", sbom_json("3e671687-395b-41f5-a30f-a58921a69b79", "2022-04-20T20:27:33Z", "MIT"));
    jar.file(b"org/example/demo/Greeter.class", greeter_class(&GreeterShape::default()));
    jar.file(b"BOOT-INF/classes/git.properties", GIT_PROPERTIES.into());
    jar.file(b"config/app.properties", APP_PROPERTIES.into());
    jar.file(b"application.txt", APPLICATION_TXT.into());
    jar.file(b"data.bin", data);
    jar.file(b"docs/index.html", b"<html><body>demo documentation</body></html>\n".to_vec());
    jar
}

fn tar_gz(owner: &str, gzip_mtime: i64) -> Vec<u8> {
    let mut script = Entry::file(b"demo-1.0/bin/run.sh", b"#!/bin/sh\nexec java -jar demo.jar\n".to_vec());
    script.unix_mode = 0o100_755;
    script.mtime = BASE_MTIME;
    script.owner_user = owner.into();
    script.owner_group = b"staff".to_vec();
    let mut notice = Entry::file(b"demo-1.0/NOTICE", b"Copyright 2022 Example\n".to_vec());
    notice.unix_mode = 0o100_644;
    notice.mtime = BASE_MTIME;
    notice.owner_user = owner.into();
    notice.owner_group = b"staff".to_vec();
    let tar = Archive { format: FormatKind::Tar, entries: vec![script, notice], trailer: Trailer::None };
    let tar_bytes = write_archive(&tar).expect("fixture tar serializes");

    let mut member = Entry::file(b"demo-1.0-src.tar", tar_bytes);
    member.mtime = gzip_mtime;
    member.compression = Compression::Deflate;
    let gz = Archive {
        format: FormatKind::Gzip,
        entries: vec![member],
        trailer: Trailer::GzipHeader { os: 3, comment: None },
    };
    write_archive(&gz).expect("fixture tar.gz serializes")
}

fn cause(reason: Reason, root: &str, fine: &str) -> TaxonomyCause {
    TaxonomyCause::new(reason, root, fine)
}

/// Build the full corpus in memory. Deterministic for a fixed seed.
pub fn build_corpus(seed: u64) -> Vec<CorpusPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = base_jar(&mut rng);

    let mut pairs = Vec::new();

    let jar_pair = |pairs: &mut Vec<CorpusPair>,
                    id: &'static str,
                    mutate_reference: &dyn Fn(&mut JarBuilder),
                    mutate_rebuild: &dyn Fn(&mut JarBuilder),
                    expected_cause: TaxonomyCause,
                    rule_id: Option<&'static str>,
                    expected: ExpectedVerdicts| {
        let mut reference = JarBuilder { entries: base.entries.clone() };
        mutate_reference(&mut reference);
        let mut rebuild = JarBuilder { entries: base.entries.clone() };
        mutate_rebuild(&mut rebuild);
        let (reference, rebuild) = (reference.build(), rebuild.build());
        assert_ne!(reference, rebuild, "pair {id} must differ");
        pairs.push(CorpusPair { id, file_extension: "jar", reference, rebuild, expected_cause, rule_id, expected });
    };
    let keep = |_: &mut JarBuilder| {};

    // Manifest attribute values that differ between builder and rebuilder
    // environments. The reference side keeps the base manifest.
    let manifest_pairs: &[(&'static str, &'static str, &'static str, TaxonomyCause, &'static str, ExpectedVerdicts)] = &[
        (
            "manifest-built-by",
            "Built-By",
            "aman",
            cause(Reason::BuildManifest, "Environment", "Built-By"),
            id::MANIFEST_BUILT_BY,
            ExpectedVerdicts::rac_from_default(),
        ),
        (
            "manifest-os-version",
            "Os-Version",
            "5.15.0-118-generic",
            cause(Reason::BuildManifest, "Environment", "Os-Version"),
            id::MANIFEST_OS_VERSION,
            ExpectedVerdicts::rac_from_default(),
        ),
        (
            "manifest-bnd-last-modified",
            "Bnd-LastModified",
            "1735860648961",
            cause(Reason::BuildManifest, "Dynamic Properties", "Bnd-LastModified"),
            id::MANIFEST_BND_LAST_MODIFIED,
            ExpectedVerdicts::rac_from_default(),
        ),
        (
            "manifest-build-jdk",
            "Build-Jdk",
            "1.8.0_422",
            cause(Reason::BuildManifest, "Rebuild Process", "Build-Jdk"),
            id::MANIFEST_BUILD_JDK,
            ExpectedVerdicts::rac_from_aggressive(),
        ),
        (
            "manifest-created-by",
            "Created-By",
            "Maven Source Plugin 3.2.1",
            cause(Reason::BuildManifest, "Rebuild Process", "Created-By"),
            id::MANIFEST_CREATED_BY,
            ExpectedVerdicts::rac_from_aggressive(),
        ),
        (
            "manifest-implementation-vendor",
            "Implementation-Build-Java-Vendor",
            "Oracle Corporation",
            cause(Reason::BuildManifest, "Rebuild Process", "Implementation-Build-Java-Vendor"),
            id::MANIFEST_IMPL_BUILD_JAVA_VENDOR,
            ExpectedVerdicts::rac_from_aggressive(),
        ),
        (
            "manifest-scm-revision",
            "SCM-Revision",
            "bc9cc174",
            cause(Reason::BuildManifest, "Rebuild Process", "SCM-Revision"),
            id::MANIFEST_SCM_REVISION,
            ExpectedVerdicts::rac_from_aggressive(),
        ),
        (
            "manifest-scm-git-branch",
            "SCM-Git-Branch",
            "338023a44e4dc62aff8985ca42c2f6743258b1c0",
            cause(Reason::BuildManifest, "Dynamic Properties", "SCM-Git-Branch"),
            id::MANIFEST_SCM_GIT_BRANCH,
            ExpectedVerdicts::rac_from_aggressive(),
        ),
    ];
    for (pair_id, key, rebuilt_value, expected_cause, rule, expected) in manifest_pairs {
        jar_pair(
        &mut pairs,
            pair_id,
            &keep,
            &|jar| jar.replace(b"META-INF/MANIFEST.MF", manifest_with(&[(key, rebuilt_value)])),
            expected_cause.clone(),
            Some(rule),
            *expected,
        );
    }

    jar_pair(
        &mut pairs,
        "manifest-export-package-order",
        &keep,
        &|jar| {
            jar.replace(
                b"META-INF/MANIFEST.MF",
                manifest_with(&[(
                    "Export-Package",
                    "org.slf4j.agent;version=\"2.0.6\",org.slf4j.ext;version=\"2.0.6\"",
                )]),
            )
        },
        cause(Reason::BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values"),
        Some(id::MANIFEST_VALUE_ORDER),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "manifest-attribute-order",
        &keep,
        &|jar| {
            let mut attributes = MANIFEST_ATTRIBUTES.to_vec();
            attributes.swap(1, 3); // Archiver-Version and Bnd-LastModified trade places
            jar.replace(b"META-INF/MANIFEST.MF", render_manifest(&attributes));
        },
        cause(Reason::BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values"),
        Some(id::MANIFEST_ATTRIBUTE_ORDER),
        ExpectedVerdicts::rac_from_default(),
    );

    // Signed versus unsigned: the reference carries signature files plus
    // per-entry digests in the manifest.
    jar_pair(
        &mut pairs,
        "jar-signature",
        &|jar| {
            let mut manifest = manifest_with(&[]);
            manifest.truncate(manifest.len() - 2); // reopen before the final blank line
            manifest.extend_from_slice(
                b"\r\nName: org/example/demo/Greeter.class\r\nSHA-256-Digest: 9bb5d25c0b2ebe091c9f59b1c8b077ab=\r\n\r\n",
            );
            jar.replace(b"META-INF/MANIFEST.MF", manifest);
            jar.file(b"META-INF/DEMO.SF", b"Signature-Version: 1.0\r\nSHA-256-Digest-Manifest: f00dbabe=\r\n\r\n".to_vec());
            jar.file(b"META-INF/DEMO.RSA", vec![0x30, 0x82, 0x01, 0x00, 0x06, 0x09]);
        },
        &keep,
        cause(Reason::BuildManifest, "Environment", "Signed JARs"),
        Some(id::JAR_SIGNATURE_FILES),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "pom-properties-order",
        &keep,
        &|jar| {
            jar.replace(
                b"META-INF/maven/org.example/demo/pom.properties",
                "#Generated by Apache Maven\n#Wed Apr 20 20:27:33 CEST 2022\nartifactId=demo\ngroupId=org.example\nversion=1.0.0\n".into(),
            )
        },
        cause(Reason::BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values"),
        Some(id::VERSIONING_POM_PROPERTIES),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "pom-properties-timestamp",
        &keep,
        &|jar| {
            jar.replace(
                b"META-INF/maven/org.example/demo/pom.properties",
                POM_PROPERTIES.replace("#Wed Apr 20 20:27:33 CEST 2022", "#Wed Jan 29 08:18:40 UTC 2025").into(),
            )
        },
        cause(Reason::BuildManifest, "Dynamic Properties", "pom.properties comment"),
        Some(id::VERSIONING_POM_PROPERTIES),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "pom-properties-eclipse",
        &keep,
        &|jar| {
            jar.replace(
                b"META-INF/maven/org.example/demo/pom.properties",
                format!("{POM_PROPERTIES}m2e.projectLocation=/home/user/workspace/demo\nm2e.projectName=demo\n").into(),
            )
        },
        cause(Reason::BuildManifest, "Environment", "Eclipse Properties"),
        Some(id::VERSIONING_POM_PROPERTIES),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "app-properties-order",
        &keep,
        &|jar| jar.replace(b"config/app.properties", "retries=3\nendpoint=https://example.invalid/api\n".into()),
        cause(Reason::BuildManifest, "Inconsistent Build Configuration", "Order of properties and their values"),
        Some(id::PROPERTIES_KEY_ORDER),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "sbom-serial-number",
        &keep,
        &|jar| {
            jar.replace(
                b"META-INF/sbom/demo-1.0-cyclonedx.json",
                sbom_json("7c311bda-0481-4b9e-a0ed-1a2b3c4d5e6f", "2025-01-29T08:18:40Z", "MIT"),
            )
        },
        cause(Reason::Sbom, "Dynamic Properties", "SerialNumber"),
        Some(id::SBOM_SERIAL_NUMBER),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "sbom-external-metadata",
        &keep,
        &|jar| {
            jar.replace(
                b"META-INF/sbom/demo-1.0-cyclonedx.json",
                sbom_json("3e671687-395b-41f5-a30f-a58921a69b79", "2022-04-20T20:27:33Z", "MIT License"),
            )
        },
        cause(Reason::Sbom, "External Metadata", "License"),
        Some(id::SBOM_LICENSE),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "git-properties-tags",
        &keep,
        &|jar| jar.replace(b"BOOT-INF/classes/git.properties", GIT_PROPERTIES.replace("git.tags=5", "git.tags=7").into()),
        cause(Reason::VersioningProperties, "Source Repository State", "Number of Git tags"),
        Some(id::VERSIONING_GIT_TAGS),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "git-json-branch",
        &|jar| {
            jar.file(b"git.json", b"{\n  \"branch\": \"main\",\n  \"tags\": \"5\"\n}\n".to_vec());
        },
        &|jar| {
            jar.file(b"git.json", b"{\n  \"branch\": \"338023a44e4dc\",\n  \"tags\": \"5\"\n}\n".to_vec());
        },
        cause(Reason::VersioningProperties, "Source Repository State", "Branch name"),
        Some(id::VERSIONING_BRANCH_NAME),
        ExpectedVerdicts::rac_from_default(),
    );

    jar_pair(
        &mut pairs,
        "entry-mtime",
        &keep,
        &|jar| jar.entry_mut(b"application.txt").mtime = REBUILD_MTIME,
        cause(Reason::Timestamps, "Build-time Variability", "File metadata"),
        Some(id::ARCHIVE_ENTRY_MTIME),
        ExpectedVerdicts::rac_from_archive_only(),
    );

    jar_pair(
        &mut pairs,
        "entry-mode",
        &keep,
        &|jar| jar.entry_mut(b"data.bin").unix_mode = 0o100_664,
        cause(Reason::Filesystem, "Environment", "Permissions"),
        Some(id::ARCHIVE_UNIX_MODE),
        ExpectedVerdicts::rac_from_archive_only(),
    );

    jar_pair(
        &mut pairs,
        "entry-order",
        &keep,
        &|jar| jar.entries.rotate_left(3),
        cause(Reason::Filesystem, "Environment", "Order of files in archive"),
        Some(id::ARCHIVE_ENTRY_ORDER),
        ExpectedVerdicts::rac_from_archive_only(),
    );

    jar_pair(
        &mut pairs,
        "entry-compression",
        &keep,
        &|jar| jar.entry_mut(b"data.bin").compression = Compression::Deflate,
        cause(Reason::Filesystem, "Environment", "Size"),
        Some(id::ARCHIVE_COMPRESSION),
        ExpectedVerdicts::rac_from_archive_only(),
    );

    pairs.push(CorpusPair {
        id: "tar-ownership",
        file_extension: "tar.gz",
        reference: tar_gz("christopher", BASE_MTIME),
        rebuild: tar_gz("aman", BASE_MTIME),
        expected_cause: cause(Reason::Filesystem, "Environment", "Ownership"),
        rule_id: Some(id::ARCHIVE_OWNERSHIP),
        expected: ExpectedVerdicts::rac_from_archive_only(),
    });

    pairs.push(CorpusPair {
        id: "gzip-mtime",
        file_extension: "tar.gz",
        reference: tar_gz("builder", BASE_MTIME),
        rebuild: tar_gz("builder", REBUILD_MTIME),
        expected_cause: cause(Reason::Timestamps, "Build-time Variability", "File metadata"),
        rule_id: Some(id::GZIP_HEADER),
        expected: ExpectedVerdicts::rac_from_archive_only(),
    });

    // Nested container: an inner jar whose entry mtimes differ.
    {
        let inner = |mtime: i64| {
            let mut entry = Entry::file(b"org/example/demo/Inner.txt", b"nested payload\n".to_vec());
            entry.mtime = mtime;
            entry.unix_mode = 0o100_644;
            let archive = Archive { format: FormatKind::Zip, entries: vec![entry], trailer: Trailer::ZipComment(Vec::new()) };
            write_archive(&archive).expect("inner jar serializes")
        };
        jar_pair(
        &mut pairs,
            "nested-jar-mtime",
            &|jar| {
                jar.file(b"lib/demo-core.jar", inner(BASE_MTIME));
            },
            &|jar| {
                jar.file(b"lib/demo-core.jar", inner(REBUILD_MTIME));
            },
            cause(Reason::Timestamps, "Build-time Variability", "File metadata"),
            Some(id::ARCHIVE_ENTRY_MTIME),
            ExpectedVerdicts::rac_from_archive_only(),
        );
    }

    jar_pair(
        &mut pairs,
        "classfile-method-order",
        &keep,
        &|jar| {
            jar.replace(
                b"org/example/demo/Greeter.class",
                greeter_class(&GreeterShape { swap_methods: true, ..Default::default() }),
            )
        },
        cause(Reason::JvmBytecode, "JDK Version", "Refactoring"),
        Some(id::CLASSFILE_STRUCTURAL),
        ExpectedVerdicts::rac_from_aggressive(),
    );

    jar_pair(
        &mut pairs,
        "classfile-line-number-table",
        &keep,
        &|jar| {
            jar.replace(
                b"org/example/demo/Greeter.class",
                greeter_class(&GreeterShape { extra_line_number: true, ..Default::default() }),
            )
        },
        cause(Reason::JvmBytecode, "JDK Version", "Debug information"),
        Some(id::CLASSFILE_DEBUG_ATTRIBUTES),
        ExpectedVerdicts::rac_from_aggressive(),
    );

    jar_pair(
        &mut pairs,
        "module-info-version",
        &|jar| {
            jar.file(b"module-info.class", module_info_class("9"));
        },
        &|jar| {
            jar.file(b"module-info.class", module_info_class("9.0.1"));
        },
        cause(Reason::JvmBytecode, "Embedded Metadata", "Java/project version"),
        Some(id::CLASSFILE_MODULE_INFO),
        ExpectedVerdicts::rac_from_aggressive(),
    );

    // Negative controls: semantic differences must survive every profile.
    jar_pair(
        &mut pairs,
        "negative-payload-change",
        &keep,
        &|jar| jar.replace(b"application.txt", APPLICATION_TXT.replace("Hello", "Hallo").into()),
        TaxonomyCause::unknown("unclassified text difference"),
        None,
        ExpectedVerdicts::never(),
    );

    jar_pair(
        &mut pairs,
        "negative-missing-entry",
        &keep,
        &|jar| jar.remove(b"data.bin"),
        cause(Reason::Filesystem, "Inconsistent Build Configuration", "Files removed or added"),
        None,
        ExpectedVerdicts::never(),
    );

    pairs
}

/// Materialize the corpus under `out_dir` and return the batch descriptors.
/// Writes `pairs.json` (descriptor list with paths relative to `out_dir`)
/// and `expected.json` (per-profile verdicts keyed to the rule catalog).
pub fn generate_taxonomy_corpus(seed: u64, out_dir: &Path) -> std::io::Result<Vec<PairDescriptor>> {
    let pairs = build_corpus(seed);
    let mut descriptors = Vec::with_capacity(pairs.len());
    let mut expectations = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        let dir = out_dir.join(pair.id);
        std::fs::create_dir_all(&dir)?;
        let reference_path = format!("{}/reference.{}", pair.id, pair.file_extension);
        let rebuild_path = format!("{}/rebuild.{}", pair.id, pair.file_extension);
        std::fs::write(out_dir.join(&reference_path), &pair.reference)?;
        std::fs::write(out_dir.join(&rebuild_path), &pair.rebuild)?;
        descriptors.push(PairDescriptor {
            id: pair.id.to_string(),
            reference_path,
            rebuild_path,
            expected_cause: Some(pair.expected_cause.clone()),
        });
        expectations.push(CorpusExpectation {
            id: pair.id.to_string(),
            rule_id: pair.rule_id.map(str::to_string),
            expected_cause: pair.expected_cause.clone(),
            verdicts: pair.expected,
        });
    }
    let pairs_json = serde_json::to_vec_pretty(&descriptors).expect("descriptors serialize");
    std::fs::write(out_dir.join("pairs.json"), pairs_json)?;
    let expected_json = serde_json::to_vec_pretty(&expectations).expect("expectations serialize");
    std::fs::write(out_dir.join("expected.json"), expected_json)?;
    Ok(descriptors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::{diff_artifacts, NodeKind};

    #[test]
    fn corpus_is_deterministic_for_a_seed() {
        let a = build_corpus(42);
        let b = build_corpus(42);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.reference, y.reference, "{}", x.id);
            assert_eq!(x.rebuild, y.rebuild, "{}", x.id);
        }
        let c = build_corpus(43);
        assert_ne!(a[0].reference, c[0].reference, "different seeds vary payloads");
    }

    #[test]
    fn corpus_has_at_least_twenty_pairs_with_unique_ids() {
        let pairs = build_corpus(1);
        assert!(pairs.len() >= 20, "{} pairs", pairs.len());
        let mut ids: Vec<&str> = pairs.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), pairs.len());
    }

    #[test]
    fn built_by_pair_diffs_to_exactly_one_text_node() {
        let pairs = build_corpus(7);
        let pair = pairs.iter().find(|p| p.id == "manifest-built-by").unwrap();
        let report = diff_artifacts(&pair.reference, &pair.rebuild, 3);
        let root = report.root.unwrap();
        assert_eq!(root.children.len(), 1, "exactly one differing entry");
        assert_eq!(root.children[0].kind, NodeKind::TextContent);
        assert_eq!(root.children[0].path, "META-INF/MANIFEST.MF");
    }

    #[test]
    fn every_rule_id_references_the_catalog() {
        for pair in build_corpus(1) {
            if let Some(rule_id) = pair.rule_id {
                assert!(crate::rules::rule_by_id(rule_id).is_some(), "{}: unknown rule {rule_id}", pair.id);
            }
            assert!(pair.expected_cause.is_cataloged(), "{}: cause not in catalog", pair.id);
        }
    }
}
