//! Maven-style artifact coordinates and repository path derivation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GavError {
    #[error("invalid coordinates: {0}")]
    InvalidGav(String),
}

/// group:artifact:version coordinates, optional classifier, packaging
/// extension (default `jar`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gav {
    pub group_id: String,
    pub artifact_id: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifier: Option<String>,
    #[serde(default = "default_packaging")]
    pub packaging: String,
}

fn default_packaging() -> String {
    "jar".to_string()
}

impl Gav {
    pub fn new(group_id: &str, artifact_id: &str, version: &str) -> Self {
        Gav {
            group_id: group_id.to_string(),
            artifact_id: artifact_id.to_string(),
            version: version.to_string(),
            classifier: None,
            packaging: default_packaging(),
        }
    }

    pub fn with_classifier(mut self, classifier: &str) -> Self {
        self.classifier = Some(classifier.to_string());
        self
    }

    pub fn with_packaging(mut self, packaging: &str) -> Self {
        self.packaging = packaging.to_string();
        self
    }

    /// Parse `group:artifact:version[:classifier]` coordinates.
    pub fn parse(coords: &str) -> Result<Self, GavError> {
        let parts: Vec<&str> = coords.split(':').collect();
        match parts.as_slice() {
            [g, a, v] => Ok(Gav::new(g, a, v)),
            [g, a, v, c] => Ok(Gav::new(g, a, v).with_classifier(c)),
            _ => Err(GavError::InvalidGav(format!("expected group:artifact:version[:classifier], got {coords:?}"))),
        }
    }

    fn validate(&self) -> Result<(), GavError> {
        let check = |label: &str, value: &str, allow_dots: bool| -> Result<(), GavError> {
            if value.is_empty() {
                return Err(GavError::InvalidGav(format!("empty {label}")));
            }
            let bad = value.contains('/')
                || value.contains('\\')
                || value.contains("..")
                || (!allow_dots && value.starts_with('.'));
            if bad {
                return Err(GavError::InvalidGav(format!("{label} {value:?} contains path traversal characters")));
            }
            Ok(())
        };
        check("group id", &self.group_id, true)?;
        check("artifact id", &self.artifact_id, false)?;
        check("version", &self.version, true)?;
        if let Some(c) = &self.classifier {
            check("classifier", c, false)?;
        }
        check("packaging", &self.packaging, false)?;
        Ok(())
    }

    /// Repository-relative file name:
    /// `artifactId-version[-classifier].packaging`.
    pub fn file_name(&self) -> String {
        match &self.classifier {
            Some(c) => format!("{}-{}-{}.{}", self.artifact_id, self.version, c, self.packaging),
            None => format!("{}-{}.{}", self.artifact_id, self.version, self.packaging),
        }
    }

    /// Repository-relative path: group dots become slashes.
    pub fn repo_path(&self) -> Result<String, GavError> {
        self.validate()?;
        Ok(format!(
            "{}/{}/{}/{}",
            self.group_id.replace('.', "/"),
            self.artifact_id,
            self.version,
            self.file_name()
        ))
    }
}

impl std::fmt::Display for Gav {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.group_id, self.artifact_id, self.version)?;
        if let Some(c) = &self.classifier {
            write!(f, ":{c}")?;
        }
        Ok(())
    }
}

/// Resolve the artifact URL under a repository base. Pure function of its
/// inputs.
pub fn resolve_artifact_url(gav: &Gav, repo_base: &str) -> Result<String, GavError> {
    let base = repo_base.trim_end_matches('/');
    Ok(format!("{}/{}", base, gav.repo_path()?))
}
