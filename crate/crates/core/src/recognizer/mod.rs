//! Multiscale recognition: legibility bands, nested spatial clusters and the
//! analytics derived from them.
//!
//! An element's scale level counts how many zoom steps of factor `zoom_step`
//! separate its characteristic size from the largest element in the document.
//! Occupied levels are compressed to consecutive ranks. At every rank `k >= 1`
//! the elements of rank `>= k` are linked whenever their world boxes, each
//! grown by `expansion_factor` times its own characteristic size, touch; the
//! connected components are the clusters at that rank. Rank 0 is always a
//! single cluster containing the whole document.

mod cluster;
mod hierarchy;
mod levels;
mod rtree;
mod union_find;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical;
use crate::model::{Document, ElementKind};

pub use cluster::{cluster_at_rank, linked_components};
pub use hierarchy::{build_hierarchy, Cluster, ClusterId, MultiscaleHierarchy};
pub use levels::assign_scale_levels;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("zoom step must be a finite number > 1, got {0}")]
    ZoomStep(f64),
    #[error("expansion factor must be a finite number >= 0, got {0}")]
    Expansion(f64),
    #[error("max levels must be >= 1, got {0}")]
    MaxLevels(u32),
}

/// Tunables of the recognizer. Construct through [`RecognizerConfig::new`] or
/// deserialize; both validate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", try_from = "RawConfig")]
pub struct RecognizerConfig {
    zoom_step: f64,
    expansion_factor: f64,
    max_levels: u32,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawConfig {
    zoom_step: f64,
    expansion_factor: f64,
    max_levels: u32,
}

impl TryFrom<RawConfig> for RecognizerConfig {
    type Error = ConfigError;

    fn try_from(raw: RawConfig) -> Result<Self, ConfigError> {
        Self::new(raw.zoom_step, raw.expansion_factor, raw.max_levels)
    }
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        Self {
            zoom_step: 3.0,
            expansion_factor: 0.5,
            max_levels: 8,
        }
    }
}

impl RecognizerConfig {
    pub fn new(
        zoom_step: f64,
        expansion_factor: f64,
        max_levels: u32,
    ) -> Result<Self, ConfigError> {
        if !(zoom_step.is_finite() && zoom_step > 1.0) {
            return Err(ConfigError::ZoomStep(zoom_step));
        }
        if !(expansion_factor.is_finite() && expansion_factor >= 0.0) {
            return Err(ConfigError::Expansion(expansion_factor));
        }
        if max_levels < 1 {
            return Err(ConfigError::MaxLevels(max_levels));
        }
        Ok(Self {
            zoom_step,
            expansion_factor,
            max_levels,
        })
    }

    pub fn zoom_step(&self) -> f64 {
        self.zoom_step
    }

    pub fn expansion_factor(&self) -> f64 {
        self.expansion_factor
    }

    pub fn max_levels(&self) -> u32 {
        self.max_levels
    }

    pub fn with_zoom_step(self, zoom_step: f64) -> Result<Self, ConfigError> {
        Self::new(zoom_step, self.expansion_factor, self.max_levels)
    }

    pub fn with_expansion_factor(self, expansion_factor: f64) -> Result<Self, ConfigError> {
        Self::new(self.zoom_step, expansion_factor, self.max_levels)
    }

    pub fn with_max_levels(self, max_levels: u32) -> Result<Self, ConfigError> {
        Self::new(self.zoom_step, self.expansion_factor, max_levels)
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        canonical::to_canonical_bytes(self).expect("config serialization is infallible")
    }

    /// Short stable digest of the canonical config, used in cache keys.
    pub fn digest(&self) -> String {
        canonical::sha256_hex(&self.canonical_bytes())[..16].to_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Fluency {
    pub element_count: usize,
    pub word_count: usize,
    pub image_count: usize,
}

impl Fluency {
    pub fn of(doc: &Document) -> Self {
        Self {
            element_count: doc.elements.len(),
            word_count: doc
                .elements
                .iter()
                .filter(|e| e.kind == ElementKind::Text)
                .map(|e| e.word_count())
                .sum(),
            image_count: doc
                .elements
                .iter()
                .filter(|e| e.kind == ElementKind::Image)
                .count(),
        }
    }
}

/// The per-document analytics shown on the dashboard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyticsRecord {
    pub num_scales: usize,
    /// Total over all ranks, root included.
    pub num_clusters: usize,
    pub clusters_per_scale: Vec<usize>,
    pub fluency: Fluency,
    pub content_hash: String,
    pub config_echo: RecognizerConfig,
}

impl AnalyticsRecord {
    pub fn canonical_bytes(&self) -> Vec<u8> {
        canonical::to_canonical_bytes(self).expect("analytics serialization is infallible")
    }
}

/// Hierarchy and analytics computed together from one document.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub hierarchy: MultiscaleHierarchy,
    pub analytics: AnalyticsRecord,
}

pub fn analyze(doc: &Document, cfg: &RecognizerConfig) -> Analysis {
    let hierarchy = build_hierarchy(doc, cfg);
    let clusters_per_scale = hierarchy.clusters_per_scale();
    let analytics = AnalyticsRecord {
        num_scales: hierarchy.num_scales,
        num_clusters: clusters_per_scale.iter().sum(),
        clusters_per_scale,
        fluency: Fluency::of(doc),
        content_hash: doc.content_hash(),
        config_echo: *cfg,
    };
    Analysis {
        hierarchy,
        analytics,
    }
}

pub fn compute_analytics(doc: &Document, cfg: &RecognizerConfig) -> AnalyticsRecord {
    analyze(doc, cfg).analytics
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Element, Transforms};

    #[test]
    fn config_validation() {
        assert!(RecognizerConfig::new(1.0, 0.5, 8).is_err());
        assert!(RecognizerConfig::new(3.0, -0.1, 8).is_err());
        assert!(RecognizerConfig::new(3.0, 0.5, 0).is_err());
        assert!(RecognizerConfig::new(f64::NAN, 0.5, 8).is_err());
        let cfg: RecognizerConfig =
            serde_json::from_str(r#"{"zoomStep":2.5,"expansionFactor":0,"maxLevels":3}"#).unwrap();
        assert_eq!(cfg.zoom_step(), 2.5);
        assert!(serde_json::from_str::<RecognizerConfig>(
            r#"{"zoomStep":0.5,"expansionFactor":0,"maxLevels":3}"#
        )
        .is_err());
    }

    #[test]
    fn config_digest_tracks_values() {
        let a = RecognizerConfig::default();
        assert_eq!(a.digest(), RecognizerConfig::default().digest());
        assert_ne!(a.digest(), a.with_zoom_step(4.0).unwrap().digest());
        assert_eq!(
            String::from_utf8(a.canonical_bytes()).unwrap(),
            r#"{"expansionFactor":0.5,"maxLevels":8,"zoomStep":3}"#
        );
    }

    #[test]
    fn empty_document_analytics() {
        let doc = Document::new("t", "k", "d", "u");
        let a = compute_analytics(&doc, &RecognizerConfig::default());
        assert_eq!((a.num_scales, a.num_clusters), (0, 0));
        assert!(a.clusters_per_scale.is_empty());
        assert_eq!(a.fluency, Fluency::default());
        assert_eq!(a.content_hash, doc.content_hash());
    }

    #[test]
    fn word_count_over_text_elements() {
        let mut doc = Document::new("t", "k", "d", "u");
        for (i, text) in ["a b", "c", ""].into_iter().enumerate() {
            let mut e = Element::new(
                format!("t{i}"),
                ElementKind::Text,
                10.0,
                10.0,
                Transforms::at(i as f64 * 100.0, 0.0),
            );
            e.text = Some(text.into());
            doc.elements.push(e);
        }
        let mut img = Element::new(
            "img",
            ElementKind::Image,
            10.0,
            10.0,
            Transforms::at(0.0, 500.0),
        );
        img.text = Some("not counted".into());
        doc.elements.push(img);
        let f = compute_analytics(&doc, &RecognizerConfig::default()).fluency;
        assert_eq!(
            f,
            Fluency {
                element_count: 4,
                word_count: 3,
                image_count: 1
            }
        );
    }

    #[test]
    fn analytics_sum_matches_breakdown() {
        let mut doc = Document::new("t", "k", "d", "u");
        for i in 0..6 {
            let mut t = Transforms::at((i % 3) as f64 * 400.0, (i / 3) as f64 * 400.0);
            t.scale = if i == 0 { 3.0 } else { 1.0 };
            doc.elements.push(Element::new(
                format!("e{i}"),
                ElementKind::Sketch,
                100.0,
                100.0,
                t,
            ));
        }
        let a = compute_analytics(&doc, &RecognizerConfig::default());
        assert_eq!(a.num_clusters, a.clusters_per_scale.iter().sum::<usize>());
        assert_eq!(a.clusters_per_scale[0], 1);
    }
}
