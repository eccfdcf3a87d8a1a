//! Visual annotation of a design instance: one padded rectangle per cluster,
//! colored by scale rank, plus a timeline that reveals the clusters one by
//! one, outermost scale first.

mod palette;
mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical;
use crate::geometry::WorldRect;
use crate::model::Document;
use crate::recognizer::{ClusterId, MultiscaleHierarchy};

pub use palette::{Fill, Palette, MAX_PALETTE_LEN};
pub use svg::{render_svg, RenderOptions};

/// Region padding as a fraction of the document diagonal.
pub const PADDING_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnnotateError {
    #[error("{ranks} scale ranks exceed the palette capacity of {capacity}")]
    RankOverflow { ranks: usize, capacity: usize },
    #[error("unknown cluster id {0}")]
    UnknownCluster(ClusterId),
    #[error("invalid palette: {0}")]
    InvalidPalette(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RegionRecord {
    pub cluster_id: ClusterId,
    pub scale_rank: usize,
    pub padded_region: WorldRect,
    pub color: String,
    pub opacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TimelineStep {
    pub step_index: usize,
    pub scale_rank: usize,
    pub cluster_id: ClusterId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnnotationOverlay {
    /// In timeline order.
    pub regions: Vec<RegionRecord>,
    pub timeline: Vec<TimelineStep>,
    pub view_box: WorldRect,
    pub padding: f64,
    /// Fill used for each scale rank, indexed by rank.
    pub palette: Vec<Fill>,
}

impl AnnotationOverlay {
    pub fn region(&self, id: ClusterId) -> Option<&RegionRecord> {
        self.regions.iter().find(|r| r.cluster_id == id)
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        canonical::to_canonical_bytes(self).expect("overlay serialization is infallible")
    }
}

/// Lays out the colored cluster regions and the reveal timeline for `h`,
/// which must have been recognized from `doc`.
pub fn build_overlay(
    doc: &Document,
    h: &MultiscaleHierarchy,
    palette: &Palette,
) -> Result<AnnotationOverlay, AnnotateError> {
    let palette = palette.extended_to(h.num_scales)?;
    let Some(bounds) = doc.world_bounds() else {
        return Ok(AnnotationOverlay {
            regions: Vec::new(),
            timeline: Vec::new(),
            view_box: WorldRect::new(0.0, 0.0, 0.0, 0.0),
            padding: 0.0,
            palette: palette.fills()[..h.num_scales].to_vec(),
        });
    };
    let padding = PADDING_FRACTION * bounds.diagonal();

    let mut order: Vec<_> = h.clusters.iter().collect();
    order.sort_by_key(|c| (c.scale_rank, c.id));

    let regions = order
        .iter()
        .map(|c| {
            let fill = palette.fill(c.scale_rank);
            RegionRecord {
                cluster_id: c.id,
                scale_rank: c.scale_rank,
                padded_region: c.region.expand(padding),
                color: fill.color.clone(),
                opacity: fill.opacity,
            }
        })
        .collect();
    let timeline = order
        .iter()
        .enumerate()
        .map(|(step_index, c)| TimelineStep {
            step_index,
            scale_rank: c.scale_rank,
            cluster_id: c.id,
        })
        .collect();

    Ok(AnnotationOverlay {
        regions,
        timeline,
        view_box: bounds.expand(2.0 * padding),
        padding,
        palette: palette.fills()[..h.num_scales].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Element, ElementKind, Transforms};
    use crate::recognizer::{build_hierarchy, RecognizerConfig};

    fn nested_doc() -> Document {
        let mut d = Document::new("t", "k", "d", "u");
        let sq = |id: &str, x: f64, y: f64, s: f64| {
            Element::new(id, ElementKind::Image, s, s, Transforms::at(x, y))
        };
        d.elements.push(sq("backdrop", 0.0, 0.0, 3000.0));
        d.elements.push(sq("cardA", 100.0, 100.0, 900.0));
        d.elements.push(sq("cardB", 2000.0, 100.0, 900.0));
        d.elements.push(sq("note", 200.0, 200.0, 100.0));
        d
    }

    #[test]
    fn empty_document_overlay() {
        let d = Document::new("t", "k", "d", "u");
        let h = build_hierarchy(&d, &RecognizerConfig::default());
        let o = build_overlay(&d, &h, &Palette::default()).unwrap();
        assert!(o.regions.is_empty());
        assert!(o.timeline.is_empty());
    }

    #[test]
    fn colors_follow_rank_and_timeline_is_rank_major() {
        let d = nested_doc();
        let h = build_hierarchy(&d, &RecognizerConfig::default());
        let o = build_overlay(&d, &h, &Palette::default()).unwrap();
        let ranks: Vec<usize> = o.timeline.iter().map(|s| s.scale_rank).collect();
        assert_eq!(ranks, [0, 1, 1, 2]);
        assert_eq!(
            o.timeline.iter().map(|s| s.step_index).collect::<Vec<_>>(),
            [0, 1, 2, 3]
        );
        let pal = Palette::default();
        for r in &o.regions {
            assert_eq!(r.color, pal.fill(r.scale_rank).color);
        }
        assert_eq!(o.regions[0].color, "#F4D03F");
        assert_eq!(o.regions[1].color, "#5DADE2");
        assert_eq!(o.regions[3].color, "#A0672F");
    }

    #[test]
    fn padded_regions_contain_member_boxes() {
        let d = nested_doc();
        let h = build_hierarchy(&d, &RecognizerConfig::default());
        let o = build_overlay(&d, &h, &Palette::default()).unwrap();
        for c in &h.clusters {
            let region = o.region(c.id).unwrap();
            for m in &c.member_element_ids {
                assert!(region
                    .padded_region
                    .contains_rect(&d.element(m).unwrap().world_bbox()));
            }
        }
        assert!((o.padding - 0.02 * 3000.0 * 2f64.sqrt()).abs() < 1e-9);
    }
}
