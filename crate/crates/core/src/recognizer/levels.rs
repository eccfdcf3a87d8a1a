use std::collections::BTreeMap;

use super::RecognizerConfig;
use crate::model::Document;

/// Slack added before flooring so exact powers of the zoom step land in
/// their own band rather than the one above.
const LOG_SLACK: f64 = 1e-9;

/// Raw (uncompressed) zoom level of every element, in document order.
pub(crate) fn raw_levels(doc: &Document, cfg: &RecognizerConfig) -> Vec<u32> {
    let sizes: Vec<f64> = doc
        .elements
        .iter()
        .map(|e| e.characteristic_size())
        .collect();
    let Some(largest) = sizes.iter().copied().reduce(f64::max) else {
        return Vec::new();
    };
    let top = cfg.max_levels() - 1;
    let ln_step = cfg.zoom_step().ln();
    sizes
        .iter()
        .map(|&c| {
            let steps = ((largest / c).ln() / ln_step + LOG_SLACK).floor();
            if steps <= 0.0 {
                0
            } else if steps >= top as f64 {
                top
            } else {
                steps as u32
            }
        })
        .collect()
}

/// Compressed scale rank of every element, in document order.
pub(crate) fn ranks(doc: &Document, cfg: &RecognizerConfig) -> Vec<usize> {
    let raw = raw_levels(doc, cfg);
    let mut occupied: Vec<u32> = raw.clone();
    occupied.sort_unstable();
    occupied.dedup();
    raw.iter()
        .map(|l| occupied.binary_search(l).expect("level is occupied"))
        .collect()
}

/// Maps every element id to its scale rank. Ranks are consecutive from 0.
pub fn assign_scale_levels(doc: &Document, cfg: &RecognizerConfig) -> BTreeMap<String, usize> {
    doc.elements
        .iter()
        .zip(ranks(doc, cfg))
        .map(|(e, r)| (e.id.clone(), r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Element, ElementKind, Transforms};

    fn doc_with_sizes(sizes: &[f64]) -> Document {
        let mut doc = Document::new("t", "k", "d", "u");
        for (i, &s) in sizes.iter().enumerate() {
            doc.elements.push(Element::new(
                format!("e{i}"),
                ElementKind::Other,
                s,
                s,
                Transforms::at(i as f64 * 1000.0, 0.0),
            ));
        }
        doc
    }

    fn ranks_of(sizes: &[f64]) -> Vec<usize> {
        ranks(&doc_with_sizes(sizes), &RecognizerConfig::default())
    }

    #[test]
    fn exact_powers_get_their_own_band() {
        assert_eq!(ranks_of(&[90.0, 30.0, 10.0]), [0, 1, 2]);
    }

    #[test]
    fn near_sizes_share_a_band() {
        assert_eq!(ranks_of(&[90.0, 89.0]), [0, 0]);
    }

    #[test]
    fn empty_levels_are_compressed() {
        // 81/9 = 9 = 3^2: raw levels 0 and 2.
        let doc = doc_with_sizes(&[81.0, 9.0]);
        let cfg = RecognizerConfig::default();
        assert_eq!(raw_levels(&doc, &cfg), [0, 2]);
        assert_eq!(ranks(&doc, &cfg), [0, 1]);
    }

    #[test]
    fn deep_levels_clamp_to_innermost_band() {
        let cfg = RecognizerConfig::default().with_max_levels(3).unwrap();
        let doc = doc_with_sizes(&[729.0, 81.0, 9.0, 1.0]);
        assert_eq!(raw_levels(&doc, &cfg), [0, 2, 2, 2]);
        assert_eq!(ranks(&doc, &cfg), [0, 1, 1, 1]);
    }

    #[test]
    fn empty_document_has_no_levels() {
        assert!(assign_scale_levels(&doc_with_sizes(&[]), &RecognizerConfig::default()).is_empty());
    }
}
