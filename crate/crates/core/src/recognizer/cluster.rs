use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::rtree::PackedRTree;
use super::union_find::UnionFind;
use super::RecognizerConfig;
use crate::geometry::WorldRect;
use crate::model::Document;

/// Connected components of the closed-intersection graph over `boxes`.
/// Each component lists indices ascending; components are ordered by their
/// smallest index.
pub fn linked_components(boxes: &[WorldRect]) -> Vec<Vec<usize>> {
    let tree = PackedRTree::new(boxes);
    let mut sets = UnionFind::new(boxes.len());
    for (i, b) in boxes.iter().enumerate() {
        tree.for_each_intersecting(b, |j| {
            if j > i {
                sets.union(i, j);
            }
        });
    }
    sets.groups()
}

/// A cluster found at one rank, before ids and parents are assigned.
#[derive(Debug, Clone)]
pub(crate) struct Component {
    /// Element indices into the document, ordered by element id.
    pub members: Vec<usize>,
    pub hull: WorldRect,
}

/// Clusters at rank `k` over the elements whose rank is at least `k`, in
/// spatial order.
pub(crate) fn rank_components(
    doc: &Document,
    ranks: &[usize],
    k: usize,
    cfg: &RecognizerConfig,
) -> Vec<Component> {
    let beta = cfg.expansion_factor();
    let subset: Vec<usize> = (0..doc.elements.len()).filter(|&i| ranks[i] >= k).collect();
    let bboxes: Vec<WorldRect> = subset
        .iter()
        .map(|&i| doc.elements[i].world_bbox())
        .collect();
    let grown: Vec<WorldRect> = subset
        .iter()
        .zip(&bboxes)
        .map(|(&i, b)| b.expand(beta * doc.elements[i].characteristic_size()))
        .collect();

    let mut out: Vec<Component> = linked_components(&grown)
        .into_iter()
        .map(|group| {
            let hull =
                WorldRect::hull(group.iter().map(|&g| &bboxes[g])).expect("nonempty component");
            let mut members: Vec<usize> = group.into_iter().map(|g| subset[g]).collect();
            members.sort_by(|&a, &b| doc.elements[a].id.cmp(&doc.elements[b].id));
            Component { members, hull }
        })
        .collect();
    out.sort_by(|a, b| spatial_order(doc, a, b));
    out
}

fn spatial_order(doc: &Document, a: &Component, b: &Component) -> Ordering {
    a.hull
        .min_x
        .total_cmp(&b.hull.min_x)
        .then(a.hull.min_y.total_cmp(&b.hull.min_y))
        .then_with(|| {
            doc.elements[a.members[0]]
                .id
                .cmp(&doc.elements[b.members[0]].id)
        })
}

/// Element-id sets of the clusters at rank `k >= 1`, each sorted by id,
/// ordered by the `(minX, minY)` corner of their hulls.
pub fn cluster_at_rank(
    doc: &Document,
    levels: &BTreeMap<String, usize>,
    k: usize,
    cfg: &RecognizerConfig,
) -> Vec<Vec<String>> {
    let ranks: Vec<usize> = doc
        .elements
        .iter()
        .map(|e| levels.get(&e.id).copied().unwrap_or(0))
        .collect();
    rank_components(doc, &ranks, k, cfg)
        .into_iter()
        .map(|c| {
            c.members
                .into_iter()
                .map(|i| doc.elements[i].id.clone())
                .collect()
        })
        .collect()
}
