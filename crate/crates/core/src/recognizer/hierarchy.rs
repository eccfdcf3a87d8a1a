use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cluster::rank_components;
use super::levels;
use super::RecognizerConfig;
use crate::canonical;
use crate::geometry::WorldRect;
use crate::model::Document;

pub type ClusterId = u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Cluster {
    pub id: ClusterId,
    pub scale_rank: usize,
    /// Sorted by element id.
    pub member_element_ids: Vec<String>,
    /// Hull of the members' world bboxes.
    pub region: WorldRect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_cluster_id: Option<ClusterId>,
}

/// Clusters of every rank linked into a tree rooted at the rank-0 cluster.
/// Cluster ids follow (rank, spatial order), so `clusters[i].id == i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiscaleHierarchy {
    pub num_scales: usize,
    pub clusters: Vec<Cluster>,
    pub element_levels: BTreeMap<String, usize>,
}

impl MultiscaleHierarchy {
    pub fn empty() -> Self {
        Self {
            num_scales: 0,
            clusters: Vec::new(),
            element_levels: BTreeMap::new(),
        }
    }

    pub fn cluster(&self, id: ClusterId) -> Option<&Cluster> {
        self.clusters.get(id as usize).filter(|c| c.id == id)
    }

    pub fn clusters_at(&self, rank: usize) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter().filter(move |c| c.scale_rank == rank)
    }

    pub fn children(&self, id: ClusterId) -> impl Iterator<Item = &Cluster> {
        self.clusters
            .iter()
            .filter(move |c| c.parent_cluster_id == Some(id))
    }

    pub fn root(&self) -> Option<&Cluster> {
        self.clusters.first()
    }

    pub fn clusters_per_scale(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_scales];
        for c in &self.clusters {
            counts[c.scale_rank] += 1;
        }
        counts
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        canonical::to_canonical_bytes(self).expect("hierarchy serialization is infallible")
    }
}

/// Recognizes scale ranks and clusters and links each cluster to the unique
/// cluster one rank up that contains it.
pub fn build_hierarchy(doc: &Document, cfg: &RecognizerConfig) -> MultiscaleHierarchy {
    if doc.elements.is_empty() {
        return MultiscaleHierarchy::empty();
    }
    let ranks = levels::ranks(doc, cfg);
    let num_scales = ranks.iter().max().map_or(0, |m| m + 1);
    let n = doc.elements.len();

    let mut all: Vec<usize> = (0..n).collect();
    all.sort_by(|&a, &b| doc.elements[a].id.cmp(&doc.elements[b].id));
    let root = Cluster {
        id: 0,
        scale_rank: 0,
        member_element_ids: all.iter().map(|&i| doc.elements[i].id.clone()).collect(),
        region: doc.world_bounds().expect("nonempty document"),
        parent_cluster_id: None,
    };
    let mut clusters = vec![root];
    // Cluster holding each element at the previous rank.
    let mut owner: Vec<Option<ClusterId>> = vec![Some(0); n];

    for k in 1..num_scales {
        let mut next_owner: Vec<Option<ClusterId>> = vec![None; n];
        for comp in rank_components(doc, &ranks, k, cfg) {
            let id = clusters.len() as ClusterId;
            let parent = owner[comp.members[0]];
            debug_assert!(
                comp.members.iter().all(|&m| owner[m] == parent),
                "rank {k} component straddles parents"
            );
            for &m in &comp.members {
                next_owner[m] = Some(id);
            }
            clusters.push(Cluster {
                id,
                scale_rank: k,
                member_element_ids: comp
                    .members
                    .iter()
                    .map(|&i| doc.elements[i].id.clone())
                    .collect(),
                region: comp.hull,
                parent_cluster_id: parent,
            });
        }
        owner = next_owner;
    }

    MultiscaleHierarchy {
        num_scales,
        clusters,
        element_levels: doc
            .elements
            .iter()
            .zip(&ranks)
            .map(|(e, &r)| (e.id.clone(), r))
            .collect(),
    }
}
