//! Seeded generator of multiscale documents with known hierarchies.
//!
//! A cluster at rank `k` is drawn as a grid of "cards" (its own rank-`k`
//! elements). Its child clusters sit inside those cards, so each child is
//! linked to its parent at rank `k` and separated from its siblings once the
//! cards drop out at rank `k + 1`. Layouts respect three margins, which are
//! re-checked after generation:
//!
//! 1. card sizes of adjacent ranks differ by at least `zoom_step * margin_safety`,
//!    and every rank stays inside a single legibility band;
//! 2. elements of different clusters at the same rank are separated by more
//!    than `margin_safety` times their combined expansion;
//! 3. every child cluster lies strictly inside one card of its parent.
//!
//! Under these margins the recognizer with its default configuration recovers
//! the ground truth exactly.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::WorldRect;
use crate::model::{Clipping, Document, Element, ElementKind, Transforms};
use crate::recognizer::{Cluster, ClusterId, MultiscaleHierarchy, RecognizerConfig};

/// Characteristic size of the largest cards at the innermost rank.
const LEAF_SIZE: f64 = 60.0;
/// Band half-width cap, in zoom steps.
const MAX_SPREAD_STEPS: f64 = 0.4;
/// Keeps random sizes off the exact edges of their band.
const EDGE_GUARD: f64 = 1e-3;
const COORD_QUANTUM: f64 = 1e-3;

const WORDS: &[&str] = &[
    "sketch",
    "persona",
    "journey",
    "map",
    "prototype",
    "insight",
    "user",
    "flow",
    "idea",
    "research",
    "scenario",
    "storyboard",
    "feedback",
    "iteration",
    "concept",
    "layout",
    "wireframe",
    "need",
    "goal",
    "theme",
    "evidence",
    "quote",
    "pattern",
    "synthesis",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("generated layout violates a margin: {0}")]
    MarginViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRange {
    pub min: usize,
    pub max: usize,
}

/// What to generate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GenSpec {
    pub num_scales: usize,
    /// Index 0 must be 1 (the root).
    pub clusters_per_scale: Vec<usize>,
    /// Number of a cluster's own cards (elements at its rank).
    pub elements_per_cluster: CountRange,
    pub zoom_step: f64,
    pub seed: u64,
    #[serde(default = "default_margin_safety")]
    pub margin_safety: f64,
    /// Optional fixed fan-out: entry `k` lists, for each rank-`k` cluster in
    /// generation order, how many rank-`k + 1` clusters it holds. Random when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children_per_cluster: Option<Vec<Vec<usize>>>,
}

fn default_margin_safety() -> f64 {
    2.0
}

impl GenSpec {
    /// One root group; three mid-size groups; three small groups inside one
    /// of the mid groups.
    pub fn figure3() -> Self {
        Self {
            num_scales: 3,
            clusters_per_scale: vec![1, 3, 3],
            elements_per_cluster: CountRange { min: 2, max: 3 },
            zoom_step: 3.0,
            seed: 3,
            margin_safety: 2.0,
            children_per_cluster: Some(vec![vec![3], vec![3, 0, 0]]),
        }
    }

    /// One root group; seven groups at the next scale; two groups one scale
    /// further in.
    pub fn figure4() -> Self {
        Self {
            num_scales: 3,
            clusters_per_scale: vec![1, 7, 2],
            elements_per_cluster: CountRange { min: 2, max: 4 },
            zoom_step: 3.0,
            seed: 4,
            margin_safety: 2.0,
            children_per_cluster: Some(vec![vec![7], vec![0, 1, 0, 0, 0, 1, 0]]),
        }
    }

    /// A random spec with at most 4 scales and 50 clusters, derived from `seed`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5bec_0000_0000);
        let num_scales = rng.gen_range(1..=4);
        let mut clusters_per_scale = vec![1];
        let mut total = 1;
        for k in 1..num_scales {
            let prev = clusters_per_scale[k - 1];
            let cap = (3 * prev).min(50 - total).max(1);
            let c = rng.gen_range(1..=cap);
            total += c;
            clusters_per_scale.push(c);
        }
        let min = rng.gen_range(1..=2);
        let max = min + rng.gen_range(1..=3);
        Self {
            num_scales,
            clusters_per_scale,
            elements_per_cluster: CountRange { min, max },
            zoom_step: 3.0,
            seed,
            margin_safety: 2.0,
            children_per_cluster: None,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidSpec(m));
        if self.num_scales < 1 {
            return bad("numScales must be >= 1".into());
        }
        if self.clusters_per_scale.len() != self.num_scales {
            return bad(format!(
                "clustersPerScale has {} entries for {} scales",
                self.clusters_per_scale.len(),
                self.num_scales
            ));
        }
        if self.clusters_per_scale[0] != 1 {
            return bad("clustersPerScale[0] must be 1".into());
        }
        if let Some(k) = self.clusters_per_scale.iter().position(|&c| c == 0) {
            return bad(format!("clustersPerScale[{k}] must be >= 1"));
        }
        let r = self.elements_per_cluster;
        if r.min < 1 || r.min > r.max {
            return bad(format!(
                "elementsPerCluster [{}, {}] is not a nonempty range",
                r.min, r.max
            ));
        }
        if !(self.zoom_step.is_finite() && self.zoom_step > 1.0) {
            return bad(format!("zoomStep must be > 1, got {}", self.zoom_step));
        }
        if !(self.margin_safety.is_finite() && self.margin_safety > 1.0) {
            return bad(format!(
                "marginSafety must be > 1, got {}",
                self.margin_safety
            ));
        }
        if let Some(fanout) = &self.children_per_cluster {
            if fanout.len() != self.num_scales - 1 {
                return bad(format!(
                    "childrenPerCluster needs {} entries",
                    self.num_scales - 1
                ));
            }
            for (k, row) in fanout.iter().enumerate() {
                if row.len() != self.clusters_per_scale[k] {
                    return bad(format!(
                        "childrenPerCluster[{k}] needs {} entries",
                        self.clusters_per_scale[k]
                    ));
                }
                if row.iter().sum::<usize>() != self.clusters_per_scale[k + 1] {
                    return bad(format!(
                        "childrenPerCluster[{k}] must sum to {}",
                        self.clusters_per_scale[k + 1]
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The hierarchy a correct recognizer must recover from the generated document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroundTruth {
    pub hierarchy: MultiscaleHierarchy,
}

/// Size ladder and spacing derived from a spec.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    zoom: f64,
    margin: f64,
    expansion: f64,
    /// Zoom levels between adjacent ranks.
    levels_per_rank: u32,
    /// Ratio between the largest and smallest card of one rank.
    spread: f64,
    num_scales: usize,
}

impl Geometry {
    fn new(spec: &GenSpec) -> Result<Self, GenError> {
        let zoom = spec.zoom_step;
        let margin = spec.margin_safety;
        let levels_per_rank = ((zoom * margin).ln() / zoom.ln() - 1e-12).ceil() as u32;
        let spread =
            (zoom.powi(levels_per_rank as i32) / (zoom * margin)).min(zoom.powf(MAX_SPREAD_STEPS));
        let cfg = RecognizerConfig::default();
        let deepest = (spec.num_scales as u32 - 1) * levels_per_rank;
        if deepest > cfg.max_levels() - 1 {
            return Err(GenError::InfeasibleSpec(format!(
                "{} scales need zoom level {deepest}, beyond the recognizer's {} levels",
                spec.num_scales,
                cfg.max_levels()
            )));
        }
        Ok(Self {
            zoom,
            margin,
            expansion: cfg.expansion_factor(),
            levels_per_rank,
            spread,
            num_scales: spec.num_scales,
        })
    }

    /// Largest card size at `rank`.
    fn size(&self, rank: usize) -> f64 {
        let steps = ((self.num_scales - 1 - rank) as u32 * self.levels_per_rank) as i32;
        LEAF_SIZE * self.zoom.powi(steps)
    }

    fn size_range(&self, rank: usize) -> (f64, f64) {
        let top = self.size(rank);
        (
            top / self.spread * (1.0 + EDGE_GUARD),
            top * (1.0 - EDGE_GUARD),
        )
    }

    /// Spacing between distinct clusters whose cards are at most `size(rank)`.
    fn cluster_gap(&self, rank: usize) -> f64 {
        let s = self.size(rank);
        (self.margin * 2.0 * self.expansion * s * 1.05).max(0.05 * s)
    }

    /// Spacing between cards of one cluster; negative means overlap.
    fn link_gap(&self, rank: usize) -> f64 {
        let min_card = self.size(rank) / self.spread;
        if self.expansion > 0.0 {
            0.5 * self.expansion * min_card
        } else {
            -0.02 * min_card
        }
    }
}

struct Node {
    rank: usize,
    parent: Option<usize>,
    children: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Placed {
    node: usize,
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

struct Block {
    w: f64,
    h: f64,
    items: Vec<Placed>,
}

/// Generates a document and its ground-truth hierarchy. Deterministic in
/// `spec.seed`.
pub fn generate(spec: &GenSpec) -> Result<(Document, GroundTruth), GenError> {
    spec.validate()?;
    let geo = Geometry::new(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let nodes = build_tree(spec, &mut rng);

    let root = layout(0, &nodes, spec, &geo, &mut rng)?;
    let ox = quantize(rng.gen_range(-5000.0..5000.0));
    let oy = quantize(rng.gen_range(-5000.0..5000.0));

    let mut doc = Document::new(
        format!("Synthetic multiscale design {}", spec.seed),
        format!("synth-{}", spec.seed),
        format!("synth-{:016x}", spec.seed),
        "synthgen",
    );
    doc.description = Some(format!(
        "{} scales, clusters per scale {:?}",
        spec.num_scales, spec.clusters_per_scale
    ));
    let mut owner = Vec::with_capacity(root.items.len());
    for (i, p) in root.items.iter().enumerate() {
        doc.elements.push(make_element(i, p, ox, oy, &mut rng));
        owner.push(p.node);
    }
    let truth = ground_truth(&doc, &nodes, &owner);
    check_margins(&doc, &truth.hierarchy, &geo)?;
    Ok((doc, truth))
}

fn build_tree(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Vec<Node> {
    let mut nodes = vec![Node {
        rank: 0,
        parent: None,
        children: Vec::new(),
    }];
    let mut previous = vec![0usize];
    for k in 1..spec.num_scales {
        let count = spec.clusters_per_scale[k];
        let fanout: Vec<usize> = match &spec.children_per_cluster {
            Some(f) => f[k - 1].clone(),
            None => {
                let cap = 2 * spec.elements_per_cluster.max;
                let mut load = vec![0usize; previous.len()];
                for _ in 0..count {
                    let open: Vec<usize> = (0..load.len()).filter(|&p| load[p] < cap).collect();
                    let pick = if open.is_empty() {
                        (0..load.len())
                            .min_by_key(|&p| load[p])
                            .expect("parents exist")
                    } else {
                        open[rng.gen_range(0..open.len())]
                    };
                    load[pick] += 1;
                }
                load
            }
        };
        let mut current = Vec::with_capacity(count);
        for (&parent, &n) in previous.iter().zip(&fanout) {
            for _ in 0..n {
                let id = nodes.len();
                nodes.push(Node {
                    rank: k,
                    parent: Some(parent),
                    children: Vec::new(),
                });
                nodes[parent].children.push(id);
                current.push(id);
            }
        }
        previous = current;
    }
    nodes
}

fn layout(
    node: usize,
    nodes: &[Node],
    spec: &GenSpec,
    geo: &Geometry,
    rng: &mut ChaCha8Rng,
) -> Result<Block, GenError> {
    let rank = nodes[node].rank;
    let mut children = Vec::with_capacity(nodes[node].children.len());
    for &c in &nodes[node].children {
        children.push(layout(c, nodes, spec, geo, rng)?);
    }
    children.shuffle(rng);

    let range = spec.elements_per_cluster;
    let top = geo.size(rank);
    let child_gap = if rank + 1 < geo.num_scales {
        geo.cluster_gap(rank + 1)
    } else {
        0.0
    };
    let first = rng.gen_range(range.min..=range.max);

    let mut packing = None;
    for cards in first..=range.max {
        let groups: Vec<Vec<usize>> = (0..cards)
            .map(|c| (c..children.len()).step_by(cards).collect())
            .collect();
        let packed: Vec<Packed> = groups
            .iter()
            .map(|g| {
                pack_grid(
                    &g.iter()
                        .map(|&i| (children[i].w, children[i].h))
                        .collect::<Vec<_>>(),
                    child_gap,
                )
            })
            .collect();
        if packed
            .iter()
            .all(|p| (p.w * p.h).sqrt() <= top * (1.0 - EDGE_GUARD))
        {
            packing = Some((groups, packed));
            break;
        }
    }
    let Some((groups, packed)) = packing else {
        return Err(GenError::InfeasibleSpec(format!(
            "a rank-{rank} cluster cannot hold {} child clusters in {} cards",
            children.len(),
            range.max
        )));
    };

    // Card sizes, then contents in card-local coordinates.
    let (lo, hi) = geo.size_range(rank);
    let mut cards = Vec::with_capacity(groups.len());
    for (card_index, (group, pack)) in groups.iter().zip(&packed).enumerate() {
        // The document's largest element anchors every band, so its size is
        // pinned to the top of the ladder.
        let pinned = node == 0 && card_index == 0;
        let (w, h) = if group.is_empty() {
            let c = if pinned { top } else { rng.gen_range(lo..=hi) };
            let aspect: f64 = rng.gen_range(0.8..=1.25);
            (c * aspect.sqrt(), c / aspect.sqrt())
        } else {
            let g = (pack.w * pack.h).sqrt();
            let t = if pinned {
                top / g
            } else {
                rng.gen_range((lo / g).max(1.0)..=(hi / g).max(1.0))
            };
            (pack.w * t, pack.h * t)
        };
        let (w, h) = (quantize(w), quantize(h));
        let mut items = vec![Placed {
            node,
            x: 0.0,
            y: 0.0,
            w,
            h,
        }];
        let (dx, dy) = ((w - pack.w) / 2.0, (h - pack.h) / 2.0);
        for (&ci, &(px, py)) in group.iter().zip(&pack.offsets) {
            let (cx, cy) = (quantize(dx + px), quantize(dy + py));
            items.extend(children[ci].items.iter().map(|p| Placed {
                x: p.x + cx,
                y: p.y + cy,
                ..*p
            }));
        }
        cards.push(Block { w, h, items });
    }

    // Cards in rows, tallest first so the first column links the rows.
    let cols = (cards.len() as f64).sqrt().ceil() as usize;
    let gap = geo.link_gap(rank);
    let mut items = Vec::new();
    let (mut width, mut y) = (0.0f64, 0.0f64);
    let mut rows: Vec<Vec<Block>> = Vec::new();
    for (i, card) in cards.into_iter().enumerate() {
        if i % cols == 0 {
            rows.push(Vec::new());
        }
        rows.last_mut().expect("row pushed").push(card);
    }
    let mut height = 0.0f64;
    for mut row in rows {
        row.sort_by(|a, b| b.h.total_cmp(&a.h));
        let mut x = 0.0;
        let row_h = row[0].h;
        for card in row {
            let (cx, cy) = (quantize(x), quantize(y));
            items.extend(card.items.iter().map(|p| Placed {
                x: p.x + cx,
                y: p.y + cy,
                ..*p
            }));
            x = cx + card.w + gap;
            width = width.max(cx + card.w);
        }
        height = height.max(y + row_h);
        y += row_h + gap;
    }
    Ok(Block {
        w: width,
        h: height,
        items,
    })
}

struct Packed {
    w: f64,
    h: f64,
    offsets: Vec<(f64, f64)>,
}

/// Packs blocks in a near-square grid with `gap` between them and `gap / 2`
/// around the outside.
fn pack_grid(sizes: &[(f64, f64)], gap: f64) -> Packed {
    if sizes.is_empty() {
        return Packed {
            w: 0.0,
            h: 0.0,
            offsets: Vec::new(),
        };
    }
    let cols = (sizes.len() as f64).sqrt().ceil() as usize;
    let mut offsets = Vec::with_capacity(sizes.len());
    let (mut y, mut width) = (gap / 2.0, 0.0f64);
    for row in sizes.chunks(cols) {
        let mut x = gap / 2.0;
        let row_h = row.iter().map(|s| s.1).fold(0.0, f64::max);
        for &(w, _) in row {
            offsets.push((x, y));
            x += w + gap;
        }
        width = width.max(x - gap / 2.0);
        y += row_h + gap;
    }
    Packed {
        w: width,
        h: y - gap / 2.0,
        offsets,
    }
}

fn quantize(v: f64) -> f64 {
    (v / COORD_QUANTUM).round() * COORD_QUANTUM
}

fn make_element(index: usize, p: &Placed, ox: f64, oy: f64, rng: &mut ChaCha8Rng) -> Element {
    let scale = quantize(2f64.powf(rng.gen_range(-1.0..=1.0)));
    let mut t = Transforms::at(quantize(p.x + ox), quantize(p.y + oy));
    t.scale = scale;
    let kind = match rng.gen_range(0..20) {
        0..=6 => ElementKind::Text,
        7..=13 => ElementKind::Image,
        14..=15 => ElementKind::Sketch,
        16 => ElementKind::Video,
        17 => ElementKind::Embed,
        _ => ElementKind::Other,
    };
    let id = format!("e{index:04}");
    let mut e = Element::new(id.clone(), kind, p.w / scale, p.h / scale, t);
    match kind {
        ElementKind::Text => {
            let n = rng.gen_range(1..=12);
            let words: Vec<&str> = (0..n)
                .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
                .collect();
            e.text = Some(words.join(" "));
        }
        ElementKind::Image => {
            e.clipping = Some(Clipping {
                source_url: Some(format!("https://example.org/media/{id}.jpg")),
                source_title: Some(format!("Reference image {index}")),
                ..Clipping::default()
            });
        }
        _ => {}
    }
    e
}

fn ground_truth(doc: &Document, nodes: &[Node], owner: &[usize]) -> GroundTruth {
    // Elements in each node's subtree.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, &n) in owner.iter().enumerate() {
        let mut cur = Some(n);
        while let Some(c) = cur {
            members[c].push(i);
            cur = nodes[c].parent;
        }
    }
    let boxes: Vec<WorldRect> = doc.elements.iter().map(Element::world_bbox).collect();
    let num_scales = nodes.iter().map(|n| n.rank).max().map_or(0, |m| m + 1);

    let mut id_of = vec![0 as ClusterId; nodes.len()];
    let mut clusters: Vec<Cluster> = Vec::with_capacity(nodes.len());
    for rank in 0..num_scales {
        let mut at_rank: Vec<(usize, Vec<String>, WorldRect)> = (0..nodes.len())
            .filter(|&n| nodes[n].rank == rank)
            .map(|n| {
                let mut ids: Vec<String> = members[n]
                    .iter()
                    .map(|&i| doc.elements[i].id.clone())
                    .collect();
                ids.sort();
                let hull = WorldRect::hull(members[n].iter().map(|&i| &boxes[i]))
                    .expect("clusters have elements");
                (n, ids, hull)
            })
            .collect();
        at_rank.sort_by(|a, b| {
            a.2.min_x
                .total_cmp(&b.2.min_x)
                .then(a.2.min_y.total_cmp(&b.2.min_y))
                .then_with(|| a.1[0].cmp(&b.1[0]))
        });
        for (n, ids, hull) in at_rank {
            let id = clusters.len() as ClusterId;
            id_of[n] = id;
            clusters.push(Cluster {
                id,
                scale_rank: rank,
                member_element_ids: ids,
                region: hull,
                parent_cluster_id: nodes[n].parent.map(|p| id_of[p]),
            });
        }
    }
    let element_levels: BTreeMap<String, usize> = doc
        .elements
        .iter()
        .zip(owner)
        .map(|(e, &n)| (e.id.clone(), nodes[n].rank))
        .collect();
    GroundTruth {
        hierarchy: MultiscaleHierarchy {
            num_scales,
            clusters,
            element_levels,
        },
    }
}

/// Re-checks the layout margins directly on the emitted document.
fn check_margins(
    doc: &Document,
    truth: &MultiscaleHierarchy,
    geo: &Geometry,
) -> Result<(), GenError> {
    let index: BTreeMap<&str, usize> = doc
        .elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), i))
        .collect();
    let rank: Vec<usize> = doc
        .elements
        .iter()
        .map(|e| truth.element_levels[&e.id])
        .collect();
    let size: Vec<f64> = doc
        .elements
        .iter()
        .map(Element::characteristic_size)
        .collect();
    let boxes: Vec<WorldRect> = doc.elements.iter().map(Element::world_bbox).collect();

    // (1) size separation between adjacent ranks, and each rank strictly
    // inside one zoom band measured from the largest element.
    let largest = size.iter().copied().fold(0.0, f64::max);
    for (i, &c) in size.iter().enumerate() {
        let steps = (largest / c).ln() / geo.zoom.ln();
        let band = (rank[i] as u32 * geo.levels_per_rank) as f64;
        if !(band - 1e-6..band + 1.0 - 1e-6).contains(&steps)
            || (rank[i] > 0 && steps < band + 1e-6)
        {
            return Err(GenError::MarginViolation(format!(
                "{} sits {steps:.6} zoom steps below the largest element, outside band {band}",
                doc.elements[i].id
            )));
        }
    }
    for k in 0..truth.num_scales {
        let (rank, size) = (&rank, &size);
        let at = |r: usize| {
            (0..size.len())
                .filter(move |&i| rank[i] == r)
                .map(move |i| size[i])
        };
        let min_k = at(k).fold(f64::INFINITY, f64::min);
        let max_k = at(k).fold(0.0, f64::max);
        if max_k / min_k > geo.spread * (1.0 + 1e-9) {
            return Err(GenError::MarginViolation(format!(
                "rank {k} sizes span more than one band"
            )));
        }
        if k + 1 < truth.num_scales {
            let max_next = at(k + 1).fold(0.0, f64::max);
            if min_k / max_next < geo.zoom * geo.margin * (1.0 - 1e-9) {
                return Err(GenError::MarginViolation(format!(
                    "ranks {k} and {} differ by only {:.3}x",
                    k + 1,
                    min_k / max_next
                )));
            }
        }
    }

    // (2) separation between clusters of the same rank.
    let mut cluster_of: Vec<Vec<Option<ClusterId>>> =
        vec![vec![None; doc.elements.len()]; truth.num_scales];
    for c in &truth.clusters {
        for m in &c.member_element_ids {
            cluster_of[c.scale_rank][index[m.as_str()]] = Some(c.id);
        }
    }
    for (k, owners) in cluster_of.iter().enumerate().skip(1) {
        for i in 0..doc.elements.len() {
            for j in i + 1..doc.elements.len() {
                let (Some(a), Some(b)) = (owners[i], owners[j]) else {
                    continue;
                };
                if a == b {
                    continue;
                }
                let need = geo.margin * geo.expansion * (size[i] + size[j]);
                let gap = boxes[i].separation(&boxes[j]);
                if gap <= need.max(0.0) {
                    return Err(GenError::MarginViolation(format!(
                        "rank {k}: {} and {} are {gap:.3} apart, need more than {need:.3}",
                        doc.elements[i].id, doc.elements[j].id
                    )));
                }
            }
        }
    }

    // (3) each child cluster strictly inside one card of its parent.
    for c in truth.clusters.iter().filter(|c| c.scale_rank > 0) {
        let parent = &truth.clusters[c.parent_cluster_id.expect("non-root has a parent") as usize];
        let inside = parent
            .member_element_ids
            .iter()
            .map(|m| index[m.as_str()])
            .filter(|&i| rank[i] == parent.scale_rank)
            .any(|i| boxes[i].strictly_contains_rect(&c.region));
        if !inside {
            return Err(GenError::MarginViolation(format!(
                "cluster {} is not inside a parent card",
                c.id
            )));
        }
    }
    Ok(())
}

/// Random layout with no margin guarantees: `count` elements of widely varying
/// size, aspect and rotation scattered over a square. For property tests.
pub fn generate_scattered(seed: u64, count: usize) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ca7_7e4e_d000_0000);
    let side = 150.0 * (count.max(1) as f64).sqrt();
    let mut doc = Document::new(
        format!("Scattered layout {seed}"),
        format!("scattered-{seed}"),
        format!("scattered-{seed:016x}"),
        "synthgen",
    );
    for i in 0..count {
        let c = 10f64.powf(rng.gen_range(0.7..2.7));
        let aspect = 10f64.powf(rng.gen_range(-0.5..0.5));
        let scale = 2f64.powf(rng.gen_range(-2.0..2.0));
        let mut t = Transforms::at(rng.gen_range(-side..side), rng.gen_range(-side..side));
        t.scale = scale;
        if rng.gen_bool(0.5) {
            t.rotation = rng.gen_range(0.0..std::f64::consts::TAU);
        }
        let kind = ElementKind::ALL[rng.gen_range(0..ElementKind::ALL.len())];
        let mut e = Element::new(
            format!("s{i:04}"),
            kind,
            c * aspect.sqrt() / scale,
            c / aspect.sqrt() / scale,
            t,
        );
        if kind == ElementKind::Text {
            e.text = Some(WORDS[..rng.gen_range(0..6)].join(" "));
        }
        doc.elements.push(e);
    }
    doc
}
