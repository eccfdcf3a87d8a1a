//! Static R-tree over rectangles, bulk loaded with Sort-Tile-Recursive
//! packing. Used as the broad phase when linking nearby elements.

use crate::geometry::WorldRect;

const NODE_CAPACITY: usize = 8;

#[derive(Debug, Clone, Copy)]
struct Node {
    bbox: WorldRect,
    start: usize,
    end: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct PackedRTree {
    items: Vec<(WorldRect, usize)>,
    /// `levels[0]` indexes into `items`; `levels[i]` indexes into `levels[i - 1]`.
    levels: Vec<Vec<Node>>,
}

impl PackedRTree {
    /// Builds the tree; the payload of each rectangle is its position in `rects`.
    pub(crate) fn new(rects: &[WorldRect]) -> Self {
        let mut items: Vec<(WorldRect, usize)> = rects.iter().copied().zip(0..).collect();
        let mut levels = Vec::new();
        if items.is_empty() {
            return Self { items, levels };
        }
        str_sort(&mut items, |(r, _)| *r);
        let mut nodes = group(&items, |(r, _)| *r);
        loop {
            let done = nodes.len() == 1;
            if !done {
                str_sort(&mut nodes, |n| n.bbox);
            }
            let parents = if done {
                Vec::new()
            } else {
                group(&nodes, |n| n.bbox)
            };
            levels.push(nodes);
            if done {
                break;
            }
            nodes = parents;
        }
        Self { items, levels }
    }

    /// Calls `visit` with the payload of every rectangle intersecting `query`
    /// (closed intersection).
    pub(crate) fn for_each_intersecting(&self, query: &WorldRect, mut visit: impl FnMut(usize)) {
        let Some(top) = self.levels.last() else {
            return;
        };
        let mut stack: Vec<(usize, usize)> =
            (0..top.len()).map(|i| (self.levels.len() - 1, i)).collect();
        while let Some((level, idx)) = stack.pop() {
            let node = &self.levels[level][idx];
            if !node.bbox.intersects(query) {
                continue;
            }
            if level == 0 {
                for (rect, payload) in &self.items[node.start..node.end] {
                    if rect.intersects(query) {
                        visit(*payload);
                    }
                }
            } else {
                stack.extend((node.start..node.end).map(|i| (level - 1, i)));
            }
        }
    }
}

/// Orders `v` so that consecutive runs of `NODE_CAPACITY` form compact tiles.
fn str_sort<T>(v: &mut [T], rect: impl Fn(&T) -> WorldRect) {
    let leaves = v.len().div_ceil(NODE_CAPACITY);
    let slabs = (leaves as f64).sqrt().ceil().max(1.0) as usize;
    let slab_len = slabs * NODE_CAPACITY;
    v.sort_by(|a, b| rect(a).center().0.total_cmp(&rect(b).center().0));
    for slab in v.chunks_mut(slab_len) {
        slab.sort_by(|a, b| rect(a).center().1.total_cmp(&rect(b).center().1));
    }
}

fn group<T>(v: &[T], rect: impl Fn(&T) -> WorldRect) -> Vec<Node> {
    v.chunks(NODE_CAPACITY)
        .enumerate()
        .map(|(i, chunk)| {
            let bbox = chunk
                .iter()
                .map(&rect)
                .reduce(|a, b| a.union(&b))
                .expect("nonempty chunk");
            let start = i * NODE_CAPACITY;
            Node {
                bbox,
                start,
                end: start + chunk.len(),
            }
        })
        .collect()
}
