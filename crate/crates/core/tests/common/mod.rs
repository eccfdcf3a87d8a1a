#![allow(dead_code)]

use std::path::PathBuf;

use muscale_core::model::Document;

/// Rectangle as (min_x, min_y, max_x, max_y).
pub type Rect = (f64, f64, f64, f64);

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Compares `actual` against a frozen file; `MUSCALE_UPDATE_GOLDEN=1`
/// rewrites the file instead.
pub fn assert_golden(name: &str, actual: &[u8]) {
    let path = fixture_path(name);
    if std::env::var_os("MUSCALE_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(
        expected == actual,
        "{} differs from the frozen golden file",
        path.display()
    );
}

/// World box of every element by explicit corner enumeration.
pub fn corner_boxes(doc: &Document) -> Vec<Rect> {
    doc.elements
        .iter()
        .map(|e| {
            let t = &e.transforms;
            let (s, c) = (t.rotation.sin(), t.rotation.cos());
            let corners = [
                (0.0, 0.0),
                (e.width, 0.0),
                (e.width, e.height),
                (0.0, e.height),
            ]
            .map(|(x, y)| {
                let (x, y) = (x * t.scale, y * t.scale);
                (x * c - y * s + t.position.x, x * s + y * c + t.position.y)
            });
            corners.iter().fold(
                (
                    f64::INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::NEG_INFINITY,
                ),
                |(a, b, cc, d), &(x, y)| (a.min(x), b.min(y), cc.max(x), d.max(y)),
            )
        })
        .collect()
}

/// O(n^2) pairwise linking with a plain union-find: the reference the
/// spatial-index clustering must agree with. Returns sorted id sets in
/// sorted order.
pub fn brute_force_clusters(
    doc: &Document,
    ranks: &[usize],
    k: usize,
    beta: f64,
) -> Vec<Vec<String>> {
    let boxes = corner_boxes(doc);
    let idx: Vec<usize> = (0..doc.elements.len()).filter(|&i| ranks[i] >= k).collect();
    let grown: Vec<Rect> = idx
        .iter()
        .map(|&i| {
            let e = &doc.elements[i];
            let d = beta * e.transforms.scale * (e.width * e.height).sqrt();
            let b = boxes[i];
            (b.0 - d, b.1 - d, b.2 + d, b.3 + d)
        })
        .collect();
    let mut parent: Vec<usize> = (0..idx.len()).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            let (p, q) = (grown[a], grown[b]);
            if p.0 <= q.2 && q.0 <= p.2 && p.1 <= q.3 && q.1 <= p.3 {
                let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
    for (a, &i) in idx.iter().enumerate() {
        let r = root(&mut parent, a);
        groups
            .entry(r)
            .or_default()
            .push(doc.elements[i].id.clone());
    }
    let mut out: Vec<Vec<String>> = groups
        .into_values()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    out.sort();
    out
}
