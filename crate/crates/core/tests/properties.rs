//! Property tests for the document model and the recognizer invariants.

mod common;

use std::collections::BTreeSet;

use muscale_core::model::{
    parse_document, serialize_document, Document, Element, ElementKind, Transforms,
};
use muscale_core::recognizer::{
    build_hierarchy, compute_analytics, MultiscaleHierarchy, RecognizerConfig,
};
use muscale_core::synthgen::{generate, generate_scattered, GenSpec};
use proptest::prelude::*;
use serde_json::json;

fn arb_element(id: usize) -> impl Strategy<Value = Element> {
    (
        0.5f64..500.0,
        0.5f64..500.0,
        -1e4f64..1e4,
        -1e4f64..1e4,
        0.05f64..20.0,
        -7.0f64..7.0,
        prop::sample::select(ElementKind::ALL.to_vec()),
        prop::option::of("[a-z ]{0,20}"),
        prop::option::of(0u32..100),
    )
        .prop_map(move |(w, h, x, y, scale, rotation, kind, text, extra)| {
            let mut t = Transforms::at(x, y);
            t.scale = scale;
            t.rotation = rotation;
            let mut e = Element::new(format!("el-{id}"), kind, w, h, t);
            e.text = text;
            if let Some(v) = extra {
                e.unknown.insert("zIndex".into(), json!(v));
            }
            e
        })
}

fn arb_document() -> impl Strategy<Value = Document> {
    (
        0usize..25,
        "[A-Za-z ]{0,12}",
        prop::option::of("[a-z]{0,10}"),
    )
        .prop_flat_map(|(n, title, description)| {
            let elements: Vec<_> = (0..n).map(arb_element).collect();
            (elements, Just(title), Just(description))
        })
        .prop_map(|(elements, title, description)| {
            let mut d = Document::new(title, "doc-key", "doc-id", "creator");
            d.description = description;
            d.elements = elements;
            d
        })
}

fn member_sets(h: &MultiscaleHierarchy) -> BTreeSet<(usize, Vec<String>)> {
    h.clusters
        .iter()
        .map(|c| (c.scale_rank, c.member_element_ids.clone()))
        .collect()
}

fn check_structure(doc: &Document, h: &MultiscaleHierarchy) {
    let counts = h.clusters_per_scale();
    if doc.elements.is_empty() {
        assert_eq!(h.num_scales, 0);
        return;
    }
    assert_eq!(counts[0], 1, "single root");
    assert_eq!(h.clusters[0].member_element_ids.len(), doc.elements.len());
    let ranks: BTreeSet<usize> = h.element_levels.values().copied().collect();
    assert_eq!(ranks, (0..h.num_scales).collect(), "ranks are consecutive");
    for (i, c) in h.clusters.iter().enumerate() {
        assert_eq!(c.id as usize, i);
        assert!(!c.member_element_ids.is_empty());
        for m in &c.member_element_ids {
            assert!(c
                .region
                .contains_rect(&doc.element(m).unwrap().world_bbox()));
        }
        match c.parent_cluster_id {
            None => assert_eq!(c.scale_rank, 0),
            Some(p) => {
                let parent = &h.clusters[p as usize];
                assert_eq!(parent.scale_rank + 1, c.scale_rank);
                let pm: BTreeSet<_> = parent.member_element_ids.iter().collect();
                assert!(
                    c.member_element_ids.iter().all(|m| pm.contains(m)),
                    "child is subset of parent"
                );
                let candidates = h
                    .clusters_at(parent.scale_rank)
                    .filter(|q| {
                        c.member_element_ids
                            .iter()
                            .all(|m| q.member_element_ids.contains(m))
                    })
                    .count();
                assert_eq!(candidates, 1, "parent is unique");
            }
        }
    }
    for k in 1..h.num_scales {
        let expected: BTreeSet<&String> = h
            .element_levels
            .iter()
            .filter(|(_, &r)| r >= k)
            .map(|(id, _)| id)
            .collect();
        let mut seen = BTreeSet::new();
        for c in h.clusters_at(k) {
            for m in &c.member_element_ids {
                assert!(seen.insert(m), "rank {k} clusters overlap");
            }
        }
        assert_eq!(
            seen, expected,
            "rank {k} clusters cover exactly the elements of rank >= {k}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_serialize_identity(doc in arb_document()) {
        let bytes = serialize_document(&doc);
        let back = parse_document(&bytes).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_document(&back), bytes);
    }

    #[test]
    fn bbox_contains_center(e in arb_element(0)) {
        let b = e.world_bbox();
        let (cx, cy) = e.world_center();
        prop_assert!(b.area() >= 0.0);
        let slack = 1e-9 * (1.0 + cx.abs().max(cy.abs()));
        prop_assert!(b.expand(slack).contains_point(cx, cy));
    }

    #[test]
    fn characteristic_size_ignores_pose_and_scales_linearly(e in arb_element(0), dx in -1e3f64..1e3, rot in -7.0f64..7.0, gamma in 0.01f64..100.0) {
        let c = e.characteristic_size();
        let mut moved = e.clone();
        moved.transforms.position.x += dx;
        moved.transforms.rotation = rot;
        prop_assert_eq!(moved.characteristic_size(), c);
        let mut grown = e.clone();
        grown.transforms.scale *= gamma;
        prop_assert!((grown.characteristic_size() - gamma * c).abs() <= 1e-12 * gamma * c);
    }

    #[test]
    fn hierarchy_invariants_on_arbitrary_documents(doc in arb_document()) {
        check_structure(&doc, &build_hierarchy(&doc, &RecognizerConfig::default()));
    }

    #[test]
    fn hierarchy_invariants_with_other_configs(seed in 0u64..1000, z in 1.5f64..6.0, beta in 0.0f64..2.0, max in 1u32..10) {
        let cfg = RecognizerConfig::new(z, beta, max).unwrap();
        let doc = generate_scattered(seed, 60);
        let h = build_hierarchy(&doc, &cfg);
        check_structure(&doc, &h);
        prop_assert!(h.num_scales <= max as usize);
    }
}

#[test]
fn structure_holds_on_scattered_layouts() {
    for seed in 0..30 {
        let doc = generate_scattered(seed, 200);
        check_structure(&doc, &build_hierarchy(&doc, &RecognizerConfig::default()));
    }
}

#[test]
fn scattered_layouts_exercise_several_scales_and_clusters() {
    let doc = generate_scattered(5, 300);
    let a = compute_analytics(&doc, &RecognizerConfig::default());
    assert!(a.num_scales >= 2, "{a:?}");
    assert!(a.clusters_per_scale.iter().skip(1).any(|&c| c > 1), "{a:?}");
}

#[test]
fn permutation_leaves_analytics_and_members_unchanged() {
    let cfg = RecognizerConfig::default();
    for seed in 0..20u64 {
        let doc = generate_scattered(seed, 80);
        let mut shuffled = doc.clone();
        shuffled.elements.reverse();
        shuffled.elements.rotate_left(seed as usize % 7);
        let (a, b) = (
            build_hierarchy(&doc, &cfg),
            build_hierarchy(&shuffled, &cfg),
        );
        assert_eq!(a, b);
        let (ra, rb) = (
            compute_analytics(&doc, &cfg),
            compute_analytics(&shuffled, &cfg),
        );
        assert_eq!(
            (ra.num_scales, &ra.clusters_per_scale, ra.fluency),
            (rb.num_scales, &rb.clusters_per_scale, rb.fluency)
        );
    }
}

#[test]
fn synthetic_documents_survive_round_trip() {
    for seed in 0..50 {
        let (doc, _) = generate(&GenSpec::random(seed)).unwrap();
        let bytes = serialize_document(&doc);
        assert_eq!(parse_document(&bytes).unwrap(), doc);
    }
}

#[test]
fn member_sets_are_order_independent() {
    let doc = generate_scattered(3, 120);
    let mut rev = doc.clone();
    rev.elements.reverse();
    let cfg = RecognizerConfig::default();
    assert_eq!(
        member_sets(&build_hierarchy(&doc, &cfg)),
        member_sets(&build_hierarchy(&rev, &cfg))
    );
}
