//! The two figure-analog fixtures: frozen documents, their recognized
//! structure, and the frozen annotated rendering.

mod common;

use muscale_core::annotator::{build_overlay, render_svg, Palette, RenderOptions};
use muscale_core::model::{parse_document, serialize_document};
use muscale_core::recognizer::{analyze, build_hierarchy, RecognizerConfig};
use muscale_core::synthgen::{generate, GenSpec, GroundTruth};

use common::{assert_golden, fixture_path};

fn load(name: &str) -> muscale_core::Document {
    parse_document(&std::fs::read(fixture_path(name)).unwrap()).unwrap()
}

#[test]
fn fixtures_are_the_generator_presets() {
    for (name, spec) in [
        ("figure3", GenSpec::figure3()),
        ("figure4", GenSpec::figure4()),
    ] {
        let (doc, truth) = generate(&spec).unwrap();
        assert_golden(&format!("{name}.ffwc.json"), &serialize_document(&doc));
        let truth_bytes = muscale_core::canonical::to_canonical_bytes(&truth).unwrap();
        assert_golden(&format!("{name}.truth.json"), &truth_bytes);
    }
}

#[test]
fn figure3_analog_structure() {
    let doc = load("figure3.ffwc.json");
    let a = analyze(&doc, &RecognizerConfig::default());
    assert_eq!(a.analytics.num_scales, 3);
    assert_eq!(a.analytics.clusters_per_scale, [1, 3, 3]);
    assert_eq!(a.analytics.num_clusters, 7);
    // The three innermost clusters share one parent.
    let parents: Vec<_> = a
        .hierarchy
        .clusters_at(2)
        .map(|c| c.parent_cluster_id)
        .collect();
    assert!(parents.iter().all(|p| *p == parents[0]));
    let truth: GroundTruth =
        serde_json::from_slice(&std::fs::read(fixture_path("figure3.truth.json")).unwrap())
            .unwrap();
    assert_eq!(a.hierarchy, truth.hierarchy);
}

#[test]
fn figure4_analog_structure() {
    let doc = load("figure4.ffwc.json");
    let a = analyze(&doc, &RecognizerConfig::default()).analytics;
    assert_eq!(a.num_scales, 3);
    assert_eq!(a.clusters_per_scale, [1, 7, 2]);
    assert_eq!(a.num_clusters, 10);
}

#[test]
fn figure3_overlay_colors_by_rank() {
    let doc = load("figure3.ffwc.json");
    let h = build_hierarchy(&doc, &RecognizerConfig::default());
    let o = build_overlay(&doc, &h, &Palette::default()).unwrap();
    let color_of = |rank: usize| {
        let colors: std::collections::BTreeSet<_> = o
            .regions
            .iter()
            .filter(|r| r.scale_rank == rank)
            .map(|r| r.color.as_str())
            .collect();
        assert_eq!(colors.len(), 1);
        colors.into_iter().next().unwrap()
    };
    assert_eq!(color_of(0), "#F4D03F");
    assert_eq!(color_of(1), "#5DADE2");
    assert_eq!(color_of(2), "#A0672F");
    assert_eq!(o.timeline.len(), 7);
}

#[test]
fn figure3_svg_matches_golden() {
    let doc = load("figure3.ffwc.json");
    let h = build_hierarchy(&doc, &RecognizerConfig::default());
    let o = build_overlay(&doc, &h, &Palette::default()).unwrap();
    let still = render_svg(&doc, &o, RenderOptions::default()).unwrap();
    assert_golden("figure3.svg", still.as_bytes());
    let animated = render_svg(
        &doc,
        &o,
        RenderOptions {
            animated: true,
            highlight_cluster: None,
        },
    )
    .unwrap();
    assert_eq!(animated.matches("<animate ").count(), 7);
    assert_golden("figure3.animated.svg", animated.as_bytes());
}

#[test]
fn highlight_tightens_view_box() {
    let doc = load("figure3.ffwc.json");
    let h = build_hierarchy(&doc, &RecognizerConfig::default());
    let o = build_overlay(&doc, &h, &Palette::default()).unwrap();
    let deep = h.clusters_at(2).next().unwrap().id;
    let svg = render_svg(
        &doc,
        &o,
        RenderOptions {
            animated: false,
            highlight_cluster: Some(deep),
        },
    )
    .unwrap();
    let vb: Vec<f64> = svg
        .split("viewBox=\"")
        .nth(1)
        .unwrap()
        .split('"')
        .next()
        .unwrap()
        .split(' ')
        .map(|v| v.parse().unwrap())
        .collect();
    let r = o.region(deep).unwrap().padded_region;
    for (got, want) in vb.iter().zip([r.min_x, r.min_y, r.width(), r.height()]) {
        assert!((got - want).abs() < 1e-3, "{vb:?} vs {r:?}");
    }
    assert!(r.width() < o.view_box.width());
    assert!(svg.contains("stroke=\"#C0392B\""));
}
