//! SVG 1.1 rendering of an annotated design instance.
//!
//! Layers, bottom to top: document background, cluster regions (outer ranks
//! beneath inner ranks), element placeholders. Output bytes depend only on the
//! inputs.

use std::fmt::Write;

use super::{AnnotateError, AnnotationOverlay};
use crate::geometry::WorldRect;
use crate::model::{Document, Element, ElementKind};
use crate::recognizer::ClusterId;

/// Seconds between consecutive reveal steps.
pub const SECONDS_PER_STEP: f64 = 1.0;
const FADE_SECONDS: f64 = 0.5;
const EXCERPT_CHARS: usize = 48;
const HIGHLIGHT_STROKE: &str = "#C0392B";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderOptions {
    pub animated: bool,
    pub highlight_cluster: Option<ClusterId>,
}

pub fn render_svg(
    doc: &Document,
    overlay: &AnnotationOverlay,
    opts: RenderOptions,
) -> Result<String, AnnotateError> {
    let highlighted = match opts.highlight_cluster {
        None => None,
        Some(id) => Some(
            overlay
                .region(id)
                .ok_or(AnnotateError::UnknownCluster(id))?,
        ),
    };
    let view = highlighted.map_or(overlay.view_box, |r| r.padded_region);
    let view = WorldRect::new(
        view.min_x,
        view.min_y,
        view.min_x + view.width().max(1.0),
        view.min_y + view.height().max(1.0),
    );

    let mut out = String::with_capacity(4096);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\" preserveAspectRatio=\"xMidYMid meet\">",
        num(view.min_x),
        num(view.min_y),
        num(view.width()),
        num(view.height())
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&doc.title));
    let _ = writeln!(
        out,
        "<rect class=\"background\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
        num(overlay.view_box.min_x),
        num(overlay.view_box.min_y),
        num(overlay.view_box.width()),
        num(overlay.view_box.height()),
        escape(&doc.settings.background_color)
    );

    let step_of = |id: ClusterId| {
        overlay
            .timeline
            .iter()
            .find(|s| s.cluster_id == id)
            .map(|s| s.step_index)
    };
    out.push_str("<g class=\"regions\">\n");
    for region in &overlay.regions {
        let r = &region.padded_region;
        let _ = write!(
            out,
            "<rect class=\"region rank-{}\" data-cluster-id=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" rx=\"{}\" fill=\"{}\" fill-opacity=\"{}\"",
            region.scale_rank,
            region.cluster_id,
            num(r.min_x),
            num(r.min_y),
            num(r.width()),
            num(r.height()),
            num(overlay.padding * 0.5),
            escape(&region.color),
            num(region.opacity)
        );
        if opts.highlight_cluster == Some(region.cluster_id) {
            let _ = write!(
                out,
                " stroke=\"{HIGHLIGHT_STROKE}\" stroke-width=\"{}\"",
                num(overlay.padding * 0.25)
            );
        }
        match step_of(region.cluster_id).filter(|_| opts.animated) {
            Some(step) => {
                let _ = writeln!(
                    out,
                    " opacity=\"0\"><animate attributeName=\"opacity\" from=\"0\" to=\"1\" begin=\"{}s\" dur=\"{}s\" fill=\"freeze\"/></rect>",
                    num(step as f64 * SECONDS_PER_STEP),
                    num(FADE_SECONDS)
                );
            }
            None => out.push_str("/>\n"),
        }
    }
    out.push_str("</g>\n<g class=\"elements\">\n");
    for e in &doc.elements {
        write_element(&mut out, e);
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn write_element(out: &mut String, e: &Element) {
    let t = &e.transforms;
    let stroke = num(e.width.max(e.height) * 0.01);
    let font = e.width.min(e.height) * 0.12;
    let _ = writeln!(
        out,
        "<g class=\"element\" data-element-id=\"{}\" data-kind=\"{}\" transform=\"translate({} {}) rotate({}) scale({})\">",
        escape(&e.id),
        e.kind,
        num(t.position.x),
        num(t.position.y),
        num(t.rotation.to_degrees()),
        num(t.scale)
    );
    let _ = writeln!(
        out,
        "<rect width=\"{}\" height=\"{}\" fill=\"{}\" fill-opacity=\"0.9\" stroke=\"#4D4D4D\" stroke-width=\"{}\"/>",
        num(e.width),
        num(e.height),
        kind_fill(e.kind),
        stroke
    );
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"#333333\">{}",
        num(font * 0.5),
        num(font * 1.2),
        num(font),
        glyph(e.kind)
    );
    if let Some(text) = e.text.as_deref().filter(|t| !t.trim().is_empty()) {
        let _ = write!(out, " {}", escape(&excerpt(text)));
    }
    out.push_str("</text>\n</g>\n");
}

fn glyph(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Image => "[img]",
        ElementKind::Text => "[txt]",
        ElementKind::Sketch => "[sketch]",
        ElementKind::Video => "[video]",
        ElementKind::Embed => "[embed]",
        ElementKind::Other => "[elem]",
    }
}

fn kind_fill(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Image => "#D6DBDF",
        ElementKind::Text => "#FDFEFE",
        ElementKind::Sketch => "#E8F6F3",
        ElementKind::Video => "#D2B4DE",
        ElementKind::Embed => "#FAE5D3",
        ElementKind::Other => "#EAECEE",
    }
}

fn excerpt(text: &str) -> String {
    let flat: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    match flat.char_indices().nth(EXCERPT_CHARS) {
        Some((cut, _)) => format!("{}\u{2026}", &flat[..cut]),
        None => flat,
    }
}

/// Decimal rendering rounded to 1e-4, without trailing zeros or `-0`.
fn num(v: f64) -> String {
    let r = (v * 1e4).round() / 1e4;
    if r == 0.0 {
        "0".to_owned()
    } else {
        format!("{r}")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}
