use serde::{Deserialize, Serialize};

use super::AnnotateError;

/// Ranks beyond this many cannot be colored distinctly.
pub const MAX_PALETTE_LEN: usize = 64;

const GOLDEN_ANGLE: f64 = 137.507_764_050_037_85;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fill {
    /// `#RRGGBB`
    pub color: String,
    pub opacity: f64,
}

impl Fill {
    pub fn new(color: impl Into<String>, opacity: f64) -> Self {
        Self {
            color: color.into(),
            opacity,
        }
    }
}

/// Fill colors indexed by scale rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    fills: Vec<Fill>,
}

impl Default for Palette {
    /// Yellow, blue and brown at 35% opacity.
    fn default() -> Self {
        Self {
            fills: vec![
                Fill::new("#F4D03F", 0.35),
                Fill::new("#5DADE2", 0.35),
                Fill::new("#A0672F", 0.35),
            ],
        }
    }
}

impl Palette {
    pub fn new(fills: Vec<Fill>) -> Result<Self, AnnotateError> {
        if fills.len() < 3 {
            return Err(AnnotateError::InvalidPalette(format!(
                "need at least 3 fills, got {}",
                fills.len()
            )));
        }
        for (i, f) in fills.iter().enumerate() {
            if fills[..i]
                .iter()
                .any(|g| g.color.eq_ignore_ascii_case(&f.color))
            {
                return Err(AnnotateError::InvalidPalette(format!(
                    "color {} repeats",
                    f.color
                )));
            }
            if !(0.0..=1.0).contains(&f.opacity) {
                return Err(AnnotateError::InvalidPalette(format!(
                    "opacity {} out of range",
                    f.opacity
                )));
            }
        }
        Ok(Self { fills })
    }

    pub fn fills(&self) -> &[Fill] {
        &self.fills
    }

    pub fn len(&self) -> usize {
        self.fills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fills.is_empty()
    }

    /// Fill for `rank`; ranks past the end reuse the last entry.
    pub fn fill(&self, rank: usize) -> &Fill {
        &self.fills[rank.min(self.fills.len() - 1)]
    }

    /// Appends generated hues until there are at least `ranks` fills.
    pub fn extended_to(&self, ranks: usize) -> Result<Palette, AnnotateError> {
        if ranks > MAX_PALETTE_LEN.max(self.fills.len()) {
            return Err(AnnotateError::RankOverflow {
                ranks,
                capacity: MAX_PALETTE_LEN.max(self.fills.len()),
            });
        }
        let mut fills = self.fills.clone();
        let opacity = fills.last().map_or(0.35, |f| f.opacity);
        let mut step = 0u32;
        while fills.len() < ranks {
            step += 1;
            let hue = (40.0 + GOLDEN_ANGLE * step as f64) % 360.0;
            let color = hsl_to_hex(hue, 0.55, 0.55);
            if !fills.iter().any(|f| f.color.eq_ignore_ascii_case(&color)) {
                fills.push(Fill { color, opacity });
            }
        }
        Ok(Palette { fills })
    }
}

fn hsl_to_hex(hue: f64, saturation: f64, lightness: f64) -> String {
    let c = (1.0 - (2.0 * lightness - 1.0).abs()) * saturation;
    let h = hue / 60.0;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = lightness - c / 2.0;
    let byte = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    format!("#{:02X}{:02X}{:02X}", byte(r), byte(g), byte(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_yields_distinct_colors() {
        let p = Palette::default().extended_to(MAX_PALETTE_LEN).unwrap();
        assert_eq!(p.len(), MAX_PALETTE_LEN);
        for (i, f) in p.fills().iter().enumerate() {
            assert!(
                p.fills()[..i].iter().all(|g| g.color != f.color),
                "{} repeats",
                f.color
            );
        }
        assert_eq!(&p.fills()[..3], Palette::default().fills());
    }

    #[test]
    fn too_many_ranks_overflow() {
        assert_eq!(
            Palette::default().extended_to(MAX_PALETTE_LEN + 1),
            Err(AnnotateError::RankOverflow {
                ranks: MAX_PALETTE_LEN + 1,
                capacity: MAX_PALETTE_LEN
            })
        );
    }

    #[test]
    fn palette_validation() {
        assert!(Palette::new(vec![Fill::new("#000000", 0.3)]).is_err());
        let dup = vec![
            Fill::new("#000000", 0.3),
            Fill::new("#111111", 0.3),
            Fill::new("#000000", 0.3),
        ];
        assert!(Palette::new(dup).is_err());
    }

    #[test]
    fn hsl_primaries() {
        assert_eq!(hsl_to_hex(0.0, 1.0, 0.5), "#FF0000");
        assert_eq!(hsl_to_hex(120.0, 1.0, 0.5), "#00FF00");
        assert_eq!(hsl_to_hex(240.0, 1.0, 0.5), "#0000FF");
    }
}
