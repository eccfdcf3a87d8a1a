//! Axis-aligned world-space rectangles.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct WorldRect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl WorldRect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        debug_assert!(min_x <= max_x && min_y <= max_y);
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    /// Smallest rectangle containing every point.
    pub fn hull_of_points(points: impl IntoIterator<Item = (f64, f64)>) -> Option<Self> {
        let mut it = points.into_iter();
        let (x0, y0) = it.next()?;
        let mut r = Self::new(x0, y0, x0, y0);
        for (x, y) in it {
            r.min_x = r.min_x.min(x);
            r.min_y = r.min_y.min(y);
            r.max_x = r.max_x.max(x);
            r.max_y = r.max_y.max(y);
        }
        Some(r)
    }

    /// Smallest rectangle containing every rectangle; `None` for an empty input.
    pub fn hull<'a>(rects: impl IntoIterator<Item = &'a WorldRect>) -> Option<Self> {
        rects.into_iter().copied().reduce(|a, b| a.union(&b))
    }

    pub fn union(&self, other: &WorldRect) -> WorldRect {
        WorldRect {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }

    /// Grows the rectangle outward by `d` on every side.
    pub fn expand(&self, d: f64) -> WorldRect {
        WorldRect {
            min_x: self.min_x - d,
            min_y: self.min_y - d,
            max_x: self.max_x + d,
            max_y: self.max_y + d,
        }
    }

    /// Closed intersection test: touching edges count.
    pub fn intersects(&self, other: &WorldRect) -> bool {
        self.min_x <= other.max_x
            && other.min_x <= self.max_x
            && self.min_y <= other.max_y
            && other.min_y <= self.max_y
    }

    pub fn contains_rect(&self, other: &WorldRect) -> bool {
        self.min_x <= other.min_x
            && self.min_y <= other.min_y
            && other.max_x <= self.max_x
            && other.max_y <= self.max_y
    }

    /// Strict containment: `other` lies in the open interior.
    pub fn strictly_contains_rect(&self, other: &WorldRect) -> bool {
        self.min_x < other.min_x
            && self.min_y < other.min_y
            && other.max_x < self.max_x
            && other.max_y < self.max_y
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        self.min_x <= x && x <= self.max_x && self.min_y <= y && y <= self.max_y
    }

    /// Chebyshev separation between two rectangles; zero or negative when they
    /// intersect.
    pub fn separation(&self, other: &WorldRect) -> f64 {
        let dx = (other.min_x - self.max_x).max(self.min_x - other.max_x);
        let dy = (other.min_y - self.max_y).max(self.min_y - other.max_y);
        dx.max(dy)
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.min_x + self.max_x) / 2.0,
            (self.min_y + self.max_y) / 2.0,
        )
    }

    pub fn translate(&self, dx: f64, dy: f64) -> WorldRect {
        WorldRect {
            min_x: self.min_x + dx,
            min_y: self.min_y + dy,
            max_x: self.max_x + dx,
            max_y: self.max_y + dy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn touching_rectangles_intersect() {
        let a = WorldRect::new(0.0, 0.0, 1.0, 1.0);
        let b = WorldRect::new(1.0, 0.5, 2.0, 2.0);
        assert!(a.intersects(&b));
        assert!(!a.intersects(&b.translate(1e-9, 0.0)));
    }

    #[test]
    fn separation_is_chebyshev() {
        let a = WorldRect::new(0.0, 0.0, 1.0, 1.0);
        let b = WorldRect::new(4.0, 3.0, 5.0, 5.0);
        assert_eq!(a.separation(&b), 3.0);
        assert!(a.separation(&a) < 0.0);
    }

    #[test]
    fn hull_of_rectangles() {
        let rects = [
            WorldRect::new(0.0, 0.0, 1.0, 1.0),
            WorldRect::new(-2.0, 3.0, 0.5, 4.0),
        ];
        assert_eq!(
            WorldRect::hull(&rects),
            Some(WorldRect::new(-2.0, 0.0, 1.0, 4.0))
        );
        assert_eq!(WorldRect::hull(&[]), None);
    }
}
