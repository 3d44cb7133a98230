//! Map geometry: Voronoi cells, countries, colors, labels and SVG output.

pub mod basemap;
pub mod color;
mod countries;
pub mod labels;
pub mod svg;
mod voronoi;

pub use countries::{build_countries, CountryAdjacency, CountryGeometry};
pub use voronoi::{build_voronoi_regions, jitter_coincident, VoronoiDiagram};

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

/// A simple polygon as a closed ring (last vertex not repeated).
pub type Ring = Vec<Point>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bbox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bbox {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Bbox { min_x, min_y, max_x, max_y }
    }

    /// Bounding box of `points` padded by `fraction` of the larger side on every
    /// side. The larger side is floored at `min_extent` so degenerate point sets
    /// still get an area.
    pub fn around(points: &[Point], fraction: f64, min_extent: f64) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(min_extent);
        let pad = fraction * extent;
        Bbox::new(lo[0] - pad, lo[1] - pad, hi[0] + pad, hi[1] + pad)
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

    pub fn ring(&self) -> Ring {
        vec![
            [self.min_x, self.min_y],
            [self.max_x, self.min_y],
            [self.max_x, self.max_y],
            [self.min_x, self.max_y],
        ]
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.min_x && p[0] <= self.max_x && p[1] >= self.min_y && p[1] <= self.max_y
    }
}

/// Shoelace area; positive for counter-clockwise rings.
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

/// Even-odd point-in-polygon test over any number of rings.
pub fn point_in_rings(p: Point, rings: &[Ring]) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
    }
    inside
}

/// Largest distance between two vertices.
pub fn diameter(ring: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in ring.iter().enumerate() {
        for b in &ring[i + 1..] {
            d = d.max(dist(*a, *b));
        }
    }
    d
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_helpers() {
        let sq = Bbox::new(0.0, 0.0, 2.0, 1.0).ring();
        assert_eq!(signed_area(&sq), 2.0);
        assert!(point_in_rings([1.0, 0.5], std::slice::from_ref(&sq)));
        assert!(!point_in_rings([3.0, 0.5], std::slice::from_ref(&sq)));
        let hole: Ring = vec![[0.5, 0.25], [0.5, 0.75], [1.5, 0.75], [1.5, 0.25]];
        assert!(!point_in_rings([1.0, 0.5], &[sq.clone(), hole]));
        assert!((diameter(&sq) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn padded_bbox() {
        let b = Bbox::around(&[[0.0, 0.0], [10.0, 5.0]], 0.1, 1.0);
        assert_eq!(b, Bbox::new(-1.0, -1.0, 11.0, 6.0));
        let single = Bbox::around(&[[3.0, 3.0]], 0.1, 100.0);
        assert_eq!(single.width(), 20.0);
    }
}
