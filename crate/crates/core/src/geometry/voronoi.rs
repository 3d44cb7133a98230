//! Voronoi cells clipped to a rectangle, by half-plane intersection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dist, Bbox, Point, Ring};

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDiagram {
    /// Sites after de-duplication jitter, in input order.
    pub sites: Vec<Point>,
    /// Counter-clockwise cell of each site.
    pub cells: Vec<Ring>,
}

/// Moves sites closer than `1e-6 × diagonal` to an earlier site by seeded
/// noise of that magnitude. Returns the number of moved sites.
pub fn jitter_coincident(sites: &mut [Point], bbox: &Bbox, seed: u64) -> usize {
    let eps = 1e-6 * bbox.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moved = 0;
    for _round in 0..16 {
        let mut changed = false;
        for i in 1..sites.len() {
            if (0..i).any(|j| dist(sites[i], sites[j]) < eps) {
                let angle = rng.gen::<f64>() * std::f64::consts::TAU;
                let r = eps * (1.0 + rng.gen::<f64>());
                let mut p = [sites[i][0] + r * angle.cos(), sites[i][1] + r * angle.sin()];
                p[0] = p[0].clamp(bbox.min_x + eps, bbox.max_x - eps);
                p[1] = p[1].clamp(bbox.min_y + eps, bbox.max_y - eps);
                sites[i] = p;
                moved += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    moved
}

/// Keeps the part of a convex ring on the `site` side of the bisector with `other`.
fn clip_by_bisector(ring: &[Point], site: Point, other: Point) -> Ring {
    let normal = [other[0] - site[0], other[1] - site[1]];
    let mid = [(site[0] + other[0]) * 0.5, (site[1] + other[1]) * 0.5];
    let side = |p: Point| (p[0] - mid[0]) * normal[0] + (p[1] - mid[1]) * normal[1];
    let n = ring.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Voronoi cell of every site inside `bbox`.
///
/// Sites must lie inside the box; coincident sites are first separated with
/// [`jitter_coincident`]. The cells partition the box.
pub fn build_voronoi_regions(sites: &[Point], bbox: &Bbox, seed: u64) -> VoronoiDiagram {
    let mut sites = sites.to_vec();
    jitter_coincident(&mut sites, bbox, seed);
    let cells = (0..sites.len())
        .map(|i| {
            let s = sites[i];
            let mut others: Vec<(f64, usize)> = (0..sites.len())
                .filter(|&j| j != i)
                .map(|j| (dist(s, sites[j]), j))
                .collect();
            others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut ring = bbox.ring();
            let mut reach = ring.iter().map(|&p| dist(p, s)).fold(0.0, f64::max);
            for (d, j) in others {
                if d > 2.0 * reach {
                    break;
                }
                ring = clip_by_bisector(&ring, s, sites[j]);
                reach = ring.iter().map(|&p| dist(p, s)).fold(0.0, f64::max);
            }
            ring
        })
        .collect();
    VoronoiDiagram { sites, cells }
}
