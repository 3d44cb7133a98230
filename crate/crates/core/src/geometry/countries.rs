//! Merging Voronoi cells into countries with watertight fractal borders.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{diameter, signed_area, Bbox, Point, Ring};
use crate::error::{CoreError, Result};

/// Unordered pairs of cluster ids that share at least one border segment.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountryAdjacency {
    pairs: BTreeSet<(usize, usize)>,
}

impl CountryAdjacency {
    pub fn new() -> Self {
        Self::default()
    }

    /// Self-pairs are ignored.
    pub fn insert(&mut self, a: usize, b: usize) {
        if a != b {
            self.pairs.insert((a.min(b), a.max(b)));
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a.min(b), a.max(b)))
    }

    /// Pairs with `a < b`, ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        self.pairs
            .iter()
            .filter_map(|&(x, y)| {
                if x == a {
                    Some(y)
                } else if y == a {
                    Some(x)
                } else {
                    None
                }
            })
            .collect()
    }
}

impl FromIterator<(usize, usize)> for CountryAdjacency {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        let mut adj = CountryAdjacency::new();
        for (a, b) in iter {
            adj.insert(a, b);
        }
        adj
    }
}

/// One spatially connected group of same-cluster cells. The first ring is
/// counter-clockwise; enclosed holes, if any, are clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub rings: Vec<Ring>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryGeometry {
    /// Islands per cluster id.
    pub countries: Vec<Vec<Island>>,
    pub adjacency: CountryAdjacency,
    /// Number of border segments that were perturbed.
    pub perturbed_edges: usize,
}

const LEVELS: u32 = 3;
const AMPLITUDE: f64 = 0.15;
const KITE_FRACTION: f64 = 0.5;
const KITE_MARGIN: f64 = 0.9;

struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
}

fn snap_cells(cells: &[Ring], tol: f64) -> Mesh {
    let mut vertices: Vec<Point> = Vec::new();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let key = |p: Point| ((p[0] / tol).floor() as i64, (p[1] / tol).floor() as i64);
    let mut out = Vec::with_capacity(cells.len());
    for ring in cells {
        let mut ids: Vec<usize> = Vec::with_capacity(ring.len());
        for &p in ring {
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                        for &id in list {
                            if super::dist(vertices[id], p) <= tol {
                                found = Some(id);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                grid.entry((kx, ky)).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        while ids.len() > 1 && ids.first() == ids.last() {
            ids.pop();
        }
        out.push(ids);
    }
    Mesh { vertices, cells: out }
}

fn on_bbox_side(a: Point, b: Point, bbox: &Bbox, tol: f64) -> bool {
    let near = |x: f64, y: f64| (x - y).abs() <= tol;
    (near(a[0], bbox.min_x) && near(b[0], bbox.min_x))
        || (near(a[0], bbox.max_x) && near(b[0], bbox.max_x))
        || (near(a[1], bbox.min_y) && near(b[1], bbox.min_y))
        || (near(a[1], bbox.max_y) && near(b[1], bbox.max_y))
}

fn directed_edges(mesh: &Mesh) -> HashMap<(usize, usize), usize> {
    let mut map = HashMap::new();
    for (c, ring) in mesh.cells.iter().enumerate() {
        for i in 0..ring.len() {
            map.insert((ring[i], ring[(i + 1) % ring.len()]), c);
        }
    }
    map
}

/// Splits edges that have another cell's vertex lying on them so that every
/// interior edge has an exact twin.
fn repair_t_junctions(mesh: &mut Mesh, bbox: &Bbox, tol: f64) {
    for _ in 0..3 {
        let edges = directed_edges(mesh);
        let mut changed = false;
        for c in 0..mesh.cells.len() {
            let ring = mesh.cells[c].clone();
            let mut new_ring = Vec::with_capacity(ring.len());
            for i in 0..ring.len() {
                let (u, v) = (ring[i], ring[(i + 1) % ring.len()]);
                new_ring.push(u);
                if edges.contains_key(&(v, u)) {
                    continue;
                }
                let (a, b) = (mesh.vertices[u], mesh.vertices[v]);
                if on_bbox_side(a, b, bbox, tol) {
                    continue;
                }
                let d = [b[0] - a[0], b[1] - a[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let mut inner: Vec<(f64, usize)> = mesh
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(w, _)| w != u && w != v)
                    .filter_map(|(w, p)| {
                        let t = ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2;
                        if t <= 0.0 || t >= 1.0 {
                            return None;
                        }
                        let q = [a[0] + t * d[0], a[1] + t * d[1]];
                        (super::dist(q, *p) <= 4.0 * tol).then_some((t, w))
                    })
                    .collect();
                if !inner.is_empty() {
                    inner.sort_by(|x, y| x.0.total_cmp(&y.0));
                    new_ring.extend(inner.into_iter().map(|(_, w)| w));
                    changed = true;
                }
            }
            mesh.cells[c] = new_ring;
        }
        if !changed {
            return;
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

/// Distance from `m` along `n` until leaving the triangle `(site, a, b)`.
fn cross_section(m: Point, n: Point, site: Point, a: Point, b: Point) -> f64 {
    let mut best = f64::INFINITY;
    for (p, q) in [(site, a), (site, b)] {
        let e = [q[0] - p[0], q[1] - p[1]];
        let det = n[0] * (-e[1]) - n[1] * (-e[0]);
        if det.abs() < 1e-300 {
            continue;
        }
        let r = [p[0] - m[0], p[1] - m[1]];
        let t = (r[0] * (-e[1]) - r[1] * (-e[0])) / det;
        let u = (n[0] * r[1] - n[1] * r[0]) / det;
        if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
            best = best.min(t);
        }
    }
    if best.is_finite() {
        best
    } else {
        0.0
    }
}

/// Interior points of the displaced polyline from `a` to `b`. Offsets are
/// measured along the left normal and bounded by `left` and `right`.
fn displace(a: Point, b: Point, amp: f64, left: f64, right: f64, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let steps = 1usize << LEVELS;
    let mut h = vec![0.0; steps + 1];
    let mut span = steps;
    let mut scale = amp;
    for _ in 0..LEVELS {
        let half = span / 2;
        scale *= 0.5;
        let mut i = half;
        while i < steps {
            h[i] = 0.5 * (h[i - half] + h[i + half]) + scale * rng.gen_range(-1.0..=1.0);
            i += span;
        }
        span = half;
    }
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    let n = [-d[1] / len, d[0] / len];
    (1..steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            let envelope = 1.0 - (2.0 * t - 1.0).abs();
            let off = h[i].clamp(-KITE_MARGIN * right * envelope, KITE_MARGIN * left * envelope);
            [a[0] + t * d[0] + off * n[0], a[1] + t * d[1] + off * n[1]]
        })
        .collect()
}

/// Groups cells by cluster into connected countries, perturbs every border
/// between different groups once, and traces the country outlines.
///
/// `cells` must be counter-clockwise polygons that partition `bbox`, with
/// `sites[i]` strictly inside `cells[i]`. Cluster ids index the result.
pub fn build_countries(
    cells: &[Ring],
    sites: &[Point],
    cluster_ids: &[usize],
    bbox: &Bbox,
    seed: u64,
) -> Result<CountryGeometry> {
    if cells.len() != cluster_ids.len() || cells.len() != sites.len() {
        return Err(CoreError::invalid(
            "cells",
            format!(
                "{} cells, {} sites and {} cluster ids",
                cells.len(),
                sites.len(),
                cluster_ids.len()
            ),
        ));
    }
    let n_clusters = cluster_ids.iter().map(|&c| c + 1).max().unwrap_or(0);
    let tol = 1e-9 * bbox.diagonal().max(f64::MIN_POSITIVE);
    let mut mesh = snap_cells(cells, tol);
    repair_t_junctions(&mut mesh, bbox, tol);
    let edges = directed_edges(&mesh);

    let mut uf = UnionFind((0..cells.len()).collect());
    for (&(u, v), &c) in &edges {
        if let Some(&d) = edges.get(&(v, u)) {
            if cluster_ids[c] == cluster_ids[d] {
                uf.union(c, d);
            }
        }
    }
    let group: Vec<usize> = (0..cells.len()).map(|c| uf.find(c)).collect();
    let cell_diameters: Vec<f64> = cells.iter().map(|c| diameter(c)).collect();

    // Perturb each border between different groups once, oriented from the
    // lower vertex id to the higher one.
    let mut adjacency = CountryAdjacency::new();
    let mut border: BTreeMap<(usize, usize), Vec<Point>> = BTreeMap::new();
    let mut canonical: Vec<(usize, usize, usize, usize)> = edges
        .iter()
        .filter(|(&(u, v), _)| u < v)
        .filter_map(|(&(u, v), &left)| edges.get(&(v, u)).map(|&right| (u, v, left, right)))
        .filter(|&(_, _, l, r)| group[l] != group[r])
        .collect();
    canonical.sort_unstable();
    for (u, v, left, right) in canonical {
        adjacency.insert(cluster_ids[left], cluster_ids[right]);
        let (a, b) = (mesh.vertices[u], mesh.vertices[v]);
        let m = [(a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5];
        let len = super::dist(a, b);
        if len <= tol {
            continue;
        }
        let n = [-(b[1] - a[1]) / len, (b[0] - a[0]) / len];
        let s_left = KITE_FRACTION * cross_section(m, n, sites[left], a, b);
        let s_right = KITE_FRACTION * cross_section(m, [-n[0], -n[1]], sites[right], a, b);
        let amp = AMPLITUDE * cell_diameters[left].min(cell_diameters[right]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((u as u64) << 32) | v as u64);
        border.insert((u, v), displace(a, b, amp, s_left, s_right, &mut rng));
    }
    let perturbed_edges = border.len();

    // Trace outlines per group.
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..cells.len() {
        members.entry(group[c]).or_default().push(c);
    }
    let mut countries: Vec<Vec<Island>> = vec![Vec::new(); n_clusters];
    for (&g, cell_list) in &members {
        let mut outgoing: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &c in cell_list {
            let ring = &mesh.cells[c];
            for i in 0..ring.len() {
                let (u, v) = (ring[i], ring[(i + 1) % ring.len()]);
                let inside = edges.get(&(v, u)).is_some_and(|&d| group[d] == g);
                if !inside {
                    outgoing.entry(u).or_default().push(v);
                    pending.insert((u, v));
                }
            }
        }
        let mut rings: Vec<Ring> = Vec::new();
        while let Some(&(start_u, start_v)) = pending.iter().next() {
            let mut loop_edges = vec![(start_u, start_v)];
            pending.remove(&(start_u, start_v));
            let (mut prev, mut cur) = (start_u, start_v);
            while cur != start_u {
                let incoming = sub(mesh.vertices[cur], mesh.vertices[prev]);
                let next = outgoing
                    .get(&cur)
                    .into_iter()
                    .flatten()
                    .copied()
                    .filter(|&w| pending.contains(&(cur, w)))
                    .max_by(|&w1, &w2| {
                        let t1 = turn(incoming, sub(mesh.vertices[w1], mesh.vertices[cur]));
                        let t2 = turn(incoming, sub(mesh.vertices[w2], mesh.vertices[cur]));
                        t1.total_cmp(&t2).then(w2.cmp(&w1))
                    });
                let Some(next) = next else { break };
                pending.remove(&(cur, next));
                loop_edges.push((cur, next));
                prev = cur;
                cur = next;
            }
            let mut ring = Vec::new();
            for (u, v) in loop_edges {
                ring.push(mesh.vertices[u]);
                if let Some(pts) = border.get(&(u.min(v), u.max(v))) {
                    if u < v {
                        ring.extend_from_slice(pts);
                    } else {
                        ring.extend(pts.iter().rev());
                    }
                }
            }
            rings.push(ring);
        }
        rings.sort_by(|a, b| signed_area(b).total_cmp(&signed_area(a)));
        countries[cluster_ids[g]].push(Island { rings, cells: cell_list.clone() });
    }

    Ok(CountryGeometry { countries, adjacency, perturbed_edges })
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

/// Signed turning angle from direction `a` to direction `b`.
fn turn(a: Point, b: Point) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_voronoi_regions, point_in_rings};
    use rand::Rng;

    fn all_rings(g: &CountryGeometry) -> Vec<Vec<Ring>> {
        g.countries
            .iter()
            .map(|islands| islands.iter().flat_map(|i| i.rings.clone()).collect())
            .collect()
    }

    #[test]
    fn one_cluster_covers_bbox() {
        let b = Bbox::new(0.0, 0.0, 10.0, 10.0);
        let sites = vec![[2.0, 2.0], [8.0, 3.0], [5.0, 8.0], [1.0, 9.0]];
        let v = build_voronoi_regions(&sites, &b, 0);
        let g = build_countries(&v.cells, &v.sites, &[0; 4], &b, 1).unwrap();
        assert_eq!(g.countries.len(), 1);
        assert_eq!(g.countries[0].len(), 1);
        assert_eq!(g.countries[0][0].rings.len(), 1);
        assert!((signed_area(&g.countries[0][0].rings[0]) - 100.0).abs() < 1e-9);
        assert!(g.adjacency.is_empty());
        assert_eq!(g.perturbed_edges, 0);
    }

    #[test]
    fn left_right_split() {
        let b = Bbox::new(0.0, 0.0, 10.0, 10.0);
        let sites = vec![[2.0, 2.0], [2.0, 8.0], [8.0, 2.0], [8.0, 8.0]];
        let v = build_voronoi_regions(&sites, &b, 0);
        let g = build_countries(&v.cells, &v.sites, &[0, 0, 1, 1], &b, 1).unwrap();
        assert_eq!(g.adjacency.pairs().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(g.perturbed_edges, 2);
        let area: f64 = all_rings(&g).iter().flatten().map(|r| signed_area(r)).sum();
        assert!((area - 100.0).abs() < 1e-9);
    }

    #[test]
    fn seeded_and_watertight() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Bbox::new(0.0, 0.0, 100.0, 100.0);
        let sites: Vec<Point> = (0..60)
            .map(|_| [rng.gen_range(5.0..95.0), rng.gen_range(5.0..95.0)])
            .collect();
        let clusters: Vec<usize> = (0..60).map(|_| rng.gen_range(0..5)).collect();
        let v = build_voronoi_regions(&sites, &b, 0);
        let g = build_countries(&v.cells, &v.sites, &clusters, &b, 9).unwrap();
        let again = build_countries(&v.cells, &v.sites, &clusters, &b, 9).unwrap();
        assert_eq!(g.countries, again.countries);
        let rings = all_rings(&g);
        let area: f64 = rings.iter().flatten().map(|r| signed_area(r)).sum();
        assert!((area - b.area()).abs() < 1e-3 * b.area());
        for (s, &c) in v.sites.iter().zip(&clusters) {
            assert!(point_in_rings(*s, &rings[c]));
        }
        for i in 0..40 {
            for j in 0..40 {
                let p = [1.25 + 2.5 * i as f64, 1.25 + 2.5 * j as f64];
                let owners = rings.iter().filter(|r| point_in_rings(p, r)).count();
                assert_eq!(owners, 1, "sample {p:?}");
            }
        }
    }

    #[test]
    fn enclosed_cluster_leaves_hole() {
        let b = Bbox::new(0.0, 0.0, 30.0, 30.0);
        let mut sites = Vec::new();
        let mut clusters = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                sites.push([5.0 + 10.0 * i as f64, 5.0 + 10.0 * j as f64]);
                clusters.push(if i == 1 && j == 1 { 1 } else { 0 });
            }
        }
        let v = build_voronoi_regions(&sites, &b, 0);
        let g = build_countries(&v.cells, &v.sites, &clusters, &b, 2).unwrap();
        assert_eq!(g.countries[0].len(), 1);
        let outer = &g.countries[0][0].rings;
        assert_eq!(outer.len(), 2);
        assert!((signed_area(&outer[0]) - 900.0).abs() < 1e-9);
        assert!(signed_area(&outer[1]) < 0.0);
        assert!(!point_in_rings([15.0, 15.0], outer));
        assert!(point_in_rings([15.0, 15.0], &g.countries[1][0].rings));
    }
}
