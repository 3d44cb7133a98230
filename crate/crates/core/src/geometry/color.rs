//! Adjacency-aware country coloring over a fixed pastel palette.

use serde::{Deserialize, Serialize};

use super::countries::CountryAdjacency;

/// Palette hues in degrees, ordered so consecutive entries are far apart.
pub const PALETTE_HUES: [f64; 12] = [
    0.0, 180.0, 60.0, 240.0, 120.0, 300.0, 30.0, 210.0, 90.0, 270.0, 150.0, 330.0,
];

pub const SATURATION: f64 = 0.55;
pub const LIGHTNESS: f64 = 0.80;

/// Minimum hue separation between adjacent countries, in degrees.
pub const MIN_SEPARATION: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountryColor {
    pub palette_index: usize,
    pub hex: String,
}

impl CountryColor {
    pub fn from_index(palette_index: usize) -> Self {
        CountryColor { palette_index, hex: palette_hex(palette_index) }
    }

    pub fn hue(&self) -> f64 {
        PALETTE_HUES[self.palette_index]
    }
}

pub fn hue_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// `#rrggbb` of a palette entry.
pub fn palette_hex(index: usize) -> String {
    let (r, g, b) = hsl_to_rgb(PALETTE_HUES[index], SATURATION, LIGHTNESS);
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> (u8, u8, u8) {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let to = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    (to(r1), to(g1), to(b1))
}

/// Greedy coloring, highest degree first. Each country takes the least used
/// palette entry that keeps at least [`MIN_SEPARATION`] from every colored
/// neighbour; if none does, the entry maximizing the smallest neighbour hue
/// distance, preferring entries no neighbour uses. The seed rotates the
/// palette starting point.
pub fn assign_colors(adjacency: &CountryAdjacency, n_countries: usize, seed: u64) -> Vec<CountryColor> {
    let neighbors: Vec<Vec<usize>> = (0..n_countries)
        .map(|c| adjacency.neighbors(c).into_iter().filter(|&d| d < n_countries).collect())
        .collect();
    let mut order: Vec<usize> = (0..n_countries).collect();
    order.sort_by(|&a, &b| neighbors[b].len().cmp(&neighbors[a].len()).then(a.cmp(&b)));

    let k = PALETTE_HUES.len();
    let start = (seed % k as u64) as usize;
    let mut assigned: Vec<Option<usize>> = vec![None; n_countries];
    let mut used = vec![0usize; k];
    for &c in &order {
        let taken: Vec<usize> = neighbors[c].iter().filter_map(|&d| assigned[d]).collect();
        let min_dist = |p: usize| {
            taken
                .iter()
                .map(|&q| hue_distance(PALETTE_HUES[p], PALETTE_HUES[q]))
                .fold(360.0, f64::min)
        };
        let candidates: Vec<usize> = (0..k).map(|i| (start + i) % k).collect();
        let choice = candidates
            .iter()
            .copied()
            .filter(|&p| min_dist(p) >= MIN_SEPARATION)
            .min_by_key(|&p| used[p])
            .unwrap_or_else(|| {
                let mut best = candidates[0];
                let mut best_key = (false, f64::NEG_INFINITY);
                for &p in &candidates {
                    let key = (!taken.contains(&p), min_dist(p));
                    if key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1) {
                        best = p;
                        best_key = key;
                    }
                }
                best
            });
        assigned[c] = Some(choice);
        used[choice] += 1;
    }
    assigned
        .into_iter()
        .map(|p| CountryColor::from_index(p.unwrap_or(start)))
        .collect()
}
