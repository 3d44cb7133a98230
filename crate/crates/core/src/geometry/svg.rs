use std::fmt::Write;

use super::basemap::BaseMap;
use super::Ring;

pub(crate) fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Fixed three-decimal coordinate, with negative zero printed as zero.
pub(crate) fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn path_data(rings: &[Ring]) -> String {
    let mut d = String::new();
    for ring in rings {
        for (i, p) in ring.iter().enumerate() {
            d.push(if i == 0 { 'M' } else { 'L' });
            let _ = write!(d, "{},{}", num(p[0]), num(p[1]));
        }
        d.push('Z');
    }
    d
}

/// Opening `<svg>` tag sized to the map's bbox.
pub(crate) fn svg_open(map: &BaseMap) -> String {
    let b = &map.bbox;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"{x} {y} {w} {h}\">\n",
        x = num(b.min_x),
        y = num(b.min_y),
        w = num(b.width()),
        h = num(b.height()),
    )
}

/// SVG 1.1 document: a metadata block with the term table, one group per
/// country holding one path per island, then one text element per term.
pub fn render_basemap_svg(map: &BaseMap) -> Vec<u8> {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&svg_open(map));
    let table = serde_json::to_string(&map.term_table()).expect("term table serializes");
    let _ = writeln!(s, "<metadata id=\"mocs-terms\">{}</metadata>", escape_xml(&table));
    s.push_str("<g id=\"countries\" stroke=\"#6b6b6b\" stroke-width=\"0.8\" stroke-linejoin=\"round\">\n");
    for c in &map.countries {
        let _ = writeln!(s, "<g class=\"country\" data-cluster=\"{}\" fill=\"{}\">", c.cluster_id, c.color.hex);
        for island in &c.islands {
            let _ = writeln!(s, "<path fill-rule=\"evenodd\" d=\"{}\"/>", path_data(island));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</g>\n");
    s.push_str("<g id=\"labels\" font-family=\"sans-serif\" text-anchor=\"middle\" fill=\"#222222\">\n");
    for t in &map.terms {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\" dominant-baseline=\"central\">{}</text>",
            num(t.x),
            num(t.y),
            num(t.font_size),
            escape_xml(&t.surface)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(-0.0001), "0.000");
        assert_eq!(num(1.23456), "1.235");
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape_xml("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
