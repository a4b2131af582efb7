//! Bare-bones SVG line chart: first column on the x axis, one polyline per
//! remaining column.

use std::fmt::Write as _;

use crate::table::Table;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn line_chart(table: &Table, title: &str) -> String {
    let (x0, x1) = range(table.column(0));
    let (y0, y1) = range((1..table.columns.len()).flat_map(|c| table.column(c)));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        W / 2.0,
        MARGIN / 2.0,
        xml(title)
    );
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, H - MARGIN + 16.0),
        (x1, "end", W - MARGIN, H - MARGIN + 16.0),
        (y0, "end", MARGIN - 4.0, H - MARGIN),
        (y1, "end", MARGIN - 4.0, MARGIN + 10.0),
    ] {
        let _ = writeln!(
            s,
            "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\" font-size=\"11\">{v:.3}</text>"
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        W / 2.0,
        H - 12.0,
        xml(&table.columns[0])
    );
    for c in 1..table.columns.len() {
        let color = COLORS[(c - 1) % COLORS.len()];
        let mut pts = String::new();
        for r in &table.rows {
            if r[c].is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", px(r[0]), py(r[c]));
            }
        }
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.trim_end()
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">{}</text>",
            W - MARGIN - 90.0,
            MARGIN + 16.0 * c as f64,
            xml(&table.columns[c])
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_polyline_per_series() {
        let mut t = Table::new(["x", "a", "b"]);
        for i in 0..5 {
            let x = i as f64;
            t.push(vec![x, x * x, -x]);
        }
        let svg = line_chart(&t, "demo <1>");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("demo &lt;1&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
