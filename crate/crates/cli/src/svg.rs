//! Heatmaps as standalone SVG.

use std::fmt::Write as _;

const CELL: f64 = 28.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 40.0;
const LEGEND_W: f64 = 18.0;
const LOW: (u8, u8, u8) = (247, 251, 255);
const HIGH: (u8, u8, u8) = (8, 48, 107);

/// Color for a value on the linear 0→1 scale.
pub fn color(v: f64) -> String {
    let t = if v.is_finite() {
        v.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mix = |a: u8, b: u8| (f64::from(a) + t * (f64::from(b) - f64::from(a))).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(LOW.0, HIGH.0),
        mix(LOW.1, HIGH.1),
        mix(LOW.2, HIGH.2)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// `values[row][col]` is drawn with row 0 at the top; `x_labels` label the
/// columns and `y_labels` the rows.
pub fn heatmap(
    title: &str,
    x_name: &str,
    y_name: &str,
    x_labels: &[String],
    y_labels: &[String],
    values: &[Vec<f64>],
) -> String {
    let (cols, rows) = (x_labels.len() as f64, y_labels.len() as f64);
    let plot_w = cols * CELL;
    let plot_h = rows * CELL;
    let legend_x = MARGIN_LEFT + plot_w + 30.0;
    let width = legend_x + LEGEND_W + 60.0;
    let height = MARGIN_TOP + plot_h + 60.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        s,
        r#"<text class="title" x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );
    for (r, row) in values.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let x = MARGIN_LEFT + c as f64 * CELL;
            let y = MARGIN_TOP + r as f64 * CELL;
            let _ = writeln!(
                s,
                r#"<rect class="cell" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"><title>{}, {}: {v:.4}</title></rect>"#,
                color(*v),
                escape(&x_labels[c]),
                escape(&y_labels[r])
            );
        }
    }
    for (c, l) in x_labels.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text class="x-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + (c as f64 + 0.5) * CELL,
            MARGIN_TOP + plot_h + 14.0,
            escape(l)
        );
    }
    for (r, l) in y_labels.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text class="y-label" x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            MARGIN_LEFT - 6.0,
            MARGIN_TOP + (r as f64 + 0.5) * CELL,
            escape(l)
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="axis" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        MARGIN_TOP + plot_h + 34.0,
        escape(x_name)
    );
    let _ = writeln!(
        s,
        r#"<text class="axis" x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(y_name)
    );
    let _ = writeln!(
        s,
        r#"<g class="legend"><defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
        color(0.0),
        color(1.0)
    );
    let _ = writeln!(
        s,
        r##"<rect class="legend-bar" x="{legend_x}" y="{MARGIN_TOP}" width="{LEGEND_W}" height="{plot_h}" fill="url(#ramp)" stroke="#444"/>"##
    );
    for (v, label) in [(1.0, "1"), (0.5, "0.5"), (0.0, "0")] {
        let _ = writeln!(
            s,
            r#"<text class="legend-label" x="{}" y="{}" dominant-baseline="middle">{label}</text>"#,
            legend_x + LEGEND_W + 4.0,
            MARGIN_TOP + (1.0 - v) * plot_h
        );
    }
    let _ = writeln!(s, "</g>\n</svg>");
    s
}
