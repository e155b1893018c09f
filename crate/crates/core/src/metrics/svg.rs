//! Minimal standalone SVG emission for loss curves and ROC plots.
//! No external assets; axes, tick labels and polylines only.

use super::roc::RocCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>
"#,
        WIDTH / 2.0
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let x0 = frame.px(frame.x_min);
    let x1 = frame.px(frame.x_max);
    let y0 = frame.py(frame.y_min);
    let y1 = frame.py(frame.y_max);
    s.push_str(&format!(
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>
<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>
"#
    ));
    for i in 0..=4 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 4.0;
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        s.push_str(&format!(
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="10">{:.2}</text>
<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="10">{:.2}</text>
"#,
            frame.px(fx),
            y0 + 16.0,
            fx,
            x0 - 6.0,
            frame.py(fy) + 3.0,
            fy
        ));
    }
    s.push_str(&format!(
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{x_label}</text>
<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">{y_label}</text>
"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    ));
    s
}

fn polyline(frame: &Frame, points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect();
    format!(
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>
"#,
        coords.join(" ")
    )
}

/// Loss curves over epochs: one named series per trace.
pub fn loss_curves_svg(series: &[(&str, Vec<f64>)]) -> String {
    let n_epochs = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, v) in series {
        for &y in v {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !y_min.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let frame = Frame {
        x_min: 1.0,
        x_max: n_epochs.max(2) as f64,
        y_min,
        y_max,
    };
    let colors = ["steelblue", "crimson", "seagreen", "darkorange", "purple"];
    let mut out = header("Training losses");
    out.push_str(&axes(&frame, "epoch", "loss"));
    for (i, (name, values)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let pts: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(e, &y)| ((e + 1) as f64, y))
            .collect();
        out.push_str(&polyline(&frame, &pts, color));
        out.push_str(&format!(
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{name}</text>
"#,
            WIDTH - MARGIN - 150.0,
            40.0 + 14.0 * i as f64
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// ROC plot with the random-classifier diagonal.
pub fn roc_svg(curve: &RocCurve, auc: f64) -> String {
    let frame = Frame {
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut out = header(&format!("ROC curve (AUC = {auc:.3})"));
    out.push_str(&axes(&frame, "false positive rate", "true positive rate"));
    out.push_str(&format!(
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 4"/>
"#,
        frame.px(0.0),
        frame.py(0.0),
        frame.px(1.0),
        frame.py(1.0)
    ));
    out.push_str(&polyline(&frame, &curve.points, "steelblue"));
    out.push_str("</svg>\n");
    out
}
