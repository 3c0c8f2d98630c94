//! Minimal SVG rendering of training curves: loss panel on top, accuracy
//! panel below, train solid / validation dashed.

use qnlp::train::EpochRecord;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 220.0;
const MARGIN: f64 = 42.0;

fn polyline(points: &[(f64, f64)], color: &str, dashed: bool) -> String {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { " stroke-dasharray=\"6,4\"" } else { "" };
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash} points=\"{}\"/>",
        coords.join(" ")
    )
}

fn panel(
    records: &[EpochRecord],
    top: f64,
    title: &str,
    train_of: impl Fn(&EpochRecord) -> f64,
    val_of: impl Fn(&EpochRecord) -> f64,
    y_max_hint: Option<f64>,
) -> String {
    let n = records.len().max(2) as f64;
    let values: Vec<f64> = records
        .iter()
        .flat_map(|r| [train_of(r), val_of(r)])
        .filter(|v| v.is_finite())
        .collect();
    let y_max = y_max_hint
        .unwrap_or_else(|| values.iter().copied().fold(f64::MIN, f64::max).max(1e-9) * 1.05);
    let x_of = |epoch: usize| MARGIN + (epoch as f64 - 1.0) / (n - 1.0) * (WIDTH - 2.0 * MARGIN);
    let y_of = |v: f64| top + PANEL_HEIGHT - MARGIN - (v / y_max) * (PANEL_HEIGHT - 2.0 * MARGIN);

    let train: Vec<(f64, f64)> =
        records.iter().map(|r| (x_of(r.epoch), y_of(train_of(r)))).collect();
    let val: Vec<(f64, f64)> = records.iter().map(|r| (x_of(r.epoch), y_of(val_of(r)))).collect();

    let axis_y = top + PANEL_HEIGHT - MARGIN;
    format!(
        concat!(
            "<text x=\"{tx}\" y=\"{ty}\" font-size=\"13\" font-family=\"sans-serif\">{title}",
            " (train solid, val dashed)</text>",
            "<line x1=\"{m}\" y1=\"{ay}\" x2=\"{xe}\" y2=\"{ay}\" stroke=\"#444\"/>",
            "<line x1=\"{m}\" y1=\"{pt}\" x2=\"{m}\" y2=\"{ay}\" stroke=\"#444\"/>",
            "<text x=\"{m}\" y=\"{lby}\" font-size=\"10\" font-family=\"sans-serif\">0</text>",
            "<text x=\"{m}\" y=\"{uby}\" font-size=\"10\" font-family=\"sans-serif\">{ymax:.2}</text>",
            "{train}{val}"
        ),
        tx = MARGIN,
        ty = top + 16.0,
        title = title,
        m = MARGIN,
        ay = axis_y,
        xe = WIDTH - MARGIN,
        pt = top + MARGIN,
        lby = axis_y + 12.0,
        uby = top + MARGIN - 4.0,
        ymax = y_max,
        train = polyline(&train, "#1f77b4", false),
        val = polyline(&val, "#d62728", true),
    )
}

pub fn curves_svg(records: &[EpochRecord]) -> String {
    let height = 2.0 * PANEL_HEIGHT;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {WIDTH} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    if !records.is_empty() {
        svg.push_str(&panel(records, 0.0, "loss", |r| r.train_loss, |r| r.val_loss, None));
        svg.push('\n');
        svg.push_str(&panel(
            records,
            PANEL_HEIGHT,
            "accuracy",
            |r| r.train_acc,
            |r| r.val_acc,
            Some(1.0),
        ));
        svg.push('\n');
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(epoch: usize, loss: f64, acc: f64) -> EpochRecord {
        EpochRecord {
            epoch,
            train_loss: loss,
            val_loss: loss * 1.1,
            train_acc: acc,
            val_acc: acc - 0.05,
            wallclock_s: 0.1,
        }
    }

    #[test]
    fn svg_has_four_series() {
        let records = vec![record(1, 1.0, 0.4), record(2, 0.7, 0.6), record(3, 0.5, 0.8)];
        let svg = curves_svg(&records);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn empty_records_still_valid_svg() {
        let svg = curves_svg(&[]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
    }
}
