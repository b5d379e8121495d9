//! Static SVG scatter plots, generated directly from polyline and circle
//! primitives on a fixed 800×600 viewBox. No timestamps, so identical inputs
//! produce identical bytes.

struct Panel<'a> {
    title: &'a str,
    points: &'a [(f64, f64)],
}

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = lo.abs().max(1.0) * 1e-3;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn render_panel(panel: &Panel, x0: f64, y0: f64, width: f64, height: f64) -> String {
    let (x_lo, x_hi) = axis_range(panel.points.iter().map(|p| p.0));
    let (y_lo, y_hi) = axis_range(panel.points.iter().map(|p| p.1));
    let map_x = |x: f64| x0 + (x - x_lo) / (x_hi - x_lo) * width;
    let map_y = |y: f64| y0 + height - (y - y_lo) / (y_hi - y_lo) * height;
    let mut body = String::new();
    body.push_str(&format!(
        "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{width:.1}\" height=\"{height:.1}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
    ));
    body.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        x0 + width / 2.0,
        y0 - 8.0,
        panel.title
    ));
    body.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{:.6e}</text>\n",
        x0 - 4.0,
        y0 + height + 14.0,
        x_lo
    ));
    body.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"end\">{:.6e}</text>\n",
        x0 + width,
        y0 + height + 14.0,
        x_hi
    ));
    body.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{:.6e}</text>\n",
        x0,
        y0 - 22.0,
        y_hi
    ));
    body.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\">{:.6e}</text>\n",
        x0,
        y0 + height - 2.0,
        y_lo
    ));
    for (x, y) in panel.points {
        body.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"steelblue\"/>\n",
            map_x(*x),
            map_y(*y)
        ));
    }
    body
}

/// Two-panel scatter: h(T,T) against the sample index and |p| against h(T,T).
pub fn scan_scatter(h_values: &[f64], norms: &[f64]) -> String {
    let by_index: Vec<(f64, f64)> = h_values
        .iter()
        .enumerate()
        .map(|(i, h)| (i as f64, *h))
        .collect();
    let by_norm: Vec<(f64, f64)> = norms
        .iter()
        .zip(h_values)
        .map(|(n, h)| (*h, *n))
        .collect();
    let panels = [
        Panel {
            title: "h_TT vs sample index",
            points: &by_index,
        },
        Panel {
            title: "|p| vs h_TT",
            points: &by_norm,
        },
    ];
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" \
         width=\"800\" height=\"600\">\n<rect width=\"800\" height=\"600\" fill=\"white\"/>\n",
    );
    svg.push_str(&render_panel(&panels[0], 60.0, 60.0, 300.0, 460.0));
    svg.push_str(&render_panel(&panels[1], 450.0, 60.0, 300.0, 460.0));
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let h = vec![1.0, 1.0, 0.5];
        let n = vec![1.0, 1.0, 2.0];
        let a = scan_scatter(&h, &n);
        let b = scan_scatter(&h, &n);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<circle").count(), 6);
    }

    #[test]
    fn constant_series_gets_padded_axes() {
        let h = vec![2.0, 2.0];
        let n = vec![1.0, 1.0];
        let svg = scan_scatter(&h, &n);
        assert!(!svg.contains("NaN"));
    }
}
