//! Minimal static SVG plots.

use std::fmt::Write as _;

use tkmerge::DataMatrix;

const W: f64 = 480.0;
const H: f64 = 480.0;
const PAD: f64 = 40.0;
const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"];

pub fn color(label: usize) -> &'static str {
    if label == 0 {
        "#bbbbbb"
    } else {
        PALETTE[(label - 1) % PALETTE.len()]
    }
}

struct Frame {
    lo: (f64, f64),
    hi: (f64, f64),
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-12 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = range(&mut xs.clone());
        let (y0, y1) = range(&mut ys.clone());
        Frame { lo: (x0, y0), hi: (x1, y1) }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = PAD + (x - self.lo.0) / (self.hi.0 - self.lo.0) * (W - 2.0 * PAD);
        let v = H - PAD - (y - self.lo.1) / (self.hi.1 - self.lo.1) * (H - 2.0 * PAD);
        (u, v)
    }
}

fn open(title: &str) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    let _ = writeln!(s, "<text x=\"{}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>", W / 2.0, escape(title));
    let _ = writeln!(
        s,
        "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter of the first two columns coloured by label; trimmed points grey.
pub fn scatter(data: &DataMatrix, labels: &[usize], title: &str) -> String {
    let x = |i: usize| data.row(i)[0];
    let y = |i: usize| if data.p() > 1 { data.row(i)[1] } else { 0.0 };
    let frame = Frame::fit((0..data.n()).map(x), (0..data.n()).map(y));
    let mut s = open(title);
    // trimmed points first so clusters draw on top
    let mut order: Vec<usize> = (0..data.n()).collect();
    order.sort_by_key(|&i| labels[i] != 0);
    for i in order {
        let (u, v) = frame.px(x(i), y(i));
        let _ = writeln!(s, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"2\" fill=\"{}\"/>", color(labels[i]));
    }
    s.push_str("</svg>\n");
    s
}

/// Polyline with point markers; non-finite values break the line.
pub fn line(xs: &[f64], ys: &[f64], xlabel: &str, ylabel: &str) -> String {
    let frame = Frame::fit(xs.iter().copied(), ys.iter().copied().chain([0.0, 1.0]));
    let mut s = open(&format!("{ylabel} by {xlabel}"));
    let mut path = String::new();
    let mut pen_down = false;
    for (&x, &y) in xs.iter().zip(ys) {
        if !y.is_finite() {
            pen_down = false;
            continue;
        }
        let (u, v) = frame.px(x, y);
        let _ = write!(path, "{}{u:.2},{v:.2} ", if pen_down { "L" } else { "M" });
        pen_down = true;
        let _ = writeln!(s, "<circle cx=\"{u:.2}\" cy=\"{v:.2}\" r=\"3\" fill=\"#1f77b4\"/>");
        let _ = writeln!(s, "<text x=\"{u:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{x:.2}</text>", H - PAD + 14.0);
    }
    let _ = writeln!(s, "<path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\"/>", path.trim_end());
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>", W / 2.0, H - 6.0, escape(xlabel));
    s.push_str("</svg>\n");
    s
}
