//! Separability curves per problem, as tab-separated data files and SVG
//! line charts rendered from them.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiment::{accumulate_separability, average_by_x, ExperimentRecord};
use crate::generators::ProblemKind;
use crate::relief::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMode {
    /// Mean separability at each total attribute count.
    Separability,
    /// Running sum of the mean separabilities.
    Accumulated,
}

impl PlotMode {
    pub fn name(&self) -> &'static str {
        match self {
            PlotMode::Separability => "separability",
            PlotMode::Accumulated => "accumulated",
        }
    }
}

impl FromStr for PlotMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separability" => Ok(PlotMode::Separability),
            "accumulated" => Ok(PlotMode::Accumulated),
            other => Err(Error::InvalidConfig(format!("unknown plot mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub algorithm: Variant,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub problem: ProblemKind,
    pub mode: PlotMode,
    pub curves: Vec<Curve>,
}

/// One curve per algorithm present in `records` for `problem`; x is the
/// total attribute count.
pub fn plot_data(records: &[ExperimentRecord], problem: ProblemKind, mode: PlotMode) -> Result<PlotData> {
    let selected: Vec<&ExperimentRecord> = records.iter().filter(|r| r.problem == problem).collect();
    if selected.is_empty() {
        return Err(Error::EmptyInput("no records match the problem filter"));
    }
    let mut curves = Vec::new();
    for algorithm in Variant::ALL {
        let pts: Vec<(usize, f64)> = selected
            .iter()
            .filter(|r| r.algorithm == algorithm)
            .map(|r| (r.total_attributes(), r.separability))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let reduced = match mode {
            PlotMode::Separability => average_by_x(&pts),
            PlotMode::Accumulated => accumulate_separability(&pts).unwrap_or_default(),
        };
        curves.push(Curve {
            algorithm,
            points: reduced.into_iter().map(|(x, y)| (x as f64, y)).collect(),
        });
    }
    Ok(PlotData {
        problem,
        mode,
        curves,
    })
}

impl PlotData {
    /// `# problem\tmode` line, then `algorithm\tx\ty` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\t{}\nalgorithm\tx\ty\n", self.problem, self.mode.name());
        for c in &self.curves {
            for (x, y) in &c.points {
                let _ = writeln!(out, "{}\t{x}\t{y}", c.algorithm);
            }
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let bad = |msg: &str| Error::Malformed(format!("plot data: {msg}"));
        let first = lines.next().ok_or_else(|| bad("empty file"))?;
        let (problem, mode) = first
            .strip_prefix("# ")
            .and_then(|rest| rest.split_once('\t'))
            .ok_or_else(|| bad("missing title line"))?;
        let problem: ProblemKind = problem.parse()?;
        let mode: PlotMode = mode.parse()?;
        if lines.next() != Some("algorithm\tx\ty") {
            return Err(bad("missing column header"));
        }
        let mut curves: Vec<Curve> = Vec::new();
        for line in lines {
            let mut parts = line.split('\t');
            let (Some(a), Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("expected three columns"));
            };
            let algorithm: Variant = a.parse()?;
            let x: f64 = x.parse().map_err(|_| bad("bad x"))?;
            let y: f64 = y.parse().map_err(|_| bad("bad y"))?;
            match curves.iter_mut().find(|c| c.algorithm == algorithm) {
                Some(c) => c.points.push((x, y)),
                None => curves.push(Curve {
                    algorithm,
                    points: vec![(x, y)],
                }),
            }
        }
        Ok(PlotData {
            problem,
            mode,
            curves,
        })
    }
}

const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|i| i as f64 * step).collect()
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

pub fn render_svg(data: &PlotData, width: u32, height: u32) -> String {
    let (w, h) = (width as f64, height as f64);
    let (left, right, top, bottom) = (70.0, 130.0, 40.0, 50.0);
    let pw = (w - left - right).max(10.0);
    let ph = (h - top - bottom).max(10.0);
    let all = || data.curves.iter().flat_map(|c| c.points.iter());
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = bounds(all().map(|p| p.1).chain(std::iter::once(0.0)));
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let y_label = match data.mode {
        PlotMode::Separability => "separability",
        PlotMode::Accumulated => "accumulated separability",
    };
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}: {y_label}</text>"#,
        left + pw / 2.0,
        data.problem
    );

    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            top,
            top + ph,
            top + ph + 16.0,
            format_tick(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0,
            format_tick(t)
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(
            s,
            r##"<line x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
            left + pw
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#333"/>"##
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">total attributes</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">{y_label}</text>"#,
        top + ph / 2.0
    );

    for (i, c) in data.curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            display_name(c.algorithm)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(t: f64) -> String {
    let r = (t * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn display_name(v: Variant) -> &'static str {
    match v {
        Variant::Relief => "Relief",
        Variant::Relieved => "Relieved",
        Variant::ReliefF => "ReliefF",
        Variant::DReliefF => "dReliefF",
        Variant::PdReliefF => "pdReliefF",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relief::WeightVector;

    fn rec(problem: ProblemKind, algorithm: Variant, n_rel: usize, n_irr: usize, s: f64) -> ExperimentRecord {
        ExperimentRecord {
            problem,
            algorithm,
            n_relevant: n_rel,
            n_irrelevant: n_irr,
            iteration: 1,
            seed: 0,
            separability: s,
            wall_time_ms: 0.0,
            weights: WeightVector(vec![]),
        }
    }

    fn toy() -> Vec<ExperimentRecord> {
        use ProblemKind::MajorityN as P;
        vec![
            rec(P, Variant::ReliefF, 1, 1, 0.5),
            rec(P, Variant::ReliefF, 1, 2, 0.25),
            rec(P, Variant::ReliefF, 2, 1, -0.75),
            rec(P, Variant::DReliefF, 1, 1, 0.1),
            rec(P, Variant::DReliefF, 1, 2, f64::NAN),
        ]
    }

    #[test]
    fn separability_mode_averages_shared_x() {
        let d = plot_data(&toy(), ProblemKind::MajorityN, PlotMode::Separability).unwrap();
        assert_eq!(d.curves.len(), 2);
        let relieff = &d.curves[0];
        assert_eq!(relieff.algorithm, Variant::ReliefF);
        // x=3 holds 0.25 and -0.75.
        assert_eq!(relieff.points, vec![(2.0, 0.5), (3.0, -0.25)]);
        assert_eq!(d.curves[1].points, vec![(2.0, 0.1)]);
    }

    #[test]
    fn accumulated_mode() {
        let d = plot_data(&toy(), ProblemKind::MajorityN, PlotMode::Accumulated).unwrap();
        assert_eq!(d.curves[0].points, vec![(2.0, 0.5), (3.0, 0.25)]);
    }

    #[test]
    fn empty_filter_is_an_error() {
        assert!(plot_data(&toy(), ProblemKind::ModuloP, PlotMode::Separability).is_err());
    }

    #[test]
    fn tsv_round_trip_renders_identically() {
        let d = plot_data(&toy(), ProblemKind::MajorityN, PlotMode::Separability).unwrap();
        let back = PlotData::from_tsv(&d.to_tsv()).unwrap();
        assert_eq!(back, d);
        assert_eq!(render_svg(&back, 640, 400), render_svg(&d, 640, 400));
    }

    #[test]
    fn svg_has_one_polyline_per_curve() {
        let d = plot_data(&toy(), ProblemKind::MajorityN, PlotMode::Separability).unwrap();
        let svg = render_svg(&d, 640, 400);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("ReliefF") && svg.contains("dReliefF"));
    }

    #[test]
    fn tsv_parse_errors() {
        for text in [
            "",
            "majority-n\tseparability\n",
            "# majority-n\tseparability\nwrong\n",
            "# majority-n\tseparability\nalgorithm\tx\ty\nrelieff\t1\n",
            "# majority-n\tbogus\nalgorithm\tx\ty\n",
            "# majority-n\tseparability\nalgorithm\tx\ty\nrelieff\t1\tz\n",
        ] {
            assert!(PlotData::from_tsv(text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn tick_values_are_round() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(2.0, 30.0), vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
    }
}
