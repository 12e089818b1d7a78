//! Plot emission: machine-readable data always, an SVG rendering alongside.
//!
//! Acceptance and downstream tooling assert on the data files; the SVGs are
//! a convenience and deliberately minimal (no plotting dependency).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};

use sciie_core::align::{CooccurrenceTable, RelationDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    QuantityCurve,
    RelationDistribution,
    CooccurrenceHeatmap,
}

impl std::str::FromStr for PlotKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantity_curve" => Ok(PlotKind::QuantityCurve),
            "relation_distribution" => Ok(PlotKind::RelationDistribution),
            "cooccurrence_heatmap" => Ok(PlotKind::CooccurrenceHeatmap),
            other => bail!("unknown plot kind {other:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuantityPoint {
    pub cap: usize,
    pub series: String,
    pub f1: f64,
}

pub enum PlotInput {
    Quantity(Vec<QuantityPoint>),
    Distribution(RelationDistribution),
    Cooccurrence(Vec<(String, String, CooccurrenceTable)>),
}

/// Write the tabular data and an SVG for one plot kind. Returns the paths
/// written. Empty input is an error and writes nothing.
pub fn emit_plots(input: &PlotInput, kind: PlotKind, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    match (kind, input) {
        (PlotKind::QuantityCurve, PlotInput::Quantity(points)) => {
            if points.is_empty() {
                bail!("no quantity metrics to plot");
            }
            let mut csv = String::from("cap,series,f1\n");
            for p in points {
                writeln!(csv, "{},{},{}", p.cap, p.series, p.f1)?;
            }
            let data = out_dir.join("quantity_curve.csv");
            std::fs::write(&data, csv)?;
            let svg = out_dir.join("quantity_curve.svg");
            std::fs::write(&svg, quantity_svg(points))?;
            Ok(vec![data, svg])
        }
        (PlotKind::RelationDistribution, PlotInput::Distribution(dist)) => {
            if dist.sem.is_empty() && dist.sci.is_empty() {
                bail!("empty relation distribution");
            }
            let mut labels: Vec<&String> = dist.sem.keys().chain(dist.sci.keys()).collect();
            labels.sort();
            labels.dedup();
            let mut csv = String::from("label,sem,sci\n");
            for label in &labels {
                writeln!(
                    csv,
                    "{},{},{}",
                    label,
                    dist.sem.get(*label).copied().unwrap_or(0),
                    dist.sci.get(*label).copied().unwrap_or(0)
                )?;
            }
            let data = out_dir.join("relation_distribution.csv");
            std::fs::write(&data, csv)?;
            let svg = out_dir.join("relation_distribution.svg");
            std::fs::write(&svg, distribution_svg(dist))?;
            Ok(vec![data, svg])
        }
        (PlotKind::CooccurrenceHeatmap, PlotInput::Cooccurrence(tables)) => {
            if tables.is_empty() {
                bail!("no co-occurrence tables to plot");
            }
            let mut written = Vec::new();
            for (perspective, relation, table) in tables {
                let types = table.type_order();
                if types.is_empty() {
                    continue;
                }
                let matrix = table.matrix(relation, &types);
                let stem = format!(
                    "cooccurrence_{perspective}_{}",
                    relation.to_lowercase().replace(['-', ' '], "_")
                );
                let mut csv = String::from("arg1");
                for t in &types {
                    write!(csv, ",{t}")?;
                }
                csv.push('\n');
                for (i, row) in matrix.iter().enumerate() {
                    write!(csv, "{}", types[i])?;
                    for v in row {
                        write!(csv, ",{v:.6}")?;
                    }
                    csv.push('\n');
                }
                let data = out_dir.join(format!("{stem}.csv"));
                std::fs::write(&data, csv)?;
                let svg = out_dir.join(format!("{stem}.svg"));
                std::fs::write(&svg, heatmap_svg(&types, &matrix, relation))?;
                written.push(data);
                written.push(svg);
            }
            if written.is_empty() {
                bail!("co-occurrence tables are all empty");
            }
            Ok(written)
        }
        _ => bail!("plot input does not match kind"),
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;

fn svg_header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    )
}

fn quantity_svg(points: &[QuantityPoint]) -> String {
    let mut svg = svg_header();
    let mut series: Vec<&str> = points.iter().map(|p| p.series.as_str()).collect();
    series.sort();
    series.dedup();
    let caps: Vec<usize> = {
        let mut c: Vec<usize> = points.iter().map(|p| p.cap).collect();
        c.sort();
        c.dedup();
        c
    };
    let (cap_min, cap_max) = (*caps.first().unwrap() as f64, *caps.last().unwrap() as f64);
    let span = (cap_max - cap_min).max(1.0);
    let colors = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];

    for (si, s) in series.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|p| p.series == *s)
            .map(|p| {
                let x = MARGIN + (p.cap as f64 - cap_min) / span * (W - 2.0 * MARGIN);
                let y = H - MARGIN - p.f1.clamp(0.0, 1.0) * (H - 2.0 * MARGIN);
                (x, y)
            })
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
            colors[si % colors.len()],
            path.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n",
            W - MARGIN - 120.0,
            MARGIN + 16.0 * si as f64,
            colors[si % colors.len()],
            s
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MARGIN,
        W - MARGIN,
        H - MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MARGIN
    ));
    svg.push_str("</svg>\n");
    svg
}

fn distribution_svg(dist: &RelationDistribution) -> String {
    let mut svg = svg_header();
    let mut labels: Vec<&String> = dist.sem.keys().chain(dist.sci.keys()).collect();
    labels.sort();
    labels.dedup();
    let max = dist
        .sem
        .values()
        .chain(dist.sci.values())
        .copied()
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let slot = (W - 2.0 * MARGIN) / labels.len() as f64;
    for (i, label) in labels.iter().enumerate() {
        let x0 = MARGIN + i as f64 * slot;
        for (j, (value, color)) in [
            (dist.sem.get(*label).copied().unwrap_or(0), "#1f77b4"),
            (dist.sci.get(*label).copied().unwrap_or(0), "#2ca02c"),
        ]
        .iter()
        .enumerate()
        {
            let h = *value as f64 / max * (H - 2.0 * MARGIN);
            let bw = slot * 0.35;
            svg.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{bw:.1}\" height=\"{h:.1}\" fill=\"{color}\"/>\n",
                x0 + j as f64 * bw,
                H - MARGIN - h
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{label}</text>\n",
            x0 + slot * 0.35,
            H - MARGIN + 14.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn heatmap_svg(types: &[String], matrix: &[Vec<f64>], relation: &str) -> String {
    let mut svg = svg_header();
    let n = types.len() as f64;
    let cell = ((W - 2.0 * MARGIN) / n).min((H - 2.0 * MARGIN) / n);
    let max = matrix
        .iter()
        .flatten()
        .copied()
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let intensity = (v / max * 255.0).round() as u8;
            svg.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" fill=\"rgb({},{},255)\" stroke=\"#ddd\"/>\n",
                MARGIN + j as f64 * cell,
                MARGIN + i as f64 * cell,
                255 - intensity,
                255 - intensity,
            ));
        }
    }
    svg.push_str(&format!(
        "<text x=\"{MARGIN}\" y=\"{:.1}\" font-size=\"12\">{relation}</text>\n",
        MARGIN - 10.0
    ));
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_metrics_error_and_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_plots(
            &PlotInput::Quantity(vec![]),
            PlotKind::QuantityCurve,
            dir.path(),
        );
        assert!(err.is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn quantity_curve_emits_data_and_svg() {
        let dir = tempfile::tempdir().unwrap();
        let points = vec![
            QuantityPoint {
                cap: 400,
                series: "gold".into(),
                f1: 0.2,
            },
            QuantityPoint {
                cap: 800,
                series: "gold".into(),
                f1: 0.3,
            },
            QuantityPoint {
                cap: 400,
                series: "variation".into(),
                f1: 0.25,
            },
            QuantityPoint {
                cap: 800,
                series: "variation".into(),
                f1: 0.31,
            },
        ];
        let written = emit_plots(
            &PlotInput::Quantity(points),
            PlotKind::QuantityCurve,
            dir.path(),
        )
        .unwrap();
        assert_eq!(written.len(), 2);
        let csv = std::fs::read_to_string(&written[0]).unwrap();
        assert!(csv.starts_with("cap,series,f1"));
        assert_eq!(csv.lines().count(), 5);
        let svg = std::fs::read_to_string(&written[1]).unwrap();
        // One polyline per series.
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn distribution_emits_five_labels() {
        let dir = tempfile::tempdir().unwrap();
        let mut dist = RelationDistribution::default();
        for l in ["Usage", "Comparison", "Model", "Part-whole", "Result"] {
            dist.sem.insert(l.into(), 3);
        }
        for l in [
            "Used-for",
            "Compare",
            "Feature-of",
            "Part-of",
            "Evaluate-for",
        ] {
            dist.sci.insert(l.into(), 5);
        }
        let written = emit_plots(
            &PlotInput::Distribution(dist),
            PlotKind::RelationDistribution,
            dir.path(),
        )
        .unwrap();
        let csv = std::fs::read_to_string(&written[0]).unwrap();
        assert_eq!(csv.lines().count(), 11); // header + 10 labels
    }
}
