//! Deterministic SVG line charts.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::records::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    RewardPerEpisodeAvg100,
    RewardPerEpisode,
    BestFitness,
    BestMeanFitness,
    MeanFitness,
    SpeciesFitness,
    SpeciesDiversity,
}

impl PlotKind {
    pub const ALL: [PlotKind; 7] = [
        PlotKind::RewardPerEpisodeAvg100,
        PlotKind::RewardPerEpisode,
        PlotKind::BestFitness,
        PlotKind::BestMeanFitness,
        PlotKind::MeanFitness,
        PlotKind::SpeciesFitness,
        PlotKind::SpeciesDiversity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::RewardPerEpisodeAvg100 => "reward-per-episode-avg100",
            PlotKind::RewardPerEpisode => "reward-per-episode",
            PlotKind::BestFitness => "best-fitness",
            PlotKind::BestMeanFitness => "best-mean-fitness",
            PlotKind::MeanFitness => "mean-fitness",
            PlotKind::SpeciesFitness => "species-fitness",
            PlotKind::SpeciesDiversity => "species-diversity",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            PlotKind::RewardPerEpisodeAvg100 => "Average Reward per 100 Episodes",
            PlotKind::RewardPerEpisode => "Reward per Episode",
            PlotKind::BestFitness => "Best Fitness over Generations",
            PlotKind::BestMeanFitness => "Best and Mean Fitness over Generations",
            PlotKind::MeanFitness => "Mean Fitness over Generations",
            PlotKind::SpeciesFitness => "Best Fitness per Species",
            PlotKind::SpeciesDiversity => "Species Diversity over Generations",
        }
    }

    /// Columns the source CSV must carry.
    pub fn required_columns(self) -> &'static [&'static str] {
        match self {
            PlotKind::RewardPerEpisodeAvg100 => &["block", "mean_reward"],
            PlotKind::RewardPerEpisode => &["episode", "total_reward"],
            PlotKind::BestFitness => &["generation", "best_fitness"],
            PlotKind::BestMeanFitness => &["generation", "best_fitness", "mean_fitness"],
            PlotKind::MeanFitness => &["generation", "mean_fitness"],
            PlotKind::SpeciesFitness => &["generation", "species_id", "best_fitness"],
            PlotKind::SpeciesDiversity => &["generation", "species_count"],
        }
    }

    fn axes(self) -> (&'static str, &'static str) {
        match self {
            PlotKind::RewardPerEpisodeAvg100 => ("block of 100 episodes", "mean reward"),
            PlotKind::RewardPerEpisode => ("episode", "reward"),
            PlotKind::SpeciesDiversity => ("generation", "species"),
            _ => ("generation", "fitness"),
        }
    }
}

impl FromStr for PlotKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .with_context(|| format!("unknown plot kind {s:?}"))
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn series_for(kind: PlotKind, t: &Table) -> Result<Vec<Series>> {
    for c in kind.required_columns() {
        if !t.headers.iter().any(|h| h == c) {
            bail!("{} needs column {c:?}", kind.name());
        }
    }
    if t.is_empty() {
        bail!("no rows to plot");
    }
    let line = |x: &str, y: &str, label: &str| -> Result<Series> {
        let points = t.numbers(x)?.into_iter().zip(t.numbers(y)?).collect();
        Ok(Series { label: label.into(), points })
    };
    Ok(match kind {
        PlotKind::RewardPerEpisodeAvg100 => vec![line("block", "mean_reward", "mean reward")?],
        PlotKind::RewardPerEpisode => vec![line("episode", "total_reward", "reward")?],
        PlotKind::BestFitness => vec![line("generation", "best_fitness", "best")?],
        PlotKind::MeanFitness => vec![line("generation", "mean_fitness", "mean")?],
        PlotKind::BestMeanFitness => vec![
            line("generation", "best_fitness", "best")?,
            line("generation", "mean_fitness", "mean")?,
        ],
        PlotKind::SpeciesDiversity => vec![line("generation", "species_count", "species")?],
        PlotKind::SpeciesFitness => t
            .grouped("species_id", "generation", "best_fitness")?
            .into_iter()
            .map(|(id, points)| Series { label: format!("species {id}"), points })
            .collect(),
    })
}

const W: f64 = 800.0;
const H: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Renders `kind` from `table` as an SVG document.
pub fn render(kind: PlotKind, table: &Table) -> Result<String> {
    let series = series_for(kind, table)?;
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        if !x.is_finite() || !y.is_finite() {
            bail!("non-finite value in plot data");
        }
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#, W / 2.0, kind.title());
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#ccc"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP,
            TOP + ph,
            TOP + ph + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ccc"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            py + 4.0,
            tick(yv)
        );
    }
    let (xl, yl) = kind.axes();
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xl}</text>"#, LEFT + pw / 2.0, H - 16.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{yl}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 16.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Reads `csv`, renders `kind` and writes the SVG to `out`.
pub fn render_file(kind: PlotKind, csv: &Path, out: &Path) -> Result<()> {
    let table = Table::read(csv)?;
    let svg = render(kind, &table).with_context(|| format!("plotting {}", csv.display()))?;
    std::fs::write(out, svg).with_context(|| format!("writing {}", out.display()))
}

/// Counts the polylines and their points in a rendered chart.
pub fn polyline_sizes(svg: &str) -> Vec<usize> {
    svg.lines()
        .filter_map(|l| l.split("points=\"").nth(1))
        .map(|rest| rest.split('"').next().unwrap_or("").split_whitespace().count())
        .collect()
}
