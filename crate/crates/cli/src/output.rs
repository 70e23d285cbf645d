//! Artifact writing: CSV tables, the run manifest, optional SVG plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("GRAPHON_LDP_VERSION");

pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
    seeds: BTreeMap<String, Vec<u64>>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a ExperimentConfig,
    seeds: &'a BTreeMap<String, Vec<u64>>,
    files: Vec<&'a str>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new(), seeds: BTreeMap::new() })
    }

    pub fn record_seeds(&mut self, role: &str, seeds: impl IntoIterator<Item = u64>) {
        let entry = self.seeds.entry(role.to_string()).or_default();
        entry.extend(seeds);
        entry.sort_unstable();
        entry.dedup();
    }

    pub fn text(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::Io(parent.to_path_buf(), e))?;
        }
        fs::write(&path, content).map_err(|e| CliError::Io(path.clone(), e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let io = |e: csv::Error| CliError::Io(path.clone(), std::io::Error::other(e));
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| io(e.into_error().into()))?;
        self.text(name, &String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Line plot of one or more `(x, y)` series; non-finite points are dropped.
    pub fn svg(&mut self, name: &str, x_label: &str, y_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> Result<(), CliError> {
        self.text(name, &line_plot(x_label, y_label, series))
    }

    pub fn finish(self, command: &str, config: &ExperimentConfig) -> Result<PathBuf, CliError> {
        let mut files: Vec<&str> = self.files.iter().map(String::as_str).collect();
        files.sort_unstable();
        let manifest = Manifest { command, version: VERSION, config, seeds: &self.seeds, files };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let path = self.dir.join("manifest.json");
        fs::write(&path, json + "\n").map_err(|e| CliError::Io(path.clone(), e))?;
        Ok(path)
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn line_plot(x_label: &str, y_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let pts = series.iter().flat_map(|(_, p)| p.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {} H{} M{PAD} {} V{PAD}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{y_label}</text>"#, H / 2.0, H / 2.0);
    for (v, anchor, x, y) in [(x0, "start", sx(x0), H - PAD + 18.0), (x1, "end", sx(x1), H - PAD + 18.0)] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.4}</text>"#);
    }
    for (v, y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{v:.4}</text>"#, PAD - 6.0);
    }
    for (k, (name, points)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="2"/>"#, path.join(" "));
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#, W - PAD + 5.0 - 120.0, PAD + 16.0 * k as f64);
    }
    s.push_str("</svg>\n");
    s
}
