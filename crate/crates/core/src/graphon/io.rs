//! Graphon CSV files: `graphon,n,<n>,bound,<B>` followed by `n` rows.

use std::fmt::Write as _;
use std::path::Path;

use super::step::StepGraphon;
use crate::error::{Error, Result};

pub(crate) fn parse_header<'a>(line: &'a str, tag: &str) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.trim().split(',').map(str::trim).collect();
    if fields.first() != Some(&tag) {
        return Err(Error::Parse(format!("expected '{tag}' header, got '{line}'")));
    }
    Ok(fields)
}

/// Value following `key` in a `key,value,...` header.
pub(crate) fn header_value<T: std::str::FromStr>(fields: &[&str], key: &str) -> Result<T> {
    fields
        .iter()
        .position(|f| *f == key)
        .and_then(|i| fields.get(i + 1))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("header is missing a valid '{key}' field")))
}

pub(crate) fn parse_row(line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad value '{v}'")))
        })
        .collect()
}

pub fn graphon_to_csv(g: &StepGraphon) -> String {
    let n = g.resolution();
    let mut out = format!("graphon,n,{n},bound,{}\n", g.bound());
    for i in 0..n {
        let row: Vec<String> = g.row(i).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn graphon_from_csv(text: &str) -> Result<StepGraphon> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty graphon file".into()))?;
    let fields = parse_header(header, "graphon")?;
    let n: usize = header_value(&fields, "n")?;
    let bound: f64 = header_value(&fields, "bound")?;
    let mut values = Vec::with_capacity(n * n);
    for (k, line) in lines.enumerate() {
        let row = parse_row(line)?;
        if row.len() != n || k >= n {
            return Err(Error::Parse(format!("graphon row {} has the wrong shape", k + 1)));
        }
        values.extend(row);
    }
    if values.len() != n * n {
        return Err(Error::Parse(format!("expected {n} graphon rows")));
    }
    StepGraphon::new(n, values, bound)
}

pub fn read_graphon(path: &Path) -> Result<StepGraphon> {
    graphon_from_csv(&std::fs::read_to_string(path)?)
}

pub fn write_graphon(path: &Path, g: &StepGraphon) -> Result<()> {
    Ok(std::fs::write(path, graphon_to_csv(g))?)
}
