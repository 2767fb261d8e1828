//! Stable text encodings shared by every command.

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

/// Rounds to 12 significant digits; `-0.0` becomes `0.0`.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn sig12_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(sig12).collect()
}

/// Text form of an already rounded value.
pub fn num(x: f64) -> String {
    format!("{:?}", sig12(x))
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "-".into())
}

/// Joins list values inside a single CSV cell.
pub fn joined(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

/// A command result that can be printed in every output format.
pub trait Render: Serialize {
    /// `key: value` lines printed above the table.
    fn summary(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    fn headers(&self) -> Vec<&'static str>;

    fn rows(&self) -> Vec<Vec<String>>;

    fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                s
            }
            Format::Csv => csv(&self.headers(), &self.rows()),
            Format::Table => {
                let mut s = String::new();
                for (k, v) in self.summary() {
                    s.push_str(&format!("{k}: {v}\n"));
                }
                let rows = self.rows();
                if !rows.is_empty() {
                    if !s.is_empty() {
                        s.push('\n');
                    }
                    s.push_str(&table(&self.headers(), &rows));
                }
                s
            }
        })
    }
}

fn csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = headers.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        let mut l = padded.join("  ").trim_end().to_string();
        l.push('\n');
        l
    };
    let mut s = line(headers.to_vec());
    s.push_str(&line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(|x| x.as_str()).collect()));
    for row in rows {
        s.push_str(&line(row.iter().map(|c| c.as_str()).collect()));
    }
    s
}
