use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::stats::{mark_best, one_way_anova, percent_spread};
use super::{BenchmarkReport, ReportRow};
use crate::error::{InpaintError, Result};
use crate::metrics::ScoreTriple;

pub const CSV_HEADER: [&str; 8] = ["image", "corruption", "method", "psnr", "ssim", "mse", "wall_time_s", "error"];

/// Shortest round-trip formatting; infinite PSNR is written `inf`.
fn num(v: f64) -> String {
    format!("{v}")
}

/// Header plus one line per row, fields in [`CSV_HEADER`] order. Score
/// fields are empty on error rows, `wall_time_s` is empty when untimed.
pub fn write_csv<W: Write>(report: &BenchmarkReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        let (psnr, ssim, mse, err) = match &r.result {
            Ok(s) => (num(s.psnr), num(s.ssim), num(s.mse), String::new()),
            Err(e) => (String::new(), String::new(), String::new(), e.clone()),
        };
        let time = r.wall_time.map(num).unwrap_or_default();
        w.write_record([&r.image, &r.corruption, &r.method, &psnr, &ssim, &mse, &time, &err])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<BenchmarkReport> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(InpaintError::invalid(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let parse = |k: usize| -> Result<f64> {
            field(k).trim().parse::<f64>().map_err(|_| InpaintError::Config {
                line,
                reason: format!("bad {} value `{}`", CSV_HEADER[k], field(k)),
            })
        };
        let result = if field(7).is_empty() {
            Ok(ScoreTriple {
                psnr: parse(3)?,
                ssim: parse(4)?,
                mse: parse(5)?,
            })
        } else {
            Err(field(7).to_string())
        };
        rows.push(ReportRow {
            image: field(0).to_string(),
            corruption: field(1).to_string(),
            method: field(2).to_string(),
            result,
            wall_time: if field(6).is_empty() { None } else { Some(parse(6)?) },
        });
    }
    Ok(BenchmarkReport { rows })
}

fn bold(text: String, on: bool) -> String {
    if on {
        format!("**{text}**")
    } else {
        text
    }
}

fn spread_cell(values: &[f64]) -> String {
    match percent_spread(values) {
        Ok(s) if s.is_finite() => format!("{s:.2}"),
        _ => "n/a".into(),
    }
}

/// Score table with best-cell marks, per-row spread across methods and a
/// one-way ANOVA per metric with one group per method.
pub fn write_markdown<W: Write>(report: &BenchmarkReport, mut out: W) -> Result<()> {
    let marks = mark_best(report);
    writeln!(out, "# Benchmark report\n")?;
    writeln!(out, "## Scores\n")?;
    writeln!(out, "Bold marks the best PSNR, SSIM and MSE for each image and corruption.\n")?;
    writeln!(out, "| image | corruption | method | PSNR (dB) | SSIM | MSE |")?;
    writeln!(out, "|---|---|---|---:|---:|---:|")?;
    for (r, m) in report.rows.iter().zip(&marks) {
        match &r.result {
            Ok(s) => writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                r.image,
                r.corruption,
                r.method,
                bold(format!("{:.3}", s.psnr), m.psnr),
                bold(format!("{:.5}", s.ssim), m.ssim),
                bold(format!("{:.3}", s.mse), m.mse),
            )?,
            Err(e) => writeln!(out, "| {} | {} | {} | error: {} | | |", r.image, r.corruption, r.method, e.replace('|', "/"))?,
        }
    }

    let mut groups: BTreeMap<(usize, &str, &str), Vec<ScoreTriple>> = BTreeMap::new();
    let mut first_seen: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for (i, r) in report.rows.iter().enumerate() {
        let order = *first_seen.entry((&r.image, &r.corruption)).or_insert(i);
        if let Ok(s) = &r.result {
            groups.entry((order, &r.image, &r.corruption)).or_default().push(*s);
        }
    }
    writeln!(out, "\n## Spread across methods\n")?;
    writeln!(out, "100 * (max - min) / min over the methods of each row.\n")?;
    writeln!(out, "| image | corruption | PSNR % | SSIM % | MSE % |")?;
    writeln!(out, "|---|---|---:|---:|---:|")?;
    for ((_, image, corruption), scores) in &groups {
        let col = |f: fn(&ScoreTriple) -> f64| scores.iter().map(f).collect::<Vec<_>>();
        writeln!(
            out,
            "| {image} | {corruption} | {} | {} | {} |",
            spread_cell(&col(|s| s.psnr)),
            spread_cell(&col(|s| s.ssim)),
            spread_cell(&col(|s| s.mse)),
        )?;
    }

    let mut by_method: Vec<(&str, Vec<ScoreTriple>)> = Vec::new();
    for r in &report.rows {
        if let Ok(s) = &r.result {
            match by_method.iter_mut().find(|(m, _)| *m == r.method) {
                Some((_, v)) => v.push(*s),
                None => by_method.push((&r.method, vec![*s])),
            }
        }
    }
    writeln!(out, "\n## One-way ANOVA across methods\n")?;
    writeln!(out, "| metric | F | df | p |")?;
    writeln!(out, "|---|---:|---:|---:|")?;
    let metrics: [(&str, fn(&ScoreTriple) -> f64); 3] = [("PSNR", |s| s.psnr), ("SSIM", |s| s.ssim), ("MSE", |s| s.mse)];
    for (name, f) in metrics {
        let groups: Vec<Vec<f64>> = by_method.iter().map(|(_, v)| v.iter().map(f).collect()).collect();
        match one_way_anova(&groups) {
            Ok(a) => writeln!(out, "| {name} | {:.4} | {}, {} | {:.4} |", a.f_stat, a.df_between, a.df_within, a.p_value)?,
            Err(_) => writeln!(out, "| {name} | n/a | | |")?,
        }
    }
    let failures = report.failures();
    if failures > 0 {
        writeln!(out, "\n{failures} case(s) failed; see the error cells above.")?;
    }
    Ok(())
}
