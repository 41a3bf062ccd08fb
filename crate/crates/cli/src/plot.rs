//! Self-contained gnuplot scripts: the data is inlined, one block per
//! series, so the script renders without the CSV next to it.

use std::fmt::Write as _;
use std::path::Path;

use crate::presets::Preset;
use crate::table::{Cell, CsvTable};

#[derive(Debug, Clone, Copy)]
pub struct PlotSpec {
    pub x: &'static str,
    pub ys: &'static [&'static str],
    pub xlabel: &'static str,
    pub ylabel: &'static str,
    pub logy: bool,
    /// Column drawn as a horizontal reference (taken from the first row).
    pub hline: Option<&'static str>,
}

pub fn plot_script(table: &CsvTable, p: &Preset, csv: Option<&Path>) -> String {
    let spec = &p.plot;
    let mut s = String::new();
    writeln!(s, "# figure {}: {}", p.id, p.title).unwrap();
    if let Some(path) = csv {
        let png = path.with_extension("png");
        writeln!(s, "set terminal pngcairo size 900,600\nset output '{}'", png.display()).unwrap();
    }
    writeln!(s, "set title \"{}\"", p.title).unwrap();
    writeln!(s, "set xlabel \"{}\"\nset ylabel \"{}\"", spec.xlabel, spec.ylabel).unwrap();
    writeln!(s, "set key outside right\nset grid").unwrap();
    if spec.logy {
        writeln!(s, "set logscale y\nset format y \"10^{{%L}}\"").unwrap();
    }

    let col = |name: &str| table.column(name);
    let value = |row: &[Cell], c: usize| row[c].as_f64().filter(|v| v.is_finite());
    let mut curves = Vec::new();
    let labels: Vec<String> = table
        .rows
        .iter()
        .filter_map(|r| match &r[0] {
            Cell::Text(t) => Some(t.clone()),
            _ => None,
        })
        .fold(Vec::new(), |mut acc, l| {
            if !acc.contains(&l) {
                acc.push(l);
            }
            acc
        });
    if let Some(xc) = col(spec.x) {
        for (si, label) in labels.iter().enumerate() {
            let rows: Vec<&Vec<Cell>> = table.rows.iter().filter(|r| r[0] == Cell::Text(label.clone())).collect();
            for y in spec.ys {
                let Some(yc) = col(y) else { continue };
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter_map(|r| Some((value(r, xc)?, value(r, yc)?)))
                    .filter(|&(_, v)| !spec.logy || v > 0.0)
                    .collect();
                if pts.is_empty() {
                    continue;
                }
                let name = format!("$s{si}_{y}");
                writeln!(s, "{name} << EOD").unwrap();
                for (x, v) in pts {
                    writeln!(s, "{x:e} {v:e}").unwrap();
                }
                writeln!(s, "EOD").unwrap();
                curves.push(format!("{name} using 1:2 with linespoints title \"{label} {y}\""));
            }
        }
    }
    if let Some(h) = spec.hline.and_then(col) {
        if let Some(v) = table.rows.first().and_then(|r| value(r, h)) {
            curves.push(format!("{v:e} with lines dashtype 2 title \"{}\"", spec.hline.unwrap()));
        }
    }
    if curves.is_empty() {
        curves.push("NaN notitle".into());
    }
    writeln!(s, "plot {}", curves.join(", \\\n     ")).unwrap();
    s
}
