//! Figure presets: each is a command, shared flags and one flag set per
//! curve, run through the same parser as the command line.

use anyhow::{anyhow, bail};
use clap::Parser;

use crate::args::{Cli, Command, FigureArgs};
use crate::plot::{plot_script, PlotSpec};
use crate::run::{run, Output, VERSION};
use crate::table::{Cell, CsvTable};

pub struct Preset {
    pub id: &'static str,
    pub title: &'static str,
    pub command: &'static str,
    pub base: &'static [&'static str],
    pub series: &'static [(&'static str, &'static [&'static str])],
    pub plot: PlotSpec,
}

const BOUNDS_BASE: &[&str] =
    &["--scheme", "st", "--epsilon", "1e-7", "--rate-norm", "capacity", "--sweep", "n:100:2000:20"];

const BOUND_CURVES: PlotSpec = PlotSpec {
    x: "n",
    ys: &["normal_approx", "achievability_asymptotic", "achievability_finite", "converse_finite"],
    xlabel: "blocklength n",
    ylabel: "rate / capacity",
    logy: false,
    hline: None,
};

pub const PRESETS: &[Preset] = &[
    Preset {
        id: "2a",
        title: "Rate bounds, 4x4, 0 dB",
        command: "bounds",
        base: BOUNDS_BASE,
        series: &[("4x4 0dB", &["--tx", "4", "--rx", "4", "--snr-db", "0"])],
        plot: BOUND_CURVES,
    },
    Preset {
        id: "2b",
        title: "Rate bounds, 4x4, 10 dB",
        command: "bounds",
        base: BOUNDS_BASE,
        series: &[("4x4 10dB", &["--tx", "4", "--rx", "4", "--snr-db", "10"])],
        plot: BOUND_CURVES,
    },
    Preset {
        id: "2c",
        title: "Rate bounds, 16x16, 10 dB",
        command: "bounds",
        base: BOUNDS_BASE,
        series: &[("16x16 10dB", &["--tx", "16", "--rx", "16", "--snr-db", "10"])],
        plot: BOUND_CURVES,
    },
    Preset {
        id: "5",
        title: "Ergodic dispersion against DoF",
        command: "ergodic",
        base: &["--snr-db", "10", "--sweep", "m:1:16:16"],
        series: &[("c=1", &["--ratio", "1"]), ("c=2", &["--ratio", "2"]), ("c=4", &["--ratio", "4"])],
        plot: PlotSpec {
            x: "m",
            ys: &["e_dispersion_st", "e_dispersion_td"],
            xlabel: "DoF m",
            ylabel: "expected dispersion (bits^2/use)",
            logy: false,
            hline: None,
        },
    },
    Preset {
        id: "6",
        title: "Average maximal rate per link against SNR",
        command: "ergodic",
        base: &["--ratio", "16", "--blocklength", "100", "--epsilon", "1e-7", "--sweep", "snr-db:0:30:7"],
        series: &[("N=1", &["--rx", "1"]), ("N=2", &["--rx", "2"]), ("N=4", &["--rx", "4"])],
        plot: PlotSpec {
            x: "snr",
            ys: &["rate_st_mc", "rate_td_mc", "rate_st_high_snr", "rate_td_high_snr"],
            xlabel: "SNR (dB)",
            ylabel: "rate per link (bits/use)",
            logy: false,
            hline: None,
        },
    },
    Preset {
        id: "7",
        title: "Per-link rate against blocklength",
        command: "compare",
        base: &["--snr-db", "10", "--epsilon", "1e-7", "--sweep", "n:10:1000:100"],
        series: &[
            ("m=1", &["--tx", "1", "--rx", "1"]),
            ("m=2", &["--tx", "2", "--rx", "2"]),
            ("m=4", &["--tx", "4", "--rx", "4"]),
            ("m=8", &["--tx", "8", "--rx", "8"]),
            ("m=16", &["--tx", "16", "--rx", "16"]),
            ("m=64", &["--tx", "64", "--rx", "64"]),
        ],
        plot: PlotSpec {
            x: "n",
            ys: &["rate_st_per_link", "rate_td_per_link"],
            xlabel: "blocklength n",
            ylabel: "rate per link (bits/use)",
            logy: false,
            hline: Some("shannon_per_link"),
        },
    },
    Preset {
        id: "8",
        title: "Error probability against blocklength, 4x4, 10 dB, 2 bits/use/link",
        command: "compare",
        base: &["--tx", "4", "--rx", "4", "--snr-db", "10", "--per-link-rate", "2", "--sweep", "n:10:400:40"],
        series: &[("4x4", &[])],
        plot: PlotSpec {
            x: "n",
            ys: &["eps_st", "eps_td"],
            xlabel: "blocklength n",
            ylabel: "error probability",
            logy: true,
            hline: None,
        },
    },
];

pub fn preset(id: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.id == id)
}

/// Command line of one curve, with the user's seed and trials appended so
/// they win.
pub fn series_argv(p: &Preset, series: &[&str], seed: Option<u64>, trials: Option<u64>) -> Vec<String> {
    let mut argv: Vec<String> = ["fblmimo", p.command].iter().map(|s| s.to_string()).collect();
    argv.extend(p.base.iter().chain(series).map(|s| s.to_string()));
    if let Some(s) = seed {
        argv.extend(["--seed".into(), s.to_string()]);
    }
    if let Some(t) = trials {
        argv.extend(["--trials".into(), t.to_string()]);
    }
    argv
}

pub fn run_figure(args: &FigureArgs) -> anyhow::Result<Output> {
    let p = preset(&args.id).ok_or_else(|| anyhow!("unknown figure {:?}", args.id))?;
    let mut table = CsvTable::default();
    table.meta("generator", format!("fblmimo {VERSION}"));
    table.meta("figure", p.id);
    table.meta("title", p.title);
    let opt = |v: Option<String>| v.unwrap_or_else(|| "preset".into());
    table.meta("seed", opt(args.seed.map(|s| s.to_string())));
    table.meta("trials", opt(args.trials.map(|t| t.to_string())));
    table.meta("out", args.out.as_ref().map_or("none".into(), |p| p.display().to_string()));
    let mut reasons = Vec::new();
    for (i, (label, extra)) in p.series.iter().enumerate() {
        let argv = series_argv(p, extra, args.seed, args.trials);
        let cli = Cli::try_parse_from(&argv).map_err(|e| anyhow!("preset {}: {e}", p.id))?;
        if matches!(cli.command, Command::Figure(_)) {
            bail!("presets cannot nest");
        }
        let out = run(&cli.command)?;
        table.meta(&format!("series.{i}"), format!("{label} | {}", argv[1..].join(" ")));
        // the series' own resolved inputs, minus the generator and out lines
        for (k, v) in out.table.meta.iter().skip(1).filter(|(k, _)| k != "out") {
            table.meta(&format!("series.{i}.{k}"), v);
        }
        if table.header.is_empty() {
            table.header.push("series".into());
            table.header.extend(out.table.header.iter().cloned());
        }
        for row in out.table.rows {
            let mut full = vec![Cell::from(*label)];
            full.extend(row);
            table.push(full);
        }
        reasons.extend(out.infeasible);
    }
    let infeasible = (reasons.len() == p.series.len()).then(|| reasons.join("; "));
    let plot = Some(plot_script(&table, p, args.out.as_deref()));
    Ok(Output { table, infeasible, plot })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses() {
        for p in PRESETS {
            for (_, s) in p.series {
                let argv = series_argv(p, s, Some(3), Some(10));
                let cli = Cli::try_parse_from(&argv).unwrap();
                assert_eq!(cli.command.name(), p.command);
            }
        }
    }

    #[test]
    fn user_seed_wins() {
        let p = preset("5").unwrap();
        let cli = Cli::try_parse_from(series_argv(p, p.series[0].1, Some(99), None)).unwrap();
        let Command::Ergodic(a) = cli.command else { panic!() };
        assert_eq!((a.seed, a.trials, a.ratio), (99, None, Some(1.0)));
    }
}
