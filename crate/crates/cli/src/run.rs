//! Sweep orchestration: one CSV row per sweep point (and scheme).

use anyhow::{anyhow, bail, Context};
use fblmimo::bounds::{
    achievability_asymptotic, achievability_finite, converse_finite, na_validity, normal_approx_rate,
};
use fblmimo::channel::{sample_channel, ChannelRealization, OperatingPoint, SystemConfig};
use fblmimo::compare::{
    compare_point, error_probability, mc_error_probability, normalized_rate, solve_exchange, SolveFor,
};
use fblmimo::ergodic::{ergodic_report_with_rates, high_snr_rate, wishart_inverse_trace, wishart_inverse_trace_mc};
use fblmimo::info_density::{scheme_stats, Scheme};
use fblmimo::math::{db_to_linear, linear_to_db, RngState};
use fblmimo::{Error, LOG2_E};
use rayon::prelude::*;

use crate::args::{Command, CommonArgs, RateNorm, SolveArg, SweepVar};
use crate::table::{Cell, CsvTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A finished run.
#[derive(Debug, Clone)]
pub struct Output {
    pub table: CsvTable,
    /// Set when no sweep point produced a usable result; carries the reason.
    pub infeasible: Option<String>,
    /// Plot script for figure presets.
    pub plot: Option<String>,
}

/// One fully resolved sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    tx: usize,
    rx: usize,
    snr: f64,
    n: u64,
    epsilon: f64,
    rate: f64,
}

impl Point {
    fn cfg(&self) -> anyhow::Result<SystemConfig> {
        Ok(SystemConfig::new(self.tx, self.rx, self.snr)?)
    }

    fn op(&self) -> anyhow::Result<OperatingPoint> {
        Ok(OperatingPoint::new(self.n, self.epsilon)?)
    }
}

fn tx_for(args: &CommonArgs, rx: usize) -> anyhow::Result<usize> {
    match args.ratio {
        None => Ok(args.tx),
        Some(c) if c > 0.0 && c.is_finite() => Ok(((c * rx as f64).round() as usize).max(1)),
        Some(c) => bail!("--ratio must be positive, got {c}"),
    }
}

fn points(args: &CommonArgs) -> anyhow::Result<Vec<Point>> {
    let base = Point {
        tx: tx_for(args, args.rx)?,
        rx: args.rx,
        snr: db_to_linear(args.snr_db),
        n: args.blocklength,
        epsilon: args.epsilon,
        rate: args.per_link_rate,
    };
    let Some(sweep) = args.sweep else {
        return Ok(vec![base]);
    };
    let count = |v: f64, what: &str| -> anyhow::Result<usize> {
        if v >= 1.0 {
            Ok(v as usize)
        } else {
            bail!("swept {what} must be at least 1, got {v}")
        }
    };
    sweep
        .values()
        .into_iter()
        .map(|v| {
            let mut p = base;
            match sweep.var {
                SweepVar::Blocklength => p.n = count(v, "blocklength")? as u64,
                SweepVar::Epsilon => p.epsilon = v,
                SweepVar::SnrDb => p.snr = db_to_linear(v),
                SweepVar::Snr => p.snr = v,
                SweepVar::Tx => p.tx = count(v, "tx")?,
                SweepVar::Rx => {
                    p.rx = count(v, "rx")?;
                    p.tx = tx_for(args, p.rx)?;
                }
                SweepVar::Dof => {
                    p.rx = count(v, "m")?;
                    p.tx = if args.ratio.is_some() { tx_for(args, p.rx)? } else { p.rx };
                }
                SweepVar::Rate => p.rate = v,
            }
            Ok(p)
        })
        .collect()
}

fn default_trials(cmd: &str) -> u64 {
    match cmd {
        "ergodic" => 10_000,
        "wishart-check" => 200_000,
        _ => 0,
    }
}

/// Echoes every input into the preamble. `--workers` is left out on
/// purpose: it never affects the numbers, and the files must not differ.
fn preamble(table: &mut CsvTable, cmd: &str, args: &CommonArgs, trials: u64) {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
    table.meta("generator", format!("fblmimo {VERSION}"));
    table.meta("command", cmd);
    table.meta("tx", args.tx);
    table.meta("rx", args.rx);
    table.meta("ratio", opt(args.ratio.map(|c| c.to_string())));
    table.meta("snr_db", args.snr_db);
    table.meta("blocklength", args.blocklength);
    table.meta("epsilon", args.epsilon);
    table.meta("per_link_rate", args.per_link_rate);
    table.meta("sweep", opt(args.sweep.map(|s| s.to_string())));
    table.meta("trials", trials);
    table.meta("seed", args.seed);
    table.meta("delta", args.delta);
    table.meta("kappa_policy", args.kappa_policy);
    table.meta("scheme", format!("{:?}", args.scheme).to_lowercase());
    table.meta("rate_norm", format!("{:?}", args.rate_norm).to_lowercase());
    table.meta(
        "eigenvalues",
        opt(args.eigenvalues.as_ref().map(|e| e.iter().map(f64::to_string).collect::<Vec<_>>().join(";"))),
    );
    table.meta("solve_for", format!("{:?}", args.solve_for).to_lowercase());
    table.meta("match_td", opt(args.match_td.map(|n| n.to_string())));
    table.meta("out", opt(args.out.as_ref().map(|p| p.display().to_string())));
}

pub fn run(cmd: &Command) -> anyhow::Result<Output> {
    let (name, args) = match cmd {
        Command::Figure(f) => return crate::presets::run_figure(f),
        Command::Bounds(a)
        | Command::Ergodic(a)
        | Command::Compare(a)
        | Command::Exchange(a)
        | Command::WishartCheck(a) => (cmd.name(), a),
    };
    let trials = args.trials.unwrap_or_else(|| default_trials(name));
    let pts = points(args)?;
    let (mut table, infeasible) = match cmd {
        Command::Bounds(_) => bounds(args, &pts)?,
        Command::Ergodic(_) => ergodic(args, &pts, trials)?,
        Command::Compare(_) => compare(args, &pts, trials)?,
        Command::Exchange(_) => exchange(args, &pts)?,
        Command::WishartCheck(_) => wishart(args, &pts, trials)?,
        Command::Figure(_) => unreachable!(),
    };
    let mut full = CsvTable::new(&[]);
    preamble(&mut full, name, args, trials);
    full.meta.append(&mut table.meta);
    table.meta = full.meta;
    Ok(Output { table, infeasible, plot: None })
}

fn rows_in_order<F>(pts: &[Point], f: F) -> anyhow::Result<Vec<Vec<Vec<Cell>>>>
where
    F: Fn(&Point) -> anyhow::Result<Vec<Vec<Cell>>> + Sync + Send,
{
    pts.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}

fn bounds(args: &CommonArgs, pts: &[Point]) -> anyhow::Result<(CsvTable, Option<String>)> {
    let unit = match args.rate_norm {
        RateNorm::None => "bits/use",
        RateNorm::Capacity => "fraction of capacity",
    };
    let rate_cols: Vec<String> =
        ["normal_approx", "achievability_asymptotic", "achievability_finite", "converse_finite"]
            .iter()
            .map(|c| format!("{c} ({unit})"))
            .collect();
    let mut header = vec![
        "n (channel uses)",
        "epsilon (probability)",
        "snr (dB)",
        "tx (antennas)",
        "rx (antennas)",
        "m (links)",
        "scheme",
        "capacity (bits/use)",
        "dispersion (bits^2/use)",
        "third_abs_moment (bits^3/use)",
        "berry_esseen (1)",
    ];
    header.extend(rate_cols.iter().map(String::as_str));
    header.extend([
        "achievability_feasible (bool)",
        "converse_feasible (bool)",
        "berry_esseen_ratio (1)",
        "dominance_ratio (1)",
    ]);
    let mut table = CsvTable::new(&header);

    let rows = rows_in_order(pts, |p| {
        let cfg = p.cfg()?;
        let op = p.op()?;
        let ch = match &args.eigenvalues {
            Some(e) => ChannelRealization::from_eigenvalues(&cfg, e).context("--eigenvalues")?,
            None => sample_channel(&cfg, RngState::new(args.seed, 0)),
        };
        let mut rows = Vec::new();
        for &scheme in args.scheme.schemes() {
            let s = scheme_stats(&ch, &cfg, scheme)?;
            let scale = match args.rate_norm {
                RateNorm::None => 1.0,
                RateNorm::Capacity if s.capacity > 0.0 => s.capacity,
                RateNorm::Capacity => bail!("cannot normalize by a zero capacity"),
            };
            let na = normal_approx_rate(&s, &op);
            let asym = achievability_asymptotic(&s, &op);
            let ach = achievability_finite(&s, &op, args.kappa_policy.0);
            let conv = converse_finite(&s, &op, args.delta)?;
            let valid = na_validity(&s, &op);
            let shown =
                |r: &fblmimo::bounds::RatePoint| Cell::Float(if r.feasible { r.rate / scale } else { f64::NAN });
            rows.push(vec![
                p.n.into(),
                p.epsilon.into(),
                linear_to_db(p.snr).into(),
                p.tx.into(),
                p.rx.into(),
                cfg.dof().into(),
                scheme.label().into(),
                s.capacity.into(),
                s.dispersion.into(),
                s.third_abs_moment.into(),
                s.berry_esseen().into(),
                shown(&na),
                shown(&asym),
                shown(&ach),
                shown(&conv),
                ach.feasible.into(),
                conv.feasible.into(),
                valid.berry_esseen_ratio.into(),
                valid.dominance_ratio.into(),
            ]);
        }
        Ok(rows)
    })?;
    let mut any_feasible = false;
    let (af, cf) = (table.column("achievability_feasible").unwrap(), table.column("converse_feasible").unwrap());
    for row in rows.into_iter().flatten() {
        any_feasible |= row[af] == Cell::Int(1) || row[cf] == Cell::Int(1);
        table.push(row);
    }
    let infeasible = (!any_feasible).then(|| {
        "no sweep point admits a finite achievability or converse bound (epsilon too small for these blocklengths)"
            .to_string()
    });
    Ok((table, infeasible))
}

fn ergodic(_args: &CommonArgs, pts: &[Point], trials: u64) -> anyhow::Result<(CsvTable, Option<String>)> {
    let mut table = CsvTable::new(&[
        "snr (dB)",
        "tx (antennas)",
        "rx (antennas)",
        "m (links)",
        "n (channel uses)",
        "epsilon (probability)",
        "e_capacity (bits/use)",
        "e_capacity_se (bits/use)",
        "e_dispersion_st (bits^2/use)",
        "e_dispersion_st_se (bits^2/use)",
        "var_dispersion_st (bits^4/use^2)",
        "var_dispersion_st_se (bits^4/use^2)",
        "e_sqrt_dispersion_td (bits/use)",
        "e_sqrt_dispersion_td_se (bits/use)",
        "e_dispersion_td (bits^2/use)",
        "e_dispersion_td_se (bits^2/use)",
        "taylor_sqrt_dispersion_td (bits/use)",
        "taylor_sqrt_dispersion_td_se (bits/use)",
        "wishart_sqrt_dispersion_td (bits/use)",
        "high_snr_capacity (bits/use)",
        "high_snr_dispersion_st (bits^2/use)",
        "high_snr_sqrt_dispersion_td (bits/use)",
        "high_snr_dispersion_td (bits^2/use)",
        "rate_st_mc (bits/use/link)",
        "rate_st_mc_se (bits/use/link)",
        "rate_td_mc (bits/use/link)",
        "rate_td_mc_se (bits/use/link)",
        "rate_st_high_snr (bits/use/link)",
        "rate_td_high_snr (bits/use/link)",
    ]);
    let seed = _args.seed;
    // points run one after another; the trials inside each use the pool
    for p in pts {
        let cfg = p.cfg()?;
        let op = p.op()?;
        let (r, st, td) = ergodic_report_with_rates(&cfg, &op, trials, seed)?;
        let m = cfg.dof() as f64;
        table.push(vec![
            linear_to_db(p.snr).into(),
            p.tx.into(),
            p.rx.into(),
            cfg.dof().into(),
            p.n.into(),
            p.epsilon.into(),
            r.e_capacity.mean.into(),
            r.e_capacity.std_error.into(),
            r.e_dispersion_st.mean.into(),
            r.e_dispersion_st.std_error.into(),
            r.var_dispersion_st.mean.into(),
            r.var_dispersion_st.std_error.into(),
            r.e_sqrt_dispersion_td.mean.into(),
            r.e_sqrt_dispersion_td.std_error.into(),
            r.e_dispersion_td.mean.into(),
            r.e_dispersion_td.std_error.into(),
            r.e_sqrt_dispersion_td_taylor.mean.into(),
            r.e_sqrt_dispersion_td_taylor.std_error.into(),
            r.sqrt_dispersion_td_wishart.unwrap_or(f64::NAN).into(),
            r.high_snr_capacity.into(),
            r.high_snr_dispersion_st.into(),
            r.high_snr_sqrt_dispersion_td.into(),
            (m * LOG2_E).powi(2).into(),
            (st.mean / m).into(),
            (st.std_error / m).into(),
            (td.mean / m).into(),
            (td.std_error / m).into(),
            (high_snr_rate(&cfg, &op, Scheme::Spatiotemporal) / m).into(),
            (high_snr_rate(&cfg, &op, Scheme::TimeDomain) / m).into(),
        ]);
    }
    Ok((table, None))
}

fn compare(args: &CommonArgs, pts: &[Point], trials: u64) -> anyhow::Result<(CsvTable, Option<String>)> {
    let mut header = vec![
        "n (channel uses)",
        "m (links)",
        "snr (dB)",
        "per_link_rate (bits/use/link)",
        "delta (bits/use/link)",
        "eps_st (probability)",
        "ln_eps_st (nats)",
        "eps_td (probability)",
        "ln_eps_td (nats)",
        "above_capacity (bool)",
        "epsilon (probability)",
        "rate_st_per_link (bits/use/link)",
        "rate_td_per_link (bits/use/link)",
        "shannon_per_link (bits/use/link)",
    ];
    if trials > 0 {
        header.extend([
            "eps_st_mc (probability)",
            "eps_st_mc_se (probability)",
            "eps_td_mc (probability)",
            "eps_td_mc_se (probability)",
        ]);
    }
    let mut table = CsvTable::new(&header);
    for p in pts {
        let cfg = p.cfg()?;
        let op = p.op()?;
        let c = compare_point(&cfg, p.n, p.rate)?;
        let mut row: Vec<Cell> = vec![
            p.n.into(),
            cfg.dof().into(),
            linear_to_db(p.snr).into(),
            p.rate.into(),
            c.delta().into(),
            c.st.value.into(),
            c.st.ln_value.into(),
            c.td.value.into(),
            c.td.ln_value.into(),
            c.st.above_capacity.into(),
            p.epsilon.into(),
            normalized_rate(&cfg, &op, Scheme::Spatiotemporal).into(),
            normalized_rate(&cfg, &op, Scheme::TimeDomain).into(),
            (p.snr.ln_1p() * LOG2_E).into(),
        ];
        if trials > 0 {
            for scheme in [Scheme::Spatiotemporal, Scheme::TimeDomain] {
                let e = mc_error_probability(&cfg, p.n, p.rate, scheme, trials, args.seed);
                row.push(e.mean.into());
                row.push(e.std_error.into());
            }
        }
        table.push(row);
    }
    Ok((table, None))
}

fn exchange(args: &CommonArgs, pts: &[Point]) -> anyhow::Result<(CsvTable, Option<String>)> {
    let mut table = CsvTable::new(&[
        "snr (dB)",
        "per_link_rate (bits/use/link)",
        "target_epsilon (probability)",
        "solve_for",
        "fixed (count)",
        "value (count)",
        "achieved_epsilon (probability)",
        "ln_achieved_epsilon (nats)",
        "solvable (bool)",
    ]);
    let mut any = false;
    for p in pts {
        let cfg = p.cfg()?;
        let (solve_for, fixed, label) = match args.solve_for {
            SolveArg::N => (SolveFor::Blocklength, cfg.dof() as u64, "n"),
            SolveArg::M => (SolveFor::Dof, p.n, "m"),
        };
        let target = match args.match_td {
            Some(n) => error_probability(&cfg, n, p.rate, Scheme::TimeDomain)?.value,
            None => p.epsilon,
        };
        let mut row: Vec<Cell> =
            vec![linear_to_db(p.snr).into(), p.rate.into(), target.into(), label.into(), fixed.into()];
        match solve_exchange(&cfg, p.rate, target, solve_for, fixed) {
            Ok(sol) => {
                any = true;
                row.extend([sol.value.into(), sol.achieved.value.into(), sol.achieved.ln_value.into(), true.into()]);
            }
            Err(Error::Domain(msg)) if target > 0.0 && target < 1.0 => {
                eprintln!("exchange: {msg}");
                row.extend([f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), false.into()]);
            }
            Err(e) => return Err(anyhow!(e)),
        }
        table.push(row);
    }
    let infeasible =
        (!any).then(|| "no sweep point has a finite exchange solution (rate not below capacity)".to_string());
    Ok((table, infeasible))
}

fn wishart(_args: &CommonArgs, pts: &[Point], trials: u64) -> anyhow::Result<(CsvTable, Option<String>)> {
    let mut table = CsvTable::new(&[
        "tx (antennas)",
        "rx (antennas)",
        "closed_form (1)",
        "mc_mean (1)",
        "mc_se (1)",
        "z (standard errors)",
        "divergent (bool)",
    ]);
    let mut any = false;
    for p in pts {
        match wishart_inverse_trace(p.tx, p.rx) {
            Ok(exact) => {
                any = true;
                let mc = wishart_inverse_trace_mc(p.tx, p.rx, trials, _args.seed)?;
                table.push(vec![
                    p.tx.into(),
                    p.rx.into(),
                    exact.into(),
                    mc.mean.into(),
                    mc.std_error.into(),
                    mc.z_distance(exact).into(),
                    false.into(),
                ]);
            }
            Err(Error::Divergent(msg)) => {
                eprintln!("wishart-check: {msg}");
                table.push(vec![
                    p.tx.into(),
                    p.rx.into(),
                    f64::INFINITY.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    true.into(),
                ]);
            }
            Err(e) => return Err(anyhow!(e)),
        }
    }
    let infeasible = (!any).then(|| "E[tr(U^-2)] diverges at every sweep point (|L-N| <= 1)".to_string());
    Ok((table, infeasible))
}
