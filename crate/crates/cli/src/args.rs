//! Flag definitions, sweep grammar and the `key = value` config file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fblmimo::bounds::KappaPolicy;
use fblmimo::info_density::Scheme;

#[derive(Parser, Debug)]
#[command(name = "fblmimo", version, about = "Finite-blocklength bounds for quasi-static MIMO fading channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Normal approximation and finite-n bounds for one channel realization.
    #[command(args_override_self = true)]
    Bounds(CommonArgs),
    /// Monte Carlo averages over fading against the high-SNR closed forms.
    #[command(args_override_self = true)]
    Ergodic(CommonArgs),
    /// Error probabilities and per-link rates of both coding schemes.
    #[command(args_override_self = true)]
    Compare(CommonArgs),
    /// Minimal blocklength (or DoF) meeting a target error with joint coding.
    #[command(args_override_self = true)]
    Exchange(CommonArgs),
    /// Inverse-trace identity of Wishart matrices against simulation.
    #[command(args_override_self = true)]
    WishartCheck(CommonArgs),
    /// Reproduce a figure preset.
    #[command(args_override_self = true)]
    Figure(FigureArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds(_) => "bounds",
            Command::Ergodic(_) => "ergodic",
            Command::Compare(_) => "compare",
            Command::Exchange(_) => "exchange",
            Command::WishartCheck(_) => "wishart-check",
            Command::Figure(_) => "figure",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// `key = value` file with defaults for any flag below; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Transmit antennas L.
    #[arg(long, default_value_t = 4)]
    pub tx: usize,
    /// Receive antennas N.
    #[arg(long, default_value_t = 4)]
    pub rx: usize,
    /// Fix L = c·N; overrides --tx.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub snr_db: f64,
    /// Blocklength n in channel uses.
    #[arg(long, default_value_t = 100)]
    pub blocklength: u64,
    /// Target error probability (also the exchange target).
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Rate per link in bits per channel use (compare, exchange).
    #[arg(long, default_value_t = 2.0)]
    pub per_link_rate: f64,
    /// var:start:stop:points[:linear|log|db]
    #[arg(long)]
    pub sweep: Option<Sweep>,
    /// Monte Carlo trials; the default depends on the command.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; never changes the output.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Free parameter Δ of the finite converse.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// tau or custom:<log2 kappa>
    #[arg(long, default_value = "tau")]
    pub kappa_policy: KappaArg,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Both)]
    pub scheme: SchemeArg,
    /// Divide bound rates by the realization's capacity.
    #[arg(long, value_enum, default_value_t = RateNorm::None)]
    pub rate_norm: RateNorm,
    /// Fixed channel eigenvalues for `bounds` (comma separated); sampled from
    /// --seed otherwise.
    #[arg(long, value_delimiter = ',')]
    pub eigenvalues: Option<Vec<f64>>,
    /// What `exchange` solves for.
    #[arg(long, value_enum, default_value_t = SolveArg::N)]
    pub solve_for: SolveArg,
    /// For `exchange`: use the time-domain error at this blocklength as target.
    #[arg(long)]
    pub match_td: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct FigureArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["2a", "2b", "2c", "5", "6", "7", "8"])]
    pub id: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output CSV; the plot script is written next to it with a .gp extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeArg {
    St,
    Td,
    Both,
}

impl SchemeArg {
    pub fn schemes(&self) -> &'static [Scheme] {
        match self {
            SchemeArg::St => &[Scheme::Spatiotemporal],
            SchemeArg::Td => &[Scheme::TimeDomain],
            SchemeArg::Both => &[Scheme::Spatiotemporal, Scheme::TimeDomain],
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateNorm {
    None,
    Capacity,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveArg {
    N,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaArg(pub KappaPolicy);

impl FromStr for KappaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "tau" => Ok(KappaArg(KappaPolicy::Tau)),
            Some(("custom", v)) => v
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(|v| KappaArg(KappaPolicy::Custom(v)))
                .ok_or_else(|| format!("bad custom kappa value {v:?}")),
            _ => Err(format!("expected `tau` or `custom:<value>`, got {s:?}")),
        }
    }
}

impl fmt::Display for KappaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            KappaPolicy::Tau => f.write_str("tau"),
            KappaPolicy::Custom(v) => write!(f, "custom:{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Blocklength,
    Epsilon,
    SnrDb,
    /// Linear SNR; pair with the `db` scale to give endpoints in dB.
    Snr,
    Tx,
    Rx,
    /// N = m and L = c·m (or L = m without --ratio).
    Dof,
    Rate,
}

impl SweepVar {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVar::Blocklength => "n",
            SweepVar::Epsilon => "epsilon",
            SweepVar::SnrDb => "snr-db",
            SweepVar::Snr => "snr",
            SweepVar::Tx => "tx",
            SweepVar::Rx => "rx",
            SweepVar::Dof => "m",
            SweepVar::Rate => "rate",
        }
    }

    fn is_integer(&self) -> bool {
        matches!(self, SweepVar::Blocklength | SweepVar::Tx | SweepVar::Rx | SweepVar::Dof)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
    Db,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!("expected var:start:stop:points[:scale], got {s:?}"));
        }
        let var = match parts[0] {
            "n" | "blocklength" => SweepVar::Blocklength,
            "epsilon" | "eps" => SweepVar::Epsilon,
            "snr-db" => SweepVar::SnrDb,
            "snr" => SweepVar::Snr,
            "tx" => SweepVar::Tx,
            "rx" => SweepVar::Rx,
            "m" => SweepVar::Dof,
            "rate" | "per-link-rate" => SweepVar::Rate,
            v => return Err(format!("unknown sweep variable {v:?}")),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| format!("bad number {t:?} in sweep"));
        let (start, stop) = (num(parts[1])?, num(parts[2])?);
        let points: usize = parts[3].parse().map_err(|_| format!("bad point count {:?}", parts[3]))?;
        let scale = match parts.get(4).copied().unwrap_or("linear") {
            "linear" | "lin" => Scale::Linear,
            "log" => Scale::Log,
            "db" | "dB" => Scale::Db,
            v => return Err(format!("unknown sweep scale {v:?}")),
        };
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(format!("sweep needs start < stop, got {start}..{stop}"));
        }
        if points < 2 {
            return Err("sweep needs at least 2 points".into());
        }
        if scale == Scale::Log && start <= 0.0 {
            return Err("log sweeps need a positive start".into());
        }
        if scale == Scale::Db && var != SweepVar::Snr {
            return Err("the db scale applies to the linear `snr` variable only".into());
        }
        Ok(Sweep { var, start, stop, points, scale })
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = match self.scale {
            Scale::Linear => "linear",
            Scale::Log => "log",
            Scale::Db => "db",
        };
        write!(f, "{}:{}:{}:{}:{}", self.var.name(), self.start, self.stop, self.points, scale)
    }
}

impl Sweep {
    /// The swept values, rounded for integer variables.
    pub fn values(&self) -> Vec<f64> {
        let k = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / k;
                let v = match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                    Scale::Db => 10f64.powf((self.start + (self.stop - self.start) * t) / 10.0),
                };
                if self.var.is_integer() {
                    v.round()
                } else {
                    v
                }
            })
            .collect()
    }
}

/// Splices `--key value` pairs from a `--config` file in front of the
/// explicit flags, so that flags given on the command line win.
pub fn expand_config(argv: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = match argv[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => argv.get(pos + 1).cloned().context("--config needs a path")?,
    };
    let from_file = config_args(Path::new(&path))?;
    // argv[0] is the program, argv[1] the subcommand
    let split = 2.min(argv.len());
    let mut out = argv[..split].to_vec();
    out.extend(from_file);
    out.extend(argv[split..].iter().cloned());
    Ok(out)
}

fn config_args(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
    let mut args = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected `key = value`", path.display(), i + 1);
        };
        let key = key.trim().replace('_', "-");
        if key == "config" {
            bail!("{}:{}: nested config files are not supported", path.display(), i + 1);
        }
        args.push(format!("--{key}"));
        args.push(value.trim().to_string());
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grammar() {
        let s: Sweep = "n:10:400:40".parse().unwrap();
        let v = s.values();
        assert_eq!(v.len(), 40);
        assert_eq!((v[0], v[4], v[19], v[39]), (10.0, 50.0, 200.0, 400.0));
        let s: Sweep = "snr:0:30:4:db".parse().unwrap();
        assert!((s.values()[3] - 1000.0).abs() < 1e-9);
        let s: Sweep = "epsilon:1e-7:1e-1:7:log".parse().unwrap();
        assert!((s.values()[1] / 1e-6 - 1.0).abs() < 1e-12);
        assert_eq!(s.to_string().parse::<Sweep>().unwrap(), s);
        for bad in ["n:5:1:3", "n:1:5:1", "n:1:5", "q:1:2:3", "epsilon:0:1:3:log", "n:1:2:3:db"] {
            assert!(bad.parse::<Sweep>().is_err(), "{bad}");
        }
    }

    #[test]
    fn kappa_grammar() {
        assert_eq!("tau".parse::<KappaArg>().unwrap().0, KappaPolicy::Tau);
        assert_eq!("custom:-3.5".parse::<KappaArg>().unwrap().0, KappaPolicy::Custom(-3.5));
        assert!("custom:x".parse::<KappaArg>().is_err());
        assert!("kappa".parse::<KappaArg>().is_err());
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = std::env::temp_dir().join(format!("fblmimo-args-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# defaults\ntx = 8\nsnr_db = 20 # high\n").unwrap();
        let argv: Vec<String> = ["fblmimo", "bounds", "--config", path.to_str().unwrap(), "--tx", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let cli = Cli::try_parse_from(expand_config(argv).unwrap()).unwrap();
        let Command::Bounds(a) = cli.command else { panic!() };
        assert_eq!((a.tx, a.snr_db), (2, 20.0));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
