use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use fblmimo_cli::args::{expand_config, Cli, Command};
use fblmimo_cli::run::run;

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let argv = expand_config(std::env::args().collect())?;
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    let (workers, out) = match &cli.command {
        Command::Figure(f) => (f.workers, f.out.clone()),
        Command::Bounds(a)
        | Command::Ergodic(a)
        | Command::Compare(a)
        | Command::Exchange(a)
        | Command::WishartCheck(a) => (a.workers, a.out.clone()),
    };
    let workers = match workers {
        Some(0) => anyhow::bail!("--workers must be at least 1"),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let output = pool.install(|| run(&cli.command))?;

    let csv = output.table.render();
    match &out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("cannot write {}", path.display()))?;
            let mut summary = format!("{}: {} rows -> {}", cli.command.name(), output.table.rows.len(), path.display());
            if let Some(script) = &output.plot {
                let gp = path.with_extension("gp");
                fs::write(&gp, script).with_context(|| format!("cannot write {}", gp.display()))?;
                summary.push_str(&format!(", plot script -> {}", gp.display()));
            }
            println!("{summary}");
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
        }
    }
    if let Some(reason) = output.infeasible {
        eprintln!("infeasible: {reason}");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
