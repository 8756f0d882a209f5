use std::process::ExitCode;

use clap::Parser;
use enhanced_zeta_cli::commands::{run, RunError};
use enhanced_zeta_cli::config::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli.command, cli.settings) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global() {
            eprintln!("configuration error: cannot start {} worker threads: {e}", cfg.threads);
            return ExitCode::from(2);
        }
    }
    let report = match run(cli.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let io = |r: std::io::Result<()>, what: &str| {
        r.map_err(|e| RunError::Config(format!("cannot write {what}: {e}")))
    };
    let written = (|| {
        if let Some(path) = &cfg.out {
            io(report.write_json(path), "report")?;
        } else {
            print!("{}", report.to_json());
        }
        if let Some(path) = &cfg.csv {
            io(report.write_csv(path), "CSV table")?;
        }
        Ok::<_, RunError>(())
    })();
    if let Err(e) = written {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    eprint!("{}", report.text_summary());
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
