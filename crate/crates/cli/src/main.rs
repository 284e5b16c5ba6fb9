use std::process::ExitCode;

use kornlab_cli::config::threads_from_env;
use kornlab_cli::{dispatch, parse_config, UsageError};

fn main() -> ExitCode {
    let cfg = match parse_config(std::env::args_os().skip(1)) {
        Ok(cfg) => cfg,
        Err(UsageError::Help(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            if !e.to_string().ends_with('\n') {
                eprintln!();
            }
            return ExitCode::from(2);
        }
    };
    let threads = std::env::var("KORNLAB_THREADS").ok();
    match threads_from_env(threads.as_deref()) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("kornlab: cannot start {n} worker threads: {e}");
                return ExitCode::from(1);
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    }

    let report = dispatch(&cfg);
    if let Err(e) = report.emit(cfg.format, cfg.output_path.as_deref()) {
        let target = cfg
            .output_path
            .as_deref()
            .map_or("stdout".to_string(), |p| p.display().to_string());
        eprintln!("kornlab: cannot write report to {target}: {e}");
        return ExitCode::from(1);
    }
    for e in &report.errors {
        eprintln!("kornlab: {} error in {}: {}", e.kind, e.name, e.message);
    }
    if report.failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
