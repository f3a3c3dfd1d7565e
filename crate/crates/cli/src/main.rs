use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qkern_cli::{run_config, CliError};

#[derive(Parser)]
#[command(name = "qkern", version, about = "Run a quantum-kernel experiment from a JSON config")]
struct Args {
    /// Experiment config (JSON).
    config: PathBuf,
    /// Where outputs are written.
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            if code == 1 {
                eprint!("{}", CliError::Usage(e.kind().to_string()).to_json());
            }
            return ExitCode::from(code);
        }
    };
    match run_config(&args.config, &args.output_dir, args.verbose) {
        Ok(files) => {
            if args.verbose {
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprint!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
