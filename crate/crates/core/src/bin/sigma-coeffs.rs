use std::io::{self, Write};
use std::process::ExitCode;

use sigma_coeffs::harness::{run, ExitStatus, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::from_args(std::env::args_os()) {
        Ok(config) => config,
        Err(e) => {
            let code = if e.use_stderr() {
                ExitStatus::InvalidConfig.code()
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = run(&config, &mut out);
    let _ = out.flush();
    ExitCode::from(status.code() as u8)
}
