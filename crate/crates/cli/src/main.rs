use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = demeterlint_cli::run_from_args(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.stdout.as_bytes());
    let _ = stdout.flush();
    let mut stderr = std::io::stderr().lock();
    let _ = stderr.write_all(out.stderr.as_bytes());
    ExitCode::from(out.code)
}
