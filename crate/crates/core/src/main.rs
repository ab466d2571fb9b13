use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out, err) = spart::cli::main_with_args(std::env::args_os().skip(1));
    if !out.is_empty() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(out.as_bytes());
        let _ = stdout.flush();
    }
    if !err.is_empty() {
        let _ = std::io::stderr().write_all(err.as_bytes());
    }
    ExitCode::from(code as u8)
}
