use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = tricolor_cli::main_with_args(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = stdout.write_all(out.stdout.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(out.code)
}
