use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let code = qsl_cli::run(&argv, &mut input, &mut out, &mut err);
    let _ = out.flush();
    ExitCode::from(code as u8)
}
