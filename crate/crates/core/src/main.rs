use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = signed_euler::cli_io::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
