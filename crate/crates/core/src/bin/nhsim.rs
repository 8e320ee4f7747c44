use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = nhsim::cli::dispatch(std::env::args_os(), &mut std::io::stdin().lock());
    print!("{}", result.stdout);
    eprint!("{}", result.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(result.exit_code as u8)
}
