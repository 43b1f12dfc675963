use std::io::Write;

fn main() {
    let result = reversor_cli::run(std::env::args_os());
    let out = if result.exit_code == reversor_cli::EXIT_USAGE || result.exit_code == reversor_cli::EXIT_DOMAIN {
        std::io::stderr().write_all(result.payload.as_bytes())
    } else {
        std::io::stdout().write_all(result.payload.as_bytes())
    };
    if out.is_err() {
        std::process::exit(1);
    }
    std::process::exit(result.exit_code);
}
