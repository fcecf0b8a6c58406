use std::io::Write;

fn main() {
    let (code, stdout) = efg_deceive::cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(stdout.as_bytes());
    std::process::exit(code);
}
