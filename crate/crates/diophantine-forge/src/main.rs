use std::process::exit;

fn main() {
    exit(diophantine_forge::cli::run(std::env::args_os()));
}
