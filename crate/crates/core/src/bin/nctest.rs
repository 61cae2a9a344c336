use nctest_core::cli::{main_with_args, TOLERANCE_ENV};

fn main() {
    let code = main_with_args(std::env::args_os(), std::env::var(TOLERANCE_ENV).ok());
    std::process::exit(code);
}
