fn main() {
    std::process::exit(padic_ts::cli::run_from_args(std::env::args_os()));
}
