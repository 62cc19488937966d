fn main() {
    std::process::exit(momentwave::cli::run(std::env::args_os()));
}
