fn main() {
    std::process::exit(bgw_qsd::cli::run(std::env::args_os()));
}
