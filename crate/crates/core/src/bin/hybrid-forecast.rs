fn main() {
    std::process::exit(hybrid_forecast::cli::run(std::env::args_os()));
}
