fn main() {
    emoprosody::cli::init_logging();
    std::process::exit(emoprosody::cli::run(std::env::args_os()));
}
