fn main() {
    env_logger::init();
    std::process::exit(lpembed::cli::run(std::env::args_os()));
}
