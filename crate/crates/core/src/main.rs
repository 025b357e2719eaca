fn main() {
    std::process::exit(geonium::cli::run_cli(std::env::args_os()));
}
