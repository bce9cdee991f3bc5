fn main() {
    std::process::exit(grasscurve_cli::run(std::env::args_os()));
}
