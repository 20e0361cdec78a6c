fn main() {
    std::process::exit(cesaro::run_cli(std::env::args_os()));
}
