fn main() {
    std::process::exit(scuba_cli::dispatch(std::env::args_os()));
}
