fn main() {
    std::process::exit(econ_entropy_cli::dispatch(std::env::args_os()));
}
