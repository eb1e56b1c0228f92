fn main() {
    std::process::exit(uqm_cli::run(std::env::args_os()));
}
