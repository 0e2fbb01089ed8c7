fn main() {
    std::process::exit(capstan_cli::run(std::env::args_os()));
}
