fn main() {
    std::process::exit(percwalk_cli::run(std::env::args_os()));
}
