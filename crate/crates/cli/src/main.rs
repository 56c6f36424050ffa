fn main() {
    std::process::exit(ris_cli::run(std::env::args_os()));
}
