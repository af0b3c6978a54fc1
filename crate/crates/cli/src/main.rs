fn main() {
    std::process::exit(specdecay_cli::run(std::env::args_os()));
}
