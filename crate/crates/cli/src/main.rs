fn main() {
    std::process::exit(deckmap_cli::run(std::env::args_os()));
}
