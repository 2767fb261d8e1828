fn main() {
    std::process::exit(rdgame_cli::run(std::env::args_os()));
}
