fn main() {
    std::process::exit(pilotwave::cli::main_with(std::env::args_os()));
}
