fn main() {
    std::process::exit(pcomb::cli::run(std::env::args_os()));
}
