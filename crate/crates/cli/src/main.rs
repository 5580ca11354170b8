fn main() {
    std::process::exit(alphamap_cli::run(std::env::args_os()));
}
