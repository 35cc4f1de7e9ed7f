fn main() {
    std::process::exit(fellerlab_cli::cli_main());
}
