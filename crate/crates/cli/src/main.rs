fn main() {
    std::process::exit(owslab_cli::run_command(std::env::args_os()));
}
