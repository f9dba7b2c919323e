fn main() {
    std::process::exit(resonwave::cli::run_command(std::env::args_os()));
}
