fn main() {
    std::process::exit(fuchs_cli::run(std::env::args_os()));
}
