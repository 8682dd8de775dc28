fn main() {
    std::process::exit(bec_eit_cli::app::main_with_args(std::env::args_os()));
}
