fn main() {
    std::process::exit(tforder_cli::main_with_args(std::env::args_os()));
}
