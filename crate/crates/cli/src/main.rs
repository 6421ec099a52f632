fn main() {
    std::process::exit(mflab_cli::main_with(std::env::args_os()));
}
