fn main() {
    std::process::exit(roadshare::cli::main_with_args(std::env::args_os()));
}
