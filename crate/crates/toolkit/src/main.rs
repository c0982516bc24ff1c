fn main() {
    std::process::exit(dms_toolkit::cli::run(std::env::args_os()));
}
