fn main() {
    std::process::exit(oqc_core::cli::run(std::env::args_os()));
}
