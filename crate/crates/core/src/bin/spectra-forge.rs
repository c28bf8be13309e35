fn main() {
    std::process::exit(spectra_forge::cli::main_with_args(std::env::args_os()));
}
