fn main() {
    std::process::exit(tverberg_fourier::cli::run());
}
