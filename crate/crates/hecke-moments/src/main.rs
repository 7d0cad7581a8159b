fn main() {
    std::process::exit(hecke_moments::cli::run());
}
