fn main() {
    std::process::exit(gyroproxy::cli::main());
}
