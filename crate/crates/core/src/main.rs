fn main() {
    std::process::exit(gridnav::cli::main());
}
