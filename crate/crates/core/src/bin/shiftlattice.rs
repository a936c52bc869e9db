fn main() {
    std::process::exit(shiftlattice::cli::main_with_args(std::env::args_os()));
}
