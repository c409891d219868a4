fn main() {
    std::process::exit(mdlnet::cli::main());
}
