fn main() {
    std::process::exit(scf_ganlab_cli::run());
}
