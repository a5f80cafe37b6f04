fn main() {
    std::process::exit(eikonal_vv::cli::run(std::env::args_os()));
}
