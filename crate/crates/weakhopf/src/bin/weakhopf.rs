fn main() {
    std::process::exit(weakhopf::cli::run(std::env::args_os()));
}
