fn main() {
    std::process::exit(tfclust_cli::run(std::env::args_os()));
}
