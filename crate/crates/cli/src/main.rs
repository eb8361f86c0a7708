fn main() {
    std::process::exit(pathfree_cli::run(std::env::args_os()));
}
