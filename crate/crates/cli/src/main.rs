fn main() {
    std::process::exit(tcsim::main_with_args(std::env::args_os()));
}
