fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    std::process::exit(groupoid_int::cli::run(std::env::args_os()));
}
