fn main() {
    env_logger::init();
    std::process::exit(spinorlz::run::main_with_args(std::env::args_os()));
}
