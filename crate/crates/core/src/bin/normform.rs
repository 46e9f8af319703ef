fn main() {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("NORMFORM_LOG")).try_init();
    std::process::exit(normform::cli::run(std::env::args_os()));
}
