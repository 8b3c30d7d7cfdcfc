fn main() {
    std::process::exit(sde_spline::cli::run(std::env::args_os()));
}
