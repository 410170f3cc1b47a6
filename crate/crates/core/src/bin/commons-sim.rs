fn main() {
    std::process::exit(knapsack_commons::cli::run_cli(std::env::args_os()));
}
