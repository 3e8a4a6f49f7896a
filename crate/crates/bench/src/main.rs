fn main() {
    std::process::exit(psst_bench::main_with_args(std::env::args_os()));
}
