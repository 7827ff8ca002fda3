fn main() {
    std::process::exit(fast_harq::cli::run());
}
