fn main() {
    std::process::exit(intent_miner::cli::dispatch(std::env::args_os()));
}
