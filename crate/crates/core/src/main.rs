use std::io;

use carpetlab::cli::{run, THREADS_ENV};

fn main() {
    if let Some(threads) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
    {
        // ignore failure: a pool may already exist
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let code = run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
