fn main() {
    // Stdio handles stay unlocked: worker threads log to stderr.
    let code = balhon::cli::run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
