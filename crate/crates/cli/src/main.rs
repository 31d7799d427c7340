use std::io::Write;

fn main() {
    let outcome = repseq_cli::run_from_args(std::env::args_os());
    // Output is assembled up front so that a broken pipe cannot leave a half-written report.
    let _ = std::io::stdout().lock().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(outcome.stderr.as_bytes());
    std::process::exit(outcome.code);
}
