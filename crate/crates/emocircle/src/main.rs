use clap::Parser;

use emocircle::cli::{run, Cli};

/// Rust ignores SIGPIPE by default, turning a closed pipe (e.g. piping
/// into `head`) into a write panic. Restore the conventional behavior of
/// terminating quietly.
#[cfg(unix)]
fn restore_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn restore_sigpipe() {}

fn main() {
    restore_sigpipe();
    let cli = Cli::parse();
    std::process::exit(run(&cli.command));
}
