//! Command-line driver (placeholder during bring-up).

/// Run the CLI; returns the process exit code.
pub fn run() -> i32 {
    eprintln!("not yet implemented");
    1
}
