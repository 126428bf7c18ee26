//! Library surface of the `qkad` command-line driver; the binary is a thin
//! argument-parsing layer over these functions, and the integration tests
//! call them directly.

pub mod cache;
pub mod commands;
pub mod config;

use qkad_core::Error;

/// Process exit code for an error: 1 for user-input problems, 2 for
/// internal failures (non-convergence, corrupted state).
pub fn exit_code(error: &anyhow::Error) -> i32 {
    for cause in error.chain() {
        if let Some(core) = cause.downcast_ref::<Error>() {
            return match core {
                Error::NoConvergence(_) => 2,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
        if cause.downcast_ref::<clap::Error>().is_some() {
            return 1;
        }
    }
    2
}
