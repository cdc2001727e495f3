//! Command-line plumbing for the cover invariants: instance files, seeded
//! generation, report emission and batch verification.

pub mod gen;
pub mod instance;
pub mod report;
pub mod run;

/// Exit codes: 0 success, 1 property violation, 2 validation error,
/// 3 resource cap.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub const DEFAULT_CAP: u64 = 10_000_000;
