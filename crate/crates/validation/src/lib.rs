//! Holds the `acceptance` test target (`tests/acceptance.rs`). The package
//! sorts after the others in the workspace, so its pass/fail table is the
//! last thing `cargo test --workspace` prints.
