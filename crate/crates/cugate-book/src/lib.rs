//! Keeps the book honest: every Rust code block in `book/src/*.md` is
//! compiled and run by `cargo test --doc` through the doc attributes
//! below, one module per chapter so a failure points at its chapter.
//!
//! mdbook itself cannot run snippets that depend on external crates, so
//! the chapters are included here verbatim and rustdoc does the work.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/states.md")]
pub mod states {}

#[doc = include_str!("../../../book/src/interactions.md")]
pub mod interactions {}

#[doc = include_str!("../../../book/src/compiling.md")]
pub mod compiling {}

#[doc = include_str!("../../../book/src/verifying.md")]
pub mod verifying {}

#[doc = include_str!("../../../book/src/device.md")]
pub mod device {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
