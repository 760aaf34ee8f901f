//! The guide chapters, compiled as module docs so `cargo test` runs every
//! snippet in them.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("src/finite-fields.md")]
pub mod finite_fields {}

#[doc = include_str!("src/weierstrass.md")]
pub mod weierstrass {}

#[doc = include_str!("src/tate.md")]
pub mod tate {}

#[doc = include_str!("src/heights.md")]
pub mod heights {}

#[doc = include_str!("src/enumeration.md")]
pub mod enumeration {}

#[doc = include_str!("src/cli.md")]
pub mod cli {}
