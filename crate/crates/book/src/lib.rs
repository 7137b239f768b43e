//! Compiles every code listing of the guide in `book/src` as a doc-test.
//! One module per chapter, so a failure names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/simplices.md")]
pub mod simplices {}
#[doc = include_str!("../../../book/src/functions.md")]
pub mod functions {}
#[doc = include_str!("../../../book/src/integration.md")]
pub mod integration {}
#[doc = include_str!("../../../book/src/bounds.md")]
pub mod bounds {}
#[doc = include_str!("../../../book/src/fejer.md")]
pub mod fejer {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
