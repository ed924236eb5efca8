pub mod battery;
pub mod catalog;
pub mod density;
pub mod error;
pub mod games;
pub mod group;
pub mod measure;
pub mod partitions;
pub mod perms;
pub mod rational;
pub mod search;
pub mod simplex;
pub mod words;
pub mod zline;

pub use error::{Error, Result};

// Book chapters run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/densities.md")]
    mod densities {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    mod partitions {}
    #[doc = include_str!("../../../book/src/zline.md")]
    mod zline {}
    #[doc = include_str!("../../../book/src/words-and-perms.md")]
    mod words_and_perms {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
