pub mod bounds;
pub mod error;
pub mod measures;
pub mod numerics;
pub mod sandwich;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/subregularity.md")]
    mod subregularity {}
    #[doc = include_str!("../../../book/src/shannon-lower-bound.md")]
    mod shannon_lower_bound {}
    #[doc = include_str!("../../../book/src/explicit-bound.md")]
    mod explicit_bound {}
    #[doc = include_str!("../../../book/src/circle.md")]
    mod circle {}
    #[doc = include_str!("../../../book/src/cantor.md")]
    mod cantor {}
    #[doc = include_str!("../../../book/src/blahut-arimoto.md")]
    mod blahut_arimoto {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
