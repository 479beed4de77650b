pub mod error;
pub mod identities;
pub mod lp;
pub mod matprod;
pub mod mnsystem;
pub mod partitions;
pub mod qpoly;
pub mod qseries;
pub mod supernomial;
pub mod tsdecomp;
pub mod verify;

pub use error::{Error, Result};
pub use qpoly::{HalfInt, QPoly};
pub use supernomial::LVec;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/qpoly.md")]
    pub mod qpoly {}
    #[doc = include_str!("../../../book/src/supernomials.md")]
    pub mod supernomials {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    pub mod partitions {}
    #[doc = include_str!("../../../book/src/andrews_gordon.md")]
    pub mod andrews_gordon {}
    #[doc = include_str!("../../../book/src/tsdecomp.md")]
    pub mod tsdecomp {}
    #[doc = include_str!("../../../book/src/identities.md")]
    pub mod identities {}
    #[doc = include_str!("../../../book/src/qseries.md")]
    pub mod qseries {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    pub mod matrices {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
}
