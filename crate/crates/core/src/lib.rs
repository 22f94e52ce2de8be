//! Quotients of the Bruhat-Tits tree of SU(3) over F_q(t) by arithmetic
//! subgroups, with Euler characteristics and abelianizations.

pub mod ell;
pub mod arith;
pub mod cli;
pub mod error;
pub mod fq;
pub mod homology;
pub mod ideal;
pub mod local;
pub mod quotient;
pub mod poly;
pub mod ratf;
pub mod unitary;

pub use ell::{EllElem, Ext};
pub use error::{Error, Result};
pub use fq::{Fq, FqElem};
pub use poly::Poly;
pub use ratf::RatF;
