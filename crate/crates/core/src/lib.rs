//! Exact computations in the Grigorchuk group and the Gupta-Sidki p-groups:
//! wreath recursion, finite quotients, commutator identities, cover growth
//! for Solovay-Kitaev steps, diameters, spectral gaps and growth.

pub mod check;
pub mod cli;
pub mod error;
pub mod grigorchuk;
pub mod guptasidki;
pub mod words;
pub mod quotient;
pub mod report;
pub mod sk;
pub mod spectra;
pub mod suite;
pub mod wreath;

pub use error::{Error, Result};
pub use words::{AbelianImage, Family, Gen, GeneratorWord, GroupSpec, Letter};
pub use wreath::{decompose, in_stab, is_identity, level_permutation, Element, LevelPermutation, Section};
