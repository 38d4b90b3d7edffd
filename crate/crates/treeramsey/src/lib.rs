//! Finite Ramsey theory over ordered trees.
//!
//! The crate provides:
//!
//! - ordered rooted trees with their two derivations (cutting the highest
//!   leaves, cutting the tail of the rightmost branch), regular trees and the
//!   canonical one-level inclusions ([`tree`]);
//! - classification and enumeration of the four flavors of maps between
//!   ordered trees: morphisms, embeddings, leaf-preserving and strong
//!   embeddings ([`embed`]);
//! - a deterministic coloring adversary that decides whether a d-coloring
//!   avoiding every monochromatic line exists ([`adversary`]);
//! - finitely sampled normed backgrounds and pairs of families with
//!   exhaustive checkers for their axioms and for the Ramsey and pigeonhole
//!   conditions ([`framework`]);
//! - the four concrete instantiations (increasing injections, tree
//!   embeddings under the two derivations, strong embeddings) and the
//!   headline witness searches ([`instances`]);
//! - parameter words, induced strong embeddings, Hales–Jewett searches and
//!   the translation to Halpern–Läuchli style statements ([`hjhl`]).

pub mod adversary;
pub mod embed;
pub mod framework;
pub mod hjhl;
pub mod instances;
pub mod tree;

mod error;

pub use error::Error;

/// Saturating decrement: `0 - 1 = 0`, otherwise ordinary subtraction.
///
/// Used everywhere an index one below a possibly-zero count is needed.
#[inline]
pub fn dec(n: usize) -> usize {
    n.saturating_sub(1)
}
