//! Verification toolkit for double-pushout graph programs.

#![allow(clippy::type_complexity)]

pub mod canonical;
pub mod error;
pub mod gluing;
pub mod graph;
pub mod morphism;

pub use error::{Error, Result};
pub use graph::{Alphabet, Edge, Graph, GraphBuilder, Id, Item, Label, Node};
pub use morphism::Morphism;
pub mod condition;
pub mod satisfy;
pub mod interpreter;
pub mod rewrite;
pub mod simplify;
pub mod wlp;
#[cfg(test)]
pub(crate) mod testkit;
pub mod par;
pub mod universe;
pub mod sweep;
pub mod mso;
pub mod hoare;
pub mod text;
