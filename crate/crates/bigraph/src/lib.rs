//! Bigraphical reactive systems.
//!
//! A bigraph superimposes a place forest (nodes under regions, with holes
//! for composition) and a link hypergraph (ports and inner names joined to
//! edges or outer names) on one node set. This crate provides the concrete
//! structure and its algebra ([`Bigraph`], [`Interface`], [`Signature`]),
//! a term language for the one-region fragment ([`term`]), ground reaction
//! with bounded trace exploration ([`engine`]), and vertical-refinement
//! checks between two reactive systems related by a hiding functor
//! ([`refine`]).

pub mod engine;
mod graph;
mod interface;
mod iso;
mod ops;
pub mod refine;
mod signature;
pub mod term;

pub use graph::{Bigraph, Child, EdgeId, Link, NodeId, Parent, Violation};
pub use interface::Interface;
pub use ops::OpError;
pub use signature::{Activity, Control, Signature, SignatureError};
