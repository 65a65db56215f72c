//! Large planar subgraphs of dense graphs.
//!
//! The crate builds spanning quadrangulations of tree blow-ups with
//! insertion-friendly bags, cleans regular pairs, embeds the result into the
//! input graph and emits independently checkable certificates. An exact
//! branch-and-bound planarity oracle covers small instances.

pub mod certificate;
pub mod embed;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod plane;
pub mod quad;
pub mod regularity;
pub mod structure;
