//! Generalized grid states from hypergraphs: PPT certification, Schmidt
//! number bounds, the concentration map Θ, extremality tests, and witness
//! optimization.

pub mod concentrate;
pub mod dps;
pub mod exact;
pub mod extremal;
pub mod gridstate;
pub mod linalg;
pub mod optimize;
pub mod report;
pub mod snprover;
