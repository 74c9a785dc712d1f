pub mod corpus;
pub mod cut_geometry;
pub mod error;
pub mod graph;
pub mod mesh;
pub mod oracles;
pub mod report;
pub mod simplex;
pub mod spectral;
pub mod steiner;

pub use error::{Error, Result};
pub use cut_geometry::*;
pub use graph::*;
pub use mesh::*;
pub use oracles::*;
pub use report::*;
pub use simplex::*;
pub use spectral::*;
pub use steiner::*;
