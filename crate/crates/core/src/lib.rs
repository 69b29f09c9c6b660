pub mod cli;
pub mod config;
pub mod corpus;
pub mod hangul;
pub mod model;
pub mod numerics;
pub mod predict;
pub mod toy;
pub mod train;
pub mod vocab;
