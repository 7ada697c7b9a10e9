pub mod carrollian;
pub mod connections;
pub mod contraction;
pub mod grassmann;
pub mod metric;
pub mod models;
pub mod scalar;
pub mod superdomain;
pub mod workbench;
