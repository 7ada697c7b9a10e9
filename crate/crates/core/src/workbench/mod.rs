//! Spec files, command dispatch and reports.

mod report;
mod run;
mod spec;

pub use report::{Report, Verdict};
pub use run::{run, Command, Flags, Mode, Seed};
pub use spec::{
    connection_block, parse_connection_block, parse_spec, ContractionDecl, ContractionWeights, FuncDecl, GammaEntry, ManifoldSpec,
    MetricEntry, Model, Pos, SpecError, StructureDecl, VfExpr, VfRef, VfTerm, Weight,
};

#[cfg(test)]
mod tests;
