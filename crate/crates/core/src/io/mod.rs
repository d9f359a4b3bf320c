//! Run configuration, result files and the command-line pipelines.

pub mod config;
pub mod pipeline;
pub mod tables;
pub mod vtk;

pub use config::{
    CaseSection, CoordinateKind, GridSection, InitSpec, MeshSpec, OutputSection, RunConfig, SCHEMA_VERSION,
};
pub use pipeline::{
    generate_grid, load_macro_fields, solver_quadrature, write_outputs, GeneratedGrid, GridSummary, SolveJob,
};
pub use tables::{
    compare_flux, read_flux_csv, read_residual_csv, write_flux_csv, write_residual_csv, FluxComparison, FluxRow,
};
pub use vtk::{vtk_structured, write_vtk};
