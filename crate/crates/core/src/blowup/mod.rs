//! Kirwan blowups of affine charts along torus fixed loci.

mod chart;
mod desing;
mod model;

pub use chart::{
    charts_glue, check_invariant, exceptional_divide, intrinsic_ideal, make_charts, BlowupChart,
    IntrinsicIdeal,
};
pub use desing::{
    embedding_independence_check, partial_desingularization, partial_desingularization_ideal,
    partial_desingularization_ideal_to, partial_desingularization_to, sorted_strings, ChartStage,
    Desingularization, Ledger, Stage,
};
pub use model::{
    blowup_bundle, blowup_local_model, blowup_section, check_weak_local_model, cotangent_model,
    verify_coinc, verify_coinc_against, Cofactor, ConditionReport, EquivariantBundle, LocalModel,
    WeakModelReport,
};
