//! Workbench for finitely presented Boolean algebras over tree-shaped
//! index models, with an exact point-model semantic oracle.

pub mod algebra;
pub mod builders;
pub mod chains;
pub mod closed_form;
pub mod combine;
pub mod index_model;
pub mod perfect_tree;
pub mod rigidity;
pub mod suites;
pub mod term;
