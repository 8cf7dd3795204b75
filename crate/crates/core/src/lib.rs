//! Coherent-state superpositions, linear-optical splitters and rank
//! quantifiers.
//!
//! A single-mode state built from `r` distinct coherent states is sent through
//! a beam splitter (or an `N`-port splitter) together with vacuum; the output
//! has Schmidt rank `r` across every cut. The crate represents such states
//! exactly as finite superpositions, expands them into truncated Fock arrays
//! with rigorous tail bounds and decides ranks from singular-value spectra.

pub mod error;
pub mod fock;
pub mod quantifiers;
pub mod spec_files;
pub mod state;
pub mod states;
pub mod tolerance;
pub mod transforms;

pub use error::{Error, Result};
pub use fock::FockArray;
pub use quantifiers::{Bipartition, RankReport, Tolerances};
pub use state::{coherent_overlap, CoherentPoint, PureEnsemble, SuperpositionState, Term};
pub use transforms::{extend_with_vacuum, SplitterUnitary};

pub use num_complex::Complex64;
