//! Templates: chains of Euclidean planes (walls) glued along lines to
//! Euclidean strips, and the geometry of geodesics through them.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, pictures and
//! the command line live in the `template-lab` crate.
#![no_std]

extern crate alloc;

mod fm;

pub mod develop;
pub mod error;
pub mod geodesic;
pub mod graph;
pub mod planar;
pub mod recovery;
pub mod selfsim;
pub mod template;
pub mod torus;

pub use develop::{
    develop_chain, develop_self_similar, develop_with_choices, DevelopedChain, QuarterPlaneCase, SignSequence,
    WallChoice,
};
pub use error::{DevelopError, GeodesicError, GraphError, RecoveryError, SelfSimilarError, TemplateError, TorusError};
pub use planar::{PlanarPoint, ToleranceConfig};
pub use selfsim::{exact_tits_angle, triviality, PsiPair, TrivialityVerdict};
pub use template::{expand_self_similar, SelfSimilarData, StripSpec, TemplateData, TemplateKind, WallSpec};
