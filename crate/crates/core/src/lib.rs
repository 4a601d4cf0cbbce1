//! Concrete finite p-groups and a verification harness for the power
//! structure of powerful p-groups.
//!
//! Groups are enumerated into Cayley tables ([`kernel`]), built from
//! deterministic families ([`constructors`]) and analysed through their
//! omega, agemo and lower-central-series subgroups ([`series`]). The
//! [`verifier`] turns statements about powerful p-groups into exhaustive
//! or sampled checks, and [`corpus`] runs them over a configured corpus.

pub mod constructors;
pub mod corpus;
pub mod hall;
pub mod kernel;
pub mod series;
pub mod subgroups;
pub mod verifier;

pub use constructors::{default_corpus, is_powerful, GroupSpec, SpecError};
pub use kernel::{close_generators, BuildOptions, Elem, GroupError, GroupTable};
pub use subgroups::{generated, ElementSet, SubgroupSet};
