//! Truncated upper-homogeneous posets built from homogeneous monoid
//! presentations, with enumerative and order-theoretic analysis, canonical
//! forms, named constructions and core realization by colorings.

pub mod coloring;
pub mod constructions;
pub mod iso;
pub mod poset;
pub mod presentation;

pub use iso::{canonical_form, find_isomorphism, CanonicalForm, IsoMap, IsoMode};
pub use poset::{NodeId, PosetError, PowerSeriesTrunc, TruncatedPoset};
pub use presentation::{Presentation, PresentationError, Word};
