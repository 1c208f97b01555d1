//! wspkit-core: exact-arithmetic construction and verification of weakly
//! simple polygons from multisets of line segments.
//!
//! A multiset of segments is *reconstructible* when some closed polygonal
//! tour uses every segment exactly as often as it appears in the multiset
//! and can be perturbed, moving each tour vertex by less than a tolerance
//! `eps`, into a simple (non-self-intersecting) polygon.  This crate
//! decides reconstructibility for the tractable input classes, produces
//! explicit perturbation certificates, and verifies those certificates
//! with exact rational arithmetic.

pub mod bars;
pub mod certify;
pub mod collinear;
pub mod embedding;
pub mod faces;
pub mod geom;
pub mod graph;
pub mod instances;
pub mod plus;
pub mod star;
pub mod tour;
