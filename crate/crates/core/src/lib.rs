//! Exact computations in the endomorphism rings of decomposed modules over
//! discrete valuation rings: module decomposition, the topological Jacobson
//! radical, idempotent lifting and splitting, projective covers, and the
//! matrix calculus of Pontryagin duality.
//!
//! All arithmetic is exact; matrices act on the right of row vectors, and
//! `compose(r, s)` means "first act by `r`, then by `s`".
//!
//! ```
//! use endoring::idem::certify_semiperfect;
//! use endoring::module::{DecomposedModule, LocalModule};
//! use endoring::scalar::RingDescriptor;
//!
//! // End((R/t²)²) is semiperfect: the identity splits into the two
//! // coordinate projectors
//! let ring = RingDescriptor::truncated(2, 2);
//! let m = DecomposedModule::finite(
//!     ring,
//!     vec![LocalModule::Torsion(2), LocalModule::Torsion(2)],
//! )
//! .unwrap();
//! let family = certify_semiperfect(&m).unwrap();
//! assert_eq!(family.head.len(), 2);
//! assert!(family.complete);
//! ```

pub mod error;
pub mod fp;
pub mod scalar;
pub mod module;
pub mod endo;
pub mod idem;
pub mod covers;
pub mod duality;
pub mod io;
pub mod cli;
