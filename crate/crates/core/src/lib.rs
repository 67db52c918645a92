//! Frames with prescribed spectrum and vector lengths, built one vector at a
//! time from eigensteps.
//!
//! A frame of `N` vectors in `R^M` whose frame operator has spectrum `lam`
//! and whose vectors have squared lengths `mu` exists exactly when the padded
//! `lam` majorizes `mu`. The construction picks a table of eigensteps (the
//! spectra of the partial frame operators), then adds each vector so the
//! partial spectrum moves to the next row. Every such frame arises this way.
//!
//! ```
//! use eigensteps::{build_frame, inner_to_outer, verify_frame, CanonicalProbe, Selection};
//! use eigensteps::{LengthSequence, Spectrum, Tolerances};
//!
//! let tol = Tolerances::default();
//! let lam = Spectrum::new(vec![5.0 / 3.0; 3], &tol).unwrap();
//! let padded = eigensteps::zero_pad(&lam, 5).unwrap();
//! let mu = LengthSequence::new(vec![1.0; 5], &tol).unwrap();
//! let inner = Selection::TopKill.build(&padded, &mu, &tol).unwrap();
//! let outer = inner_to_outer(&inner, 3, &tol).unwrap();
//! let frame = build_frame(&outer, &mut CanonicalProbe, &tol).unwrap();
//! assert!(verify_frame(&frame, &lam, &mu, Some(&outer), &tol).holds());
//! ```

mod error;

pub mod eigensteps;
pub mod framebuild;
pub mod io;
pub mod majorization;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod schurhorn;

pub use crate::eigensteps::{
    build_inner, inner_bounds, inner_to_outer, outer_to_inner, parametrize_inner, topkill_table,
    validate_inner, validate_outer, InnerEigenstepTable, IntervalBounds, OuterEigenstepTable,
    Selection,
};
pub use error::{Error, Result};
pub use framebuild::{
    build_frame, build_frame_traced, limit_weights, next_vector, verify_frame, CanonicalProbe,
    DirectionChooser, FrameMatrix, RandomProbe,
};
pub use majorization::{majorizes, zero_pad, LengthSequence, MajorizationReport, Spectrum};
pub use numeric::Tolerances;
pub use report::VerificationReport;
pub use schurhorn::{build_schur_horn, verify_schur_horn, SelfAdjointMatrix};
