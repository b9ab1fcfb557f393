//! Conduction-electron g-factor engineering for III-V semiconductor alloys.
//!
//! The crate evaluates the three-level k·p g-factor
//! `g = 2 − (2/3)·E_p·Δ / (E_g·(E_g + Δ))` for binary, ternary and quaternary
//! alloys whose parameters are interpolated from a low-temperature database,
//! and searches lattice-matched alloy families for compositions with a chosen
//! g-factor inside a band-gap window.
//!
//! ```
//! use gfactor_core::{default_database, electron_g, parse_composition};
//!
//! let db = default_database();
//! let inp = electron_g(&parse_composition("InP").unwrap(), &db).unwrap();
//! assert!(inp.g > 0.0);
//! ```

pub mod alloy;
pub mod composition;
pub mod design;
pub mod error;
pub mod gfactor;
pub mod params;
pub mod path;
pub mod roots;

pub use alloy::{alloy_params, interpolate_param, lattice_constant, AlloyParams};
pub use composition::{parse_composition, Anion, Cation, Composition};
pub use design::{
    find_g_crossing, find_g_zero, solve_design, sweep_path, DesignCandidate, DesignProblem,
    DesignSolution, Feasibility, SearchCertificate, SolutionKind, Substrate, SweepRow, SweepTable,
};
pub use error::{Error, Result};
pub use gfactor::{
    classify_gap, electron_g, gap_to_wavelength, roth_g, wavelength_to_gap, GFactorResult,
    GapCharacter,
};
pub use params::{
    default_database, load_database, validate_database, BinaryCompound, BowingEntry, DatabaseDraft,
    MaterialsDatabase, Param, TernaryId, Violation,
};
pub use path::{lattice_matched_path, AlloyFamily, CompositionPath};
