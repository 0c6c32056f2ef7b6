//! Modular symbols for Γ₀(N), rational newforms, winding elements and visibility of
//! Shafarevich–Tate groups between congruent elliptic curves.

pub mod arith;
pub mod congruence;
pub mod curves;
pub mod error;
pub mod exact;
pub mod harness;
pub mod modsym;
pub mod newform;
pub mod visibility;
pub mod winding;

pub use error::{Error, Result};
pub use modsym::{build_space, ModSymSpace};
pub use newform::{rational_newforms, RationalNewform};
pub use winding::{winding_data, WindingData};
