//! Capacity-achieving perfectly smooth locally decodable codes over GF(2):
//! construction, exact entropy audits, and PIR_max retrieval over TCP.

pub mod capacity;
pub mod construct;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod gf2;
pub mod netsim;
pub mod pir;
pub mod verify;

pub use capacity::{CodeParams, Rational};
pub use construct::{build_sldc, decode, encode, DecodingSuperset, LinearCodeSpec};
pub use error::{Error, Result};
pub use fixtures::{load_fixture, FIXTURE_NAMES};
pub use gf2::{BitMatrix, BitVector};
pub use pir::PirScheme;
