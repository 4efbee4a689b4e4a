//! Communication utility of quantum channels.
//!
//! A communication game hands Alice an input `x` with a payoff matrix known
//! to both parties; she encodes it into a quantum state, sends it through a
//! fixed channel, and Bob measures to produce a guess. The utility of the
//! channel for the game is the best achievable average payoff over all
//! encodings and decodings.
//!
//! The crate provides:
//!
//! - [`matcore`]: a dense complex-matrix kernel (Hermitian eigensolver,
//!   trace norm, Kronecker product, partial trace);
//! - [`games`]: payoff matrices and their structural reductions;
//! - [`channels`]: CPTP maps as Kraus lists with constructors for the named
//!   channel classes (unitary, dephasing, erasure, Pauli, amplitude damping,
//!   depolarizing, quantum-classical, 1→2 cloning, ...);
//! - [`closedform`]: closed-form utilities and optimal strategies, one per
//!   channel class;
//! - [`oracle`]: independent numerical maximizers (see-saw alternating
//!   optimization, exhaustive qubit grid search, classical enumeration) used
//!   to cross-validate every closed form;
//! - [`jsonio`]: the JSON schemas for games, channels, and results used by
//!   the `chanwit` command-line tool.

pub mod channels;
pub mod closedform;
pub mod consts;
pub mod error;
pub mod games;
pub mod jsonio;
pub mod matcore;
pub mod oracle;

pub use channels::{Channel, ChannelKind, DensityMatrix, Povm};
pub use closedform::{Decoding, HelstromResult, UtilityResult};
pub use error::{Error, Result};
pub use games::{BinaryReduction, Game};
pub use matcore::{CMatrix, Subsystem};
pub use oracle::OracleConfig;
