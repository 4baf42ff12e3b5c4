//! Symmetric stream encryption driven by Life-Like cellular automata.
//!
//! A 128-bit password seeds a toroidal binary grid through the logistic map.
//! The grid then evolves under a Life-Like rule (Fredkin, `B1357/S02468`, by
//! default); every generation is serialized to bytes, blocks of `rho` bytes are
//! XOR-folded into keystream bytes, and the plaintext is chained through that
//! keystream.
//!
//! The crate also carries the measurements used to pick rules and judge the
//! output: entropy, a damage-spreading Lyapunov exponent and Hamming distance
//! per rule ([`chaos`]), an ENT-style byte battery ([`randtests`]), and
//! histogram and power-spectrum analysis of cipher images ([`imaging`]).
//!
//! ```
//! use lifecrypt::cipher::{open, seal, CipherParams};
//! use lifecrypt::seeding::Password;
//!
//! let key = Password::from_text("s3cret").unwrap();
//! let params = CipherParams { rows: 32, cols: 32, ..CipherParams::default() };
//! let envelope = seal(b"meet at noon", &key, &params).unwrap();
//! assert_eq!(open(&envelope, &key).unwrap(), b"meet at noon");
//! ```

pub mod chaos;
pub mod cipher;
pub mod fft;
pub mod grid;
pub mod imaging;
pub mod keystream;
pub mod randtests;
pub mod rule;
pub mod seeding;

pub use cipher::{open, seal, CipherError, CipherParams, CiphertextEnvelope};
pub use grid::{Grid, GridError, PopulationStats};
pub use keystream::Keystream;
pub use rule::{catalog, Rule, RuleCatalog, RuleError};
pub use seeding::{Password, SeedConfig};
