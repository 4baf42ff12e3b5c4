//! Chained XOR encryption over the automaton keystream, and the `CACR`
//! ciphertext container.
//!
//! `C_i = P_i ^ C_{i-1} ^ Y_i` with `C_0 = 0`. The scheme has no nonce and no
//! authentication: the same password and parameters always give the same
//! keystream, and a wrong password decrypts to garbage without an error.

use thiserror::Error;

use crate::grid::GridError;
use crate::keystream::{Keystream, KeystreamError};
use crate::rule::{Rule, RuleError};
use crate::seeding::{initial_grid, Password, SeedConfig, SeedError, DEFAULT_ALPHA, DEFAULT_EPSILON, DEFAULT_MU};

pub const MAGIC: [u8; 4] = *b"CACR";
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CipherError {
    #[error("keystream has {keystream} bytes for {needed} input bytes")]
    KeystreamExhausted { needed: usize, keystream: usize },
    #[error("malformed container: {0}")]
    Malformed(String),
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Keystream(#[from] KeystreamError),
}

impl From<GridError> for CipherError {
    fn from(e: GridError) -> Self {
        CipherError::Keystream(KeystreamError::Grid(e))
    }
}

fn check_keystream(needed: usize, keystream: &[u8]) -> Result<(), CipherError> {
    if keystream.len() < needed {
        return Err(CipherError::KeystreamExhausted { needed, keystream: keystream.len() });
    }
    Ok(())
}

pub fn encrypt(plaintext: &[u8], keystream: &[u8]) -> Result<Vec<u8>, CipherError> {
    check_keystream(plaintext.len(), keystream)?;
    let mut prev = 0u8;
    Ok(plaintext
        .iter()
        .zip(keystream)
        .map(|(p, y)| {
            prev ^= p ^ y;
            prev
        })
        .collect())
}

pub fn decrypt(ciphertext: &[u8], keystream: &[u8]) -> Result<Vec<u8>, CipherError> {
    check_keystream(ciphertext.len(), keystream)?;
    let mut prev = 0u8;
    Ok(ciphertext
        .iter()
        .zip(keystream)
        .map(|(&c, y)| {
            let p = c ^ y ^ prev;
            prev = c;
            p
        })
        .collect())
}

/// Encryption with the literal chaining seed `C_0 = Y_1 ^ P_1`.
///
/// Kept for comparison only: it forces `C_1 = 0` for every message, so the
/// first plaintext byte cannot be recovered.
pub fn encrypt_literal_chaining(plaintext: &[u8], keystream: &[u8]) -> Result<Vec<u8>, CipherError> {
    check_keystream(plaintext.len(), keystream)?;
    let mut prev = match (plaintext.first(), keystream.first()) {
        (Some(p), Some(y)) => p ^ y,
        _ => 0,
    };
    Ok(plaintext
        .iter()
        .zip(keystream)
        .map(|(p, y)| {
            prev ^= p ^ y;
            prev
        })
        .collect())
}

/// Public parameters needed to rebuild the keystream.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherParams {
    pub rule: Rule,
    pub rows: usize,
    pub cols: usize,
    pub rho: usize,
    pub mu: f64,
    pub alpha: u32,
    pub version: u8,
}

impl Default for CipherParams {
    /// Fredkin on 128x128, rho = 10.
    fn default() -> Self {
        CipherParams {
            rule: Rule::parse("B1357/S02468").expect("built-in rule"),
            rows: 128,
            cols: 128,
            rho: 10,
            mu: DEFAULT_MU,
            alpha: DEFAULT_ALPHA,
            version: FORMAT_VERSION,
        }
    }
}

impl CipherParams {
    pub fn validate(&self) -> Result<(), CipherError> {
        let bad = |msg: String| Err(CipherError::InvalidParams(msg));
        if self.version != FORMAT_VERSION {
            return Err(CipherError::UnsupportedVersion(self.version));
        }
        if self.rows == 0 || self.cols == 0 || self.rows > u16::MAX as usize || self.cols > u16::MAX as usize {
            return bad(format!("grid {}x{} outside 1..=65535", self.rows, self.cols));
        }
        if !(self.rows * self.cols).is_multiple_of(8) {
            return bad(format!("grid {}x{} does not pack into whole bytes", self.rows, self.cols));
        }
        if self.rho == 0 || self.rho > u8::MAX as usize {
            return bad(format!("rho = {} outside 1..=255", self.rho));
        }
        if self.rule.births_on_zero() {
            return Err(GridError::BirthOnZero(self.rule.to_string()).into());
        }
        self.seed_config(Password::default())?;
        Ok(())
    }

    fn seed_config(&self, password: Password) -> Result<SeedConfig, CipherError> {
        Ok(SeedConfig::new(password, self.mu, self.alpha, DEFAULT_EPSILON)?)
    }

    /// Keystream generator for `password` under these parameters.
    pub fn keystream(&self, password: &Password) -> Result<Keystream, CipherError> {
        self.validate()?;
        let seed = initial_grid(&self.seed_config(*password)?, self.rows, self.cols)?;
        Ok(Keystream::new(seed, self.rule.clone(), self.rho)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiphertextEnvelope {
    pub params: CipherParams,
    pub payload: Vec<u8>,
}

impl CiphertextEnvelope {
    pub fn plaintext_len(&self) -> u64 {
        self.payload.len() as u64
    }

    /// Container bytes: magic, version, rule (length-prefixed ASCII), rows and
    /// cols (u16 BE), rho (u8), alpha (u32 BE), mu (f64 bits BE), plaintext
    /// length (u64 BE), payload.
    pub fn to_bytes(&self) -> Vec<u8> {
        let rule = self.params.rule.to_string();
        let mut out = Vec::with_capacity(32 + rule.len() + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(self.params.version);
        out.push(rule.len() as u8);
        out.extend_from_slice(rule.as_bytes());
        out.extend_from_slice(&(self.params.rows as u16).to_be_bytes());
        out.extend_from_slice(&(self.params.cols as u16).to_be_bytes());
        out.push(self.params.rho as u8);
        out.extend_from_slice(&self.params.alpha.to_be_bytes());
        out.extend_from_slice(&self.params.mu.to_bits().to_be_bytes());
        out.extend_from_slice(&self.plaintext_len().to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<CiphertextEnvelope, CipherError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(CipherError::Malformed("bad magic".into()));
        }
        let version = r.take(1)?[0];
        if version != FORMAT_VERSION {
            return Err(CipherError::UnsupportedVersion(version));
        }
        let rule_len = r.take(1)?[0] as usize;
        let rule_text = std::str::from_utf8(r.take(rule_len)?)
            .map_err(|_| CipherError::Malformed("rule is not ASCII".into()))?;
        let rule = Rule::parse(rule_text)?;
        let rows = u16::from_be_bytes(r.array()?) as usize;
        let cols = u16::from_be_bytes(r.array()?) as usize;
        let rho = r.take(1)?[0] as usize;
        let alpha = u32::from_be_bytes(r.array()?);
        let mu = f64::from_bits(u64::from_be_bytes(r.array()?));
        let len = u64::from_be_bytes(r.array()?);
        let rest = &bytes[r.pos..];
        if rest.len() as u64 != len {
            return Err(CipherError::Malformed(format!(
                "payload has {} bytes, header says {len}",
                rest.len()
            )));
        }
        let params = CipherParams { rule, rows, cols, rho, mu, alpha, version };
        params.validate()?;
        Ok(CiphertextEnvelope { params, payload: rest.to_vec() })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CipherError> {
        let end = self.pos + n;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| CipherError::Malformed(format!("truncated header at byte {}", self.pos)))?;
        self.pos = end;
        Ok(slice)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], CipherError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
}

pub fn seal(plaintext: &[u8], password: &Password, params: &CipherParams) -> Result<CiphertextEnvelope, CipherError> {
    let keystream = params.keystream(password)?.next_bytes(plaintext.len());
    let payload = encrypt(plaintext, &keystream)?;
    Ok(CiphertextEnvelope { params: params.clone(), payload })
}

pub fn open(envelope: &CiphertextEnvelope, password: &Password) -> Result<Vec<u8>, CipherError> {
    let keystream = envelope.params.keystream(password)?.next_bytes(envelope.payload.len());
    decrypt(&envelope.payload, &keystream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_params() -> CipherParams {
        CipherParams { rows: 16, cols: 16, rho: 3, alpha: 200, ..CipherParams::default() }
    }

    #[test]
    fn encrypt_examples() {
        assert_eq!(encrypt(&[0x00], &[0xAB]).unwrap(), vec![0xAB]);
        assert!(encrypt(&[], &[]).unwrap().is_empty());
        let p = [3u8, 5, 9, 200, 17];
        let prefix: Vec<u8> = p.iter().scan(0u8, |acc, &b| { *acc ^= b; Some(*acc) }).collect();
        assert_eq!(encrypt(&p, &[0; 5]).unwrap(), prefix);
        assert_eq!(
            encrypt(&[1, 2], &[1]),
            Err(CipherError::KeystreamExhausted { needed: 2, keystream: 1 })
        );
    }

    #[test]
    fn decrypt_examples() {
        assert_eq!(decrypt(&[0xAB], &[0xAB]).unwrap(), vec![0x00]);
        assert!(decrypt(&[], &[]).unwrap().is_empty());
        assert!(decrypt(&[1, 2, 3], &[0, 0]).is_err());
    }

    #[test]
    fn literal_chaining_zeroes_first_byte() {
        for (p, y) in [(0x12u8, 0x34u8), (0xff, 0x00), (0x5a, 0xa5)] {
            let c = encrypt_literal_chaining(&[p, 7, 9], &[y, 1, 2]).unwrap();
            assert_eq!(c[0], 0);
        }
    }

    #[test]
    fn header_layout() {
        let env = CiphertextEnvelope { params: CipherParams::default(), payload: vec![1, 2, 3] };
        let bytes = env.to_bytes();
        let mut expected = b"CACR\x01\x0cB1357/S02468".to_vec();
        expected.extend_from_slice(&[0, 128, 0, 128, 10, 0, 0, 0x03, 0xe8]);
        expected.extend_from_slice(&4.0f64.to_bits().to_be_bytes());
        expected.extend_from_slice(&[0, 0, 0, 0, 0, 0, 0, 3, 1, 2, 3]);
        assert_eq!(bytes, expected);
        assert_eq!(CiphertextEnvelope::from_bytes(&bytes).unwrap(), env);
    }

    #[test]
    fn container_errors() {
        let env = seal(b"hello", &Password::from_text("k").unwrap(), &small_params()).unwrap();
        let bytes = env.to_bytes();
        for cut in [0, 3, 10, 20, bytes.len() - 1] {
            assert!(matches!(CiphertextEnvelope::from_bytes(&bytes[..cut]), Err(CipherError::Malformed(_))));
        }
        let mut wrong_version = bytes.clone();
        wrong_version[4] = 2;
        assert_eq!(CiphertextEnvelope::from_bytes(&wrong_version), Err(CipherError::UnsupportedVersion(2)));
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(matches!(CiphertextEnvelope::from_bytes(&bad_magic), Err(CipherError::Malformed(_))));
        let mut zero_rho = bytes.clone();
        let rho_at = 6 + bytes[5] as usize + 4;
        zero_rho[rho_at] = 0;
        assert!(matches!(CiphertextEnvelope::from_bytes(&zero_rho), Err(CipherError::InvalidParams(_))));
    }

    #[test]
    fn params_validation() {
        let mut p = small_params();
        p.rows = 3;
        p.cols = 3;
        assert!(matches!(p.validate(), Err(CipherError::InvalidParams(_))));
        let p = CipherParams { mu: 3.5, ..small_params() };
        assert!(matches!(p.validate(), Err(CipherError::Seed(SeedError::MuOutOfRange(_)))));
        let p = CipherParams { rule: Rule::parse("B03/S").unwrap(), ..small_params() };
        assert!(p.validate().is_err());
    }

    #[test]
    fn seal_is_deterministic_and_wrong_key_garbles() {
        let key = Password::from_text("s3cret").unwrap();
        let msg = b"attack at dawn, bring snacks".to_vec();
        let a = seal(&msg, &key, &small_params()).unwrap();
        let b = seal(&msg, &key, &small_params()).unwrap();
        assert_eq!(a, b);
        assert_eq!(open(&a, &key).unwrap(), msg);
        assert_ne!(open(&a, &Password::from_text("s3creu").unwrap()).unwrap(), msg);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn round_trip(p in proptest::collection::vec(any::<u8>(), 0..4096), key in any::<[u8; 16]>(), rho in 1usize..6) {
            let params = CipherParams { rho, ..small_params() };
            let key = Password::new(key);
            let env = seal(&p, &key, &params).unwrap();
            prop_assert_eq!(env.payload.len(), p.len());
            let env = CiphertextEnvelope::from_bytes(&env.to_bytes()).unwrap();
            prop_assert_eq!(open(&env, &key).unwrap(), p);
        }

        #[test]
        fn flipped_byte_corrupts_two_plaintext_bytes(p in proptest::collection::vec(any::<u8>(), 2..200), y in proptest::collection::vec(any::<u8>(), 200), at in any::<prop::sample::Index>(), mask in 1u8..) {
            let j = at.index(p.len());
            let mut c = encrypt(&p, &y).unwrap();
            c[j] ^= mask;
            let back = decrypt(&c, &y).unwrap();
            for (i, (a, b)) in back.iter().zip(&p).enumerate() {
                prop_assert_eq!(a != b, i == j || i == j + 1, "byte {}", i);
            }
        }
    }
}
