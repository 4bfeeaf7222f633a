//! Deterministic finite automata over tuples of base-n digits.
//!
//! A [`Dfa`] reads one digit per *track* at each step, least-significant
//! digit first. A tuple of naturals is accepted when its canonical encoding
//! (no trailing all-zero symbol) is accepted. Every `Dfa` produced by this
//! module is kept *padding-closed*: a word is accepted iff the word followed
//! by the all-zero symbol is accepted, so boolean operations and projection
//! are sound on number encodings.

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

mod io;
mod ops;

pub use ops::BoolOp;

/// Default hard cap on state counts for growing operations.
pub const DEFAULT_STATE_CAP: usize = 2_000_000;

#[derive(Debug, Error)]
pub enum AutomataError {
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("unknown track `{0}`")]
    UnknownTrack(String),
    #[error("state cap exceeded (more than {0} states)")]
    CapacityExceeded(usize),
    #[error("digit {digit} out of range for base {base}")]
    InvalidDigit { digit: u8, base: u32 },
    #[error("malformed automaton: {0}")]
    Malformed(String),
}

/// A complete DFA over the alphabet `{0, …, base−1}^m` with named tracks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    base: u32,
    tracks: Vec<String>,
    /// Number of symbols, `base^tracks.len()`.
    alpha: usize,
    initial: usize,
    accepting: Vec<bool>,
    /// Row-major: `transitions[state * alpha + symbol]`.
    transitions: Vec<usize>,
}

impl Dfa {
    /// Builds a DFA from raw parts, validating completeness and ranges.
    pub fn from_parts(
        base: u32,
        tracks: Vec<String>,
        initial: usize,
        accepting: Vec<bool>,
        transitions: Vec<usize>,
    ) -> Result<Self, AutomataError> {
        if base < 2 {
            return Err(AutomataError::Malformed(format!("base {base} < 2")));
        }
        for (i, t) in tracks.iter().enumerate() {
            if t.is_empty() {
                return Err(AutomataError::Malformed("empty track name".into()));
            }
            if tracks[..i].contains(t) {
                return Err(AutomataError::Malformed(format!("duplicate track `{t}`")));
            }
        }
        let alpha = alphabet_size(base, tracks.len())?;
        let states = accepting.len();
        if states == 0 {
            return Err(AutomataError::Malformed("no states".into()));
        }
        if initial >= states {
            return Err(AutomataError::Malformed("initial state out of range".into()));
        }
        if transitions.len() != states * alpha {
            return Err(AutomataError::Malformed(format!(
                "expected {} transitions, got {}",
                states * alpha,
                transitions.len()
            )));
        }
        if transitions.iter().any(|&t| t >= states) {
            return Err(AutomataError::Malformed("transition target out of range".into()));
        }
        Ok(Dfa { base, tracks, alpha, initial, accepting, transitions })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn tracks(&self) -> &[String] {
        &self.tracks
    }

    pub fn arity(&self) -> usize {
        self.tracks.len()
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet_len(&self) -> usize {
        self.alpha
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn step(&self, state: usize, symbol: usize) -> usize {
        self.transitions[state * self.alpha + symbol]
    }

    /// Symbol id of a digit tuple; track 0 is the most significant position,
    /// so ascending ids are ascending lexicographic order in track order.
    pub fn symbol_index(&self, digits: &[u8]) -> usize {
        debug_assert_eq!(digits.len(), self.tracks.len());
        digits.iter().fold(0usize, |acc, &d| acc * self.base as usize + d as usize)
    }

    /// Digit tuple of a symbol id (inverse of [`Dfa::symbol_index`]).
    pub fn symbol_digits(&self, symbol: usize) -> Vec<u8> {
        symbol_digits(symbol, self.base, self.tracks.len())
    }

    /// State reached from `initial` on a word of symbol ids.
    pub fn run(&self, word: impl IntoIterator<Item = usize>) -> usize {
        word.into_iter().fold(self.initial, |s, sym| self.step(s, sym))
    }

    /// Membership of a tuple of naturals (one per track, in track order).
    pub fn accepts(&self, values: &[BigUint]) -> Result<bool, AutomataError> {
        if values.len() != self.tracks.len() {
            return Err(AutomataError::Malformed(format!(
                "expected {} values, got {}",
                self.tracks.len(),
                values.len()
            )));
        }
        let word = encode(values, self.base);
        let state = self.run(word.iter().map(|d| self.symbol_index(d)));
        Ok(self.accepting[state])
    }

    /// Whether acceptance is invariant under appending/removing the all-zero
    /// symbol, checked on reachable states.
    pub fn is_padding_closed(&self) -> bool {
        let mut seen = vec![false; self.state_count()];
        let mut queue = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = queue.pop() {
            if self.accepting[s] != self.accepting[self.step(s, 0)] {
                return false;
            }
            for sym in 0..self.alpha {
                let t = self.step(s, sym);
                if !seen[t] {
                    seen[t] = true;
                    queue.push(t);
                }
            }
        }
        true
    }

    /// One-state DFA accepting every tuple.
    pub fn full(base: u32, tracks: Vec<String>) -> Result<Self, AutomataError> {
        let alpha = alphabet_size(base, tracks.len())?;
        Dfa::from_parts(base, tracks, 0, vec![true], vec![0; alpha])
    }

    /// One-state DFA accepting nothing.
    pub fn empty(base: u32, tracks: Vec<String>) -> Result<Self, AutomataError> {
        let alpha = alphabet_size(base, tracks.len())?;
        Dfa::from_parts(base, tracks, 0, vec![false], vec![0; alpha])
    }
}

pub(crate) fn alphabet_size(base: u32, arity: usize) -> Result<usize, AutomataError> {
    let arity_u32 =
        u32::try_from(arity).map_err(|_| AutomataError::Malformed("too many tracks".into()))?;
    (base as usize)
        .checked_pow(arity_u32)
        .ok_or_else(|| AutomataError::Malformed("alphabet too large".into()))
}

pub(crate) fn symbol_digits(symbol: usize, base: u32, arity: usize) -> Vec<u8> {
    let mut digits = vec![0u8; arity];
    let mut rest = symbol;
    for i in (0..arity).rev() {
        digits[i] = (rest % base as usize) as u8;
        rest /= base as usize;
    }
    digits
}

/// Canonical LSD-first encoding of a tuple of naturals: one digit tuple per
/// position, no trailing all-zero symbol. The all-zero tuple encodes to the
/// empty word.
pub fn encode(values: &[BigUint], base: u32) -> Vec<Vec<u8>> {
    assert!(base >= 2, "base must be >= 2");
    let digit_rows: Vec<Vec<u8>> = values
        .iter()
        .map(|v| if v.is_zero() { Vec::new() } else { v.to_radix_le(base) })
        .collect();
    let len = digit_rows.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|k| digit_rows.iter().map(|row| row.get(k).copied().unwrap_or(0)).collect())
        .collect()
}

/// Decodes a word of digit tuples back to naturals; trailing zero padding is
/// ignored. `arity` fixes the tuple width (needed for the empty word).
pub fn decode(word: &[Vec<u8>], arity: usize, base: u32) -> Result<Vec<BigUint>, AutomataError> {
    let mut values = vec![BigUint::zero(); arity];
    let big_base = BigUint::from(base);
    let mut power = BigUint::from(1u32);
    for symbol in word {
        if symbol.len() != arity {
            return Err(AutomataError::Malformed(format!(
                "symbol arity {} != {}",
                symbol.len(),
                arity
            )));
        }
        for (i, &d) in symbol.iter().enumerate() {
            if d as u32 >= base {
                return Err(AutomataError::InvalidDigit { digit: d, base });
            }
            values[i] += &power * BigUint::from(d);
        }
        power *= &big_base;
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn encode_twelve_four_base_two() {
        // 12 = 1100₂, 4 = 100₂, LSD first.
        let word = encode(&[n(12), n(4)], 2);
        assert_eq!(word, vec![vec![0, 0], vec![0, 0], vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn encode_zero_is_empty() {
        assert!(encode(&[n(0)], 2).is_empty());
        assert!(encode(&[n(0), n(0)], 7).is_empty());
    }

    #[test]
    fn decode_ignores_padding() {
        let mut word = encode(&[n(5)], 2);
        word.push(vec![0]);
        assert_eq!(decode(&word, 1, 2).unwrap(), vec![n(5)]);
    }

    #[test]
    fn decode_rejects_bad_digit() {
        assert!(decode(&[vec![3]], 1, 2).is_err());
    }

    #[test]
    fn decode_encode_roundtrip() {
        for base in [2u32, 3, 4] {
            for v in [0u64, 1, 7, 100, 65535, 123456789] {
                for w in [0u64, 2, 9, 4096] {
                    let vals = vec![n(v), n(w)];
                    let word = encode(&vals, base);
                    assert_eq!(decode(&word, 2, base).unwrap(), vals);
                }
            }
        }
    }

    #[test]
    fn from_parts_validates() {
        assert!(Dfa::from_parts(1, vec!["x".into()], 0, vec![true], vec![0]).is_err());
        assert!(Dfa::from_parts(2, vec!["x".into(), "x".into()], 0, vec![true], vec![0; 4]).is_err());
        assert!(Dfa::from_parts(2, vec!["x".into()], 2, vec![true], vec![0, 0]).is_err());
        assert!(Dfa::from_parts(2, vec!["x".into()], 0, vec![true], vec![0]).is_err());
        assert!(Dfa::from_parts(2, vec!["x".into()], 0, vec![true, false], vec![0, 1, 1, 0]).is_ok());
    }
}
