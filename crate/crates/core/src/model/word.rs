use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A maximal run of one symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Run {
    pub symbol: u8,
    pub count: BigUint,
}

/// A finite word kept in canonical run-length form: adjacent runs always
/// differ in symbol and no run is empty.
///
/// The textual form joins runs with spaces, e.g. `"0^64 1 0^128"`. A token is
/// either a literal (`"aba"`, `"11"`) or a single symbol with a decimal
/// repetition count (`"a^56"`). The empty word prints as `ε`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word {
    runs: Vec<Run>,
}

impl Word {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_symbols(symbols: &[u8]) -> Self {
        let mut w = Self::empty();
        for &s in symbols {
            w.push(s, 1u32);
        }
        w
    }

    pub fn unary(symbol: u8, count: impl Into<BigUint>) -> Self {
        let mut w = Self::empty();
        w.push(symbol, count);
        w
    }

    /// Appends `count` copies of `symbol`, merging with the last run.
    pub fn push(&mut self, symbol: u8, count: impl Into<BigUint>) {
        let count = count.into();
        if count.is_zero() {
            return;
        }
        match self.runs.last_mut() {
            Some(last) if last.symbol == symbol => last.count += count,
            _ => self.runs.push(Run { symbol, count }),
        }
    }

    pub fn extend(&mut self, other: &Word) {
        for run in &other.runs {
            self.push(run.symbol, run.count.clone());
        }
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn len(&self) -> BigUint {
        self.runs.iter().map(|r| &r.count).sum()
    }

    /// Number of occurrences of `symbol`.
    pub fn count_of(&self, symbol: u8) -> BigUint {
        self.runs
            .iter()
            .filter(|r| r.symbol == symbol)
            .map(|r| &r.count)
            .sum()
    }

    /// Symbol at 0-based position `pos`.
    pub fn symbol_at(&self, pos: &BigUint) -> Option<u8> {
        let mut start = BigUint::zero();
        for run in &self.runs {
            let end = &start + &run.count;
            if *pos < end {
                return Some(run.symbol);
            }
            start = end;
        }
        None
    }

    /// Expands the word, refusing anything longer than `limit` symbols.
    pub fn to_symbols(&self, limit: usize) -> Result<Vec<u8>> {
        let len = self.len();
        match len.to_usize() {
            Some(n) if n <= limit => {
                let mut out = Vec::with_capacity(n);
                for run in &self.runs {
                    let c = run.count.to_usize().expect("bounded by total length");
                    out.extend(std::iter::repeat_n(run.symbol, c));
                }
                Ok(out)
            }
            _ => Err(Error::CapExceeded(format!(
                "word of length {len} exceeds the explicit limit of {limit} symbols"
            ))),
        }
    }

    /// The symbols of the alphabet actually used, in first-appearance order.
    pub fn alphabet(&self) -> Vec<u8> {
        let mut seen = Vec::new();
        for run in &self.runs {
            if !seen.contains(&run.symbol) {
                seen.push(run.symbol);
            }
        }
        seen
    }

    /// `Some(n)` when the word is `symbol^n` (including the empty word).
    pub fn unary_length(&self, symbol: u8) -> Option<BigUint> {
        match self.runs.as_slice() {
            [] => Some(BigUint::zero()),
            [run] if run.symbol == symbol => Some(run.count.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return f.write_str("ε");
        }
        for (i, run) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let sym = run.symbol as char;
            if run.count.is_one() {
                write!(f, "{sym}")?;
            } else {
                write!(f, "{sym}^{}", run.count)?;
            }
        }
        Ok(())
    }
}

fn valid_symbol(c: char) -> bool {
    c.is_ascii_graphic() && c != '^'
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = Word::empty();
        for token in s.split_whitespace() {
            if token == "ε" {
                continue;
            }
            match token.split_once('^') {
                Some((sym, count)) => {
                    let mut chars = sym.chars();
                    let c = match (chars.next(), chars.next()) {
                        (Some(c), None) if valid_symbol(c) => c,
                        _ => {
                            return Err(Error::Parse(format!(
                                "'{token}': a repeat count applies to exactly one symbol"
                            )))
                        }
                    };
                    let count: BigUint = count
                        .parse()
                        .map_err(|_| Error::Parse(format!("'{token}': bad repeat count")))?;
                    w.push(c as u8, count);
                }
                None => {
                    for c in token.chars() {
                        if !valid_symbol(c) {
                            return Err(Error::Parse(format!("'{token}': invalid symbol '{c}'")));
                        }
                        w.push(c as u8, 1u32);
                    }
                }
            }
        }
        Ok(w)
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl From<&str> for Word {
    /// Literal symbols, no run syntax.
    fn from(s: &str) -> Self {
        Word::from_symbols(s.as_bytes())
    }
}
