//! Brute-force membership checkers written straight from the language
//! definitions. Nothing here calls into the recognizers, so agreement
//! between the two is evidence rather than tautology.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SubsetOracle, Word};

/// Longest explicit string the oracles expand.
const EXPLICIT_CAP: usize = 1 << 22;
/// Largest unary bound `enumerate_members` scans.
const SCAN_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LanguageId {
    Am75,
    Am75p,
    Am75pI,
    Upower64,
    Upower64I,
    Dima,
    DimaI,
    LogDimaI,
    PowerEq,
    PowerEqI,
    Upower8I,
}

impl LanguageId {
    pub const ALL: [LanguageId; 11] = [
        LanguageId::Am75,
        LanguageId::Am75p,
        LanguageId::Am75pI,
        LanguageId::Upower64,
        LanguageId::Upower64I,
        LanguageId::Dima,
        LanguageId::DimaI,
        LanguageId::LogDimaI,
        LanguageId::PowerEq,
        LanguageId::PowerEqI,
        LanguageId::Upower8I,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LanguageId::Am75 => "AM75",
            LanguageId::Am75p => "AM75P",
            LanguageId::Am75pI => "AM75P_I",
            LanguageId::Upower64 => "UPOWER64",
            LanguageId::Upower64I => "UPOWER64_I",
            LanguageId::Dima => "DIMA",
            LanguageId::DimaI => "DIMA_I",
            LanguageId::LogDimaI => "LOG_DIMA_I",
            LanguageId::PowerEq => "POWER_EQ",
            LanguageId::PowerEqI => "POWER_EQ_I",
            LanguageId::Upower8I => "UPOWER8_I",
        }
    }

    pub fn needs_oracle(self) -> bool {
        matches!(
            self,
            LanguageId::Am75pI
                | LanguageId::Upower64I
                | LanguageId::DimaI
                | LanguageId::LogDimaI
                | LanguageId::PowerEqI
                | LanguageId::Upower8I
        )
    }

    /// The symbol of the unary languages.
    pub fn unary_symbol(self) -> Option<u8> {
        match self {
            LanguageId::Am75 | LanguageId::Am75p | LanguageId::Am75pI | LanguageId::Upower8I => {
                Some(b'a')
            }
            LanguageId::Upower64 | LanguageId::Upower64I => Some(b'0'),
            _ => None,
        }
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LanguageId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s
            .trim()
            .to_ascii_uppercase()
            .replace(['′', '\''], "P")
            .replace('-', "_");
        let norm = norm.trim_end_matches('_');
        LanguageId::ALL
            .into_iter()
            .find(|id| id.name() == norm || id.name().replace('_', "") == norm.replace('_', ""))
            .ok_or_else(|| Error::Parse(format!("unknown language '{s}'")))
    }
}

fn need(o: Option<&SubsetOracle>, id: LanguageId) -> Result<&SubsetOracle> {
    o.ok_or_else(|| Error::Config(format!("{id} needs an oracle prefix")))
}

/// The length if `w` consists of `symbol` only (ε included).
fn unary_len(w: &Word, symbol: u8) -> Option<BigUint> {
    let mut n = BigUint::zero();
    for run in w.runs() {
        if run.symbol != symbol {
            return None;
        }
        n += &run.count;
    }
    Some(n)
}

/// Least positive integer that does not divide `n`, by trial division.
pub fn least_non_divisor(n: &BigUint) -> u64 {
    let mut i = 1u64;
    loop {
        i += 1;
        if !(n % i).is_zero() {
            return i;
        }
    }
}

/// `least_non_divisor` for machine integers.
pub fn least_non_divisor_u64(n: u64) -> u64 {
    (2..).find(|i| !n.is_multiple_of(*i)).unwrap_or(u64::MAX)
}

/// `log_b n` when `n` is an exact power of `b`, by repeated division.
fn exact_log(n: &BigUint, b: u64) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let mut n = n.clone();
    let mut e = 0;
    while !n.is_one() {
        if !(&n % b).is_zero() {
            return None;
        }
        n /= b;
        e += 1;
    }
    Some(e)
}

fn is_power_of(n: u64, b: u64) -> bool {
    exact_log(&BigUint::from(n), b).is_some_and(|e| e >= 1)
}

/// Maximal runs of an explicit byte string, computed independently of
/// [`Word`]'s run list.
fn byte_runs(bytes: &[u8]) -> Vec<(u8, usize)> {
    let mut out: Vec<(u8, usize)> = Vec::new();
    for &b in bytes {
        match out.last_mut() {
            Some((s, c)) if *s == b => *c += 1,
            _ => out.push((b, 1)),
        }
    }
    out
}

/// `DIMA` parameter `k` if `w` is a member.
fn dima_k(w: &Word) -> Option<u32> {
    let bytes = w.to_symbols(EXPLICIT_CAP).ok()?;
    let runs = byte_runs(&bytes);
    // Blocks at even positions, separators at odd ones.
    if runs.len().is_multiple_of(2) {
        return None;
    }
    let blocks = runs.len().div_ceil(2);
    if blocks < 7 || !(blocks - 1).is_multiple_of(6) {
        return None;
    }
    let k = (blocks - 1) / 6;
    for (i, &(sym, len)) in runs.iter().enumerate() {
        if i % 2 == 0 {
            let j = i / 2;
            if sym != b'0' || j >= usize::BITS as usize || len != 1usize << j {
                return None;
            }
        } else {
            // Separator before block j.
            let j = i.div_ceil(2);
            let want = if j == 3 * k + 2 || j == 3 * k + 3 {
                2
            } else {
                1
            };
            if sym != b'1' || len != want {
                return None;
            }
        }
    }
    u32::try_from(k).ok()
}

/// `n` if `w = a b a^7 b a^{56} b ... a^{7·8^n} b`.
fn power_eq_n(w: &Word) -> Option<u32> {
    let runs = w.runs();
    if runs.len() < 4 || !runs.len().is_multiple_of(2) {
        return None;
    }
    if runs[0].symbol != b'a' || !runs[0].count.is_one() {
        return None;
    }
    let mut expected = BigUint::from(7u32);
    for (i, pair) in runs[1..runs.len() - 1].chunks(2).enumerate() {
        let (b, a) = (&pair[0], &pair[1]);
        if b.symbol != b'b' || !b.count.is_one() || a.symbol != b'a' {
            return None;
        }
        if i > 0 {
            expected *= 8u32;
        }
        if a.count != expected {
            return None;
        }
    }
    let last = runs.last()?;
    if last.symbol != b'b' || !last.count.is_one() {
        return None;
    }
    u32::try_from(runs.len() / 2 - 2).ok()
}

/// Decodes `0 (1 w_1) 0^{2} ... (1 w_m) 0^{2^m}` by rebuilding the
/// candidate and comparing it with `x`.
fn log_preimage(x: &Word) -> Option<Word> {
    let ones: Vec<&BigUint> = x
        .runs()
        .iter()
        .filter(|r| r.symbol == b'1')
        .map(|r| &r.count)
        .collect();
    if ones.is_empty() {
        return None;
    }
    let mut bits = Vec::with_capacity(ones.len());
    for c in ones {
        match c.to_u8() {
            Some(1) => bits.push(b'0'),
            Some(2) => bits.push(b'1'),
            _ => return None,
        }
    }
    let mut expected = Word::from_symbols(b"0");
    for (i, &b) in bits.iter().enumerate() {
        expected.extend(&Word::from_symbols(&[b'1', b]));
        expected.push(b'0', BigUint::one() << (i + 1));
    }
    (expected == *x).then(|| Word::from_symbols(&bits))
}

/// Membership by direct reading of each definition.
pub fn oracle_membership(id: LanguageId, w: &Word, o: Option<&SubsetOracle>) -> Result<bool> {
    use LanguageId::*;
    Ok(match id {
        Am75 | Am75p | Am75pI => {
            let Some(n) = unary_len(w, b'a').filter(|n| !n.is_zero()) else {
                return Ok(false);
            };
            let f = least_non_divisor(&n);
            match id {
                Am75 => is_power_of(f, 2),
                Am75p => is_power_of(f, 64),
                _ => match exact_log(&BigUint::from(f), 64).filter(|&m| m >= 1) {
                    Some(m) => need(o, id)?.query(m)?,
                    None => false,
                },
            }
        }
        Upower64 | Upower64I => {
            let Some(k) = unary_len(w, b'0')
                .and_then(|n| exact_log(&n, 64))
                .filter(|&k| k >= 1)
            else {
                return Ok(false);
            };
            id == Upower64 || need(o, id)?.query(k)?
        }
        Dima | DimaI => match dima_k(w) {
            None => false,
            Some(k) => id == Dima || need(o, id)?.query(u64::from(k))?,
        },
        LogDimaI => match log_preimage(w).as_ref().and_then(dima_k) {
            None => false,
            Some(k) => need(o, id)?.query(u64::from(k))?,
        },
        PowerEq | PowerEqI => match power_eq_n(w) {
            None => false,
            Some(n) => id == PowerEq || need(o, id)?.query(u64::from(n) + 1)?,
        },
        Upower8I => match unary_len(w, b'a').and_then(|n| exact_log(&n, 8)) {
            Some(n) if n >= 2 => need(o, id)?.query(n - 1)?,
            _ => false,
        },
    })
}

/// Canonical `DIMA` member with parameter `k`, built from the definition.
pub fn dima_member_word(k: u32) -> Word {
    let mut w = Word::empty();
    for j in 0..=6 * k {
        if j > 0 {
            let sep = if j == 3 * k + 2 || j == 3 * k + 3 {
                2u32
            } else {
                1
            };
            w.push(b'1', sep);
        }
        w.push(b'0', BigUint::one() << j);
    }
    w
}

fn power_eq_member_word(n: u32) -> Word {
    let mut w: Word = "a b".parse().expect("literal");
    let mut block = BigUint::from(7u32);
    for _ in 0..=n {
        w.push(b'a', block.clone());
        w.push(b'b', 1u32);
        block *= 8u32;
    }
    w
}

/// Members up to `bound`: unary lengths `≤ bound` for the unary languages,
/// family parameters `≤ bound` for `DIMA`, `LOG(DIMA(I))` and `POWER-EQ`.
pub fn enumerate_members(
    id: LanguageId,
    bound: u64,
    o: Option<&SubsetOracle>,
) -> Result<Vec<Word>> {
    use LanguageId::*;
    let cap = |max: u64| {
        if bound > max {
            Err(Error::CapExceeded(format!(
                "{id} enumeration bound {bound} exceeds {max}"
            )))
        } else {
            Ok(())
        }
    };
    let mut out = Vec::new();
    match id {
        Am75 | Am75p | Am75pI | Upower64 | Upower64I | Upower8I => {
            cap(SCAN_CAP)?;
            let symbol = id.unary_symbol().expect("unary language");
            for n in 1..=bound {
                let w = Word::unary(symbol, n);
                if oracle_membership(id, &w, o)? {
                    out.push(w);
                }
            }
        }
        Dima | DimaI => {
            cap(3)?;
            for k in 1..=bound as u32 {
                let w = dima_member_word(k);
                if id == Dima || need(o, id)?.query(u64::from(k))? {
                    out.push(w);
                }
            }
        }
        LogDimaI => {
            cap(2)?;
            for k in 1..=bound as u32 {
                if !need(o, id)?.query(u64::from(k))? {
                    continue;
                }
                let inner = dima_member_word(k).to_symbols(EXPLICIT_CAP)?;
                let mut x = Word::from_symbols(b"0");
                for (i, &b) in inner.iter().enumerate() {
                    x.extend(&Word::from_symbols(&[b'1', b]));
                    x.push(b'0', BigUint::one() << (i + 1));
                }
                out.push(x);
            }
        }
        PowerEq | PowerEqI => {
            cap(6)?;
            for n in 0..=bound as u32 {
                if id == PowerEq || need(o, id)?.query(u64::from(n) + 1)? {
                    out.push(power_eq_member_word(n));
                }
            }
        }
    }
    Ok(out)
}

/// Single-edit neighbours of `member` that are not in the language: each
/// run lengthened or shortened by one, one symbol inserted at each run
/// boundary, and the first symbol of each run flipped. Variants whose
/// membership would need an index outside the prefix are skipped.
pub fn mutate_near_members(
    id: LanguageId,
    member: &Word,
    budget: usize,
    o: Option<&SubsetOracle>,
) -> Result<Vec<Word>> {
    let runs = member.runs();
    let mut alphabet: BTreeSet<u8> = runs.iter().map(|r| r.symbol).collect();
    match id {
        LanguageId::Dima | LanguageId::DimaI | LanguageId::LogDimaI => {
            alphabet.extend(*b"01");
        }
        LanguageId::PowerEq | LanguageId::PowerEqI => alphabet.extend(*b"ab"),
        _ => {}
    }
    let rebuild = |edit: &dyn Fn(usize, &mut Word)| -> Vec<Word> {
        (0..=runs.len())
            .map(|cut| {
                let mut w = Word::empty();
                for (i, r) in runs.iter().enumerate() {
                    if i == cut {
                        edit(i, &mut w);
                    }
                    w.push(r.symbol, r.count.clone());
                }
                if cut == runs.len() {
                    edit(cut, &mut w);
                }
                w
            })
            .collect()
    };
    let mut candidates = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        for delta in [-1i32, 1] {
            let mut w = Word::empty();
            for (j, s) in runs.iter().enumerate() {
                let c = if i == j {
                    if delta < 0 {
                        &s.count - 1u32
                    } else {
                        &s.count + 1u32
                    }
                } else {
                    s.count.clone()
                };
                if !c.is_zero() {
                    w.push(s.symbol, c);
                }
            }
            candidates.push(w);
        }
        for &a in &alphabet {
            if a == r.symbol {
                continue;
            }
            let mut w = Word::empty();
            for (j, s) in runs.iter().enumerate() {
                if i == j {
                    w.push(a, 1u32);
                    let rest = &s.count - 1u32;
                    if !rest.is_zero() {
                        w.push(s.symbol, rest);
                    }
                } else {
                    w.push(s.symbol, s.count.clone());
                }
            }
            candidates.push(w);
        }
    }
    for &a in &alphabet {
        candidates.extend(rebuild(&|_, w: &mut Word| w.push(a, 1u32)));
    }

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for w in candidates {
        if out.len() >= budget {
            break;
        }
        let key = w.to_string();
        if &w == member || !seen.insert(key) {
            continue;
        }
        match oracle_membership(id, &w, o) {
            Ok(false) => out.push(w),
            Ok(true) | Err(Error::OutOfPrefix { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Error of reading bit `3k+2` of the heads count of `64^k` tosses of a
/// `p`-coin. With `p = a/d`, sums `C(n, x) a^x (d-a)^{n-x}` directly over
/// the wrong outcomes and divides by `d^n` once.
pub fn reference_extraction_error(p: &BigRational, k: u32, expected: bool) -> Result<BigRational> {
    if k == 0 || k > 2 {
        return Err(Error::ExactTooLarge(format!(
            "reference sum only for k ≤ 2, got {k}"
        )));
    }
    if num_traits::Signed::is_negative(p) || p > &BigRational::one() {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    let n = 1usize << (6 * k);
    let a = p.numer().magnitude().clone();
    let d = p.denom().magnitude().clone();
    let b = &d - &a;
    let mut b_pows = Vec::with_capacity(n + 1);
    b_pows.push(BigUint::one());
    for i in 0..n {
        let next = &b_pows[i] * &b;
        b_pows.push(next);
    }
    let mut wrong = BigUint::zero();
    let mut binom = BigUint::one();
    let mut a_pow = BigUint::one();
    for x in 0..=n {
        if x > 0 {
            binom = binom * (n - x + 1) / x;
            a_pow *= &a;
        }
        let bit = (x >> (3 * k + 2)) & 1 == 1;
        if bit != expected {
            wrong += &binom * &a_pow * &b_pows[n - x];
        }
    }
    let total = num_traits::pow(d, n);
    Ok(BigRational::new(wrong.into(), total.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use LanguageId::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in LanguageId::ALL {
            assert_eq!(id.name().parse::<LanguageId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.name()));
        }
        assert_eq!("am75'".parse::<LanguageId>().unwrap(), Am75p);
        assert_eq!("power-eq-i".parse::<LanguageId>().unwrap(), PowerEqI);
        assert!("nope".parse::<LanguageId>().is_err());
    }

    #[test]
    fn examples() {
        let k1 = w("0 1 0^2 1 0^4 1 0^8 1 0^16 11 0^32 11 0^64");
        assert!(oracle_membership(Dima, &k1, None).unwrap());
        assert_eq!(k1, dima_member_word(1));
        let short = w("0 1 0^2 1 0^4 1 0^8 1 0^16 11 0^32 11 0^63");
        assert!(!oracle_membership(Dima, &short, None).unwrap());
        assert!(!oracle_membership(Dima, &Word::empty(), None).unwrap());
        assert!(oracle_membership(Upower64, &Word::unary(b'0', 4096u32), None).unwrap());
        assert!(!oracle_membership(Upower64, &Word::unary(b'0', 1u32), None).unwrap());
        assert!(!oracle_membership(PowerEq, &w("a b a^7 b a^57 b"), None).unwrap());
        assert!(oracle_membership(PowerEq, &w("a b a^7 b a^56 b"), None).unwrap());
        assert!(oracle_membership(PowerEq, &w("a b a^7 b"), None).unwrap());
        assert!(!oracle_membership(PowerEq, &w("a b a^7 b a^56"), None).unwrap());
    }

    #[test]
    fn indexed_languages_query_the_oracle() {
        let o: SubsetOracle = "01".parse().unwrap();
        assert!(!oracle_membership(DimaI, &dima_member_word(1), Some(&o)).unwrap());
        assert!(oracle_membership(DimaI, &dima_member_word(2), Some(&o)).unwrap());
        assert!(oracle_membership(PowerEqI, &w("a b a^7 b"), Some(&o)).is_ok_and(|m| !m));
        assert!(oracle_membership(PowerEqI, &w("a b a^7 b a^56 b"), Some(&o)).unwrap());
        assert!(oracle_membership(Upower8I, &Word::unary(b'a', 64u32), Some(&o)).is_ok_and(|m| !m));
        assert!(!oracle_membership(Upower8I, &Word::unary(b'a', 8u32), Some(&o)).unwrap());
        assert!(oracle_membership(Upower8I, &Word::unary(b'a', 512u32), Some(&o)).unwrap());
        assert!(matches!(
            oracle_membership(Upower64I, &Word::unary(b'0', 1u64 << 18), Some(&o)),
            Err(Error::OutOfPrefix { index: 3, .. })
        ));
        assert!(matches!(
            oracle_membership(DimaI, &dima_member_word(1), None),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn log_preimage_decodes() {
        let x = w("0 11 0^2 10 0^4");
        assert_eq!(log_preimage(&x), Some(w("10")));
        assert_eq!(log_preimage(&w("0 11 0^2 10 0^5")), None);
        assert_eq!(log_preimage(&w("0^2")), None);
        let o: SubsetOracle = "1".parse().unwrap();
        let members = enumerate_members(LogDimaI, 1, Some(&o)).unwrap();
        assert_eq!(members.len(), 1);
        assert!(oracle_membership(LogDimaI, &members[0], Some(&o)).unwrap());
    }

    #[test]
    fn least_non_divisor_examples() {
        assert_eq!(least_non_divisor_u64(1), 2);
        assert_eq!(least_non_divisor_u64(6), 4);
        assert_eq!(least_non_divisor_u64(420), 8);
        assert_eq!(least_non_divisor(&BigUint::from(420u32)), 8);
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_members(Dima, 2, None).unwrap().len(), 2);
        let up = enumerate_members(Upower64, 5000, None).unwrap();
        assert_eq!(
            up,
            vec![Word::unary(b'0', 64u32), Word::unary(b'0', 4096u32)]
        );
        let am: Vec<u64> = enumerate_members(Am75, 10, None)
            .unwrap()
            .iter()
            .map(|w| w.len().to_u64().unwrap())
            .collect();
        // Odd n have F = 2; F(2) = 3, F(4) = 3, F(6) = 4, F(8) = 3, F(10) = 3.
        assert_eq!(am, vec![1, 3, 5, 6, 7, 9]);
        assert!(enumerate_members(Dima, 4, None).is_err());
        for id in [Dima, PowerEq] {
            for m in enumerate_members(id, 2, None).unwrap() {
                assert!(oracle_membership(id, &m, None).unwrap());
            }
        }
    }

    #[test]
    fn mutants_are_non_members() {
        let o: SubsetOracle = "111".parse().unwrap();
        for (id, member) in [
            (Dima, dima_member_word(1)),
            (PowerEq, w("a b a^7 b a^56 b")),
            (Upower64, Word::unary(b'0', 64u32)),
            (DimaI, dima_member_word(2)),
        ] {
            let muts = mutate_near_members(id, &member, 200, Some(&o)).unwrap();
            assert!(muts.len() >= 2, "{id}");
            for m in &muts {
                assert!(!oracle_membership(id, m, Some(&o)).unwrap());
            }
        }
        let muts = mutate_near_members(PowerEq, &w("a b a^7 b a^56 b"), 100, None).unwrap();
        assert!(muts.contains(&w("a b a^7 b a^55 b")));
        let muts = mutate_near_members(Upower64, &Word::unary(b'0', 64u32), 100, None).unwrap();
        assert!(muts.contains(&Word::unary(b'0', 65u32)));
        let muts = mutate_near_members(Dima, &dima_member_word(1), 100, None).unwrap();
        assert!(muts.contains(&w("0 1 0^2 1 0^4 1 0^8 1 0^15 11 0^32 11 0^64")));
    }

    #[test]
    fn reference_extraction_matches_fair_coin_closed_form() {
        // For p = 1/2 the bit of weight 32 of Bin(64, 1/2) is 1 with
        // probability C(64, x) / 2^64 summed over x with that bit set.
        let half = BigRational::new(1.into(), 2.into());
        let err = reference_extraction_error(&half, 1, false).unwrap();
        let mut ones = BigUint::zero();
        let mut c = BigUint::one();
        for x in 0..=64u64 {
            if x > 0 {
                c = c * (64 - x + 1) / x;
            }
            if (x >> 5) & 1 == 1 {
                ones += &c;
            }
        }
        assert_eq!(
            err,
            BigRational::new(ones.into(), (BigUint::one() << 64usize).into())
        );
    }
}
