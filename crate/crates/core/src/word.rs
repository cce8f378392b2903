use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Freely reduced word in the free group on `a` (index 0) and `b` (index 1),
/// stored as syllables `(generator, nonzero exponent)` with adjacent
/// syllables on different generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord {
    syllables: Vec<(u8, i32)>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord::default()
    }

    /// Builds a word from arbitrary syllables, reducing freely.
    pub fn from_syllables<I: IntoIterator<Item = (u8, i32)>>(items: I) -> Self {
        let mut out: Vec<(u8, i32)> = Vec::new();
        for (g, e) in items {
            assert!(g < 2, "generator index out of range");
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == g => {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        GroupWord { syllables: out }
    }

    pub fn generator(g: u8) -> Self {
        GroupWord::from_syllables([(g, 1)])
    }

    /// Parses `a b A B` letters (uppercase = inverse) with optional `^n`.
    pub fn parse(src: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidWord { word: src.to_string(), msg };
        let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut items = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (g, sign) = match chars[i] {
                'a' => (0u8, 1i32),
                'b' => (1, 1),
                'A' => (0, -1),
                'B' => (1, -1),
                '1' if chars.len() == 1 => return Ok(GroupWord::empty()),
                c => return Err(bad(format!("unknown letter {c:?} at {i}"))),
            };
            i += 1;
            let mut e = 1i32;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                e = s
                    .parse()
                    .map_err(|_| bad(format!("bad exponent {s:?}")))?;
            }
            items.push((g, sign * e));
        }
        Ok(GroupWord::from_syllables(items))
    }

    pub fn syllables(&self) -> &[(u8, i32)] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn inverse(&self) -> Self {
        GroupWord {
            syllables: self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        GroupWord::from_syllables(self.syllables.iter().chain(&other.syllables).cloned())
    }

    pub fn pow(&self, n: i32) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Conjugates away matching first and last syllables.
    pub fn cyclically_reduced(&self) -> Self {
        let mut s = self.syllables.clone();
        while s.len() >= 2 && s[0].0 == s[s.len() - 1].0 {
            let last = s.pop().unwrap();
            s[0].1 += last.1;
            if s[0].1 == 0 {
                s.remove(0);
            }
        }
        GroupWord { syllables: s }
    }

    /// Total absolute value of the negative exponents.
    pub fn negative_mass(&self) -> u32 {
        self.syllables
            .iter()
            .filter(|(_, e)| *e < 0)
            .map(|(_, e)| e.unsigned_abs())
            .sum()
    }

    /// Canonical representative of the conjugacy class of `w` and `w⁻¹`.
    /// Of the two orientations the one with less negative exponent mass is
    /// preferred (both on a tie); then the least syllable rotation.
    pub fn canonical_cyclic(&self) -> Self {
        let w = self.cyclically_reduced();
        let n = w.syllables.len();
        if n <= 1 {
            let s = w.syllables.first().map(|&(g, e)| (g, e.abs()));
            return GroupWord { syllables: s.into_iter().collect() };
        }
        let inv = w.inverse();
        let (nw, ni) = (w.negative_mass(), inv.negative_mass());
        let orientations: Vec<&GroupWord> = match nw.cmp(&ni) {
            std::cmp::Ordering::Less => vec![&w],
            std::cmp::Ordering::Greater => vec![&inv],
            std::cmp::Ordering::Equal => vec![&w, &inv],
        };
        let mut best: Option<Vec<(u8, i32)>> = None;
        for cand in orientations {
            for r in 0..n {
                let rot: Vec<(u8, i32)> = cand.syllables[r..]
                    .iter()
                    .chain(&cand.syllables[..r])
                    .cloned()
                    .collect();
                if best.as_ref().map_or(true, |b| rot < *b) {
                    best = Some(rot);
                }
            }
        }
        GroupWord { syllables: best.unwrap() }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for &(g, e) in &self.syllables {
            let c = match (g, e > 0) {
                (0, true) => 'a',
                (0, false) => 'A',
                (_, true) => 'b',
                (_, false) => 'B',
            };
            if e.abs() <= 3 {
                for _ in 0..e.abs() {
                    write!(f, "{c}")?;
                }
            } else {
                write!(f, "{c}^{}", e.abs())?;
            }
        }
        Ok(())
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        assert_eq!(GroupWord::parse("abBa").unwrap().syllables(), &[(0, 2)]);
        assert!(GroupWord::parse("").unwrap().is_empty());
        assert_eq!(GroupWord::parse("BAbaBabABa").unwrap().len(), 10);
        assert_eq!(GroupWord::parse("a^3 b^-2").unwrap().to_string(), "aaaBB");
        assert!(GroupWord::parse("abc").is_err());
    }

    #[test]
    fn reduction_is_idempotent() {
        let w = GroupWord::parse("aAbBBbaaBa").unwrap();
        assert_eq!(GroupWord::from_syllables(w.syllables().to_vec()), w);
    }

    #[test]
    fn canonical_form_ignores_rotation_and_inversion() {
        let w = GroupWord::parse("abAAb").unwrap();
        let r = GroupWord::parse("AAbab").unwrap();
        assert_eq!(w.canonical_cyclic(), r.canonical_cyclic());
        assert_eq!(w.canonical_cyclic(), w.inverse().canonical_cyclic());
    }
}
