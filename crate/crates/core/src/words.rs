//! Free-group words over the generators α_i, β_i, γ_j of the surface group.
//!
//! Words are kept freely reduced at all times, so word equality is plain
//! sequence equality. Nothing here reduces modulo the surface relator.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unrecognized word token {0:?}")]
    BadToken(String),
    #[error("generator {0} is out of range for genus {1} with {2} punctures")]
    OutOfRange(String, usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Alpha,
    Beta,
    Gamma,
}

impl Kind {
    fn prefix(self) -> char {
        match self {
            Kind::Alpha => 'a',
            Kind::Beta => 'b',
            Kind::Gamma => 'g',
        }
    }
}

/// A generator or its inverse. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub kind: Kind,
    pub index: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(kind: Kind, index: usize, inverse: bool) -> Letter {
        Letter {
            kind,
            index: index as u16,
            inverse,
        }
    }

    pub fn alpha(i: usize) -> Letter {
        Letter::new(Kind::Alpha, i, false)
    }

    pub fn beta(i: usize) -> Letter {
        Letter::new(Kind::Beta, i, false)
    }

    pub fn gamma(j: usize) -> Letter {
        Letter::new(Kind::Gamma, j, false)
    }

    pub fn inv(self) -> Letter {
        Letter {
            inverse: !self.inverse,
            ..self
        }
    }

    /// The positive generator underlying this letter.
    pub fn positive(self) -> Letter {
        Letter {
            inverse: false,
            ..self
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.kind == other.kind && self.index == other.index && self.inverse != other.inverse
    }

    /// Position of the generator in the order α₁, β₁, …, α_g, β_g, γ₁, …, γ_n.
    pub fn slot(self, g: usize) -> usize {
        let i = self.index as usize - 1;
        match self.kind {
            Kind::Alpha => 2 * i,
            Kind::Beta => 2 * i + 1,
            Kind::Gamma => 2 * g + i,
        }
    }

    /// Inverse of [`Letter::slot`].
    pub fn from_slot(slot: usize, g: usize) -> Letter {
        if slot < 2 * g {
            let kind = if slot % 2 == 0 { Kind::Alpha } else { Kind::Beta };
            Letter::new(kind, slot / 2 + 1, false)
        } else {
            Letter::gamma(slot - 2 * g + 1)
        }
    }

    pub fn in_range(self, g: usize, n: usize) -> bool {
        let i = self.index as usize;
        i >= 1
            && match self.kind {
                Kind::Alpha | Kind::Beta => i <= g,
                Kind::Gamma => i <= n,
            }
    }

    pub fn parse(token: &str) -> Result<Letter, WordError> {
        let bad = || WordError::BadToken(token.to_string());
        let (body, inverse) = match token.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let mut chars = body.chars();
        let kind = match chars.next() {
            Some('a') => Kind::Alpha,
            Some('b') => Kind::Beta,
            Some('g') => Kind::Gamma,
            _ => return Err(bad()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) || digits.starts_with('0')
        {
            return Err(bad());
        }
        let index: u16 = digits.parse().map_err(|_| bad())?;
        Ok(Letter {
            kind,
            index,
            inverse,
        })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            match out.last() {
                Some(&last) if last.cancels(l) => {
                    out.pop();
                }
                _ => out.push(l),
            }
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::reduce(self.letters.iter().chain(&other.letters).copied())
    }

    /// Reduced product of several words.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
        Word::reduce(words.into_iter().flat_map(|w| w.letters.iter().copied()))
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        Word::product([u, v, &u.invert(), &v.invert()])
    }

    /// `w · self · w⁻¹`.
    pub fn conjugate_by(&self, w: &Word) -> Word {
        Word::product([w, self, &w.invert()])
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.invert() } else { self.clone() };
        Word::product(std::iter::repeat_n(&base, k.unsigned_abs() as usize))
    }

    /// Returns `(p, core)` with `self = p · core · p⁻¹` and `core` cyclically reduced.
    pub fn cyclic_core(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut i = 0;
        while l.len() >= 2 * (i + 1) && l[i].cancels(l[l.len() - 1 - i]) {
            i += 1;
        }
        (
            Word {
                letters: l[..i].to_vec(),
            },
            Word {
                letters: l[i..l.len() - i].to_vec(),
            },
        )
    }

    /// Some `w` with `w · v · w⁻¹ = u` in the free group, if `u` and `v` are conjugate.
    pub fn conjugate_in_free(u: &Word, v: &Word) -> Option<Word> {
        let (p, uc) = u.cyclic_core();
        let (q, vc) = v.cyclic_core();
        if uc.len() != vc.len() {
            return None;
        }
        let len = vc.len();
        if len == 0 {
            return Some(p.concat(&q.invert()));
        }
        // uc = y·x where vc = x·y; then uc = x⁻¹·vc·x
        for r in 0..len {
            let rotated = vc.letters[r..].iter().chain(&vc.letters[..r]);
            if rotated.eq(uc.letters.iter()) {
                let x = Word {
                    letters: vc.letters[..r].to_vec(),
                };
                return Some(Word::product([&p, &x.invert(), &q.invert()]));
            }
        }
        None
    }

    /// Parse whitespace-separated tokens such as `a1 b1 g2 a1^-1`, checking index ranges.
    pub fn parse(text: &str, g: usize, n: usize) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let l = Letter::parse(tok)?;
            if !l.in_range(g, n) {
                return Err(WordError::OutOfRange(tok.to_string(), g, n));
            }
            letters.push(l);
        }
        Ok(Word::reduce(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Word {
        Word::letter(l)
    }
}
