//! Generator automorphisms of the mapping class group acting on Λ_{g,n}.
//!
//! Generators are the twists τ₁, …, τ_{3g−1} (plus the mixing twists
//! τ_{3g}, …, τ_{3g+n−2} when n ≥ 2) and the half-twists σ₁, …, σ_{n−1}.
//! Composition follows `(a∘b)(x) = a(b(x))`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::surface::{self, check_genus, SurfaceError};
use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McgError {
    #[error("{0} is not a generator for genus {1} with {2} punctures")]
    OutOfRange(GenName, usize, usize),
    #[error("unrecognized mapping class token {0:?}")]
    BadToken(String),
    #[error("cyclic power {k} out of range 1..={n}")]
    CyclicPower { n: usize, k: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    Tau,
    Sigma,
}

/// A generator τ_i^{±1} or σ_j^{±1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenName {
    pub kind: GenKind,
    pub index: usize,
    pub inverse: bool,
}

impl GenName {
    pub fn tau(i: usize) -> GenName {
        GenName {
            kind: GenKind::Tau,
            index: i,
            inverse: false,
        }
    }

    pub fn sigma(j: usize) -> GenName {
        GenName {
            kind: GenKind::Sigma,
            index: j,
            inverse: false,
        }
    }

    pub fn inv(self) -> GenName {
        GenName {
            inverse: !self.inverse,
            ..self
        }
    }

    pub fn power(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn is_valid(self, g: usize, n: usize) -> bool {
        match self.kind {
            GenKind::Tau => self.index >= 1 && self.index <= tau_count(g, n),
            GenKind::Sigma => self.index >= 1 && self.index < n,
        }
    }

    pub fn check(self, g: usize, n: usize) -> Result<(), McgError> {
        check_genus(g)?;
        if self.is_valid(g, n) {
            Ok(())
        } else {
            Err(McgError::OutOfRange(self, g, n))
        }
    }
}

impl fmt::Display for GenName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            GenKind::Tau => 't',
            GenKind::Sigma => 's',
        };
        write!(f, "{c}{}", self.index)?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

impl FromStr for GenName {
    type Err = McgError;
    fn from_str(token: &str) -> Result<GenName, McgError> {
        let bad = || McgError::BadToken(token.to_string());
        let (body, inverse) = match token.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let kind = match body.chars().next() {
            Some('t') => GenKind::Tau,
            Some('s') => GenKind::Sigma,
            _ => return Err(bad()),
        };
        let digits = &body[1..];
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) || digits.starts_with('0')
        {
            return Err(bad());
        }
        Ok(GenName {
            kind,
            index: digits.parse().map_err(|_| bad())?,
            inverse,
        })
    }
}

impl Serialize for GenName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Number of twist generators: 3g−1, plus n−1 mixing twists when n ≥ 2.
pub fn tau_count(g: usize, n: usize) -> usize {
    3 * g - 1 + n.saturating_sub(1)
}

/// All positive generators, twists first.
pub fn generators(g: usize, n: usize) -> Vec<GenName> {
    (1..=tau_count(g, n))
        .map(GenName::tau)
        .chain((1..n).map(GenName::sigma))
        .collect()
}

/// Every generator together with its inverse, in the order `x₁, x₁⁻¹, x₂, …`.
pub fn generators_with_inverses(g: usize, n: usize) -> Vec<GenName> {
    generators(g, n)
        .into_iter()
        .flat_map(|x| [x, x.inv()])
        .collect()
}

/// A word in the generators, written `t1 t5^-1 s2`. As a mapping class the
/// first token acts first, so the word denotes the product `s2 · t5⁻¹ · t1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct McgWord(pub Vec<GenName>);

impl McgWord {
    pub fn parse(text: &str, g: usize, n: usize) -> Result<McgWord, McgError> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            let x: GenName = tok.parse()?;
            x.check(g, n)?;
            out.push(x);
        }
        Ok(McgWord(out))
    }

    /// The inverse mapping class: tokens reversed and inverted.
    pub fn inverse(&self) -> McgWord {
        McgWord(self.0.iter().rev().map(|x| x.inv()).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The automorphism induced by the mapping class.
    pub fn automorphism(&self, g: usize, n: usize) -> Result<Automorphism, McgError> {
        let mut acc = Automorphism::identity(g, n);
        for &x in &self.0 {
            acc = auto_of(x, g, n)?.compose(&acc);
        }
        Ok(acc)
    }
}

impl fmt::Display for McgWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl Serialize for McgWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An automorphism of the free group on the 2g+n generators, stored by the
/// images of the positive generators in slot order, with the induced
/// permutation of punctures (`perm[i] = j` when γ_{i+1} maps to a conjugate of γ_{j+1}).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub g: usize,
    pub n: usize,
    pub images: Vec<Word>,
    pub perm: Vec<usize>,
}

impl Automorphism {
    pub fn identity(g: usize, n: usize) -> Automorphism {
        Automorphism {
            g,
            n,
            images: (0..2 * g + n)
                .map(|s| Word::letter(Letter::from_slot(s, g)))
                .collect(),
            perm: (0..n).collect(),
        }
    }

    pub fn image(&self, l: Letter) -> Word {
        let w = &self.images[l.slot(self.g)];
        if l.inverse {
            w.invert()
        } else {
            w.clone()
        }
    }

    fn set(&mut self, l: Letter, w: Word) {
        let s = l.slot(self.g);
        self.images[s] = w;
    }

    /// Multiplicative extension to an arbitrary word.
    pub fn apply(&self, w: &Word) -> Word {
        Word::reduce(w.letters().iter().flat_map(|&l| {
            let img = &self.images[l.slot(self.g)];
            let v: Vec<Letter> = if l.inverse {
                img.letters().iter().rev().map(|x| x.inv()).collect()
            } else {
                img.letters().to_vec()
            };
            v
        }))
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            g: self.g,
            n: self.n,
            images: other.images.iter().map(|w| self.apply(w)).collect(),
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Automorphism::identity(self.g, self.n)
    }

    pub fn is_pure(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// The automorphism of a generator; for an inverse generator this is the
/// closed-form inverse automorphism.
pub fn auto_of(x: GenName, g: usize, n: usize) -> Result<Automorphism, McgError> {
    x.check(g, n)?;
    let mut a = Automorphism::identity(g, n);
    let inv = x.inverse;
    let lw = Word::letter;
    match x.kind {
        GenKind::Tau if x.index <= 2 * g => {
            let k = x.index.div_ceil(2);
            let (al, be) = (Letter::alpha(k), Letter::beta(k));
            if x.index % 2 == 0 {
                // α_k ↦ α_k β_k
                let b = if inv { be.inv() } else { be };
                a.set(al, Word::reduce([al, b]));
            } else {
                // β_k ↦ β_k α_k
                let c = if inv { al.inv() } else { al };
                a.set(be, Word::reduce([be, c]));
            }
        }
        GenKind::Tau if x.index < 3 * g => {
            let k = x.index - 2 * g;
            let th = surface::theta(g, k)?;
            let ti = th.invert();
            // inverse swaps the roles of Θ_k and Θ_k⁻¹
            let (p, q) = if inv { (&ti, &th) } else { (&th, &ti) };
            let (a1, ak, bk) = (Letter::alpha(k + 1), Letter::alpha(k), Letter::beta(k));
            a.set(a1, Word::product([q, &lw(a1)]));
            a.set(ak, Word::product([&lw(ak), p]));
            a.set(bk, Word::product([q, &lw(bk), p]));
        }
        GenKind::Tau => {
            let k = x.index - (3 * g - 1);
            let xk = surface::xi(g, n, k)?;
            let xki = xk.invert();
            let (p, q) = if inv { (&xki, &xk) } else { (&xk, &xki) };
            let (ag, bg) = (Letter::alpha(g), Letter::beta(g));
            a.set(ag, Word::product([&lw(ag), p]));
            a.set(bg, Word::product([q, &lw(bg), p]));
            for i in 1..=k {
                let gi = Letter::gamma(i);
                a.set(gi, Word::product([q, &lw(gi), p]));
            }
        }
        GenKind::Sigma => {
            let k = x.index;
            let (gk, gk1) = (Letter::gamma(k), Letter::gamma(k + 1));
            if inv {
                a.set(gk, lw(gk1));
                a.set(gk1, Word::reduce([gk1.inv(), gk, gk1]));
            } else {
                a.set(gk, Word::reduce([gk, gk1, gk.inv()]));
                a.set(gk1, lw(gk));
            }
            a.perm.swap(k - 1, k);
        }
    }
    Ok(a)
}

pub fn inverse_auto(x: GenName, g: usize, n: usize) -> Result<Automorphism, McgError> {
    auto_of(x.inv(), g, n)
}

/// Closed form of σ_cycl^k where σ_cycl = σ_{n−1}∘⋯∘σ₁:
/// γ_i ↦ δ γ_{n+i−k} δ⁻¹ for i ≤ k and γ_j ↦ γ_{j−k} for j > k.
pub fn sigma_cycl_power(g: usize, n: usize, k: usize) -> Result<Automorphism, McgError> {
    check_genus(g)?;
    if k == 0 || k > n {
        return Err(McgError::CyclicPower { n, k });
    }
    let d = surface::delta(n);
    let mut a = Automorphism::identity(g, n);
    for i in 1..=n {
        let (src, img) = if i <= k {
            let j = n + i - k;
            (j, Word::letter(Letter::gamma(j)).conjugate_by(&d))
        } else {
            (i - k, Word::letter(Letter::gamma(i - k)))
        };
        a.set(Letter::gamma(i), img);
        a.perm[i - 1] = src - 1;
    }
    Ok(a)
}

/// Some `w` with `a(relator) = w · relator · w⁻¹` in the free group.
pub fn relator_conjugator(a: &Automorphism) -> Option<Word> {
    let r = surface::relator(a.g, a.n);
    Word::conjugate_in_free(&a.apply(&r), &r)
}

/// Precomputed data for acting on representations by one generator.
#[derive(Clone, Debug)]
pub struct GenAction {
    pub gen: GenName,
    /// Slots whose value changes, each with the word (as `(slot, inverted)`
    /// letters) whose value under the old representation gives the new one.
    pub moved: Vec<(usize, Vec<(usize, bool)>)>,
    /// Puncture permutation induced by the generator.
    pub perm: Vec<usize>,
}

/// Action data for every generator and inverse of one (g, n).
#[derive(Debug)]
pub struct McgTables {
    pub g: usize,
    pub n: usize,
    pub actions: Vec<GenAction>,
    index: HashMap<GenName, usize>,
}

static TABLES: OnceLock<Mutex<HashMap<(usize, usize), Arc<McgTables>>>> = OnceLock::new();

impl McgTables {
    /// Memoized tables for (g, n).
    pub fn get(g: usize, n: usize) -> Result<Arc<McgTables>, McgError> {
        check_genus(g)?;
        let map = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = guard.get(&(g, n)) {
            return Ok(t.clone());
        }
        let t = Arc::new(McgTables::build(g, n)?);
        guard.insert((g, n), t.clone());
        Ok(t)
    }

    fn build(g: usize, n: usize) -> Result<McgTables, McgError> {
        let id = Automorphism::identity(g, n);
        let mut actions = Vec::new();
        let mut index = HashMap::new();
        for x in generators_with_inverses(g, n) {
            // ([h]·ρ)(x) = ρ(a(h⁻¹)(x))
            let pull = inverse_auto(x, g, n)?;
            let moved = pull
                .images
                .iter()
                .enumerate()
                .filter(|(s, w)| **w != id.images[*s])
                .map(|(s, w)| {
                    (
                        s,
                        w.letters().iter().map(|l| (l.slot(g), l.inverse)).collect(),
                    )
                })
                .collect();
            index.insert(x, actions.len());
            actions.push(GenAction {
                gen: x,
                moved,
                perm: auto_of(x, g, n)?.perm,
            });
        }
        Ok(McgTables {
            g,
            n,
            actions,
            index,
        })
    }

    pub fn action(&self, x: GenName) -> Result<&GenAction, McgError> {
        self.index
            .get(&x)
            .map(|&i| &self.actions[i])
            .ok_or(McgError::OutOfRange(x, self.g, self.n))
    }
}
