//! The presentation of the surface group Λ_{g,n} and its named elements.

use thiserror::Error;

use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("genus must be at least 1, got {0}")]
    GenusZero(usize),
    #[error("theta index {k} out of range 1..={max} for genus {g}")]
    ThetaIndex { g: usize, k: usize, max: usize },
    #[error("xi index {k} out of range 1..={max} for {n} punctures")]
    XiIndex { n: usize, k: usize, max: usize },
}

/// Generators α₁, β₁, …, α_g, β_g, γ₁, …, γ_n with the single relator
/// `[α₁,β₁]⋯[α_g,β_g]·γ₁⋯γ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub g: usize,
    pub n: usize,
    pub generators: Vec<Letter>,
    pub relator: Word,
}

pub fn check_genus(g: usize) -> Result<(), SurfaceError> {
    if g == 0 {
        Err(SurfaceError::GenusZero(g))
    } else {
        Ok(())
    }
}

pub fn presentation(g: usize, n: usize) -> Result<Presentation, SurfaceError> {
    check_genus(g)?;
    let generators = (0..2 * g + n).map(|s| Letter::from_slot(s, g)).collect();
    Ok(Presentation {
        g,
        n,
        generators,
        relator: relator(g, n),
    })
}

/// The relator word; `g ≥ 1` is not checked.
pub fn relator(g: usize, n: usize) -> Word {
    let mut letters = Vec::with_capacity(4 * g + n);
    for i in 1..=g {
        let (a, b) = (Letter::alpha(i), Letter::beta(i));
        letters.extend([a, b, a.inv(), b.inv()]);
    }
    letters.extend((1..=n).map(Letter::gamma));
    Word::reduce(letters)
}

/// δ = γ₁⋯γ_n.
pub fn delta(n: usize) -> Word {
    Word::reduce((1..=n).map(Letter::gamma))
}

/// Θ_k = α_{k+1} β_{k+1}⁻¹ α_{k+1}⁻¹ β_k, for 1 ≤ k ≤ g−1.
pub fn theta(g: usize, k: usize) -> Result<Word, SurfaceError> {
    if k == 0 || k >= g {
        return Err(SurfaceError::ThetaIndex {
            g,
            k,
            max: g.saturating_sub(1),
        });
    }
    let (a, b) = (Letter::alpha(k + 1), Letter::beta(k + 1));
    Ok(Word::reduce([a, b.inv(), a.inv(), Letter::beta(k)]))
}

/// Ξ_k = (γ₁⋯γ_k)⁻¹ β_g, for 1 ≤ k ≤ n−1.
pub fn xi(g: usize, n: usize, k: usize) -> Result<Word, SurfaceError> {
    if k == 0 || k >= n {
        return Err(SurfaceError::XiIndex {
            n,
            k,
            max: n.saturating_sub(1),
        });
    }
    Ok(delta(k).invert().concat(&Word::letter(Letter::beta(g))))
}
