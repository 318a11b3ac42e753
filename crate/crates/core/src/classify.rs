//! Finite-orbit decision procedure and orbit-size bounds.
//!
//! Infinite verdicts are only issued on structural grounds (translation
//! groups, non-torsion linear parts, non-abelian affine images in genus ≥ 2,
//! non-translation punctures after preparation). Exhausting a search or an
//! orbit cap never yields a verdict.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::{euler_phi, CycloElt};
use crate::mcg::{GenName, McgWord};
use crate::orbit::{self, OrbitError};
use crate::reps::{
    affine_part, common_fixed_point, conjugacy_equal, conjugate_rep, is_totally_reducible,
    scalar_part, slot_name, AffElt, AffineRep, AnyRep, Gl2Rep, GroupElement, ImageOrder, Rep,
    RepError, ScalarRep,
};

/// Default bound on classes visited while searching for a non-abelian handle.
pub const DEFAULT_SEARCH_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("representation does not satisfy the surface relator")]
    InvalidRep,
    #[error("preparation needs a non-abelian representation")]
    Abelian,
    #[error("generator {0} has a linear part that is not a root of unity")]
    NonTorsion(String),
    #[error("no class with a non-abelian last handle among the first {0} classes")]
    SearchExhausted(usize),
    #[error("puncture g{puncture} is not a translation after applying [{word}]")]
    NonTranslationPuncture { puncture: usize, word: McgWord },
    #[error("infinite image")]
    InfiniteImage,
    #[error("{0}")]
    Domain(String),
    #[error("bound does not fit in 64 bits")]
    Overflow,
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Finite,
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    AbelianFiniteImage,
    AbelianInfiniteImage,
    #[serde(rename = "genus1_mu_c")]
    Genus1MuC,
    HigherGenusNonAbelian,
    NonTorsionLinearPart,
    TranslationGroup,
    NonTranslationPuncture,
}

/// Data of the genus-one family recognized by preparation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuCData {
    /// Order of μ.
    pub mu_order: u64,
    pub mu: CycloElt,
    /// Puncture translations normalized to sum to 1.
    pub c: Vec<CycloElt>,
    /// Number of punctures with nontrivial image.
    pub n_prime: usize,
}

/// A non-abelian affine representation brought to the shape
/// α_g ↦ μ^m z, β_g ↦ z + 1, by a mapping class followed by a conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreparedForm {
    pub mcg_word: McgWord,
    pub conjugator: AffElt,
    pub rep: AffineRep,
    /// Order of the cyclic group of linear parts.
    pub mu_order: u64,
    /// Generator μ of that group.
    pub mu: CycloElt,
    /// Exponent of each linear part with respect to μ, in slot order.
    pub exponents: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub reason: Reason,
    pub bounds: Option<(u64, u64)>,
    /// Predicted orbit size when the bounds do not pin it down.
    pub expected_orbit_size: Option<u64>,
    pub mu_c: Option<MuCData>,
    pub elimination_check: Option<bool>,
    pub prepared: Option<PreparedForm>,
    pub algebraizability_note: &'static str,
}

const NOTE_FINITE: &str =
    "finite orbit: the universal isomonodromic deformation of the associated logarithmic connections is algebraic";
const NOTE_INFINITE: &str =
    "infinite orbit: the universal isomonodromic deformation of the associated logarithmic connections is not algebraic";

impl Classification {
    fn new(verdict: Verdict, reason: Reason) -> Classification {
        Classification {
            verdict,
            reason,
            bounds: None,
            expected_orbit_size: None,
            mu_c: None,
            elimination_check: None,
            prepared: None,
            algebraizability_note: match verdict {
                Verdict::Finite => NOTE_FINITE,
                Verdict::Infinite => NOTE_INFINITE,
            },
        }
    }

    fn with_bounds(mut self, b: (u64, u64)) -> Classification {
        self.bounds = Some(b);
        self
    }
}

// ---------------------------------------------------------------------------
// counting

fn pow(base: u64, e: u64) -> Result<u64, ClassifyError> {
    let e = u32::try_from(e).map_err(|_| ClassifyError::Overflow)?;
    base.checked_pow(e).ok_or(ClassifyError::Overflow)
}

fn mul(a: u64, b: u64) -> Result<u64, ClassifyError> {
    a.checked_mul(b).ok_or(ClassifyError::Overflow)
}

fn positive(name: &str, v: u64) -> Result<(), ClassifyError> {
    if v == 0 {
        Err(ClassifyError::Domain(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

/// `(N^{2g−1}, N^{2g})` for a scalar representation with image of order N.
pub fn bounds_scalar(order: u64, g: u64) -> Result<(u64, u64), ClassifyError> {
    positive("image order", order)?;
    positive("genus", g)?;
    Ok((pow(order, 2 * g - 1)?, pow(order, 2 * g)?))
}

/// Bounds for a direct sum of two characters with image orders `n1`, `n2`
/// and joint image order `n_rho`: `(⌈max(n_i^{2g−1})/2⌉, n_rho^{2g})`.
pub fn bounds_b1(n1: u64, n2: u64, n_rho: u64, g: u64) -> Result<(u64, u64), ClassifyError> {
    positive("first image order", n1)?;
    positive("second image order", n2)?;
    positive("joint image order", n_rho)?;
    positive("genus", g)?;
    let m = pow(n1, 2 * g - 1)?.max(pow(n2, 2 * g - 1)?);
    Ok((m.div_ceil(2), pow(n_rho, 2 * g)?))
}

/// Bounds for λ ⊗ ρ_{μ,c} with μ of order N, n′ nontrivial punctures and λ of image order N₂:
/// `(max(N₂, φ(N)(2N−φ(N))N^{n′−1}), (N²−1)N^{n′−1}N₂²)`.
pub fn bounds_b2(order: u64, n_prime: u64, n2: u64) -> Result<(u64, u64), ClassifyError> {
    if order < 2 {
        return Err(ClassifyError::Domain("mu order must be at least 2".into()));
    }
    positive("n'", n_prime)?;
    positive("scalar image order", n2)?;
    let phi = euler_phi(order);
    let tail = pow(order, n_prime - 1)?;
    let lower = mul(mul(phi, 2 * order - phi)?, tail)?.max(n2);
    let upper = mul(mul(mul(order * order - 1, tail)?, n2)?, n2)?;
    Ok((lower, upper))
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `#{v ∈ (Z/N)^k : gcd(v, d) = 1}` for `d | N`, by Möbius inversion over divisors of `d`.
fn coprime_vectors(order: u64, k: u64, d: u64) -> Result<u64, ClassifyError> {
    let mut total: i128 = 0;
    for e in (1..=d).filter(|e| d % e == 0) {
        let mu = mobius(e);
        if mu != 0 {
            total += mu as i128 * pow(order / e, k)? as i128;
        }
    }
    u64::try_from(total).map_err(|_| ClassifyError::Overflow)
}

/// |K_N|·N^{n′−1}, where K_N = {(k₁,k₂) ∈ [1,N]² : gcd(k₁,k₂,N) = 1}.
pub fn expected_affine_count(order: u64, n_prime: u64) -> Result<u64, ClassifyError> {
    if order < 2 {
        return Err(ClassifyError::Domain("mu order must be at least 2".into()));
    }
    positive("n'", n_prime)?;
    mul(coprime_vectors(order, 2, order)?, pow(order, n_prime - 1)?)
}

/// Size of the orbit of a finite-image scalar representation: with μ a
/// generator of the image (order N), the α/β exponent vectors v ∈ (Z/N)^{2g}
/// with gcd(v, m₁, …, m_n, N) = 1, where m_j are the γ exponents.
pub fn count_scalar_orbit(lambda: &ScalarRep) -> Result<u64, ClassifyError> {
    let order = lambda.image_order().ok_or(ClassifyError::InfiniteImage)?;
    let m = lambda.field.root_order() as u64;
    let step = m / order;
    let mut d = order;
    for j in 1..=lambda.n {
        let e = lambda.gamma(j).root_exponent().expect("finite image") as u64 / step;
        d = d.gcd(&e);
    }
    coprime_vectors(order, 2 * lambda.g as u64, d)
}

// ---------------------------------------------------------------------------
// preparation

fn exponent(x: &CycloElt) -> u64 {
    x.root_exponent().expect("torsion linear part") as u64
}

/// Bring a non-abelian affine representation with torsion linear parts to prepared form.
pub fn prepare(rep: &AffineRep, search_cap: usize) -> Result<PreparedForm, ClassifyError> {
    if !rep.validate() {
        return Err(ClassifyError::InvalidRep);
    }
    if rep.is_abelian() {
        return Err(ClassifyError::Abelian);
    }
    if let Some(s) = rep
        .images
        .iter()
        .position(|x| x.lin.as_root_of_unity().is_none())
    {
        return Err(ClassifyError::NonTorsion(slot_name(s, rep.g)));
    }
    let (g, f) = (rep.g, rep.field);
    let handle_nonabelian =
        |r: &AffineRep| !AffElt::commutator(r.alpha(g), r.beta(g)).is_identity();
    let mut word = orbit::search(rep, search_cap, handle_nonabelian)?
        .ok_or(ClassifyError::SearchExhausted(search_cap))?
        .0;
    let mut cur = rep.act_word(&McgWord(word.clone()))?;

    // Euclid on the exponent pair of (α_g, β_g): τ_{2g} sends (m, k) to (m−k, k)
    // and τ_{2g−1} sends it to (m, k−m)
    let (ta, tb) = (GenName::tau(2 * g), GenName::tau(2 * g - 1));
    let mut apply = |x: GenName, times: u64, cur: &mut AffineRep| -> Result<(), RepError> {
        for _ in 0..times {
            *cur = cur.act(x)?;
            word.push(x);
        }
        Ok(())
    };
    loop {
        let (m, k) = (exponent(&cur.alpha(g).lin), exponent(&cur.beta(g).lin));
        if k == 0 {
            break;
        }
        if m == 0 {
            apply(ta.inv(), 1, &mut cur)?;
            apply(tb, 1, &mut cur)?;
        } else if m >= k {
            apply(ta, m / k, &mut cur)?;
        } else {
            apply(tb, k / m, &mut cur)?;
        }
    }

    // α_g = az + b with a ≠ 1 and β_g = z + d with d ≠ 0, since [α_g, β_g] ≠ 1
    let a = cur.alpha(g).clone();
    let s = a.trans.div(&(&a.lin - &f.one())).expect("a ≠ 1");
    let center = AffElt::new(f.one(), s);
    let d = cur.beta(g).trans.clone();
    let scale = AffElt::scaling(d.inv().expect("d ≠ 0"));
    let conjugator = scale.compose(&center);
    let prepared = conjugate_rep(&cur, &conjugator);
    debug_assert!(prepared.alpha(g).trans.is_zero());
    debug_assert!(prepared.beta(g).trans.is_one() && prepared.beta(g).lin.is_one());
    let mcg_word = McgWord(word);
    debug_assert!(conjugacy_equal(&rep.act_word(&mcg_word)?, &prepared).is_some());

    if let Some(j) = (1..=prepared.n).find(|&j| !prepared.gamma(j).lin.is_one()) {
        return Err(ClassifyError::NonTranslationPuncture {
            puncture: j,
            word: mcg_word,
        });
    }

    let root = f.root_order() as u64;
    let order = prepared
        .images
        .iter()
        .map(|x| x.lin.as_root_of_unity().expect("torsion") as u64)
        .fold(1, |acc, o| acc.lcm(&o));
    let step = root / order;
    let exponents = prepared
        .images
        .iter()
        .map(|x| exponent(&x.lin) / step)
        .collect();
    Ok(PreparedForm {
        mcg_word,
        conjugator,
        rep: prepared,
        mu_order: order,
        mu: f.omega_pow(step as i64),
        exponents,
    })
}

/// The necessary conditions on handle g−1 of a prepared form:
/// lin(α_{g−1})·lin(α_g) = 1 and α_{g−1}, β_{g−1} have zero translation parts.
pub fn elimination_check(p: &PreparedForm) -> Result<bool, ClassifyError> {
    let g = p.rep.g;
    if g < 2 {
        return Err(ClassifyError::Domain("elimination needs genus at least 2".into()));
    }
    let (a1, a) = (p.rep.alpha(g - 1), p.rep.alpha(g));
    Ok((&a1.lin * &a.lin).is_one() && a1.trans.is_zero() && p.rep.beta(g - 1).trans.is_zero())
}

// ---------------------------------------------------------------------------
// classification

fn n_prime_affine(rep: &AffineRep) -> usize {
    (1..=rep.n).filter(|&j| !rep.gamma(j).is_identity()).count()
}

fn classify_scalar(rep: &ScalarRep) -> Result<Classification, ClassifyError> {
    Ok(match rep.image_order() {
        Some(order) => Classification::new(Verdict::Finite, Reason::AbelianFiniteImage)
            .with_bounds(bounds_scalar(order, rep.g as u64)?),
        None => Classification::new(Verdict::Infinite, Reason::AbelianInfiniteImage),
    })
}

fn classify_affine(rep: &AffineRep, search_cap: usize) -> Result<Classification, ClassifyError> {
    let g = rep.g;
    if rep.is_abelian() {
        if rep.images.iter().all(|x| x.lin.is_one()) {
            return Ok(if rep.is_trivial() {
                Classification::new(Verdict::Finite, Reason::AbelianFiniteImage)
                    .with_bounds(bounds_scalar(1, g as u64)?)
            } else {
                Classification::new(Verdict::Infinite, Reason::TranslationGroup)
            });
        }
        return Ok(match rep.image_order() {
            Some(order) => Classification::new(Verdict::Finite, Reason::AbelianFiniteImage)
                .with_bounds(bounds_scalar(order, g as u64)?),
            None => Classification::new(Verdict::Infinite, Reason::AbelianInfiniteImage),
        });
    }
    if rep.images.iter().any(|x| x.lin.as_root_of_unity().is_none()) {
        return Ok(Classification::new(
            Verdict::Infinite,
            Reason::NonTorsionLinearPart,
        ));
    }
    let prepared = match prepare(rep, search_cap) {
        Ok(p) => p,
        Err(ClassifyError::NonTranslationPuncture { .. }) => {
            let reason = if g >= 2 {
                Reason::HigherGenusNonAbelian
            } else {
                Reason::NonTranslationPuncture
            };
            return Ok(Classification::new(Verdict::Infinite, reason));
        }
        Err(e) => return Err(e),
    };
    if g >= 2 {
        let mut c = Classification::new(Verdict::Infinite, Reason::HigherGenusNonAbelian);
        c.elimination_check = Some(elimination_check(&prepared)?);
        c.prepared = Some(prepared);
        return Ok(c);
    }
    let f = rep.field;
    let mu = prepared.rep.alpha(1).lin.clone();
    let mu_order = mu.as_root_of_unity().expect("torsion") as u64;
    let one_minus = &f.one() - &mu;
    let c: Vec<CycloElt> = (1..=rep.n)
        .map(|j| prepared.rep.gamma(j).trans.div(&one_minus).expect("μ ≠ 1"))
        .collect();
    let n_prime = n_prime_affine(rep);
    let mut out = Classification::new(Verdict::Finite, Reason::Genus1MuC)
        .with_bounds(bounds_b2(mu_order, n_prime as u64, 1)?);
    out.expected_orbit_size = Some(expected_affine_count(mu_order, n_prime as u64)?);
    out.mu_c = Some(MuCData {
        mu_order,
        mu,
        c,
        n_prime,
    });
    out.prepared = Some(prepared);
    Ok(out)
}

fn classify_gl2(rep: &Gl2Rep, search_cap: usize) -> Result<Classification, ClassifyError> {
    let g = rep.g as u64;
    if is_totally_reducible(rep) {
        let tops: ScalarRep = Rep::new(
            rep.g,
            rep.n,
            rep.field,
            rep.images.iter().map(|m| m.top.clone()).collect(),
        );
        let bottoms = scalar_part(rep);
        return Ok(match (tops.image_order(), bottoms.image_order()) {
            (Some(n1), Some(n2)) => {
                let n_rho = rep.image_order().expect("both characters finite");
                Classification::new(Verdict::Finite, Reason::AbelianFiniteImage)
                    .with_bounds(bounds_b1(n1, n2, n_rho, g)?)
            }
            _ => Classification::new(Verdict::Infinite, Reason::AbelianInfiniteImage),
        });
    }
    let lambda = scalar_part(rep);
    let Some(n2) = lambda.image_order() else {
        return Ok(Classification::new(
            Verdict::Infinite,
            Reason::NonTorsionLinearPart,
        ));
    };
    let aff = affine_part(rep);
    debug_assert!(common_fixed_point(&aff).is_none());
    let mut c = classify_affine(&aff, search_cap)?;
    if c.verdict == Verdict::Finite {
        let data = c.mu_c.as_ref().expect("finite nonsplit classes are of mu_c type");
        let n_prime = (1..=rep.n)
            .filter(|&j| !aff.gamma(j).is_identity())
            .count() as u64;
        c.bounds = Some(bounds_b2(data.mu_order, n_prime, n2)?);
    }
    Ok(c)
}

pub fn classify(rep: &AnyRep) -> Result<Classification, ClassifyError> {
    classify_with(rep, DEFAULT_SEARCH_CAP)
}

pub fn classify_with(rep: &AnyRep, search_cap: usize) -> Result<Classification, ClassifyError> {
    if !rep.validate() {
        return Err(ClassifyError::InvalidRep);
    }
    match rep {
        AnyRep::Scalar(r) => classify_scalar(r),
        AnyRep::Affine(r) => classify_affine(r, search_cap),
        AnyRep::Gl2(r) => classify_gl2(r, search_cap),
    }
}
