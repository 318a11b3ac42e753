//! Exact arithmetic in the cyclotomic field Q(ζ_N).
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(N)-1}` as integer
//! numerators over one positive common denominator, reduced to lowest terms.
//! Values that fit in `i64` use an inline small representation and are
//! computed with checked `i128` arithmetic; anything that overflows is
//! recomputed with `BigInt`. The small/big choice is canonical (a value is
//! big only when it does not fit), so structural equality is field equality.
//!
//! Fields are interned: [`Field::get`] returns a `&'static Field`, which
//! makes elements cheap to clone and safe to share across threads.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

/// Largest supported root-of-unity order.
pub const MAX_ORDER: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("cyclotomic order must be in 1..={MAX_ORDER}, got {0}")]
    InvalidOrder(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational coefficient {0:?}")]
    Parse(String),
    #[error("expected {expected} coefficients for Q(zeta_{order}), found {found}")]
    LengthMismatch {
        order: u32,
        expected: usize,
        found: usize,
    },
    #[error("elements live in different fields (orders {0} and {1})")]
    FieldMismatch(u32, u32),
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The cyclotomic field Q(ζ_N).
pub struct Field {
    order: u32,
    degree: usize,
    modulus: Vec<i64>,
    /// `powers[e]` is ζ^e in the power basis, for `e` in `0..N`.
    powers: Vec<Vec<i64>>,
    /// Galois automorphisms ζ ↦ ζ^k other than the identity.
    conjugators: Vec<u32>,
    /// Order of the full torsion subgroup, lcm(2, N).
    root_order: u32,
    /// Numerator vector of ω^e ↦ e, where ω generates the roots of unity.
    roots: HashMap<Vec<i64>, u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.order)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}
impl Eq for Field {}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.order.hash(state);
    }
}

fn poly_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    // exact division by a monic integer polynomial, coefficients low to high
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = num.len() - dd;
    let mut q = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dd];
        q[k] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[k + j] = rem[k + j]
                    .checked_sub(c.checked_mul(*d).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

fn cyclotomic_poly(n: u32, cache: &mut HashMap<u32, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d, cache);
            p = poly_div_monic(&p, &phi_d);
        }
    }
    cache.insert(n, p.clone());
    p
}

static FIELDS: OnceLock<Mutex<HashMap<u32, &'static Field>>> = OnceLock::new();

impl Field {
    /// Interned Q(ζ_N).
    pub fn get(order: u32) -> Result<&'static Field, CycloError> {
        if order == 0 || order > MAX_ORDER {
            return Err(CycloError::InvalidOrder(order as i64));
        }
        let map = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(f) = guard.get(&order) {
            return Ok(f);
        }
        let field: &'static Field = Box::leak(Box::new(Field::build(order)));
        guard.insert(order, field);
        Ok(field)
    }

    /// Same as [`Field::get`] but accepts any integer, rejecting non-positive orders.
    pub fn get_i64(order: i64) -> Result<&'static Field, CycloError> {
        if order <= 0 || order > MAX_ORDER as i64 {
            return Err(CycloError::InvalidOrder(order));
        }
        Field::get(order as u32)
    }

    fn build(order: u32) -> Field {
        let mut cache = HashMap::new();
        let modulus = cyclotomic_poly(order, &mut cache);
        let degree = modulus.len() - 1;
        debug_assert_eq!(degree as u64, euler_phi(order as u64));

        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by ζ and reduce the top coefficient with Φ_N
            let top = cur[degree - 1];
            let mut next = vec![0i64; degree];
            next[1..degree].copy_from_slice(&cur[..(degree - 1)]);
            if top != 0 {
                for (j, slot) in next.iter_mut().enumerate() {
                    *slot = slot
                        .checked_sub(top.checked_mul(modulus[j]).expect("overflow"))
                        .expect("overflow");
                }
            }
            cur = next;
        }

        let conjugators = (2..order.max(2))
            .filter(|k| k.gcd(&order) == 1)
            .collect::<Vec<_>>();

        let root_order = if order % 2 == 0 { order } else { 2 * order };
        let mut roots = HashMap::new();
        for e in 0..root_order {
            let base = &powers[(e % order) as usize];
            let v: Vec<i64> = if order % 2 == 1 && e % 2 == 1 {
                base.iter().map(|c| -c).collect()
            } else {
                base.clone()
            };
            roots.entry(v).or_insert(e);
        }

        Field {
            order,
            degree,
            modulus,
            powers,
            conjugators,
            root_order,
            roots,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// φ(N), the dimension over Q.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients of Φ_N, lowest degree first.
    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    /// Number of roots of unity in the field, lcm(2, N).
    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn zero(&'static self) -> CycloElt {
        CycloElt::from_small(self, SmallVec::from_elem(0, self.degree), 1)
    }

    pub fn one(&'static self) -> CycloElt {
        self.int(1)
    }

    pub fn int(&'static self, v: i64) -> CycloElt {
        self.ratio(v, 1)
    }

    /// The rational `num/den`; panics on `den == 0`.
    pub fn ratio(&'static self, num: i64, den: i64) -> CycloElt {
        assert!(den != 0, "zero denominator");
        let mut nums: SmallVec<[i128; 4]> = SmallVec::from_elem(0, self.degree);
        nums[0] = num as i128;
        let w = normalize(Wf {
            num: nums,
            den: den as i128,
        })
        .expect("rational fits");
        CycloElt::narrow_small(self, w)
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(&'static self, k: i64) -> CycloElt {
        let e = k.rem_euclid(self.order as i64) as usize;
        CycloElt::from_small(self, self.powers[e].iter().copied().collect(), 1)
    }

    /// ω^e, where ω = ζ for even N and ω = −ζ for odd N generates all roots of unity.
    pub fn omega_pow(&'static self, e: i64) -> CycloElt {
        let m = self.root_order as i64;
        let e = e.rem_euclid(m);
        let z = self.zeta_pow(e);
        if self.order % 2 == 1 && e % 2 == 1 {
            -&z
        } else {
            z
        }
    }
}

// ---------------------------------------------------------------------------
// wide arithmetic, shared by the checked i128 path and the BigInt path

trait Wide: Clone + PartialEq + fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn c_add(&self, o: &Self) -> Option<Self>;
    fn c_sub(&self, o: &Self) -> Option<Self>;
    fn c_mul(&self, o: &Self) -> Option<Self>;
    fn c_neg(&self) -> Option<Self>;
    /// Non-negative gcd.
    fn gcd_w(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
}

impl Wide for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn c_sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn c_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd_w(&self, o: &Self) -> Self {
        let mut a = self.unsigned_abs();
        let mut b = o.unsigned_abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a as i128
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

impl Wide for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn c_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn c_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn c_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn c_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd_w(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

#[derive(Clone, Debug)]
struct Wf<W> {
    num: SmallVec<[W; 4]>,
    den: W,
}

fn normalize<W: Wide>(mut w: Wf<W>) -> Option<Wf<W>> {
    if w.den.is_zero() {
        return None;
    }
    if w.num.iter().all(|c| c.is_zero()) {
        w.den = W::from_i64(1);
        return Some(w);
    }
    if w.den.is_negative() {
        w.den = w.den.c_neg()?;
        for c in w.num.iter_mut() {
            *c = c.c_neg()?;
        }
    }
    if !w.den.is_one() {
        let mut g = w.den.clone();
        for c in &w.num {
            if g.is_one() {
                break;
            }
            if !c.is_zero() {
                g = g.gcd_w(c);
            }
        }
        if !g.is_one() {
            w.den = w.den.div_exact(&g);
            for c in w.num.iter_mut() {
                *c = c.div_exact(&g);
            }
        }
    }
    Some(w)
}

fn add_w<W: Wide>(a: &Wf<W>, b: &Wf<W>, negate_b: bool) -> Option<Wf<W>> {
    let same_den = a.den == b.den;
    let mut num = SmallVec::with_capacity(a.num.len());
    for (x, y) in a.num.iter().zip(&b.num) {
        let (xs, ys) = if same_den {
            (x.clone(), y.clone())
        } else {
            (x.c_mul(&b.den)?, y.c_mul(&a.den)?)
        };
        num.push(if negate_b { xs.c_sub(&ys)? } else { xs.c_add(&ys)? });
    }
    let den = if same_den { a.den.clone() } else { a.den.c_mul(&b.den)? };
    normalize(Wf { num, den })
}

fn mul_w<W: Wide>(field: &Field, a: &Wf<W>, b: &Wf<W>) -> Option<Wf<W>> {
    let d = field.degree;
    let den = a.den.c_mul(&b.den)?;
    if d == 1 {
        let mut num = SmallVec::new();
        num.push(a.num[0].c_mul(&b.num[0])?);
        return normalize(Wf { num, den });
    }
    let mut prod: SmallVec<[W; 8]> = SmallVec::from_elem(W::zero(), 2 * d - 1);
    for (i, x) in a.num.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.num.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            prod[i + j] = prod[i + j].c_add(&x.c_mul(y)?)?;
        }
    }
    let mut num: SmallVec<[W; 4]> = prod[..d].iter().cloned().collect();
    let n = field.order as usize;
    for (k, p) in prod.iter().enumerate().skip(d) {
        if p.is_zero() {
            continue;
        }
        let row = &field.powers[k % n];
        for (slot, r) in num.iter_mut().zip(row) {
            if *r != 0 {
                *slot = slot.c_add(&p.c_mul(&W::from_i64(*r))?)?;
            }
        }
    }
    normalize(Wf { num, den })
}

fn galois_w<W: Wide>(field: &Field, a: &Wf<W>, k: u32) -> Option<Wf<W>> {
    let n = field.order as usize;
    let mut num: SmallVec<[W; 4]> = SmallVec::from_elem(W::zero(), field.degree);
    for (i, x) in a.num.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let row = &field.powers[(i * k as usize) % n];
        for (slot, r) in num.iter_mut().zip(row) {
            if *r != 0 {
                *slot = slot.c_add(&x.c_mul(&W::from_i64(*r))?)?;
            }
        }
    }
    Some(Wf {
        num,
        den: a.den.clone(),
    })
}

fn inv_w<W: Wide>(field: &Field, a: &Wf<W>) -> Option<Wf<W>> {
    // x^{-1} = (∏_{σ≠1} σ(x)) / N(x)
    let mut conj = Wf {
        num: {
            let mut v = SmallVec::from_elem(W::zero(), field.degree);
            v[0] = W::from_i64(1);
            v
        },
        den: W::from_i64(1),
    };
    for &k in &field.conjugators {
        let s = galois_w(field, a, k)?;
        conj = mul_w(field, &conj, &s)?;
    }
    let norm = mul_w(field, a, &conj)?;
    debug_assert!(norm.num.iter().skip(1).all(|c| c.is_zero()));
    let nn = norm.num[0].clone();
    let nd = norm.den;
    // divide conj by nn/nd
    let num = conj
        .num
        .iter()
        .map(|c| c.c_mul(&nd))
        .collect::<Option<SmallVec<[W; 4]>>>()?;
    let den = conj.den.c_mul(&nn)?;
    normalize(Wf { num, den })
}

// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Small { num: SmallVec<[i64; 4]>, den: i64 },
    Big { num: Vec<BigInt>, den: BigInt },
}

/// An element of Q(ζ_N).
#[derive(Clone)]
pub struct CycloElt {
    field: &'static Field,
    repr: Repr,
}

impl PartialEq for CycloElt {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.field, other.field) && self.repr == other.repr
    }
}
impl Eq for CycloElt {}

impl Hash for CycloElt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.order.hash(state);
        self.repr.hash(state);
    }
}

fn fits_i64(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl CycloElt {
    fn from_small(field: &'static Field, num: SmallVec<[i64; 4]>, den: i64) -> Self {
        CycloElt {
            field,
            repr: Repr::Small { num, den },
        }
    }

    fn narrow_small(field: &'static Field, w: Wf<i128>) -> Self {
        if fits_i64(w.den) && w.num.iter().all(|&c| fits_i64(c)) {
            CycloElt::from_small(field, w.num.iter().map(|&c| c as i64).collect(), w.den as i64)
        } else {
            CycloElt {
                field,
                repr: Repr::Big {
                    num: w.num.iter().map(|&c| BigInt::from(c)).collect(),
                    den: BigInt::from(w.den),
                },
            }
        }
    }

    fn narrow_big(field: &'static Field, w: Wf<BigInt>) -> Self {
        let small_den = w.den.to_i64().filter(|&d| d != i64::MIN);
        let small_num: Option<SmallVec<[i64; 4]>> = w
            .num
            .iter()
            .map(|c| c.to_i64().filter(|&d| d != i64::MIN))
            .collect();
        match (small_den, small_num) {
            (Some(den), Some(num)) => CycloElt::from_small(field, num, den),
            _ => CycloElt {
                field,
                repr: Repr::Big {
                    num: w.num.into_vec(),
                    den: w.den,
                },
            },
        }
    }

    fn lift_small(&self) -> Option<Wf<i128>> {
        match &self.repr {
            Repr::Small { num, den } => Some(Wf {
                num: num.iter().map(|&c| c as i128).collect(),
                den: *den as i128,
            }),
            Repr::Big { .. } => None,
        }
    }

    fn lift_big(&self) -> Wf<BigInt> {
        match &self.repr {
            Repr::Small { num, den } => Wf {
                num: num.iter().map(|&c| BigInt::from(c)).collect(),
                den: BigInt::from(*den),
            },
            Repr::Big { num, den } => Wf {
                num: num.iter().cloned().collect(),
                den: den.clone(),
            },
        }
    }

    fn check_field(&self, other: &CycloElt) {
        assert!(
            std::ptr::eq(self.field, other.field),
            "{}",
            CycloError::FieldMismatch(self.field.order, other.field.order)
        );
    }

    pub fn field(&self) -> &'static Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Small { num, .. } => num.iter().all(|&c| c == 0),
            Repr::Big { num, .. } => num.iter().all(|c| Zero::is_zero(c)),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Small { num, den } => *den == 1 && num[0] == 1 && num[1..].iter().all(|&c| c == 0),
            Repr::Big { .. } => false,
        }
    }

    /// True when the element lies in Q.
    pub fn is_rational(&self) -> bool {
        match &self.repr {
            Repr::Small { num, .. } => num[1..].iter().all(|&c| c == 0),
            Repr::Big { num, .. } => num[1..].iter().all(|c| Zero::is_zero(c)),
        }
    }

    pub fn add_ref(&self, other: &CycloElt) -> CycloElt {
        self.addsub(other, false)
    }

    pub fn sub_ref(&self, other: &CycloElt) -> CycloElt {
        self.addsub(other, true)
    }

    fn addsub(&self, other: &CycloElt, negate: bool) -> CycloElt {
        self.check_field(other);
        if other.is_zero() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.lift_small(), other.lift_small()) {
            if let Some(r) = add_w(&a, &b, negate) {
                return CycloElt::narrow_small(self.field, r);
            }
        }
        let r = add_w(&self.lift_big(), &other.lift_big(), negate).expect("bigint arithmetic");
        CycloElt::narrow_big(self.field, r)
    }

    pub fn mul_ref(&self, other: &CycloElt) -> CycloElt {
        self.check_field(other);
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.lift_small(), other.lift_small()) {
            if let Some(r) = mul_w(self.field, &a, &b) {
                return CycloElt::narrow_small(self.field, r);
            }
        }
        let r = mul_w(self.field, &self.lift_big(), &other.lift_big()).expect("bigint arithmetic");
        CycloElt::narrow_big(self.field, r)
    }

    pub fn neg_ref(&self) -> CycloElt {
        match &self.repr {
            Repr::Small { num, den } => {
                CycloElt::from_small(self.field, num.iter().map(|c| -c).collect(), *den)
            }
            Repr::Big { num, den } => CycloElt::narrow_big(
                self.field,
                Wf {
                    num: num.iter().map(|c| -c).collect(),
                    den: den.clone(),
                },
            ),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<CycloElt, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        if self.is_one() {
            return Ok(self.clone());
        }
        if let Some(a) = self.lift_small() {
            if let Some(r) = inv_w(self.field, &a) {
                return Ok(CycloElt::narrow_small(self.field, r));
            }
        }
        let r = inv_w(self.field, &self.lift_big()).expect("bigint arithmetic");
        Ok(CycloElt::narrow_big(self.field, r))
    }

    pub fn div(&self, other: &CycloElt) -> Result<CycloElt, CycloError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<CycloElt, CycloError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_ref(&sq);
            }
        }
        Ok(acc)
    }

    /// Exponent `e` with `self = ω^e` (see [`Field::omega_pow`]), if `self` is a root of unity.
    pub fn root_exponent(&self) -> Option<u32> {
        match &self.repr {
            Repr::Small { num, den: 1 } => self.field.roots.get(num.as_slice()).copied(),
            _ => None,
        }
    }

    /// Multiplicative order if `self` is a root of unity.
    pub fn as_root_of_unity(&self) -> Option<u32> {
        let m = self.field.root_order;
        self.root_exponent().map(|e| m / e.gcd(&m))
    }

    /// Coefficients in lowest terms, one `"p/q"` (or `"p"`) string per basis element.
    pub fn to_strings(&self) -> Vec<String> {
        let w = self.lift_big();
        w.num
            .iter()
            .map(|c| {
                let g = Integer::gcd(c, &w.den);
                let (p, q) = if Zero::is_zero(c) {
                    (<BigInt as Zero>::zero(), <BigInt as One>::one())
                } else {
                    (c / &g, &w.den / &g)
                };
                if One::is_one(&q) {
                    p.to_string()
                } else {
                    format!("{p}/{q}")
                }
            })
            .collect()
    }

    /// Parse the coefficient strings produced by [`CycloElt::to_strings`].
    pub fn from_strings<S: AsRef<str>>(
        field: &'static Field,
        coeffs: &[S],
    ) -> Result<CycloElt, CycloError> {
        if coeffs.len() != field.degree {
            return Err(CycloError::LengthMismatch {
                order: field.order,
                expected: field.degree,
                found: coeffs.len(),
            });
        }
        let mut pairs = Vec::with_capacity(coeffs.len());
        for s in coeffs {
            pairs.push(parse_rational(s.as_ref())?);
        }
        let mut den = BigInt::one();
        for (_, q) in &pairs {
            den = Integer::lcm(&den, q);
        }
        let num = pairs.iter().map(|(p, q)| p * (&den / q)).collect();
        let w = normalize(Wf { num, den }).ok_or(CycloError::DivisionByZero)?;
        Ok(CycloElt::narrow_big(field, w))
    }

    /// Deterministic byte encoding; equal elements encode identically.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        match &self.repr {
            Repr::Small { num, den } => {
                out.push(0);
                out.extend_from_slice(&den.to_le_bytes());
                for c in num {
                    out.extend_from_slice(&c.to_le_bytes());
                }
            }
            Repr::Big { num, den } => {
                out.push(1);
                for v in std::iter::once(den).chain(num.iter()) {
                    let b = v.to_signed_bytes_le();
                    out.extend_from_slice(&(b.len() as u32).to_le_bytes());
                    out.extend_from_slice(&b);
                }
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<(BigInt, BigInt), CycloError> {
    let bad = || CycloError::Parse(s.to_string());
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (
            p.trim().parse::<BigInt>().map_err(|_| bad())?,
            q.trim().parse::<BigInt>().map_err(|_| bad())?,
        ),
        None => (t.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if Zero::is_zero(&q) {
        return Err(CycloError::DivisionByZero);
    }
    if Signed::is_negative(&q) {
        Ok((-p, -q))
    } else {
        Ok((p, q))
    }
}

impl fmt::Debug for CycloElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycloElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.to_strings();
        let mut wrote = false;
        for (i, c) in parts.iter().enumerate() {
            if c == "0" {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{i}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for CycloElt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.to_strings())
    }
}

impl Add for &CycloElt {
    type Output = CycloElt;
    fn add(self, rhs: &CycloElt) -> CycloElt {
        self.add_ref(rhs)
    }
}

impl Sub for &CycloElt {
    type Output = CycloElt;
    fn sub(self, rhs: &CycloElt) -> CycloElt {
        self.sub_ref(rhs)
    }
}

impl Mul for &CycloElt {
    type Output = CycloElt;
    fn mul(self, rhs: &CycloElt) -> CycloElt {
        self.mul_ref(rhs)
    }
}

impl Neg for &CycloElt {
    type Output = CycloElt;
    fn neg(self) -> CycloElt {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
        assert_eq!(euler_phi(3), 2);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(97), 96);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(Field::get(1).unwrap().modulus(), &[-1, 1]);
        assert_eq!(Field::get(2).unwrap().modulus(), &[1, 1]);
        assert_eq!(Field::get(3).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Field::get(4).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(Field::get(6).unwrap().modulus(), &[1, -1, 1]);
        assert_eq!(Field::get(12).unwrap().modulus(), &[1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2
        let m = Field::get(105).unwrap().modulus();
        assert_eq!(m.len(), 49);
        assert!(m.iter().any(|&c| c == -2));
    }

    #[test]
    fn rejects_bad_orders() {
        assert_eq!(Field::get_i64(0).unwrap_err(), CycloError::InvalidOrder(0));
        assert!(Field::get_i64(-3).is_err());
        assert!(Field::get(MAX_ORDER + 1).is_err());
    }

    #[test]
    fn spec_field_identities() {
        let f4 = Field::get(4).unwrap();
        let z = f4.zeta_pow(1);
        assert_eq!(&z * &z, f4.int(-1));

        let f3 = Field::get(3).unwrap();
        let s = &(&f3.one() + &f3.zeta_pow(1)) + &f3.zeta_pow(2);
        assert!(s.is_zero());

        let f2 = Field::get(2).unwrap();
        assert_eq!(f2.int(-2).inv().unwrap(), f2.ratio(-1, 2));
        assert_eq!(f2.zero().inv().unwrap_err(), CycloError::DivisionByZero);
    }

    #[test]
    fn zeta_orders() {
        for n in [1u32, 2, 3, 4, 5, 6, 7, 8, 9, 12, 15] {
            let f = Field::get(n).unwrap();
            assert!(f.zeta_pow(n as i64).is_one());
            for k in 1..n as i64 {
                assert!(!f.zeta_pow(k).is_one(), "zeta^{k} == 1 in Q(zeta_{n})");
            }
        }
    }

    #[test]
    fn roots_of_unity() {
        let f4 = Field::get(4).unwrap();
        assert_eq!(f4.zeta_pow(1).as_root_of_unity(), Some(4));
        assert_eq!(f4.int(-1).as_root_of_unity(), Some(2));
        assert_eq!(f4.int(2).as_root_of_unity(), None);
        assert_eq!(f4.one().as_root_of_unity(), Some(1));

        let f3 = Field::get(3).unwrap();
        // −ζ_3 is a primitive 6th root of unity
        assert_eq!((-&f3.zeta_pow(1)).as_root_of_unity(), Some(6));
        assert_eq!(f3.zeta_pow(2).as_root_of_unity(), Some(3));
        assert_eq!(f3.root_order(), 6);
        for e in 0..6 {
            assert_eq!(f3.omega_pow(e).root_exponent(), Some(e as u32));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f = Field::get(5).unwrap();
        let x = &(&f.zeta_pow(1) + &f.ratio(3, 7)) - &f.zeta_pow(3);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        let zm1 = &f.zeta_pow(2) - &f.one();
        assert!((&zm1 * &zm1.inv().unwrap()).is_one());
    }

    #[test]
    fn overflow_promotes_to_bigint() {
        let f = Field::get(3).unwrap();
        let big = f.int(i64::MAX / 3);
        let mut acc = big.clone();
        for _ in 0..4 {
            acc = &acc * &big;
        }
        assert!(matches!(acc.repr, Repr::Big { .. }));
        // and divides back down to the small representation
        let back = acc.div(&big).unwrap().div(&big).unwrap().div(&big).unwrap().div(&big).unwrap();
        assert_eq!(back, big);
        assert!(matches!(back.repr, Repr::Small { .. }));
    }

    #[test]
    fn string_round_trip() {
        let f = Field::get(4).unwrap();
        let x = CycloElt::from_strings(f, &["1/2", "-3/4"]).unwrap();
        assert_eq!(x.to_strings(), vec!["1/2", "-3/4"]);
        let z = CycloElt::from_strings(f, &["0", "6/3"]).unwrap();
        assert_eq!(z.to_strings(), vec!["0", "2"]);
        assert_eq!(z, f.int(2).mul_ref(&f.zeta_pow(1)));
        assert!(CycloElt::from_strings(f, &["1"]).is_err());
        assert!(CycloElt::from_strings(f, &["1/0", "0"]).is_err());
        assert!(CycloElt::from_strings(f, &["x", "0"]).is_err());
    }
}
