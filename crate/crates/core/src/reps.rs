//! Scalar, affine and upper-triangular GL₂ representations of Λ_{g,n}.
//!
//! A representation stores one group element per generator in slot order
//! α₁, β₁, …, α_g, β_g, γ₁, …, γ_n. Words evaluate as homomorphisms,
//! `ρ(uv) = ρ(u)∘ρ(v)`, and a mapping class acts by
//! `([h]·ρ)(x) = ρ(a(h⁻¹)(x))`.

use std::fmt::Debug;
use std::hash::Hash;

use num_integer::Integer;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::cyclo::{CycloElt, CycloError, Field};
use crate::mcg::{Automorphism, GenAction, GenName, McgError, McgTables, McgWord};
use crate::surface;
use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("generator {gen}: {source}")]
    Entry { gen: String, source: CycloError },
    #[error("generator {gen}: {msg}")]
    Shape { gen: String, msg: String },
    #[error("expected {expected} {list} entries, found {found}")]
    Count {
        list: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unknown representation kind {0:?}")]
    UnknownKind(String),
    #[error("malformed representation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Mcg(#[from] McgError),
}

/// A group in which representations take values.
pub trait GroupElement: Clone + PartialEq + Eq + Hash + Debug + Send + Sync + 'static {
    /// Tag used in the JSON schema.
    const KIND: &'static str;
    fn identity(field: &'static Field) -> Self;
    /// `self ∘ other`.
    fn compose(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn is_identity(&self) -> bool;
    fn write_key(&self, out: &mut Vec<u8>);
    fn parse_json(v: &Value, field: &'static Field, gen: &str) -> Result<Self, RepError>;
}

fn parse_cyclo(v: &Value, field: &'static Field, gen: &str) -> Result<CycloElt, RepError> {
    let entry = |source| RepError::Entry {
        gen: gen.to_string(),
        source,
    };
    match v {
        Value::Array(items) => {
            let mut strs = Vec::with_capacity(items.len());
            for it in items {
                match it {
                    Value::String(s) => strs.push(s.clone()),
                    Value::Number(k) if k.is_i64() => strs.push(k.to_string()),
                    _ => {
                        return Err(RepError::Shape {
                            gen: gen.to_string(),
                            msg: format!("coefficient {it} is not an exact rational string"),
                        })
                    }
                }
            }
            CycloElt::from_strings(field, &strs).map_err(entry)
        }
        Value::String(s) => {
            let mut strs = vec!["0".to_string(); field.degree()];
            strs[0] = s.clone();
            CycloElt::from_strings(field, &strs).map_err(entry)
        }
        _ => Err(RepError::Shape {
            gen: gen.to_string(),
            msg: "expected an array of rational strings".into(),
        }),
    }
}

fn parse_nonzero(v: &Value, field: &'static Field, gen: &str) -> Result<CycloElt, RepError> {
    let x = parse_cyclo(v, field, gen)?;
    if x.is_zero() {
        return Err(RepError::Shape {
            gen: gen.to_string(),
            msg: "value must be nonzero".into(),
        });
    }
    Ok(x)
}

fn field_of<'a>(v: &'a Value, key: &str, gen: &str) -> Result<&'a Value, RepError> {
    v.get(key).ok_or_else(|| RepError::Shape {
        gen: gen.to_string(),
        msg: format!("missing field {key:?}"),
    })
}

impl GroupElement for CycloElt {
    const KIND: &'static str = "scalar";
    fn identity(field: &'static Field) -> Self {
        field.one()
    }
    fn compose(&self, other: &Self) -> Self {
        self.mul_ref(other)
    }
    fn inverse(&self) -> Self {
        self.inv().expect("scalar representation values are nonzero")
    }
    fn is_identity(&self) -> bool {
        self.is_one()
    }
    fn write_key(&self, out: &mut Vec<u8>) {
        CycloElt::write_key(self, out)
    }
    fn parse_json(v: &Value, field: &'static Field, gen: &str) -> Result<Self, RepError> {
        parse_nonzero(v, field, gen)
    }
}

/// The affine map `z ↦ lin·z + trans`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffElt {
    pub lin: CycloElt,
    pub trans: CycloElt,
}

impl Serialize for AffElt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AffElt", 2)?;
        st.serialize_field("a", &self.lin)?;
        st.serialize_field("b", &self.trans)?;
        st.end()
    }
}

impl AffElt {
    pub fn new(lin: CycloElt, trans: CycloElt) -> AffElt {
        assert!(!lin.is_zero(), "affine linear part must be nonzero");
        AffElt { lin, trans }
    }

    /// `z ↦ λz`.
    pub fn scaling(lin: CycloElt) -> AffElt {
        let f = lin.field();
        AffElt::new(lin, f.zero())
    }

    /// `z ↦ z + c`.
    pub fn translation(trans: CycloElt) -> AffElt {
        let f = trans.field();
        AffElt::new(f.one(), trans)
    }

    /// `by ∘ self ∘ by⁻¹`; for `by = λz + s` this is `az + λb − s(a−1)`.
    pub fn conj(&self, by: &AffElt) -> AffElt {
        let am1 = &self.lin - &self.lin.field().one();
        let trans = &(&by.lin * &self.trans) - &(&by.trans * &am1);
        AffElt {
            lin: self.lin.clone(),
            trans,
        }
    }

    /// `[f, h] = f∘h∘f⁻¹∘h⁻¹`.
    pub fn commutator(f: &AffElt, h: &AffElt) -> AffElt {
        f.compose(h).compose(&f.inverse()).compose(&h.inverse())
    }
}

impl GroupElement for AffElt {
    const KIND: &'static str = "affine";
    fn identity(field: &'static Field) -> Self {
        AffElt {
            lin: field.one(),
            trans: field.zero(),
        }
    }
    fn compose(&self, other: &Self) -> Self {
        AffElt {
            lin: &self.lin * &other.lin,
            trans: &(&self.lin * &other.trans) + &self.trans,
        }
    }
    fn inverse(&self) -> Self {
        let li = self.lin.inv().expect("affine linear parts are nonzero");
        AffElt {
            trans: -&(&li * &self.trans),
            lin: li,
        }
    }
    fn is_identity(&self) -> bool {
        self.lin.is_one() && self.trans.is_zero()
    }
    fn write_key(&self, out: &mut Vec<u8>) {
        self.lin.write_key(out);
        self.trans.write_key(out);
    }
    fn parse_json(v: &Value, field: &'static Field, gen: &str) -> Result<Self, RepError> {
        Ok(AffElt {
            lin: parse_nonzero(field_of(v, "a", gen)?, field, gen)?,
            trans: parse_cyclo(field_of(v, "b", gen)?, field, gen)?,
        })
    }
}

/// The upper-triangular matrix `(top, corner; 0, bottom)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UpperTri {
    pub top: CycloElt,
    pub corner: CycloElt,
    pub bottom: CycloElt,
}

impl GroupElement for UpperTri {
    const KIND: &'static str = "gl2_upper";
    fn identity(field: &'static Field) -> Self {
        UpperTri {
            top: field.one(),
            corner: field.zero(),
            bottom: field.one(),
        }
    }
    fn compose(&self, o: &Self) -> Self {
        UpperTri {
            top: &self.top * &o.top,
            corner: &(&self.top * &o.corner) + &(&self.corner * &o.bottom),
            bottom: &self.bottom * &o.bottom,
        }
    }
    fn inverse(&self) -> Self {
        let ti = self.top.inv().expect("diagonal entries are nonzero");
        let bi = self.bottom.inv().expect("diagonal entries are nonzero");
        UpperTri {
            corner: -&(&(&ti * &self.corner) * &bi),
            top: ti,
            bottom: bi,
        }
    }
    fn is_identity(&self) -> bool {
        self.top.is_one() && self.corner.is_zero() && self.bottom.is_one()
    }
    fn write_key(&self, out: &mut Vec<u8>) {
        self.top.write_key(out);
        self.corner.write_key(out);
        self.bottom.write_key(out);
    }
    fn parse_json(v: &Value, field: &'static Field, gen: &str) -> Result<Self, RepError> {
        Ok(UpperTri {
            top: parse_nonzero(field_of(v, "top", gen)?, field, gen)?,
            corner: parse_cyclo(field_of(v, "corner", gen)?, field, gen)?,
            bottom: parse_nonzero(field_of(v, "bottom", gen)?, field, gen)?,
        })
    }
}

/// A representation: one value per generator, in slot order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rep<T> {
    pub g: usize,
    pub n: usize,
    pub field: &'static Field,
    pub images: Vec<T>,
}

pub type ScalarRep = Rep<CycloElt>;
pub type AffineRep = Rep<AffElt>;
pub type Gl2Rep = Rep<UpperTri>;

/// Name of the generator in a slot, e.g. `a1`, `g2`.
pub fn slot_name(slot: usize, g: usize) -> String {
    Letter::from_slot(slot, g).to_string()
}

impl<T: GroupElement> Rep<T> {
    pub fn new(g: usize, n: usize, field: &'static Field, images: Vec<T>) -> Rep<T> {
        assert_eq!(images.len(), 2 * g + n, "one image per generator");
        Rep {
            g,
            n,
            field,
            images,
        }
    }

    pub fn trivial(g: usize, n: usize, field: &'static Field) -> Rep<T> {
        Rep::new(g, n, field, vec![T::identity(field); 2 * g + n])
    }

    pub fn get(&self, l: Letter) -> &T {
        &self.images[l.slot(self.g)]
    }

    pub fn alpha(&self, i: usize) -> &T {
        self.get(Letter::alpha(i))
    }

    pub fn beta(&self, i: usize) -> &T {
        self.get(Letter::beta(i))
    }

    pub fn gamma(&self, j: usize) -> &T {
        self.get(Letter::gamma(j))
    }

    pub fn eval(&self, w: &Word) -> T {
        let mut acc = T::identity(self.field);
        for &l in w.letters() {
            let v = &self.images[l.slot(self.g)];
            acc = if l.inverse {
                acc.compose(&v.inverse())
            } else {
                acc.compose(v)
            };
        }
        acc
    }

    /// Value of the relator; the identity exactly when the representation is valid.
    pub fn relator_value(&self) -> T {
        self.eval(&surface::relator(self.g, self.n))
    }

    pub fn validate(&self) -> bool {
        self.relator_value().is_identity()
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|x| x.is_identity())
    }

    pub fn is_abelian(&self) -> bool {
        let k = self.images.len();
        (0..k).all(|i| {
            (i + 1..k).all(|j| {
                self.images[i].compose(&self.images[j]) == self.images[j].compose(&self.images[i])
            })
        })
    }

    /// Apply one generator using precomputed tables.
    pub fn act_with(&self, ga: &GenAction) -> Rep<T> {
        let mut images = self.images.clone();
        let mut invs: Vec<Option<T>> = vec![None; self.images.len()];
        for (slot, word) in &ga.moved {
            let mut acc: Option<T> = None;
            for &(s, inv) in word {
                let v: &T = if inv {
                    invs[s].get_or_insert_with(|| self.images[s].inverse())
                } else {
                    &self.images[s]
                };
                acc = Some(match acc {
                    None => v.clone(),
                    Some(a) => a.compose(v),
                });
            }
            images[*slot] = acc.unwrap_or_else(|| T::identity(self.field));
        }
        Rep {
            g: self.g,
            n: self.n,
            field: self.field,
            images,
        }
    }

    pub fn act(&self, x: GenName) -> Result<Rep<T>, RepError> {
        let t = McgTables::get(self.g, self.n)?;
        Ok(self.act_with(t.action(x)?))
    }

    /// Apply a word of generators, first token first.
    pub fn act_word(&self, w: &McgWord) -> Result<Rep<T>, RepError> {
        let t = McgTables::get(self.g, self.n)?;
        let mut cur = self.clone();
        for &x in &w.0 {
            cur = cur.act_with(t.action(x)?);
        }
        Ok(cur)
    }

    /// `x ↦ ρ(a(x))`; acting by h is pulling back along a(h⁻¹).
    pub fn pull_back(&self, a: &Automorphism) -> Rep<T> {
        Rep {
            g: self.g,
            n: self.n,
            field: self.field,
            images: a.images.iter().map(|w| self.eval(w)).collect(),
        }
    }

    pub fn write_key(&self, out: &mut Vec<u8>) {
        for x in &self.images {
            x.write_key(out);
        }
    }

    /// Parse the `alpha`/`beta`/`gamma` lists of the JSON schema.
    pub fn from_json_lists(
        v: &Value,
        g: usize,
        n: usize,
        field: &'static Field,
    ) -> Result<Rep<T>, RepError> {
        let mut images = Vec::with_capacity(2 * g + n);
        let list = |key: &'static str, len: usize| -> Result<Vec<Value>, RepError> {
            let items = match v.get(key) {
                None if len == 0 => return Ok(Vec::new()),
                None => return Err(RepError::Malformed(format!("missing {key:?} list"))),
                Some(Value::Array(a)) => a.clone(),
                Some(_) => return Err(RepError::Malformed(format!("{key:?} must be a list"))),
            };
            if items.len() != len {
                return Err(RepError::Count {
                    list: key,
                    expected: len,
                    found: items.len(),
                });
            }
            Ok(items)
        };
        let alpha = list("alpha", g)?;
        let beta = list("beta", g)?;
        let gamma = list("gamma", n)?;
        for i in 0..g {
            images.push(T::parse_json(&alpha[i], field, &format!("a{}", i + 1))?);
            images.push(T::parse_json(&beta[i], field, &format!("b{}", i + 1))?);
        }
        for (j, x) in gamma.iter().enumerate() {
            images.push(T::parse_json(x, field, &format!("g{}", j + 1))?);
        }
        Ok(Rep::new(g, n, field, images))
    }
}

impl<T: GroupElement + Serialize> Serialize for Rep<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let alpha: Vec<&T> = (1..=self.g).map(|i| self.alpha(i)).collect();
        let beta: Vec<&T> = (1..=self.g).map(|i| self.beta(i)).collect();
        let gamma: Vec<&T> = (1..=self.n).map(|j| self.gamma(j)).collect();
        let mut st = s.serialize_struct("Rep", 4)?;
        st.serialize_field("kind", T::KIND)?;
        st.serialize_field("alpha", &alpha)?;
        st.serialize_field("beta", &beta)?;
        st.serialize_field("gamma", &gamma)?;
        st.end()
    }
}

// ---------------------------------------------------------------------------
// canonical forms

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Scalar,
    AffineTrivial,
    Affine,
    Gl2Split,
    Gl2NonSplit,
}

/// A conjugacy class, held as its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonClass<T> {
    pub kind: ClassKind,
    pub rep: Rep<T>,
}

impl<T: GroupElement> CanonClass<T> {
    /// Deterministic serialization; equal classes give equal bytes.
    pub fn key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.rep.images.len());
        out.push(self.kind as u8);
        self.rep.write_key(&mut out);
        out
    }
}

/// Types whose representations have a computable canonical conjugacy class.
pub trait Canonical: GroupElement {
    fn canonical(rep: &Rep<Self>) -> CanonClass<Self>;
}

impl Canonical for CycloElt {
    fn canonical(rep: &Rep<Self>) -> CanonClass<Self> {
        CanonClass {
            kind: ClassKind::Scalar,
            rep: rep.clone(),
        }
    }
}

impl Canonical for AffElt {
    fn canonical(rep: &Rep<Self>) -> CanonClass<Self> {
        canon_affine(rep)
    }
}

impl Canonical for UpperTri {
    fn canonical(rep: &Rep<Self>) -> CanonClass<Self> {
        canon_gl2(rep)
    }
}

fn conj_all(rep: &AffineRep, by: &AffElt) -> AffineRep {
    Rep {
        g: rep.g,
        n: rep.n,
        field: rep.field,
        images: rep.images.iter().map(|x| x.conj(by)).collect(),
    }
}

/// Simultaneous conjugation `x ↦ by ∘ x ∘ by⁻¹`.
pub fn conjugate_rep(rep: &AffineRep, by: &AffElt) -> AffineRep {
    conj_all(rep, by)
}

/// Canonical representative under simultaneous Aff conjugation: the first
/// non-translation is made linear, then the first nonzero translation part is scaled to 1.
pub fn canon_affine(rep: &AffineRep) -> CanonClass<AffElt> {
    let f = rep.field;
    if rep.is_trivial() {
        return CanonClass {
            kind: ClassKind::AffineTrivial,
            rep: Rep::trivial(rep.g, rep.n, f),
        };
    }
    let mut cur = match rep.images.iter().find(|x| !x.lin.is_one()) {
        // conjugating by z + s sends b to b − s(a−1); s = b/(a−1) kills b
        Some(x) if !x.trans.is_zero() => {
            let s = x.trans.div(&(&x.lin - &f.one())).expect("linear part differs from 1");
            conj_all(rep, &AffElt::new(f.one(), s))
        }
        _ => rep.clone(),
    };
    if let Some(t) = cur.images.iter().find(|x| !x.trans.is_zero()) {
        if !t.trans.is_one() {
            let scale = t.trans.inv().expect("nonzero");
            for x in cur.images.iter_mut() {
                if !x.trans.is_zero() {
                    x.trans = &x.trans * &scale;
                }
            }
        }
    }
    CanonClass {
        kind: ClassKind::Affine,
        rep: cur,
    }
}

/// Some `λz + s` with `r2 = (λz+s) ∘ r1 ∘ (λz+s)⁻¹` generatorwise, found by
/// solving the linear system `λ·b₁ − s·(a₁−1) = b₂` directly.
pub fn conjugacy_equal(r1: &AffineRep, r2: &AffineRep) -> Option<AffElt> {
    if r1.g != r2.g || r1.n != r2.n || r1.field != r2.field {
        return None;
    }
    let f = r1.field;
    let mut rows: Vec<[CycloElt; 3]> = Vec::new();
    for (x, y) in r1.images.iter().zip(&r2.images) {
        if x.lin != y.lin {
            return None;
        }
        rows.push([x.trans.clone(), &f.one() - &x.lin, y.trans.clone()]);
    }
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..2 {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inv().expect("pivot is nonzero");
        for e in rows[rank].iter_mut() {
            *e = &*e * &inv;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let m = row[col].clone();
                for k in 0..3 {
                    row[k] = &row[k] - &(&m * &pivot[k]);
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[2].is_zero()) {
        return None;
    }
    let (lam, s) = match pivots.as_slice() {
        [0, 1] => (rows[0][2].clone(), rows[1][2].clone()),
        [0] => {
            // λ + q·s = r with s free: prefer s = 0, else pick s making λ = 1
            let (q, r) = (&rows[0][1], &rows[0][2]);
            if !r.is_zero() || q.is_zero() {
                (r.clone(), f.zero())
            } else {
                (f.one(), (&f.zero() - &f.one()).div(q).expect("nonzero"))
            }
        }
        [1] => (f.one(), rows[0][2].clone()),
        _ => (f.one(), f.zero()),
    };
    if lam.is_zero() {
        return None;
    }
    Some(AffElt::new(lam, s))
}

pub fn scalar_part(rep: &Gl2Rep) -> ScalarRep {
    Rep::new(
        rep.g,
        rep.n,
        rep.field,
        rep.images.iter().map(|m| m.bottom.clone()).collect(),
    )
}

pub fn affine_part(rep: &Gl2Rep) -> AffineRep {
    Rep::new(
        rep.g,
        rep.n,
        rep.field,
        rep.images
            .iter()
            .map(|m| {
                let bi = m.bottom.inv().expect("nonzero");
                AffElt::new(&m.top * &bi, &m.corner * &bi)
            })
            .collect(),
    )
}

/// Entrywise `(λa, λb; 0, λ)`.
pub fn tensor(lambda: &ScalarRep, a: &AffineRep) -> Gl2Rep {
    Rep::new(
        a.g,
        a.n,
        a.field,
        lambda
            .images
            .iter()
            .zip(&a.images)
            .map(|(l, x)| UpperTri {
                top: l * &x.lin,
                corner: l * &x.trans,
                bottom: l.clone(),
            })
            .collect(),
    )
}

/// The translation `s` of a common fixed point, i.e. with `b = s(a−1)` for every image.
pub fn common_fixed_point(rep: &AffineRep) -> Option<CycloElt> {
    let f = rep.field;
    let s = match rep.images.iter().find(|x| !x.lin.is_one()) {
        Some(x) => x.trans.div(&(&x.lin - &f.one())).expect("nonzero"),
        None => f.zero(),
    };
    rep.images
        .iter()
        .all(|x| x.trans == &s * &(&x.lin - &f.one()))
        .then_some(s)
}

/// True when the representation is conjugate to a diagonal one.
pub fn is_totally_reducible(rep: &Gl2Rep) -> bool {
    common_fixed_point(&affine_part(rep)).is_some()
}

/// Split classes become the sorted pair of diagonal characters; the rest
/// become (scalar part, canonical affine part).
pub fn canon_gl2(rep: &Gl2Rep) -> CanonClass<UpperTri> {
    if is_totally_reducible(rep) {
        let tops: ScalarRep = Rep::new(
            rep.g,
            rep.n,
            rep.field,
            rep.images.iter().map(|m| m.top.clone()).collect(),
        );
        let bottoms = scalar_part(rep);
        let key = |r: &ScalarRep| {
            let mut v = Vec::new();
            r.write_key(&mut v);
            v
        };
        let (hi, lo) = if key(&tops) <= key(&bottoms) {
            (tops, bottoms)
        } else {
            (bottoms, tops)
        };
        let zero = rep.field.zero();
        let images = hi
            .images
            .into_iter()
            .zip(lo.images)
            .map(|(t, b)| UpperTri {
                top: t,
                corner: zero.clone(),
                bottom: b,
            })
            .collect();
        CanonClass {
            kind: ClassKind::Gl2Split,
            rep: Rep::new(rep.g, rep.n, rep.field, images),
        }
    } else {
        let aff = canon_affine(&affine_part(rep));
        CanonClass {
            kind: ClassKind::Gl2NonSplit,
            rep: tensor(&scalar_part(rep), &aff.rep),
        }
    }
}

/// Order of a finite image, or `None` for an infinite image.
pub trait ImageOrder {
    fn image_order(&self) -> Option<u64>;
}

fn lcm_orders<'a, I: IntoIterator<Item = &'a CycloElt>>(vals: I) -> Option<u64> {
    let mut acc = 1u64;
    for v in vals {
        acc = acc.lcm(&(v.as_root_of_unity()? as u64));
    }
    Some(acc)
}

impl ImageOrder for ScalarRep {
    fn image_order(&self) -> Option<u64> {
        lcm_orders(&self.images)
    }
}

impl ImageOrder for AffineRep {
    /// Finite exactly when the images fix a common point and all linear parts
    /// are torsion; the image is then cyclic.
    fn image_order(&self) -> Option<u64> {
        common_fixed_point(self)?;
        lcm_orders(self.images.iter().map(|x| &x.lin))
    }
}

impl ImageOrder for Gl2Rep {
    /// Nonsplit images contain a nontrivial unipotent element and are infinite.
    fn image_order(&self) -> Option<u64> {
        if !is_totally_reducible(self) {
            return None;
        }
        let m = self.field.root_order() as u64;
        let mut gens = Vec::new();
        for x in &self.images {
            gens.push((x.top.root_exponent()? as u64, x.bottom.root_exponent()? as u64));
        }
        Some(pair_group_order(&gens, m))
    }
}

/// Order of the subgroup of (Z/m)² generated by `gens`.
pub fn pair_group_order(gens: &[(u64, u64)], m: u64) -> u64 {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![(0u64, 0u64)];
    seen.insert((0, 0));
    while let Some((a, b)) = stack.pop() {
        for &(x, y) in gens {
            let next = ((a + x) % m, (b + y) % m);
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len() as u64
}

// ---------------------------------------------------------------------------
// JSON input

/// A representation of any supported kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyRep {
    Scalar(ScalarRep),
    Affine(AffineRep),
    Gl2(Gl2Rep),
}

impl Serialize for AnyRep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            AnyRep::Scalar(r) => r.serialize(s),
            AnyRep::Affine(r) => r.serialize(s),
            AnyRep::Gl2(r) => r.serialize(s),
        }
    }
}

/// Applies a block to whichever concrete representation is held.
#[macro_export]
macro_rules! with_rep {
    ($any:expr, $r:ident => $body:expr) => {
        match $any {
            $crate::reps::AnyRep::Scalar($r) => $body,
            $crate::reps::AnyRep::Affine($r) => $body,
            $crate::reps::AnyRep::Gl2($r) => $body,
        }
    };
}

impl AnyRep {
    pub fn g(&self) -> usize {
        with_rep!(self, r => r.g)
    }

    pub fn n(&self) -> usize {
        with_rep!(self, r => r.n)
    }

    pub fn field(&self) -> &'static Field {
        with_rep!(self, r => r.field)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnyRep::Scalar(_) => CycloElt::KIND,
            AnyRep::Affine(_) => AffElt::KIND,
            AnyRep::Gl2(_) => UpperTri::KIND,
        }
    }

    pub fn validate(&self) -> bool {
        with_rep!(self, r => r.validate())
    }

    pub fn is_abelian(&self) -> bool {
        with_rep!(self, r => r.is_abelian())
    }

    pub fn act_word(&self, w: &McgWord) -> Result<AnyRep, RepError> {
        Ok(match self {
            AnyRep::Scalar(r) => AnyRep::Scalar(r.act_word(w)?),
            AnyRep::Affine(r) => AnyRep::Affine(r.act_word(w)?),
            AnyRep::Gl2(r) => AnyRep::Gl2(r.act_word(w)?),
        })
    }

    /// Deterministic key of the canonical class.
    pub fn class_key(&self) -> Vec<u8> {
        match self {
            AnyRep::Scalar(r) => CycloElt::canonical(r).key(),
            AnyRep::Affine(r) => AffElt::canonical(r).key(),
            AnyRep::Gl2(r) => UpperTri::canonical(r).key(),
        }
    }

    /// The canonical representative, with its class kind.
    pub fn canonical(&self) -> (ClassKind, AnyRep) {
        match self {
            AnyRep::Scalar(r) => {
                let c = CycloElt::canonical(r);
                (c.kind, AnyRep::Scalar(c.rep))
            }
            AnyRep::Affine(r) => {
                let c = AffElt::canonical(r);
                (c.kind, AnyRep::Affine(c.rep))
            }
            AnyRep::Gl2(r) => {
                let c = UpperTri::canonical(r);
                (c.kind, AnyRep::Gl2(c.rep))
            }
        }
    }

    /// Relator value rendered as JSON, for reporting a validation defect.
    pub fn relator_defect(&self) -> Value {
        match self {
            AnyRep::Scalar(r) => serde_json::to_value(r.relator_value()),
            AnyRep::Affine(r) => serde_json::to_value(r.relator_value()),
            AnyRep::Gl2(r) => serde_json::to_value(r.relator_value()),
        }
        .expect("serializable")
    }

    /// Parse the JSON schema `{"kind": ..., "alpha": [...], "beta": [...], "gamma": [...]}`.
    ///
    /// The kind `mu_c` builds the genus-one family from `"c"` (one entry per
    /// puncture), an optional `"mu"` (default ζ_N) and an optional scalar
    /// `"lambda"` with `alpha`/`beta`/`gamma` lists, which produces the GL₂
    /// representation λ ⊗ ρ_{μ,c}.
    pub fn from_json(v: &Value, g: usize, n: usize, field: &'static Field) -> Result<AnyRep, RepError> {
        surface::check_genus(g).map_err(|e| RepError::Malformed(e.to_string()))?;
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| RepError::Malformed("missing string field \"kind\"".into()))?;
        match kind {
            "scalar" => Ok(AnyRep::Scalar(Rep::from_json_lists(v, g, n, field)?)),
            "affine" => Ok(AnyRep::Affine(Rep::from_json_lists(v, g, n, field)?)),
            "gl2_upper" => Ok(AnyRep::Gl2(Rep::from_json_lists(v, g, n, field)?)),
            "mu_c" => {
                let mu = match v.get("mu") {
                    Some(m) => parse_nonzero(m, field, "mu")?,
                    None => field.zeta_pow(1),
                };
                let cs = match v.get("c") {
                    Some(Value::Array(a)) => a,
                    _ => return Err(RepError::Malformed("mu_c needs a \"c\" list".into())),
                };
                if cs.len() != n {
                    return Err(RepError::Count {
                        list: "c",
                        expected: n,
                        found: cs.len(),
                    });
                }
                let c = cs
                    .iter()
                    .enumerate()
                    .map(|(j, x)| parse_cyclo(x, field, &format!("g{}", j + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                let rho = rho_mu_c(g, n, &mu, &c)?;
                match v.get("lambda") {
                    None => Ok(AnyRep::Affine(rho)),
                    Some(l) => {
                        let lam: ScalarRep = Rep::from_json_lists(l, g, n, field)?;
                        Ok(AnyRep::Gl2(tensor(&lam, &rho)))
                    }
                }
            }
            other => Err(RepError::UnknownKind(other.to_string())),
        }
    }
}

/// ρ_{μ,c}: α₁ ↦ μz, β₁ ↦ z − 1/(μ−1), γ_j ↦ z + c_j, other handles trivial.
/// Valid exactly when Σc_j = 1.
pub fn rho_mu_c(g: usize, n: usize, mu: &CycloElt, c: &[CycloElt]) -> Result<AffineRep, RepError> {
    let f = mu.field();
    let mm1 = mu - &f.one();
    if mm1.is_zero() {
        return Err(RepError::Shape {
            gen: "mu".into(),
            msg: "mu must differ from 1".into(),
        });
    }
    if c.len() != n {
        return Err(RepError::Count {
            list: "c",
            expected: n,
            found: c.len(),
        });
    }
    let mut r: AffineRep = Rep::trivial(g, n, f);
    r.images[0] = AffElt::scaling(mu.clone());
    r.images[1] = AffElt::translation(-&mm1.inv().expect("nonzero"));
    for (j, cj) in c.iter().enumerate() {
        r.images[2 * g + j] = AffElt::translation(cj.clone());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcg::GenName;
    use serde_json::json;

    fn f(n: u32) -> &'static Field {
        Field::get(n).unwrap()
    }

    fn aff(a: &CycloElt, b: &CycloElt) -> AffElt {
        AffElt::new(a.clone(), b.clone())
    }

    #[test]
    fn affine_formulas() {
        let k = f(5);
        let a = k.zeta_pow(2);
        let b = k.ratio(3, 7);
        let x = aff(&a, &b);
        let by = AffElt::scaling(k.int(2));
        assert_eq!(x.conj(&by), aff(&a, &k.ratio(6, 7)));
        assert_eq!(x.conj(&by), by.compose(&x).compose(&by.inverse()));
        let c = k.int(4);
        let tr = AffElt::translation(c.clone());
        assert_eq!(x.conj(&tr), aff(&a, &(&b - &(&c * &(&a - &k.one())))));
        assert_eq!(x.conj(&tr), tr.compose(&x).compose(&tr.inverse()));
        let mu = k.zeta_pow(1);
        let comm = AffElt::commutator(&AffElt::scaling(mu.clone()), &AffElt::translation(k.one()));
        assert_eq!(comm, AffElt::translation(&mu - &k.one()));
    }

    #[test]
    fn mu_c_evaluations() {
        let k = f(3);
        let mu = k.zeta_pow(1);
        let r = rho_mu_c(1, 2, &mu, &[k.ratio(1, 3), k.ratio(2, 3)]).unwrap();
        let comm = Word::parse("a1 b1 a1^-1 b1^-1", 1, 2).unwrap();
        assert_eq!(r.eval(&comm), AffElt::translation(k.int(-1)));
        assert_eq!(r.eval(&surface::delta(2)), AffElt::translation(k.one()));
        assert!(r.eval(&Word::empty()).is_identity());
        assert!(r.validate());
    }

    #[test]
    fn validation_examples() {
        let k = f(2);
        let mu = k.int(-1);
        assert!(rho_mu_c(1, 2, &mu, &[k.ratio(1, 2), k.ratio(1, 2)]).unwrap().validate());
        let bad = rho_mu_c(1, 2, &mu, &[k.ratio(1, 2), k.ratio(1, 4)]).unwrap();
        assert!(!bad.validate());
        assert_eq!(bad.relator_value(), AffElt::translation(k.ratio(-1, 4)));
        assert!(AffineRep::trivial(2, 1, k).validate());
    }

    #[test]
    fn action_examples() {
        let k = f(4);
        let mu = k.zeta_pow(1);
        // α₁ ↦ μz, β₁ ↦ z + 1: τ₂⁻¹ sends α₁ to ρ(α₁β₁) = μz + μ
        let mut r: AffineRep = Rep::trivial(1, 0, k);
        r.images[0] = AffElt::scaling(mu.clone());
        r.images[1] = AffElt::translation(k.one());
        let s = r.act(GenName::tau(2).inv()).unwrap();
        assert_eq!(s.images[0], aff(&mu, &mu));
        assert_eq!(r.act_word(&McgWord::default()).unwrap(), r);

        // translation pair: τ₁⁻¹ repeated m times sends β₁ = z+c to z+c+m
        let mut t: AffineRep = Rep::trivial(1, 0, k);
        t.images[0] = AffElt::translation(k.one());
        t.images[1] = AffElt::translation(k.ratio(1, 3));
        let w = McgWord::parse("t1^-1 t1^-1 t1^-1", 1, 0).unwrap();
        assert_eq!(t.act_word(&w).unwrap().images[1], AffElt::translation(k.ratio(10, 3)));
    }

    #[test]
    fn canonical_examples() {
        let k = f(2);
        let mut r: AffineRep = Rep::trivial(1, 0, k);
        r.images[0] = aff(&k.int(-1), &k.int(3));
        r.images[1] = AffElt::translation(k.one());
        let c = canon_affine(&r);
        assert_eq!(c.kind, ClassKind::Affine);
        assert_eq!(c.rep.images[0], AffElt::scaling(k.int(-1)));
        assert_eq!(c.rep.images[1], AffElt::translation(k.one()));
        assert!(conjugacy_equal(&r, &c.rep).is_some());

        let triv: AffineRep = Rep::trivial(1, 1, k);
        assert_eq!(canon_affine(&triv).kind, ClassKind::AffineTrivial);

        let mut t: AffineRep = Rep::trivial(1, 0, k);
        t.images[0] = AffElt::translation(k.int(2));
        t.images[1] = AffElt::translation(k.int(6));
        let ct = canon_affine(&t);
        assert_eq!(ct.rep.images[0], AffElt::translation(k.one()));
        assert_eq!(ct.rep.images[1], AffElt::translation(k.int(3)));
    }

    #[test]
    fn conjugacy_solver_examples() {
        let k = f(2);
        let mut r1: AffineRep = Rep::trivial(1, 0, k);
        r1.images[0] = AffElt::scaling(k.int(-1));
        r1.images[1] = AffElt::translation(k.one());
        let mut r2 = r1.clone();
        r2.images[1] = AffElt::translation(k.int(5));
        assert_eq!(conjugacy_equal(&r1, &r2), Some(AffElt::scaling(k.int(5))));
        let mut r3 = r1.clone();
        r3.images[0] = AffElt::scaling(k.int(2));
        assert_eq!(conjugacy_equal(&r1, &r3), None);
        // a translation cannot be conjugated to the identity
        let mut r4 = r1.clone();
        r4.images[1] = AffElt::translation(k.zero());
        assert_eq!(conjugacy_equal(&r1, &r4), None);
    }

    #[test]
    fn gl2_decomposition() {
        let k = f(2);
        let mut r: Gl2Rep = Rep::trivial(1, 1, k);
        r.images[2] = UpperTri {
            top: k.int(2),
            corner: k.int(3),
            bottom: k.int(2),
        };
        assert_eq!(scalar_part(&r).images[2], k.int(2));
        assert_eq!(affine_part(&r).images[2], AffElt::translation(k.ratio(3, 2)));
        assert_eq!(tensor(&scalar_part(&r), &affine_part(&r)), r);

        let lam: ScalarRep = Rep::new(1, 1, k, vec![k.int(-1), k.one(), k.one()]);
        let rho = rho_mu_c(1, 1, &k.int(-1), &[k.one()]).unwrap();
        let t = tensor(&lam, &rho);
        assert!(t.validate());
        assert_eq!(scalar_part(&t), lam);
        assert_eq!(affine_part(&t), rho);
        assert!(!is_totally_reducible(&t));
        assert_eq!(canon_gl2(&t).kind, ClassKind::Gl2NonSplit);

        let mut d: Gl2Rep = Rep::trivial(1, 0, k);
        d.images[0] = UpperTri {
            top: k.int(-1),
            corner: k.int(2),
            bottom: k.one(),
        };
        // affine part −z + 2 has the fixed point 1
        assert!(is_totally_reducible(&d));
        let c = canon_gl2(&d);
        assert_eq!(c.kind, ClassKind::Gl2Split);
        assert!(c.rep.images.iter().all(|m| m.corner.is_zero()));
    }

    #[test]
    fn abelian_and_orders() {
        let k = f(4);
        let s: ScalarRep = Rep::new(1, 0, k, vec![k.int(-1), k.one()]);
        assert!(s.is_abelian());
        assert_eq!(s.image_order(), Some(2));
        let rho = rho_mu_c(1, 1, &k.zeta_pow(1), &[k.one()]).unwrap();
        assert!(!rho.is_abelian());
        assert_eq!(rho.image_order(), None);
        let mut t: AffineRep = Rep::trivial(1, 0, k);
        t.images[0] = AffElt::translation(k.one());
        assert!(t.is_abelian());
        assert_eq!(t.image_order(), None);
        assert_eq!(pair_group_order(&[(1, 0), (0, 0)], 2), 2);
        assert_eq!(pair_group_order(&[(1, 1), (0, 2)], 4), 8);
    }

    #[test]
    fn json_parsing() {
        let k = f(2);
        let v = json!({"kind": "affine", "alpha": [{"a": ["-1"], "b": ["0"]}],
                       "beta": [{"a": ["1"], "b": ["1/2"]}], "gamma": []});
        let r = AnyRep::from_json(&v, 1, 0, k).unwrap();
        assert_eq!(r.kind(), "affine");
        assert_eq!(serde_json::to_value(&r).unwrap(), v);

        let bad = json!({"kind": "affine", "alpha": [{"a": ["0"], "b": ["0"]}], "beta": [{"a": ["1"], "b": ["1"]}]});
        let e = AnyRep::from_json(&bad, 1, 0, k).unwrap_err();
        assert!(e.to_string().contains("a1"), "{e}");
        let e = AnyRep::from_json(&json!({"kind": "scalar", "alpha": [["1", "2"]], "beta": [["1"]]}), 1, 0, k)
            .unwrap_err();
        assert!(e.to_string().contains("a1"), "{e}");
        assert!(matches!(
            AnyRep::from_json(&json!({"kind": "scalar", "alpha": [["1"]], "beta": []}), 1, 0, k),
            Err(RepError::Count { .. })
        ));
        assert!(AnyRep::from_json(&json!({"kind": "spinor"}), 1, 0, k).is_err());

        let m = AnyRep::from_json(&json!({"kind": "mu_c", "c": [["1"]]}), 1, 1, k).unwrap();
        assert!(m.validate());
        let l = json!({"kind": "mu_c", "c": [["1"]], "lambda": {"alpha": [["-1"]], "beta": [["1"]], "gamma": [["1"]]}});
        assert_eq!(AnyRep::from_json(&l, 1, 1, k).unwrap().kind(), "gl2_upper");
    }
}
