//! Breadth-first enumeration of mapping class group orbits of conjugacy classes.
//!
//! States are canonical classes (full group) or pairs of a class and the
//! puncture permutation of the mapping class that reached it (pure group).
//! The pure orbit is the set of classes reached with the identity permutation.
//! Successors are generated frontier by frontier, optionally in parallel, and
//! inserted in a fixed order, so results never depend on scheduling.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::mcg::{GenAction, GenName, McgError, McgTables, McgWord};
use crate::reps::{Canonical, Rep};

/// Default bound on visited states.
pub const DEFAULT_CAP: usize = 100_000;

/// Iterates tried per generator when looking for an infinite-orbit witness.
pub const WITNESS_ITERATES: usize = 64;

/// Frontier states expanded per batch; bounds peak memory of pending successors.
const BATCH: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("representation does not satisfy the surface relator")]
    InvalidRep,
    #[error("cap must be at least 1")]
    ZeroCap,
    #[error(transparent)]
    Mcg(#[from] McgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Pure,
    Full,
}

impl std::str::FromStr for Group {
    type Err = String;
    fn from_str(s: &str) -> Result<Group, String> {
        match s {
            "pure" => Ok(Group::Pure),
            "full" => Ok(Group::Full),
            other => Err(format!("group must be \"pure\" or \"full\", got {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitStatus {
    Finite,
    CapExceeded,
}

/// Evidence of growth: the first `iterates` powers of `generator` give
/// pairwise distinct classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub generator: GenName,
    pub iterates: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitResult {
    pub status: OrbitStatus,
    /// Size of the requested orbit (a lower bound when the cap was exceeded).
    pub orbit_size: usize,
    pub group: Group,
    pub cap: usize,
    pub witness: Option<Witness>,
    pub full_orbit_size: usize,
    /// Only known when the pure group was requested.
    pub pure_orbit_size: Option<usize>,
    pub states_visited: usize,
    pub generators_used: Vec<GenName>,
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitOptions {
    pub group: Group,
    pub cap: usize,
    pub parallel: bool,
    /// Look for a growth witness when the cap is exceeded.
    pub witness: bool,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            group: Group::Pure,
            cap: DEFAULT_CAP,
            parallel: true,
            witness: true,
        }
    }
}

impl OrbitOptions {
    pub fn new(group: Group, cap: usize) -> OrbitOptions {
        OrbitOptions {
            group,
            cap,
            ..OrbitOptions::default()
        }
    }
}

type Perm = SmallVec<[u8; 8]>;

struct Succ<T> {
    rep: Rep<T>,
    perm: Perm,
    class_key: Vec<u8>,
}

fn expand<T: Canonical>(
    rep: &Rep<T>,
    perm: &Perm,
    actions: &[GenAction],
    track_perm: bool,
) -> Vec<Succ<T>> {
    actions
        .iter()
        .map(|a| {
            let c = T::canonical(&rep.act_with(a));
            let perm = if track_perm {
                perm.iter().map(|&p| a.perm[p as usize] as u8).collect()
            } else {
                Perm::new()
            };
            Succ {
                class_key: c.key(),
                rep: c.rep,
                perm,
            }
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn expand_batch<T: Canonical>(
    batch: &[(Rep<T>, Perm)],
    actions: &[GenAction],
    track_perm: bool,
    parallel: bool,
) -> Vec<Vec<Succ<T>>> {
    use rayon::prelude::*;
    if parallel && batch.len() > 1 {
        batch
            .par_iter()
            .map(|(r, p)| expand(r, p, actions, track_perm))
            .collect()
    } else {
        batch
            .iter()
            .map(|(r, p)| expand(r, p, actions, track_perm))
            .collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn expand_batch<T: Canonical>(
    batch: &[(Rep<T>, Perm)],
    actions: &[GenAction],
    track_perm: bool,
    _parallel: bool,
) -> Vec<Vec<Succ<T>>> {
    batch
        .iter()
        .map(|(r, p)| expand(r, p, actions, track_perm))
        .collect()
}

fn state_key(class_key: &[u8], perm: &Perm) -> Vec<u8> {
    let mut k = Vec::with_capacity(class_key.len() + perm.len());
    k.extend_from_slice(class_key);
    k.extend_from_slice(perm);
    k
}

/// The orbit census together with the canonical classes of the full orbit, in discovery order.
pub fn orbit_classes<T: Canonical>(
    rep: &Rep<T>,
    opts: &OrbitOptions,
) -> Result<(OrbitResult, Vec<Rep<T>>), OrbitError> {
    if opts.cap == 0 {
        return Err(OrbitError::ZeroCap);
    }
    if !rep.validate() {
        return Err(OrbitError::InvalidRep);
    }
    let tables = McgTables::get(rep.g, rep.n)?;
    let actions = &tables.actions;
    let track_perm = opts.group == Group::Pure && rep.n >= 2;
    let identity: Perm = if track_perm {
        (0..rep.n as u8).collect()
    } else {
        Perm::new()
    };

    let start = T::canonical(rep);
    let start_key = start.key();
    let mut visited: HashSet<Vec<u8>> = HashSet::new();
    let mut classes: HashSet<Vec<u8>> = HashSet::new();
    let mut class_list: Vec<Rep<T>> = Vec::new();
    let mut pure = 0usize;
    visited.insert(state_key(&start_key, &identity));
    classes.insert(start_key);
    class_list.push(start.rep.clone());
    pure += 1;

    let mut frontier: Vec<(Rep<T>, Perm)> = vec![(start.rep, identity.clone())];
    let mut exceeded = false;
    'bfs: while !frontier.is_empty() {
        let mut next = Vec::new();
        for batch in frontier.chunks(BATCH) {
            for succs in expand_batch(batch, actions, track_perm, opts.parallel) {
                for s in succs {
                    let key = state_key(&s.class_key, &s.perm);
                    if visited.contains(&key) {
                        continue;
                    }
                    visited.insert(key);
                    if track_perm {
                        if s.perm == identity {
                            pure += 1;
                        }
                        if classes.insert(s.class_key) {
                            class_list.push(s.rep.clone());
                        }
                    } else {
                        class_list.push(s.rep.clone());
                    }
                    if visited.len() > opts.cap {
                        exceeded = true;
                        break 'bfs;
                    }
                    next.push((s.rep, s.perm));
                }
            }
        }
        frontier = next;
    }

    let full = if track_perm {
        classes.len()
    } else {
        class_list.len()
    };
    let pure_size = match opts.group {
        Group::Pure if track_perm => Some(pure),
        Group::Pure => Some(full),
        Group::Full => None,
    };
    let witness = if exceeded && opts.witness {
        find_witness(rep, WITNESS_ITERATES)?
    } else {
        None
    };
    let result = OrbitResult {
        status: if exceeded {
            OrbitStatus::CapExceeded
        } else {
            OrbitStatus::Finite
        },
        orbit_size: pure_size.unwrap_or(full),
        group: opts.group,
        cap: opts.cap,
        witness,
        full_orbit_size: full,
        pure_orbit_size: pure_size,
        states_visited: visited.len(),
        generators_used: actions.iter().map(|a| a.gen).collect(),
    };
    Ok((result, class_list))
}

pub fn orbit<T: Canonical>(rep: &Rep<T>, opts: &OrbitOptions) -> Result<OrbitResult, OrbitError> {
    orbit_classes(rep, opts).map(|(r, _)| r)
}

/// True iff `rep, x·rep, …, x^{count−1}·rep` lie in pairwise distinct classes.
pub fn suborbit_probe<T: Canonical>(
    rep: &Rep<T>,
    x: GenName,
    count: usize,
) -> Result<bool, OrbitError> {
    let tables = McgTables::get(rep.g, rep.n)?;
    let a = tables.action(x)?;
    let mut seen = HashSet::with_capacity(count);
    let mut cur = T::canonical(rep);
    for k in 0..count {
        if !seen.insert(cur.key()) {
            return Ok(false);
        }
        if k + 1 < count {
            cur = T::canonical(&cur.rep.act_with(a));
        }
    }
    Ok(true)
}

/// First generator (in table order, inverses included) whose powers give
/// `iterates` distinct classes.
pub fn find_witness<T: Canonical>(
    rep: &Rep<T>,
    iterates: usize,
) -> Result<Option<Witness>, OrbitError> {
    let tables = McgTables::get(rep.g, rep.n)?;
    for a in &tables.actions {
        if suborbit_probe(rep, a.gen, iterates)? {
            return Ok(Some(Witness {
                generator: a.gen,
                iterates,
            }));
        }
    }
    Ok(None)
}

/// Breadth-first search of the full orbit for a class satisfying `pred`,
/// returning a mapping class word reaching it. `None` if the orbit closes or
/// more than `cap` classes are visited first.
pub fn search<T: Canonical, F: Fn(&Rep<T>) -> bool>(
    rep: &Rep<T>,
    cap: usize,
    pred: F,
) -> Result<Option<McgWord>, OrbitError> {
    let tables = McgTables::get(rep.g, rep.n)?;
    let start = T::canonical(rep);
    if pred(&start.rep) {
        return Ok(Some(McgWord::default()));
    }
    // parent[i] = (index of predecessor, generator applied)
    let mut parent: Vec<Option<(usize, GenName)>> = vec![None];
    let mut reps = vec![start.rep.clone()];
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    index.insert(start.key(), 0);
    let mut head = 0;
    while head < reps.len() {
        let cur = reps[head].clone();
        for a in &tables.actions {
            let c = T::canonical(&cur.act_with(a));
            let key = c.key();
            if index.contains_key(&key) {
                continue;
            }
            let id = reps.len();
            index.insert(key, id);
            parent.push(Some((head, a.gen)));
            let hit = pred(&c.rep);
            reps.push(c.rep);
            if hit {
                let mut word = Vec::new();
                let mut at = id;
                while let Some((p, x)) = parent[at] {
                    word.push(x);
                    at = p;
                }
                word.reverse();
                return Ok(Some(McgWord(word)));
            }
            if reps.len() > cap {
                return Ok(None);
            }
        }
        head += 1;
    }
    Ok(None)
}
