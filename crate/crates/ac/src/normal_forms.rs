//! Canonical representatives of presentation pairs.
//!
//! Two layers of normalization: `cyclic_nf` quotients by swapping the
//! components and by inversion and conjugation of each component;
//! `full_nf` additionally quotients by automorphisms of the free group,
//! computed with Whitehead's algorithm — greedy descent to minimal total
//! length followed by closure over the equal-length level.

use crate::words::{
    cyclic_reduce, free_reduce, least_cyclic_representative, least_rotation, Pair, Word,
    ALPHABET, L_X, L_Y,
};
use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;
use thiserror::Error;

/// Default cap on the size of a minimal-level orbit closure.
pub const DEFAULT_ORBIT_CAP: usize = 100_000;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum NormalFormError {
    #[error("component cyclically reduces to the empty word")]
    DegenerateComponent,
    #[error("minimal-level orbit exceeded the cap of {cap} pairs")]
    OrbitCapExceeded { cap: usize },
}

/// One rank-2 Whitehead automorphism, given by the images of the two
/// generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WhiteheadMove {
    pub image_x: Word,
    pub image_y: Word,
}

impl WhiteheadMove {
    pub fn is_length_preserving(&self) -> bool {
        self.image_x.len() == 1 && self.image_y.len() == 1
    }
}

/// The 20 Whitehead automorphisms of the free group of rank 2: the 8
/// permutations of {x, x⁻¹, y, y⁻¹} respecting inversion (including the
/// identity), then the 12 multiplier moves — for a multiplier a among the
/// four letters, the other generator t maps to one of t·a, a⁻¹·t, a⁻¹·t·a
/// while a's own generator is fixed.
pub fn whitehead_moves() -> &'static [WhiteheadMove] {
    static TABLE: OnceLock<Vec<WhiteheadMove>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::new();
        // Length-preserving: image of x is any letter, image of y is the
        // other generator with either sign.
        for ix in ALPHABET {
            for iy in ALPHABET {
                if ix.generator() != iy.generator() {
                    table.push(WhiteheadMove {
                        image_x: Word::single(ix),
                        image_y: Word::single(iy),
                    });
                }
            }
        }
        // Multiplier moves.
        for a in ALPHABET {
            let t = if a.generator() == 0 { L_Y } else { L_X };
            let aw = Word::single(a);
            let tw = Word::single(t);
            let fixed = Word::single(if a.generator() == 0 { L_X } else { L_Y });
            for image_t in [
                tw.concat(&aw),
                aw.inverse().concat(&tw),
                aw.inverse().concat(&tw).concat(&aw),
            ] {
                let (image_x, image_y) = if t.generator() == 0 {
                    (image_t.clone(), fixed.clone())
                } else {
                    (fixed.clone(), image_t.clone())
                };
                table.push(WhiteheadMove { image_x, image_y });
            }
        }
        assert_eq!(table.len(), 20);
        table
    })
}

/// Image of a cyclic word under a Whitehead move, as a cyclic word
/// (substitution, free and cyclic reduction).
pub fn apply_whitehead(w: &Word, m: &WhiteheadMove) -> Word {
    let mut letters = Vec::with_capacity(w.len() * 3);
    for l in w.letters() {
        let image = match l.code() {
            0 => m.image_x.clone(),
            1 => m.image_x.inverse(),
            2 => m.image_y.clone(),
            _ => m.image_y.inverse(),
        };
        letters.extend(image.letters());
    }
    let (core, _) = cyclic_reduce(&free_reduce(&letters));
    core
}

fn apply_whitehead_pair(p: &Pair, m: &WhiteheadMove) -> Pair {
    Pair::new(
        apply_whitehead(p.component(0), m),
        apply_whitehead(p.component(1), m),
    )
}

/// Least representative of the pair under swapping the components and
/// inversion and conjugation of each component: least cyclic
/// representative (over the word and its inverse) per component, the two
/// results sorted shortlex.
pub fn cyclic_nf(p: &Pair) -> Result<Pair, NormalFormError> {
    cyclic_nf_impl(p, false)
}

/// Orientation-refined variant of [`cyclic_nf`]: least rotation of each
/// component (the inverse word is not a candidate), then sorted. Two
/// pairs differing by inversion of a single component keep distinct
/// representatives; [`signed_nf`] builds on this to count such pairs
/// separately.
pub fn oriented_cyclic_nf(p: &Pair) -> Result<Pair, NormalFormError> {
    cyclic_nf_impl(p, true)
}

fn cyclic_nf_impl(p: &Pair, oriented: bool) -> Result<Pair, NormalFormError> {
    let mut comps = [Word::empty(), Word::empty()];
    for i in 0..2 {
        let (core, _) = cyclic_reduce(p.component(i));
        if core.is_empty() {
            return Err(NormalFormError::DegenerateComponent);
        }
        comps[i] = if oriented {
            least_rotation(&core)
        } else {
            least_cyclic_representative(&core)
        };
    }
    let [a, b] = comps;
    if b < a {
        Ok(Pair::new(b, a))
    } else {
        Ok(Pair::new(a, b))
    }
}

/// Greedy Whitehead descent: repeatedly applies the non-length-preserving
/// move giving the largest strict decrease of the total cyclic length of
/// the pair (ties broken by table order), until none decreases. By
/// Whitehead's theorem the result has the minimal total length over the
/// automorphism orbit. Returns the reduced pair (components as cyclic
/// words) and the indices of the applied moves in `whitehead_moves()`.
pub fn minimize_total_length(p: &Pair) -> (Pair, Vec<usize>) {
    let table = whitehead_moves();
    let mut cur = {
        let (a, _) = cyclic_reduce(p.component(0));
        let (b, _) = cyclic_reduce(p.component(1));
        Pair::new(a, b)
    };
    let mut applied = Vec::new();
    loop {
        let len = cur.total_length();
        let mut best: Option<(usize, usize, Pair)> = None;
        for (i, m) in table.iter().enumerate() {
            if m.is_length_preserving() {
                continue;
            }
            let q = apply_whitehead_pair(&cur, m);
            let qlen = q.total_length();
            if qlen < len && best.as_ref().is_none_or(|(blen, _, _)| qlen < *blen) {
                best = Some((qlen, i, q));
            }
        }
        match best {
            Some((_, i, q)) => {
                applied.push(i);
                cur = q;
            }
            None => return (cur, applied),
        }
    }
}

/// Closure of cyclic_nf(p) under all 20 Whitehead moves followed by
/// cyclic_nf, restricted to pairs of the same total length as p.
/// `p` must already be Whitehead-minimal.
pub fn min_level_orbit(p: &Pair) -> Result<BTreeSet<Pair>, NormalFormError> {
    min_level_orbit_with_cap(p, DEFAULT_ORBIT_CAP)
}

pub fn min_level_orbit_with_cap(
    p: &Pair,
    cap: usize,
) -> Result<BTreeSet<Pair>, NormalFormError> {
    min_level_orbit_impl(p, cap, false)
}

fn min_level_orbit_impl(
    p: &Pair,
    cap: usize,
    oriented: bool,
) -> Result<BTreeSet<Pair>, NormalFormError> {
    let table = whitehead_moves();
    let start = cyclic_nf_impl(p, oriented)?;
    let level = start.total_length();
    let mut seen: BTreeSet<Pair> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(cur) = queue.pop_front() {
        for m in table {
            let q = apply_whitehead_pair(&cur, m);
            if q.total_length() != level {
                continue;
            }
            let q = cyclic_nf_impl(&q, oriented)?;
            if seen.insert(q.clone()) {
                if seen.len() > cap {
                    return Err(NormalFormError::OrbitCapExceeded { cap });
                }
                queue.push_back(q);
            }
        }
    }
    Ok(seen)
}

/// The normal form of a pair: least element (components compared
/// shortlex, pairs lexicographically) of the minimal-level orbit of its
/// Whitehead-minimal descendant.
pub fn full_nf(p: &Pair) -> Result<Pair, NormalFormError> {
    full_nf_with_cap(p, DEFAULT_ORBIT_CAP)
}

pub fn full_nf_with_cap(p: &Pair, cap: usize) -> Result<Pair, NormalFormError> {
    nf_impl(p, cap, false)
}

/// Orientation-refined normal form: like [`full_nf`] but built on
/// [`oriented_cyclic_nf`], so the quotient identifies rotation, component
/// order, and automorphisms — not inversion of a single component.
pub fn oriented_nf(p: &Pair) -> Result<Pair, NormalFormError> {
    nf_impl(p, DEFAULT_ORBIT_CAP, true)
}

pub fn oriented_nf_with_cap(p: &Pair, cap: usize) -> Result<Pair, NormalFormError> {
    nf_impl(p, cap, true)
}

/// Signed normal form: the [`oriented_nf`] quotient coarsened by
/// simultaneous inversion of both components. Inverting a single
/// component still changes the class; it is realized as a move (the ±
/// option of a conjugate replacement), not a normalization step. The
/// representative is the lesser of the oriented normal forms of the
/// pair and of its componentwise inverse.
pub fn signed_nf(p: &Pair) -> Result<Pair, NormalFormError> {
    let inv = Pair::new(p.component(0).inverse(), p.component(1).inverse());
    Ok(oriented_nf(p)?.min(oriented_nf(&inv)?))
}

/// The signed normal forms making up the full (inversion-conflated)
/// class of `p`: two pairs when inverting one component leaves the
/// signed class, one when it does not. These are the pairs the
/// enumeration counts.
pub fn signed_forms(p: &Pair) -> Result<Vec<Pair>, NormalFormError> {
    let a = signed_nf(p)?;
    let twin = p.with_component(0, p.component(0).inverse());
    let b = signed_nf(&twin)?;
    Ok(match a.cmp(&b) {
        std::cmp::Ordering::Equal => vec![a],
        std::cmp::Ordering::Less => vec![a, b],
        std::cmp::Ordering::Greater => vec![b, a],
    })
}

fn nf_impl(p: &Pair, cap: usize, oriented: bool) -> Result<Pair, NormalFormError> {
    cyclic_nf_impl(p, oriented)?;
    let (minimal, _) = minimize_total_length(p);
    let orbit = min_level_orbit_impl(&minimal, cap, oriented)?;
    Ok(orbit.first().expect("orbit contains its seed").clone())
}
