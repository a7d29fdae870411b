//! Bounded breadth-first enumeration of presentation pairs up to moves.
//!
//! Search states are full normal forms of pairs; edges are conjugate
//! replacements (verified through the conjugacy engine). Conjugation,
//! swapping, free-group automorphisms, and inversion never appear as
//! explicit edges: the full normal form absorbs them, which keeps the
//! per-wave frontier small. Reported counts are finer: each full class
//! is tallied as its one or two signed classes (inverting a single
//! component is a ± conjugate-replacement edge between them, always
//! available at zero cost, so reaching a full class reaches both). The
//! search proceeds in waves of equal total length, shortest first, and
//! its results are independent of the number of worker threads.

use crate::conjugacy::{acm_conjugates, PcgError};
use crate::moves::Move;
use crate::normal_forms::{cyclic_nf, full_nf, signed_forms, NormalFormError};
use crate::words::{cyclic_reduce, exponent_matrix, parse_pair, Pair, Word};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchMode {
    Enumerate,
    Trivialize,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub seed: Pair,
    /// Per-word length bound L for harvested conjugates.
    pub max_len: usize,
    /// Completion rounds D for the conjugacy engine.
    pub rounds: usize,
    /// Bound on the total length of a normal form; default 2L + 2.
    pub total_bound: usize,
    pub threads: usize,
    pub mode: SearchMode,
    /// Abort (after checkpointing, if configured) once the visited set
    /// reaches this size.
    pub visited_cap: usize,
    /// If set, a checkpoint is written after every completed wave and on
    /// a capped abort.
    pub checkpoint_path: Option<PathBuf>,
    /// Also expand explicit product edges (u ↦ uv, u ↦ uv⁻¹). The
    /// conjugate-replacement edges already realize these products at
    /// completion depth ≥ 1, so this widens the reachable set per wave
    /// beyond the per-word bound; off by default.
    pub product_edges: bool,
}

impl SearchConfig {
    pub fn new(seed: Pair, max_len: usize, rounds: usize, mode: SearchMode) -> SearchConfig {
        SearchConfig {
            seed,
            max_len,
            rounds,
            total_bound: 2 * max_len + 2,
            threads: 1,
            mode,
            visited_cap: usize::MAX,
            checkpoint_path: None,
            product_edges: false,
        }
    }
}

#[derive(Error, Debug)]
pub enum SearchError {
    #[error("seed exponent matrix has determinant {det}, expected ±1")]
    InvalidSeed { det: i64 },
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    Pcg(#[from] PcgError),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    /// Signed classes reached, per total length: every visited full
    /// normal form contributes its one or two signed forms.
    pub counts: BTreeMap<usize, u64>,
    /// Total number of signed classes reached (the sum of `counts`).
    pub visited: usize,
    pub elapsed: Duration,
    /// Trivialize mode: move sequence from the seed's normal form whose
    /// stepwise normal forms end at the canonical pair.
    pub witness: Option<Vec<Move>>,
    pub reached_target: bool,
    /// True when the run stopped at the visited cap.
    pub aborted: bool,
}

/// The canonical trivial presentation and trivialize-mode target.
pub fn canonical_target() -> Pair {
    parse_pair("x y").expect("literal")
}

// -------------------------------------------------------------------------
// Neighbor generation.

/// One search edge: the moves realizing it and the resulting raw pair
/// (before normalization).
fn expansion_moves(p: &Pair) -> Vec<(Vec<Move>, Pair)> {
    let mut out = Vec::new();
    for i in 0..2 {
        let j = 1 - i;
        // Products with the other component and its inverse; inversion
        // steps are realized through AC2 so a witness replays literally.
        let product = p.component(i).concat(p.component(j));
        if !cyclic_reduce(&product).0.is_empty() {
            out.push((vec![Move::Ac1 { i, j }], p.with_component(i, product)));
        }
        let product_inv = p.component(i).concat(&p.component(j).inverse());
        if !cyclic_reduce(&product_inv).0.is_empty() {
            out.push((
                vec![Move::Ac2 { i: j }, Move::Ac1 { i, j }, Move::Ac2 { i: j }],
                p.with_component(i, product_inv),
            ));
        }
    }
    out
}

/// Expands one normal form: conjugate replacements of each component
/// (from the harvested set of the pseudo-conjugacy graph against the
/// other component) plus the product edges above, all normalized and
/// filtered to the length bounds. Returns edges in deterministic order.
fn neighbors(
    p: &Pair,
    cfg: &SearchConfig,
    cache: &HashMap<Pair, Pair>,
    new_cache: &mut Vec<(Pair, Pair)>,
) -> Result<Vec<(Vec<Move>, Pair)>, SearchError> {
    let mut candidates: Vec<(Vec<Move>, Pair)> = Vec::new();
    for i in 0..2 {
        let set = acm_conjugates(p.component(i), p.component(1 - i), cfg.max_len, cfg.rounds)?;
        for target in set {
            if target == *p.component(i) {
                continue;
            }
            candidates.push((
                vec![Move::Acm {
                    i,
                    target: target.clone(),
                }],
                p.with_component(i, target),
            ));
        }
    }
    if cfg.product_edges {
        candidates.extend(expansion_moves(p));
    }
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (moves, raw) in candidates {
        // The total bound applies to the raw substituted pair, not only
        // to its normal form: a substitution that overshoots the bound is
        // never formed, even when automorphisms would shrink it back.
        if raw.total_length() > cfg.total_bound {
            continue;
        }
        let nf = match normalize(&raw, cache, new_cache) {
            Ok(nf) => nf,
            Err(NormalFormError::DegenerateComponent) => continue,
            Err(e) => return Err(e.into()),
        };
        if nf.total_length() > cfg.total_bound {
            continue;
        }
        let over = (0..2)
            .filter(|&i| nf.component(i).len() > cfg.max_len)
            .count();
        if over > 1 {
            continue;
        }
        if seen.insert(nf.clone()) {
            out.push((moves, nf));
        }
    }
    Ok(out)
}

fn normalize(
    raw: &Pair,
    cache: &HashMap<Pair, Pair>,
    new_cache: &mut Vec<(Pair, Pair)>,
) -> Result<Pair, NormalFormError> {
    let key = cyclic_nf(raw)?;
    if let Some(nf) = cache.get(&key) {
        return Ok(nf.clone());
    }
    let nf = full_nf(&key)?;
    new_cache.push((key, nf.clone()));
    Ok(nf)
}

// -------------------------------------------------------------------------
// State and the main loop.

#[derive(Clone, Debug, Default)]
pub struct SearchState {
    visited: HashSet<Vec<u8>>,
    frontier: BTreeMap<usize, BTreeSet<Pair>>,
    counts: BTreeMap<usize, u64>,
    /// Child key -> (parent pair, realizing moves); discovered this run.
    parents: HashMap<Vec<u8>, (Pair, Vec<Move>)>,
}

fn pack_word(w: &Word, out: &mut Vec<u8>) {
    out.extend((w.len() as u32).to_le_bytes());
    let mut byte = 0u8;
    for (i, l) in w.letters().enumerate() {
        byte |= l.code() << (2 * (i % 4));
        if i % 4 == 3 {
            out.push(byte);
            byte = 0;
        }
    }
    if w.len() % 4 != 0 {
        out.push(byte);
    }
}

fn pack_pair(p: &Pair) -> Vec<u8> {
    let mut out = Vec::new();
    pack_word(p.component(0), &mut out);
    pack_word(p.component(1), &mut out);
    out
}

fn unpack_word(bytes: &[u8], pos: &mut usize) -> Result<Word, SearchError> {
    let bad = || SearchError::BadCheckpoint("truncated word".into());
    if *pos + 4 > bytes.len() {
        return Err(bad());
    }
    let len = u32::from_le_bytes(bytes[*pos..*pos + 4].try_into().unwrap()) as usize;
    *pos += 4;
    let nbytes = len.div_ceil(4);
    if *pos + nbytes > bytes.len() {
        return Err(bad());
    }
    let mut letters = Vec::with_capacity(len);
    for i in 0..len {
        let b = bytes[*pos + i / 4];
        letters.push(crate::words::Letter::from_code((b >> (2 * (i % 4))) & 3));
    }
    *pos += nbytes;
    Ok(Word::from_reduced(&letters))
}

fn unpack_pair(bytes: &[u8], pos: &mut usize) -> Result<Pair, SearchError> {
    Ok(Pair::new(
        unpack_word(bytes, pos)?,
        unpack_word(bytes, pos)?,
    ))
}

/// Runs the search to completion (enumerate) or until the canonical pair
/// is reached (trivialize).
pub fn run(cfg: &SearchConfig) -> Result<SearchReport, SearchError> {
    let det = exponent_matrix(&cfg.seed).det();
    if det.abs() != 1 {
        return Err(SearchError::InvalidSeed { det });
    }
    let mut state = SearchState::default();
    let mut cache = HashMap::new();
    let mut scratch = Vec::new();
    let seed_nf = normalize(&cfg.seed, &cache, &mut scratch)?;
    cache.extend(scratch);
    insert_state(&mut state, &seed_nf)?;
    run_from_state(cfg, state, cache)
}

fn insert_state(state: &mut SearchState, nf: &Pair) -> Result<bool, SearchError> {
    let key = pack_pair(nf);
    if state.visited.insert(key) {
        *state.counts.entry(nf.total_length()).or_insert(0) +=
            signed_forms(nf)?.len() as u64;
        state
            .frontier
            .entry(nf.total_length())
            .or_default()
            .insert(nf.clone());
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Continues a search from a restored or freshly seeded state.
pub fn run_from_state(
    cfg: &SearchConfig,
    mut state: SearchState,
    mut cache: HashMap<Pair, Pair>,
) -> Result<SearchReport, SearchError> {
    let started = Instant::now();
    let target = match cfg.mode {
        SearchMode::Trivialize => {
            let mut scratch = Vec::new();
            let t = normalize(&canonical_target(), &cache, &mut scratch)?;
            cache.extend(scratch);
            Some(t)
        }
        SearchMode::Enumerate => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .expect("thread pool");
    let mut reached = target
        .as_ref()
        .is_some_and(|t| state.visited.contains(&pack_pair(t)));
    let mut aborted = false;
    while !reached {
        let Some((&wave_len, _)) = state.frontier.iter().find(|(_, s)| !s.is_empty()) else {
            break;
        };
        let wave: Vec<Pair> = state
            .frontier
            .remove(&wave_len)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        if wave.is_empty() {
            continue;
        }
        // Expand the whole wave in parallel; merge sequentially in wave
        // order so results never depend on the thread count.
        let expansions: Vec<Result<(Vec<(Vec<Move>, Pair)>, Vec<(Pair, Pair)>), SearchError>> =
            pool.install(|| {
                wave.par_iter()
                    .map(|p| {
                        let mut new_cache = Vec::new();
                        let edges = neighbors(p, cfg, &cache, &mut new_cache)?;
                        Ok((edges, new_cache))
                    })
                    .collect()
            });
        for (p, expansion) in wave.iter().zip(expansions) {
            let (edges, new_cache) = expansion?;
            for (key, nf) in new_cache {
                cache.entry(key).or_insert(nf);
            }
            for (moves, nf) in edges {
                if insert_state(&mut state, &nf)? {
                    state
                        .parents
                        .insert(pack_pair(&nf), (p.clone(), moves));
                    if target.as_ref() == Some(&nf) {
                        reached = true;
                    }
                }
            }
        }
        if let Some(path) = &cfg.checkpoint_path {
            checkpoint(&state, cfg, path)?;
        }
        if state.visited.len() >= cfg.visited_cap {
            aborted = true;
            break;
        }
    }
    let witness = if reached {
        target.as_ref().map(|t| reconstruct_witness(&state, t))
    } else {
        None
    };
    Ok(SearchReport {
        visited: state.counts.values().map(|&n| n as usize).sum(),
        counts: state.counts.clone(),
        elapsed: started.elapsed(),
        witness,
        reached_target: reached,
        aborted,
    })
}

/// Walks parent links from the target back to a root (the seed, or a
/// pre-checkpoint pair with no recorded parent) and returns the forward
/// move sequence.
fn reconstruct_witness(state: &SearchState, target: &Pair) -> Vec<Move> {
    let mut steps: Vec<Vec<Move>> = Vec::new();
    let mut cur = target.clone();
    while let Some((parent, moves)) = state.parents.get(&pack_pair(&cur)) {
        steps.push(moves.clone());
        cur = parent.clone();
    }
    steps.reverse();
    steps.into_iter().flatten().collect()
}

// -------------------------------------------------------------------------
// Checkpointing.

const MAGIC: &[u8; 8] = b"ACSEARCH";
const VERSION: u32 = 1;

fn fnv64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Serializes the visited set and frontier (counts are derived on
/// restore). Parent links are not persisted: a resumed trivialize run
/// reports reachability but only the post-resume suffix of a witness.
pub fn checkpoint(
    state: &SearchState,
    cfg: &SearchConfig,
    path: &std::path::Path,
) -> Result<(), SearchError> {
    let mut buf = Vec::new();
    buf.extend(MAGIC);
    buf.extend(VERSION.to_le_bytes());
    buf.extend((cfg.max_len as u64).to_le_bytes());
    buf.extend((cfg.rounds as u64).to_le_bytes());
    buf.extend((cfg.total_bound as u64).to_le_bytes());
    buf.push(match cfg.mode {
        SearchMode::Enumerate => 0,
        SearchMode::Trivialize => 1,
    });
    buf.extend_from_slice(&pack_pair(&cfg.seed));
    buf.extend((state.visited.len() as u64).to_le_bytes());
    let mut visited: Vec<&Vec<u8>> = state.visited.iter().collect();
    visited.sort();
    for key in visited {
        buf.extend((key.len() as u32).to_le_bytes());
        buf.extend_from_slice(key);
    }
    let frontier: Vec<&Pair> = state.frontier.values().flatten().collect();
    buf.extend((frontier.len() as u64).to_le_bytes());
    for p in frontier {
        let key = pack_pair(p);
        buf.extend((key.len() as u32).to_le_bytes());
        buf.extend_from_slice(&key);
    }
    buf.extend(fnv64(&buf).to_le_bytes());
    let tmp = path.with_extension("tmp");
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(&buf)?;
    f.sync_all()?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Restores a checkpoint; the caller must pass a config matching the
/// echoed parameters.
pub fn restore(path: &std::path::Path) -> Result<(SearchConfig, SearchState), SearchError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 8 + 4 + 8 {
        return Err(SearchError::BadCheckpoint("file too short".into()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().unwrap());
    if fnv64(body) != stored {
        return Err(SearchError::BadCheckpoint("checksum mismatch".into()));
    }
    let mut pos = 0;
    if &body[..8] != MAGIC {
        return Err(SearchError::BadCheckpoint("bad magic".into()));
    }
    pos += 8;
    let version = u32::from_le_bytes(body[pos..pos + 4].try_into().unwrap());
    pos += 4;
    if version != VERSION {
        return Err(SearchError::BadCheckpoint(format!(
            "version {version}, expected {VERSION}"
        )));
    }
    let read_u64 = |pos: &mut usize| -> Result<u64, SearchError> {
        if *pos + 8 > body.len() {
            return Err(SearchError::BadCheckpoint("truncated".into()));
        }
        let v = u64::from_le_bytes(body[*pos..*pos + 8].try_into().unwrap());
        *pos += 8;
        Ok(v)
    };
    let max_len = read_u64(&mut pos)? as usize;
    let rounds = read_u64(&mut pos)? as usize;
    let total_bound = read_u64(&mut pos)? as usize;
    if pos >= body.len() {
        return Err(SearchError::BadCheckpoint("truncated".into()));
    }
    let mode = match body[pos] {
        0 => SearchMode::Enumerate,
        1 => SearchMode::Trivialize,
        m => return Err(SearchError::BadCheckpoint(format!("bad mode {m}"))),
    };
    pos += 1;
    let seed = unpack_pair(body, &mut pos)?;
    let mut cfg = SearchConfig::new(seed, max_len, rounds, mode);
    cfg.total_bound = total_bound;
    let mut state = SearchState::default();
    let read_keyed_pair = |body: &[u8], pos: &mut usize| -> Result<Pair, SearchError> {
        if *pos + 4 > body.len() {
            return Err(SearchError::BadCheckpoint("truncated entry".into()));
        }
        let len = u32::from_le_bytes(body[*pos..*pos + 4].try_into().unwrap()) as usize;
        *pos += 4;
        if *pos + len > body.len() {
            return Err(SearchError::BadCheckpoint("truncated entry".into()));
        }
        let mut inner = *pos;
        let p = unpack_pair(body, &mut inner)?;
        if inner != *pos + len {
            return Err(SearchError::BadCheckpoint("entry length mismatch".into()));
        }
        *pos += len;
        Ok(p)
    };
    let n_visited = read_u64(&mut pos)?;
    for _ in 0..n_visited {
        let p = read_keyed_pair(body, &mut pos)?;
        state.visited.insert(pack_pair(&p));
        let n = signed_forms(&p)
            .map_err(|e| SearchError::BadCheckpoint(format!("stored pair: {e}")))?
            .len() as u64;
        *state.counts.entry(p.total_length()).or_insert(0) += n;
    }
    let n_frontier = read_u64(&mut pos)?;
    for _ in 0..n_frontier {
        let p = read_keyed_pair(body, &mut pos)?;
        state
            .frontier
            .entry(p.total_length())
            .or_default()
            .insert(p);
    }
    if pos != body.len() {
        return Err(SearchError::BadCheckpoint("trailing bytes".into()));
    }
    Ok((cfg, state))
}
