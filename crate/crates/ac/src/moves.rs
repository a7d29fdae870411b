//! Moves on presentation pairs and replay of explicit move scripts.
//!
//! The elementary moves are: multiplying one component by the other
//! (AC1), inverting a component (AC2), conjugating a component (AC3),
//! replacing a component by a verified conjugate in the one-relator group
//! presented by the other component (ACM), and applying a free-group
//! automorphism to both components (AUT). Scripts are text files, one
//! move per line, whose words may carry integer or `k`-affine exponents
//! so a single file covers a whole parameter family.

use crate::conjugacy::{acm_conjugates, PcgError};
use crate::words::{
    cyclic_reduce, least_cyclic_representative, parse_word, Letter, Pair, ParseWordError, Word,
};
use std::fmt;
use thiserror::Error;

/// One move on a pair. Component indices are 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Move {
    Ac1 { i: usize, j: usize },
    Ac2 { i: usize },
    Ac3 { i: usize, w: Word },
    Acm { i: usize, target: Word },
    Aut { image_x: Word, image_y: Word },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Ac1 { i, j } => write!(f, "AC1 {} {}", i + 1, j + 1),
            Move::Ac2 { i } => write!(f, "AC2 {}", i + 1),
            Move::Ac3 { i, w } => write!(f, "AC3 {} {}", i + 1, w),
            Move::Acm { i, target } => write!(f, "ACM {} {}", i + 1, target),
            Move::Aut { image_x, image_y } => write!(f, "AUT {image_x} {image_y}"),
        }
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum MoveError {
    #[error("conjugate target {target} of component {} not found up to {rounds} completion rounds at length bound {max_len}", i + 1)]
    AcmRejected {
        i: usize,
        target: Word,
        max_len: usize,
        rounds: usize,
    },
    #[error("conjugate target reduces to the empty word")]
    AcmEmptyTarget,
    #[error("conjugacy engine rejected the pair: {0}")]
    Pcg(#[from] PcgError),
    #[error("images ({image_x}, {image_y}) do not form a basis of the free group")]
    NotAnAutomorphism { image_x: Word, image_y: Word },
}

/// r_i → r_i r_j, freely reduced.
pub fn apply_ac1(p: &Pair, i: usize, j: usize) -> Pair {
    debug_assert_ne!(i, j);
    p.with_component(i, p.component(i).concat(p.component(j)))
}

/// r_i → r_i⁻¹.
pub fn apply_ac2(p: &Pair, i: usize) -> Pair {
    p.with_component(i, p.component(i).inverse())
}

/// r_i → w⁻¹ r_i w, freely reduced.
pub fn apply_ac3(p: &Pair, i: usize, w: &Word) -> Pair {
    p.with_component(i, p.component(i).conjugate(w))
}

/// Whether (wx, wy) is a basis of the free group of rank 2: by Nielsen's
/// criterion, exactly when the commutator [wx, wy] is conjugate to
/// [x, y] or its inverse.
pub fn is_basis(wx: &Word, wy: &Word) -> bool {
    let commutator = wx
        .concat(wy)
        .concat(&wx.inverse())
        .concat(&wy.inverse());
    let (core, _) = cyclic_reduce(&commutator);
    least_cyclic_representative(&core) == parse_word("xyXY").expect("literal")
}

/// (u, v) → (φ(u), φ(v)) for the automorphism φ with the given images.
pub fn apply_aut(p: &Pair, image_x: &Word, image_y: &Word) -> Result<Pair, MoveError> {
    if !is_basis(image_x, image_y) {
        return Err(MoveError::NotAnAutomorphism {
            image_x: image_x.clone(),
            image_y: image_y.clone(),
        });
    }
    let substitute = |w: &Word| {
        let mut out = Word::empty();
        for l in w.letters() {
            let image = match l.code() {
                0 => image_x.clone(),
                1 => image_x.inverse(),
                2 => image_y.clone(),
                _ => image_y.inverse(),
            };
            out = out.concat(&image);
        }
        out
    };
    Ok(Pair::new(
        substitute(p.component(0)),
        substitute(p.component(1)),
    ))
}

/// r_i → target, accepted only if the conjugacy class of target (or of
/// its inverse) is harvested from the pseudo-conjugacy graph of
/// (r_i, r_other) with `rounds` completion rounds at length bound
/// `max_len`.
pub fn apply_acm(
    p: &Pair,
    i: usize,
    target: &Word,
    max_len: usize,
    rounds: usize,
) -> Result<Pair, MoveError> {
    let (core, _) = cyclic_reduce(target);
    if core.is_empty() {
        return Err(MoveError::AcmEmptyTarget);
    }
    let canon = least_cyclic_representative(&core);
    let set = acm_conjugates(p.component(i), p.component(1 - i), max_len, rounds)?;
    if set.contains(&canon) {
        Ok(p.with_component(i, target.clone()))
    } else {
        Err(MoveError::AcmRejected {
            i,
            target: target.clone(),
            max_len,
            rounds,
        })
    }
}

/// Applies one move; ACM steps search rounds 0..=max_rounds and use the
/// smallest that verifies, returned as `Some(rounds)`.
pub fn apply_move(
    p: &Pair,
    mv: &Move,
    max_len: usize,
    max_rounds: usize,
) -> Result<(Pair, Option<usize>), MoveError> {
    match mv {
        Move::Ac1 { i, j } => Ok((apply_ac1(p, *i, *j), None)),
        Move::Ac2 { i } => Ok((apply_ac2(p, *i), None)),
        Move::Ac3 { i, w } => Ok((apply_ac3(p, *i, w), None)),
        Move::Aut { image_x, image_y } => Ok((apply_aut(p, image_x, image_y)?, None)),
        Move::Acm { i, target } => {
            let mut last = None;
            for rounds in 0..=max_rounds {
                match apply_acm(p, *i, target, max_len, rounds) {
                    Ok(q) => return Ok((q, Some(rounds))),
                    Err(e) => last = Some(e),
                }
            }
            Err(last.expect("at least one round attempted"))
        }
    }
}

/// Failure report of a replay: the offending step and its reason.
#[derive(Error, Debug, PartialEq, Eq)]
#[error("step {index} ({mv}): {error}")]
pub struct ReplayFailure {
    pub index: usize,
    pub mv: Move,
    pub error: MoveError,
}

/// Successful replay: the final pair and, per ACM step, the smallest
/// number of completion rounds that verified it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub final_pair: Pair,
    pub acm_rounds: Vec<(usize, usize)>,
}

/// Applies the script in order; each ACM step is verified semantically at
/// the smallest sufficient number of completion rounds (up to
/// `max_rounds`). Stops at the first rejected step.
pub fn replay(
    p: &Pair,
    script: &[Move],
    max_len: usize,
    max_rounds: usize,
) -> Result<ReplayOutcome, ReplayFailure> {
    let mut cur = p.clone();
    let mut acm_rounds = Vec::new();
    for (index, mv) in script.iter().enumerate() {
        match apply_move(&cur, mv, max_len, max_rounds) {
            Ok((next, rounds)) => {
                if let Some(r) = rounds {
                    acm_rounds.push((index, r));
                }
                cur = next;
            }
            Err(error) => {
                return Err(ReplayFailure {
                    index,
                    mv: mv.clone(),
                    error,
                })
            }
        }
    }
    Ok(ReplayOutcome {
        final_pair: cur,
        acm_rounds,
    })
}

// ---------------------------------------------------------------------------
// Script files with k-affine exponent templates.

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: bad word: {source}")]
    BadWord {
        line: usize,
        source: ParseWordError,
    },
}

/// Exponent of a template segment: `offset` or `k + offset`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Exponent {
    with_k: bool,
    offset: i64,
}

impl Exponent {
    fn eval(&self, k: i64) -> i64 {
        if self.with_k {
            k + self.offset
        } else {
            self.offset
        }
    }
}

/// A word template: concatenation of bases raised to exponents, e.g.
/// `x^{k}Y^{k+1}` or `y(xy)^{k}X^{k-3}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TemplateWord {
    segments: Vec<(Word, Exponent)>,
}

impl TemplateWord {
    pub fn expand(&self, k: i64) -> Word {
        let mut out = Word::empty();
        for (base, e) in &self.segments {
            out = out.concat(&base.pow(e.eval(k)));
        }
        out
    }
}

fn parse_exponent(text: &str) -> Option<Exponent> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix('k') {
        let rest = rest.trim();
        if rest.is_empty() {
            return Some(Exponent {
                with_k: true,
                offset: 0,
            });
        }
        let (sign, digits) = rest.split_at(1);
        let mag: i64 = digits.trim().parse().ok()?;
        let offset = match sign {
            "+" => mag,
            "-" => -mag,
            _ => return None,
        };
        Some(Exponent {
            with_k: true,
            offset,
        })
    } else {
        Some(Exponent {
            with_k: false,
            offset: text.parse().ok()?,
        })
    }
}

pub fn parse_template_word(text: &str) -> Result<TemplateWord, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut segments = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let base = if chars[pos] == '(' {
            let close = chars[pos..]
                .iter()
                .position(|&c| c == ')')
                .map(|o| pos + o)
                .ok_or("unclosed '('")?;
            let inner: String = chars[pos + 1..close].iter().collect();
            pos = close + 1;
            parse_word(&inner).map_err(|e| e.to_string())?
        } else {
            let l = Letter::from_char(chars[pos]).ok_or_else(|| {
                format!("unexpected character '{}'", chars[pos])
            })?;
            pos += 1;
            Word::single(l)
        };
        let exp = if pos < chars.len() && chars[pos] == '^' {
            if pos + 1 >= chars.len() || chars[pos + 1] != '{' {
                return Err("expected '{' after '^'".into());
            }
            let close = chars[pos..]
                .iter()
                .position(|&c| c == '}')
                .map(|o| pos + o)
                .ok_or("unclosed '{'")?;
            let inner: String = chars[pos + 2..close].iter().collect();
            pos = close + 1;
            parse_exponent(&inner).ok_or_else(|| format!("bad exponent '{inner}'"))?
        } else {
            Exponent {
                with_k: false,
                offset: 1,
            }
        };
        segments.push((base, exp));
    }
    Ok(TemplateWord { segments })
}

/// One parsed script line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MoveTemplate {
    Ac1 { i: usize, j: usize },
    Ac2 { i: usize },
    Ac3 { i: usize, w: TemplateWord },
    Acm { i: usize, target: TemplateWord },
    Aut { image_x: TemplateWord, image_y: TemplateWord },
}

impl MoveTemplate {
    pub fn expand(&self, k: i64) -> Move {
        match self {
            MoveTemplate::Ac1 { i, j } => Move::Ac1 { i: *i, j: *j },
            MoveTemplate::Ac2 { i } => Move::Ac2 { i: *i },
            MoveTemplate::Ac3 { i, w } => Move::Ac3 {
                i: *i,
                w: w.expand(k),
            },
            MoveTemplate::Acm { i, target } => Move::Acm {
                i: *i,
                target: target.expand(k),
            },
            MoveTemplate::Aut { image_x, image_y } => Move::Aut {
                image_x: image_x.expand(k),
                image_y: image_y.expand(k),
            },
        }
    }
}

/// A parsed script file: optional start/target pair templates and the
/// move lines.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Script {
    pub start: Option<(TemplateWord, TemplateWord)>,
    pub target: Option<(TemplateWord, TemplateWord)>,
    pub moves: Vec<MoveTemplate>,
}

impl Script {
    pub fn expand_start(&self, k: i64) -> Option<Pair> {
        self.start
            .as_ref()
            .map(|(a, b)| Pair::new(a.expand(k), b.expand(k)))
    }

    pub fn expand_target(&self, k: i64) -> Option<Pair> {
        self.target
            .as_ref()
            .map(|(a, b)| Pair::new(a.expand(k), b.expand(k)))
    }

    pub fn expand_moves(&self, k: i64) -> Vec<Move> {
        self.moves.iter().map(|m| m.expand(k)).collect()
    }
}

fn component_index(token: &str, line: usize) -> Result<usize, ScriptError> {
    match token {
        "1" => Ok(0),
        "2" => Ok(1),
        _ => Err(ScriptError::Syntax {
            line,
            message: format!("component index must be 1 or 2, got '{token}'"),
        }),
    }
}

/// Parses a script: `#` comments and blank lines ignored; directives
/// `start <w1> <w2>` and `target <w1> <w2>`; moves `AC1 i j`, `AC2 i`,
/// `AC3 i <word>`, `ACM i <word>`, `AUT <wx> <wy>`. Words may use
/// parenthesized groups and `^{…}` exponents that are integers or
/// k-affine expressions.
pub fn parse_script(text: &str) -> Result<Script, ScriptError> {
    let mut script = Script {
        start: None,
        target: None,
        moves: Vec::new(),
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: String| ScriptError::Syntax { line, message };
        let template = |s: &str| {
            parse_template_word(s).map_err(|message| ScriptError::Syntax { line, message })
        };
        match (tokens[0], tokens.len()) {
            ("start", 3) => script.start = Some((template(tokens[1])?, template(tokens[2])?)),
            ("target", 3) => script.target = Some((template(tokens[1])?, template(tokens[2])?)),
            ("AC1", 3) => script.moves.push(MoveTemplate::Ac1 {
                i: component_index(tokens[1], line)?,
                j: component_index(tokens[2], line)?,
            }),
            ("AC2", 2) => script.moves.push(MoveTemplate::Ac2 {
                i: component_index(tokens[1], line)?,
            }),
            ("AC3", 3) => script.moves.push(MoveTemplate::Ac3 {
                i: component_index(tokens[1], line)?,
                w: template(tokens[2])?,
            }),
            ("ACM", 3) => script.moves.push(MoveTemplate::Acm {
                i: component_index(tokens[1], line)?,
                target: template(tokens[2])?,
            }),
            ("AUT", 3) => script.moves.push(MoveTemplate::Aut {
                image_x: template(tokens[1])?,
                image_y: template(tokens[2])?,
            }),
            (op, n) => {
                return Err(syntax(format!(
                    "unrecognized line: '{op}' with {} argument(s)",
                    n - 1
                )))
            }
        }
    }
    Ok(script)
}
