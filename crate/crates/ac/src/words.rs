//! Freely reduced words over the rank-2 alphabet {x, x^-1, y, y^-1},
//! packed two bits per letter, 32 letters per 64-bit cell.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

pub const LETTERS_PER_CELL: usize = 32;

/// One generator or inverse generator, encoded in two bits.
///
/// Codes: 0 = x, 1 = x^-1, 2 = y, 3 = y^-1. Inverse pairs differ in the
/// lowest bit, so `inverse` is a single xor. The code order is exactly the
/// global letter order x < x^-1 < y < y^-1 used by every shortlex
/// comparison in this crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(u8);

pub const L_X: Letter = Letter(0);
pub const L_XI: Letter = Letter(1);
pub const L_Y: Letter = Letter(2);
pub const L_YI: Letter = Letter(3);

pub const ALPHABET: [Letter; 4] = [L_X, L_XI, L_Y, L_YI];

impl Letter {
    pub fn from_code(code: u8) -> Letter {
        assert!(code < 4, "letter code out of range: {code}");
        Letter(code)
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// Index 0 for x-letters, 1 for y-letters.
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    /// +1 for a generator, -1 for an inverse generator.
    pub fn sign(self) -> i64 {
        if self.0 & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn to_char(self) -> char {
        match self.0 {
            0 => 'x',
            1 => 'X',
            2 => 'y',
            _ => 'Y',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'x' => Some(L_X),
            'X' => Some(L_XI),
            'y' => Some(L_Y),
            'Y' => Some(L_YI),
            _ => None,
        }
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ParseWordError {
    #[error("invalid character {ch:?} at position {pos}")]
    InvalidCharacter { ch: char, pos: usize },
}

/// A freely reduced word, packed 32 letters per 64-bit cell.
///
/// The packing is little-endian in letter positions: letter `i` occupies
/// bits `2*(i % 32)` of cell `i / 32`. Bits past `len` are always zero so
/// that equality and hashing can work on the raw cells.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    cells: Vec<u64>,
    len: usize,
}

impl Word {
    pub fn empty() -> Word {
        Word::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn letter(&self, i: usize) -> Letter {
        debug_assert!(i < self.len);
        let cell = self.cells[i / LETTERS_PER_CELL];
        Letter(((cell >> (2 * (i % LETTERS_PER_CELL))) & 3) as u8)
    }

    pub fn letters(&self) -> impl DoubleEndedIterator<Item = Letter> + ExactSizeIterator + '_ {
        (0..self.len).map(move |i| self.letter(i))
    }

    /// Packs a letter sequence that is already freely reduced.
    pub(crate) fn from_reduced(letters: &[Letter]) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        let mut cells = vec![0u64; letters.len().div_ceil(LETTERS_PER_CELL)];
        for (i, l) in letters.iter().enumerate() {
            cells[i / LETTERS_PER_CELL] |= (l.code() as u64) << (2 * (i % LETTERS_PER_CELL));
        }
        Word {
            cells,
            len: letters.len(),
        }
    }

    pub fn to_letters(&self) -> Vec<Letter> {
        self.letters().collect()
    }

    pub fn single(l: Letter) -> Word {
        Word::from_reduced(&[l])
    }

    pub fn inverse(&self) -> Word {
        let letters: Vec<Letter> = self.letters().rev().map(Letter::inverse).collect();
        Word::from_reduced(&letters)
    }

    /// Free product self * other with free reduction at the seam.
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.to_letters();
        for l in other.letters() {
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word::from_reduced(&letters)
    }

    /// w^-1 * self * w, freely reduced.
    pub fn conjugate(&self, w: &Word) -> Word {
        w.inverse().concat(self).concat(w)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Left rotation by one: l w -> w l. The result of rotating a
    /// cyclically reduced word is freely reduced; for other words the
    /// seam is reduced as usual.
    pub fn rotate_left(&self, k: usize) -> Word {
        if self.len <= 1 {
            return self.clone();
        }
        let k = k % self.len;
        if k == 0 {
            return self.clone();
        }
        if self.len <= LETTERS_PER_CELL {
            // Single-cell fast path: rotate the 2-bit lanes in place.
            let bits = 2 * self.len;
            let mask = if bits == 64 { !0u64 } else { (1u64 << bits) - 1 };
            let cell = self.cells[0];
            let sh = 2 * k;
            let rotated = ((cell >> sh) | (cell << (bits - sh))) & mask;
            return Word {
                cells: vec![rotated],
                len: self.len,
            };
        }
        self.rotate_left_portable(k)
    }

    /// Portable rotation used for multi-cell words and as the reference
    /// for the single-cell path.
    pub(crate) fn rotate_left_portable(&self, k: usize) -> Word {
        let mut letters = self.to_letters();
        letters.rotate_left(k % self.len.max(1));
        // No reduction: rotations are only taken of cyclically reduced
        // words, where every rotation is itself reduced.
        Word::from_reduced(&letters)
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        shortlex_compare(self, other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Word) -> Ordering {
        shortlex_compare(self, other)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for l in self.letters() {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w\"{self}\"")
    }
}

/// Shortlex order: shorter first, ties broken letter by letter under
/// x < x^-1 < y < y^-1.
pub fn shortlex_compare(a: &Word, b: &Word) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.letters().cmp(b.letters()))
}

/// Free reduction of an arbitrary letter sequence.
pub fn free_reduce(letters: &[Letter]) -> Word {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Word::from_reduced(&stack)
}

/// Parses a word over {x, X, y, Y}; "1" denotes the empty word.
pub fn parse_word(text: &str) -> Result<Word, ParseWordError> {
    if text == "1" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::with_capacity(text.len());
    for (pos, ch) in text.chars().enumerate() {
        match Letter::from_char(ch) {
            Some(l) => letters.push(l),
            None => return Err(ParseWordError::InvalidCharacter { ch, pos }),
        }
    }
    Ok(free_reduce(&letters))
}

/// Splits w as conjugator^-1 * core * conjugator with core cyclically
/// reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let mut letters = w.to_letters();
    let mut conj: Vec<Letter> = Vec::new();
    while letters.len() >= 2 && *letters.first().unwrap() == letters.last().unwrap().inverse() {
        conj.insert(0, *letters.last().unwrap());
        letters.pop();
        letters.remove(0);
    }
    (Word::from_reduced(&letters), Word::from_reduced(&conj))
}

pub fn is_cyclically_reduced(w: &Word) -> bool {
    w.len() < 2 || w.letter(0) != w.letter(w.len() - 1).inverse()
}

/// Lexicographically minimal rotation of a letter sequence
/// (Booth-style duplicated-scan).
fn min_rotation(letters: &[Letter]) -> Vec<Letter> {
    let n = letters.len();
    if n <= 1 {
        return letters.to_vec();
    }
    let at = |i: usize| letters[i % n];
    let mut best = 0usize;
    let mut i = 1usize;
    while i < n {
        let mut k = 0usize;
        while k < n && at(best + k) == at(i + k) {
            k += 1;
        }
        if k < n && at(i + k) < at(best + k) {
            best = i;
            i += 1;
        } else {
            i += k + 1;
        }
    }
    (0..n).map(|j| at(best + j)).collect()
}

/// The shortlex-least word among all cyclic permutations of w and of
/// w^-1. Input must be cyclically reduced.
pub fn least_cyclic_representative(w: &Word) -> Word {
    debug_assert!(is_cyclically_reduced(w));
    let fwd = min_rotation(&w.to_letters());
    let bwd = min_rotation(&w.inverse().to_letters());
    if fwd <= bwd {
        Word::from_reduced(&fwd)
    } else {
        Word::from_reduced(&bwd)
    }
}

/// Shortlex-least cyclic rotation of a cyclically reduced word. Unlike
/// [`least_cyclic_representative`] the inverse word is not a candidate,
/// so a cyclic word and its inverse keep distinct representatives.
pub fn least_rotation(w: &Word) -> Word {
    debug_assert!(is_cyclically_reduced(w));
    Word::from_reduced(&min_rotation(&w.to_letters()))
}

/// An ordered pair of relators: a candidate balanced presentation of the
/// trivial group on two generators.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub first: Word,
    pub second: Word,
}

impl Pair {
    pub fn new(first: Word, second: Word) -> Pair {
        Pair { first, second }
    }

    pub fn total_length(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn component(&self, i: usize) -> &Word {
        match i {
            0 => &self.first,
            1 => &self.second,
            _ => panic!("component index out of range: {i}"),
        }
    }

    pub fn with_component(&self, i: usize, w: Word) -> Pair {
        match i {
            0 => Pair::new(w, self.second.clone()),
            1 => Pair::new(self.first.clone(), w),
            _ => panic!("component index out of range: {i}"),
        }
    }

    pub fn swap(&self) -> Pair {
        Pair::new(self.second.clone(), self.first.clone())
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.first, self.second)
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p\"{} {}\"", self.first, self.second)
    }
}

/// The standard candidate family: (xyxy⁻¹x⁻¹y⁻¹, xⁿy⁻⁽ⁿ⁺¹⁾).
pub fn ak_pair(n: usize) -> Pair {
    Pair::new(
        parse_word("xyxYXY").expect("literal"),
        Word::single(L_X)
            .pow(n as i64)
            .concat(&Word::single(L_Y).pow(-(n as i64) - 1)),
    )
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ParsePairError {
    #[error("expected two words separated by a single space")]
    BadShape,
    #[error(transparent)]
    Word(#[from] ParseWordError),
}

/// Parses "u v" with the alphabet {x, X, y, Y}; empty words written "1".
pub fn parse_pair(text: &str) -> Result<Pair, ParsePairError> {
    let mut parts = text.split(' ');
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(ParsePairError::BadShape);
    };
    Ok(Pair::new(parse_word(a)?, parse_word(b)?))
}

/// Signed generator-exponent counts: entry (i, j) is the exponent sum of
/// generator j in relator i.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExponentMatrix(pub [[i64; 2]; 2]);

impl ExponentMatrix {
    pub fn det(&self) -> i64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

pub fn exponent_matrix(p: &Pair) -> ExponentMatrix {
    let mut m = [[0i64; 2]; 2];
    for (i, w) in [&p.first, &p.second].into_iter().enumerate() {
        for l in w.letters() {
            m[i][l.generator()] += l.sign();
        }
    }
    ExponentMatrix(m)
}
