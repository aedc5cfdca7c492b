//! Diagonal realizations `(u_i, v_i, w_i)`: explicit data, the word
//! enumeration sequence (every finite word appears) and i.i.d. samples drawn
//! by a counter-based generator, so that any index can be (re)materialized
//! on its own.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol_sets::{ComplexPoint, SymbolSet, TriSymbolSet};

/// One row of coefficients: sub-, main- and superdiagonal entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub u: ComplexPoint,
    pub v: ComplexPoint,
    pub w: ComplexPoint,
}

impl Triple {
    pub fn new(u: ComplexPoint, v: ComplexPoint, w: ComplexPoint) -> Self {
        Self { u, v, w }
    }

    pub fn real(u: f64, v: f64, w: f64) -> Self {
        Self::new(u.into(), v.into(), w.into())
    }

    /// `|u - u'| + |v - v'| + |w - w'|`
    pub fn distance(&self, other: &Triple) -> f64 {
        (self.u - other.u).norm() + (self.v - other.v).norm() + (self.w - other.w).norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldOrientation {
    BiInfinite,
    SemiInfinite,
}

/// How an i.i.d. entry is drawn from its set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingLaw {
    /// Uniform in the set parameter (uniform choice for point lists).
    #[default]
    Uniform,
    /// Arcsine law, i.e. Beta(1/2, 1/2) in the set parameter: density grows towards both ends.
    Arcsine,
}

impl SamplingLaw {
    fn transform(self, t: f64) -> f64 {
        match self {
            SamplingLaw::Uniform => t,
            SamplingLaw::Arcsine => {
                let s = (std::f64::consts::FRAC_PI_2 * t).sin();
                s * s
            }
        }
    }
}

const TAG_U: u64 = 0;
const TAG_V: u64 = 1;
const TAG_W: u64 = 2;

fn word_pos(index: i64) -> u128 {
    // two 32-bit words per draw, indices ordered monotonically
    ((index as i128 - i64::MIN as i128) as u128) * 2
}

fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counter-based uniform variates keyed by `(seed, tag, index)`.
#[derive(Clone, Debug)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn stream(&self, tag: u64, index: i64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(tag);
        rng.set_word_pos(word_pos(index));
        rng
    }

    /// Uniform variate in `[0, 1)` for one `(tag, index)` pair.
    pub fn unit(&self, tag: u64, index: i64) -> f64 {
        to_unit(self.stream(tag, index).next_u64())
    }

    /// Same values as `unit(tag, i)` for `i` in `lo..=hi`, generated in one pass.
    pub fn unit_range(&self, tag: u64, lo: i64, hi: i64) -> Vec<f64> {
        if hi < lo {
            return Vec::new();
        }
        let mut rng = self.stream(tag, lo);
        (lo..=hi).map(|_| to_unit(rng.next_u64())).collect()
    }
}

/// I.i.d. sampler over a set triple.
#[derive(Clone, Debug)]
pub struct IidSampler {
    pub sets: TriSymbolSet,
    pub seed: u64,
    pub laws: [SamplingLaw; 3],
}

impl IidSampler {
    pub fn new(sets: TriSymbolSet, seed: u64) -> Self {
        Self { sets, seed, laws: [SamplingLaw::Uniform; 3] }
    }

    pub fn with_laws(mut self, laws: [SamplingLaw; 3]) -> Self {
        self.laws = laws;
        self
    }

    fn draw(&self, tu: f64, tv: f64, tw: f64) -> Triple {
        Triple {
            u: self.sets.u().param_point(self.laws[0].transform(tu)),
            v: self.sets.v().param_point(self.laws[1].transform(tv)),
            w: self.sets.w().param_point(self.laws[2].transform(tw)),
        }
    }

    pub fn sample(&self, index: i64) -> Triple {
        let rng = CounterRng::new(self.seed);
        self.draw(rng.unit(TAG_U, index), rng.unit(TAG_V, index), rng.unit(TAG_W, index))
    }

    pub fn sample_range(&self, lo: i64, hi: i64) -> Vec<Triple> {
        let rng = CounterRng::new(self.seed);
        let (us, vs, ws) = (
            rng.unit_range(TAG_U, lo, hi),
            rng.unit_range(TAG_V, lo, hi),
            rng.unit_range(TAG_W, lo, hi),
        );
        us.into_iter()
            .zip(vs)
            .zip(ws)
            .map(|((a, b), c)| self.draw(a, b, c))
            .collect()
    }

    /// A triple of highest sampling density, used as default planning target.
    pub fn most_probable(&self) -> Triple {
        let pick = |set: &SymbolSet, law: SamplingLaw| match law {
            SamplingLaw::Uniform => set.param_point(0.5),
            SamplingLaw::Arcsine => set.param_point(1.0),
        };
        Triple {
            u: pick(self.sets.u(), self.laws[0]),
            v: pick(self.sets.v(), self.laws[1]),
            w: pick(self.sets.w(), self.laws[2]),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Generator {
    Explicit,
    WordEnumeration { alphabet: Vec<Triple> },
    Iid(IidSampler),
}

/// Letter index (into an alphabet of size `m`) at position `p` of the word
/// enumeration sequence: all words of length 1, then 2, ... in lexicographic order.
pub fn word_enumeration_letter(m: usize, p: u64) -> usize {
    assert!(m > 0, "empty alphabet");
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut rem = p as u128;
    let mut len: u32 = 1;
    loop {
        let words = m128.pow(len);
        let block = words * len as u128;
        if rem < block {
            let word = rem / len as u128;
            let pos = (rem % len as u128) as u32;
            return ((word / m128.pow(len - 1 - pos)) % m128) as usize;
        }
        rem -= block;
        len += 1;
    }
}

/// First `length` entries of the word enumeration sequence over `alphabet`.
pub fn enumerate_words_sequence<T: Clone>(alphabet: &[T], length: usize) -> Vec<T> {
    (0..length as u64)
        .map(|p| alphabet[word_enumeration_letter(alphabet.len(), p)].clone())
        .collect()
}

/// A materialized window `[lo, hi]` of a diagonal sequence.
#[derive(Clone, Debug)]
pub struct DiagonalField {
    lo: i64,
    triples: Vec<Triple>,
    generator: Generator,
    orientation: FieldOrientation,
}

fn check_window(orientation: FieldOrientation, lo: i64, hi: i64) -> Result<()> {
    let ok = match orientation {
        FieldOrientation::BiInfinite => lo <= 0 && 0 <= hi,
        FieldOrientation::SemiInfinite => lo == 1 && hi >= lo,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("window [{lo}, {hi}] invalid for {orientation:?} field")))
    }
}

impl DiagonalField {
    pub fn explicit(lo: i64, triples: Vec<Triple>, orientation: FieldOrientation) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::InvalidInput("empty field".into()));
        }
        check_window(orientation, lo, lo + triples.len() as i64 - 1)?;
        Ok(Self { lo, triples, generator: Generator::Explicit, orientation })
    }

    /// Constant field over `[lo, hi]` (stored explicitly).
    pub fn constant(t: Triple, lo: i64, hi: i64, orientation: FieldOrientation) -> Result<Self> {
        Self::explicit(lo, vec![t; (hi - lo + 1).max(0) as usize], orientation)
    }

    pub fn word_enumeration(alphabet: Vec<Triple>, lo: i64, hi: i64, orientation: FieldOrientation) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        Self::from_generator(Generator::WordEnumeration { alphabet }, lo, hi, orientation)
    }

    pub fn sample_iid(sampler: IidSampler, lo: i64, hi: i64, orientation: FieldOrientation) -> Result<Self> {
        Self::from_generator(Generator::Iid(sampler), lo, hi, orientation)
    }

    /// Stored entries together with the generator that extends them.
    pub fn with_generator(lo: i64, triples: Vec<Triple>, generator: Generator, orientation: FieldOrientation) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::InvalidInput("empty field".into()));
        }
        check_window(orientation, lo, lo + triples.len() as i64 - 1)?;
        Ok(Self { lo, triples, generator, orientation })
    }

    fn from_generator(generator: Generator, lo: i64, hi: i64, orientation: FieldOrientation) -> Result<Self> {
        check_window(orientation, lo, hi)?;
        let mut field = Self { lo, triples: Vec::new(), generator, orientation };
        field.triples = field.generate(lo, hi);
        Ok(field)
    }

    fn enumeration_position(&self, i: i64) -> u64 {
        match self.orientation {
            FieldOrientation::SemiInfinite => (i - 1) as u64,
            FieldOrientation::BiInfinite if i >= 0 => i as u64,
            FieldOrientation::BiInfinite => (-i - 1) as u64,
        }
    }

    fn generate(&self, lo: i64, hi: i64) -> Vec<Triple> {
        match &self.generator {
            Generator::Explicit => unreachable!("explicit fields are never generated"),
            Generator::WordEnumeration { alphabet } => (lo..=hi)
                .map(|i| alphabet[word_enumeration_letter(alphabet.len(), self.enumeration_position(i))])
                .collect(),
            Generator::Iid(s) => s.sample_range(lo, hi),
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.triples.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn orientation(&self) -> FieldOrientation {
        self.orientation
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn is_extendable(&self) -> bool {
        !matches!(self.generator, Generator::Explicit)
    }

    pub fn get(&self, i: i64) -> Option<Triple> {
        if i < self.lo {
            return None;
        }
        self.triples.get((i - self.lo) as usize).copied()
    }

    /// Triple at index `i`; panics outside the materialized window.
    pub fn at(&self, i: i64) -> Triple {
        self.get(i)
            .unwrap_or_else(|| panic!("index {i} outside field [{}, {}]", self.lo, self.hi()))
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        lo >= self.lo && hi <= self.hi()
    }

    /// Returns a copy materialized over `[new_lo, new_hi]`; old entries are kept bit for bit.
    pub fn extend(&self, new_lo: i64, new_hi: i64) -> Result<Self> {
        let mut out = self.clone();
        out.ensure(new_lo.min(self.lo), new_hi.max(self.hi()))?;
        Ok(out)
    }

    /// Grows the window in place so that it covers `[lo, hi]`.
    pub fn ensure(&mut self, lo: i64, hi: i64) -> Result<()> {
        if self.covers(lo, hi) {
            return Ok(());
        }
        if !self.is_extendable() {
            return Err(Error::CannotExtend);
        }
        let (cur_lo, cur_hi) = (self.lo, self.hi());
        let new_lo = lo.min(cur_lo);
        let new_hi = hi.max(cur_hi);
        if self.orientation == FieldOrientation::SemiInfinite && new_lo < 1 {
            return Err(Error::OutOfRange { lo, hi, field_lo: 1, field_hi: i64::MAX });
        }
        if new_hi > cur_hi {
            let tail = self.generate(cur_hi + 1, new_hi);
            self.triples.extend(tail);
        }
        if new_lo < cur_lo {
            let mut head = self.generate(new_lo, cur_lo - 1);
            head.append(&mut self.triples);
            self.triples = head;
            self.lo = new_lo;
        }
        Ok(())
    }

    /// The sets the entries are drawn from, when the generator defines them.
    pub fn governing_sets(&self) -> Option<TriSymbolSet> {
        match &self.generator {
            Generator::Explicit => None,
            Generator::Iid(s) => Some(s.sets.clone()),
            Generator::WordEnumeration { alphabet } => {
                let collect = |f: fn(&Triple) -> ComplexPoint| {
                    let mut pts: Vec<ComplexPoint> = Vec::new();
                    for t in alphabet {
                        let z = f(t);
                        if !pts.contains(&z) {
                            pts.push(z);
                        }
                    }
                    SymbolSet::points(pts).expect("non-empty alphabet")
                };
                Some(TriSymbolSet::new(collect(|t| t.u), collect(|t| t.v), collect(|t| t.w)))
            }
        }
    }

    /// Number of materialized triples that fall outside `sets` by more than `tol`.
    pub fn membership_violations(&self, sets: &TriSymbolSet, tol: f64) -> usize {
        self.triples
            .iter()
            .filter(|t| !(sets.u().contains(t.u, tol) && sets.v().contains(t.v, tol) && sets.w().contains(t.w, tol)))
            .count()
    }

    /// Alphabet used by the pseudoergodicity check.
    pub fn alphabet(&self) -> Vec<Triple> {
        match &self.generator {
            Generator::WordEnumeration { alphabet } => alphabet.clone(),
            Generator::Iid(s) => {
                let mut out = Vec::with_capacity(s.sets.triple_count());
                for &u in s.sets.u().samples() {
                    for &v in s.sets.v().samples() {
                        for &w in s.sets.w().samples() {
                            out.push(Triple { u, v, w });
                        }
                    }
                }
                out
            }
            Generator::Explicit => {
                let mut seen: Vec<Triple> = Vec::new();
                for t in &self.triples {
                    if !seen.contains(t) {
                        seen.push(*t);
                    }
                }
                seen
            }
        }
    }
}

/// Result of searching a field for every word up to a given length.
#[derive(Clone, Debug, Serialize)]
pub struct PseudoergodicReport {
    pub alphabet_size: usize,
    pub word_len: usize,
    pub eps: f64,
    /// `(word as alphabet indices, first start index)` for every word.
    pub words: Vec<(Vec<usize>, Option<i64>)>,
    pub found: usize,
    /// Conjunction over all words; false only means "not yet observed" in this window.
    pub all_found: bool,
}

/// Largest `alphabet_size^word_len` accepted by [`verify_pseudoergodic`].
pub const WORD_BUDGET: u128 = 1_000_000;

/// Looks for every word `b` of length `<= word_len` over the field's alphabet,
/// i.e. a start `k` with `d(a_{k+i}, b_i) < eps` for all positions `i` of the word.
pub fn verify_pseudoergodic(field: &DiagonalField, word_len: usize, eps: f64) -> Result<PseudoergodicReport> {
    let alphabet = field.alphabet();
    let m = alphabet.len();
    if word_len == 0 {
        return Err(Error::InvalidInput("word length must be positive".into()));
    }
    if (m as u128).checked_pow(word_len as u32).is_none_or(|c| c > WORD_BUDGET) {
        return Err(Error::BudgetExceeded(format!("{m}^{word_len} words exceed {WORD_BUDGET}")));
    }
    // offsets[len] = index of the first word of that length in the flat table
    let mut offsets = vec![0usize; word_len + 2];
    for len in 1..=word_len {
        offsets[len + 1] = offsets[len] + m.pow(len as u32);
    }
    let total = offsets[word_len + 1];

    let matches: Vec<Vec<usize>> = field
        .triples()
        .iter()
        .map(|t| (0..m).filter(|&k| t.distance(&alphabet[k]) < eps).collect())
        .collect();
    let mut search = WordSearch {
        m,
        word_len,
        offsets: &offsets,
        matches: &matches,
        first: vec![None; total],
        found: 0,
    };
    for k in 0..matches.len() {
        if search.found == total {
            break;
        }
        search.visit(k, 0, 0, field.lo() + k as i64);
    }
    let WordSearch { first, found, .. } = search;

    let mut words = Vec::with_capacity(total);
    for len in 1..=word_len {
        for c in 0..m.pow(len as u32) {
            let mut w = vec![0usize; len];
            let mut x = c;
            for slot in w.iter_mut().rev() {
                *slot = x % m;
                x /= m;
            }
            words.push((w, first[offsets[len] + c]));
        }
    }
    Ok(PseudoergodicReport { alphabet_size: m, word_len, eps, words, found, all_found: found == total })
}

struct WordSearch<'a> {
    m: usize,
    word_len: usize,
    offsets: &'a [usize],
    matches: &'a [Vec<usize>],
    first: Vec<Option<i64>>,
    found: usize,
}

impl WordSearch<'_> {
    fn visit(&mut self, pos: usize, depth: usize, code: usize, start: i64) {
        if depth == self.word_len || pos >= self.matches.len() {
            return;
        }
        for &letter in &self.matches[pos] {
            let c = code * self.m + letter;
            let slot = self.offsets[depth + 1] + c;
            if self.first[slot].is_none() {
                self.first[slot] = Some(start);
                self.found += 1;
            }
            self.visit(pos + 1, depth + 1, c, start);
        }
    }
}
