//! Homogeneous monoid presentations and exhaustive enumeration of their
//! elements up to a length bound.
//!
//! Elements of length `ℓ` are congruence classes of words of length `ℓ`.
//! Since every relation is length preserving, the congruence class of a word
//! only ever contains words of the same length, so it can be enumerated by a
//! plain breadth-first closure over single relation applications.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::poset::TruncatedPoset;

/// Default ceiling on the number of words visited while building a table.
pub const DEFAULT_WORD_CAP: u64 = 5_000_000;

/// Errors raised while parsing or evaluating presentations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: inhomogeneous relation ({left} letters vs {right} letters)")]
    Inhomogeneous {
        line: usize,
        left: usize,
        right: usize,
    },
    #[error("line {line}: unknown generator `{token}`")]
    UnknownGenerator { line: usize, token: String },
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error("word of length {length} exceeds the table depth {depth}")]
    WordTooLong { length: usize, depth: usize },
    #[error("letter {letter} is not a generator index (rank {rank})")]
    BadLetter { letter: u8, rank: usize },
    #[error(
        "enumeration to depth {depth} needs about {estimate} words, above the cap of {cap}; \
         reduce the depth or raise the word cap"
    )]
    CapExceeded { depth: usize, estimate: u64, cap: u64 },
}

/// A generator: its dense index and a display token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub index: usize,
    pub name: String,
}

/// A word over the generators, stored as generator indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// `self · s`
    pub fn append(&self, s: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(s);
        Word(v)
    }

    /// `s · self`
    pub fn prepend(&self, s: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(s);
        v.extend_from_slice(&self.0);
        Word(v)
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

/// A homogeneous monoid presentation `⟨S | R⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<Generator>,
    relations: Vec<(Word, Word)>,
}

impl Presentation {
    /// Validates and builds a presentation from generator names and relation pairs.
    pub fn new(names: Vec<String>, relations: Vec<(Word, Word)>) -> Result<Self, PresentationError> {
        if names.is_empty() {
            return Err(PresentationError::Invalid("no generators".into()));
        }
        if names.len() > 255 {
            return Err(PresentationError::Invalid("at most 255 generators are supported".into()));
        }
        let mut seen = FxHashSet::default();
        for name in &names {
            if name.is_empty() || name.contains(char::is_whitespace) || name.contains('=') || name.contains('#') {
                return Err(PresentationError::Invalid(format!("bad generator name `{name}`")));
            }
            if !seen.insert(name.as_str()) {
                return Err(PresentationError::Invalid(format!("duplicate generator `{name}`")));
            }
        }
        let rank = names.len();
        for (i, (l, r)) in relations.iter().enumerate() {
            if l.len() != r.len() {
                return Err(PresentationError::Inhomogeneous {
                    line: i + 1,
                    left: l.len(),
                    right: r.len(),
                });
            }
            if l.is_empty() {
                return Err(PresentationError::Invalid(format!("relation {} has empty words", i + 1)));
            }
            if l == r {
                return Err(PresentationError::Invalid(format!(
                    "relation {} equates a word with itself",
                    i + 1
                )));
            }
            for &x in l.letters().iter().chain(r.letters()) {
                if x as usize >= rank {
                    return Err(PresentationError::BadLetter { letter: x, rank });
                }
            }
        }
        let generators = names
            .into_iter()
            .enumerate()
            .map(|(index, name)| Generator { index, name })
            .collect();
        Ok(Presentation { generators, relations })
    }

    /// Generators named `s1, …, sr`.
    pub fn with_indexed_names(rank: usize, relations: Vec<(Word, Word)>) -> Result<Self, PresentationError> {
        Self::new((1..=rank).map(|i| format!("s{i}")).collect(), relations)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[(Word, Word)] {
        &self.relations
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    fn single_char_names(&self) -> bool {
        self.generators.iter().all(|g| g.name.chars().count() == 1)
    }

    /// Renders a word with this presentation's generator names.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let toks = w.letters().iter().map(|&x| self.generators[x as usize].name.as_str());
        if self.single_char_names() {
            toks.collect()
        } else {
            toks.collect::<Vec<_>>().join(" ")
        }
    }

    /// Parses a word written with this presentation's generator names.
    pub fn parse_word(&self, text: &str) -> Result<Word, PresentationError> {
        let lookup: FxHashMap<&str, u8> = self
            .generators
            .iter()
            .map(|g| (g.name.as_str(), g.index as u8))
            .collect();
        parse_word_tokens(text, &lookup, self.single_char_names(), 0, 0)
    }

    /// Same monoid with generators reordered: old generator `i` becomes `perm[i]`.
    pub fn permute_generators(&self, perm: &[usize]) -> Result<Presentation, PresentationError> {
        assert_eq!(perm.len(), self.rank());
        let mut names = vec![String::new(); self.rank()];
        for (i, g) in self.generators.iter().enumerate() {
            names[perm[i]] = g.name.clone();
        }
        let map = |w: &Word| Word(w.letters().iter().map(|&x| perm[x as usize] as u8).collect());
        let relations = self.relations.iter().map(|(l, r)| (map(l), map(r))).collect();
        Presentation::new(names, relations)
    }

    /// Checks the syntactic sufficient condition for left cancellativity:
    /// for each generator, at most one distinct relation word begins with it.
    pub fn has_unique_relation_prefixes(&self) -> bool {
        let mut first: FxHashMap<u8, &Word> = FxHashMap::default();
        for (l, r) in &self.relations {
            for w in [l, r] {
                let s = w.letters()[0];
                match first.get(&s) {
                    Some(prev) if *prev != w => return false,
                    _ => {
                        first.insert(s, w);
                    }
                }
            }
        }
        true
    }

    /// Serializes to the `.mono` text format.
    pub fn to_mono(&self) -> String {
        let mut out = String::from("gens:");
        for g in &self.generators {
            out.push(' ');
            out.push_str(&g.name);
        }
        out.push('\n');
        for (l, r) in &self.relations {
            out.push_str(&format!("rel: {} = {}\n", self.format_word(l), self.format_word(r)));
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}", self.names().join(", "))?;
        if !self.relations.is_empty() {
            write!(f, " | ")?;
            let rels: Vec<String> = self
                .relations
                .iter()
                .map(|(l, r)| format!("{} = {}", self.format_word(l), self.format_word(r)))
                .collect();
            write!(f, "{}", rels.join(", "))?;
        }
        write!(f, "⟩")
    }
}

fn parse_word_tokens(
    text: &str,
    lookup: &FxHashMap<&str, u8>,
    single_chars: bool,
    line: usize,
    column: usize,
) -> Result<Word, PresentationError> {
    let mut letters = Vec::new();
    if single_chars {
        for ch in text.chars().filter(|c| !c.is_whitespace()) {
            let mut buf = [0u8; 4];
            let tok: &str = ch.encode_utf8(&mut buf);
            match lookup.get(tok) {
                Some(&i) => letters.push(i),
                None => {
                    return Err(PresentationError::UnknownGenerator {
                        line,
                        token: tok.to_string(),
                    })
                }
            }
        }
    } else {
        for tok in text.split_whitespace() {
            match lookup.get(tok) {
                Some(&i) => letters.push(i),
                None => {
                    return Err(PresentationError::UnknownGenerator {
                        line,
                        token: tok.to_string(),
                    })
                }
            }
        }
    }
    if letters.is_empty() {
        return Err(PresentationError::Syntax {
            line,
            column,
            message: "empty word".into(),
        });
    }
    Ok(Word(letters))
}

/// Parses the `.mono` presentation format.
///
/// ```text
/// # comment
/// gens: a b c
/// rel: aa = ba
/// rel: aaa = caa
/// ```
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut names: Option<Vec<String>> = None;
    let mut raw_relations: Vec<(usize, usize, String, String)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let (key, rest) = match trimmed.split_once(':') {
            Some(kv) => kv,
            None => {
                return Err(PresentationError::Syntax {
                    line: line_no,
                    column: indent + 1,
                    message: "expected `gens:` or `rel:`".into(),
                })
            }
        };
        let rest_col = indent + key.len() + 2;
        match key.trim() {
            "gens" => {
                if names.is_some() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        column: indent + 1,
                        message: "`gens:` given more than once".into(),
                    });
                }
                if !raw_relations.is_empty() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        column: indent + 1,
                        message: "`gens:` must come before any relation".into(),
                    });
                }
                let toks: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if toks.is_empty() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        column: rest_col,
                        message: "no generators listed".into(),
                    });
                }
                names = Some(toks);
            }
            "rel" => {
                if names.is_none() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        column: indent + 1,
                        message: "`rel:` before `gens:`".into(),
                    });
                }
                let (l, r) = match rest.split_once('=') {
                    Some(lr) => lr,
                    None => {
                        return Err(PresentationError::Syntax {
                            line: line_no,
                            column: rest_col,
                            message: "expected `<word> = <word>`".into(),
                        })
                    }
                };
                if r.contains('=') {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        column: rest_col + l.len() + 1 + r.find('=').unwrap_or(0) + 1,
                        message: "more than one `=`".into(),
                    });
                }
                raw_relations.push((line_no, rest_col, l.trim().to_string(), r.trim().to_string()));
            }
            other => {
                return Err(PresentationError::Syntax {
                    line: line_no,
                    column: indent + 1,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }

    let names = names.ok_or(PresentationError::Syntax {
        line: 1,
        column: 1,
        message: "missing `gens:` line".into(),
    })?;
    let single_chars = names.iter().all(|n| n.chars().count() == 1);
    let lookup: FxHashMap<&str, u8> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i as u8))
        .collect();
    if lookup.len() != names.len() {
        return Err(PresentationError::Invalid("duplicate generator name".into()));
    }
    let mut relations = Vec::with_capacity(raw_relations.len());
    for (line, col, l, r) in &raw_relations {
        let lw = parse_word_tokens(l, &lookup, single_chars, *line, *col)?;
        let rw = parse_word_tokens(r, &lookup, single_chars, *line, *col)?;
        if lw.len() != rw.len() {
            return Err(PresentationError::Inhomogeneous {
                line: *line,
                left: lw.len(),
                right: rw.len(),
            });
        }
        if lw == rw {
            return Err(PresentationError::Invalid(format!("line {line}: relation equates a word with itself")));
        }
        relations.push((lw, rw));
    }
    let names_owned = names.clone();
    Presentation::new(names_owned, relations)
}

/// Identifier of a congruence class in an [`ElementTable`].
pub type ClassId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    pub id: ClassId,
    /// Lexicographically least word of the class.
    pub rep: Word,
}

/// All monoid elements of length at most `depth`.
///
/// Every word of length `≤ depth` over the generators is recorded in the
/// representative map, so lookups after construction never mutate the table.
#[derive(Debug, Clone)]
pub struct ElementTable {
    depth: usize,
    rank: usize,
    by_length: Vec<Vec<ClassRecord>>,
    lengths: Vec<usize>,
    reps: Vec<Word>,
    memo: FxHashMap<Word, ClassId>,
    visited: u64,
}

impl ElementTable {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of classes at each length `0..=depth`.
    pub fn class_counts(&self) -> Vec<usize> {
        self.by_length.iter().map(Vec::len).collect()
    }

    pub fn classes_at(&self, length: usize) -> &[ClassRecord] {
        &self.by_length[length]
    }

    pub fn class_total(&self) -> usize {
        self.reps.len()
    }

    pub fn rep(&self, id: ClassId) -> &Word {
        &self.reps[id as usize]
    }

    pub fn length_of(&self, id: ClassId) -> usize {
        self.lengths[id as usize]
    }

    /// Total number of distinct words recorded.
    pub fn visited_words(&self) -> u64 {
        self.visited
    }

    /// Congruence class of `w`.
    pub fn class_of(&self, w: &Word) -> Result<ClassId, PresentationError> {
        if w.len() > self.depth {
            return Err(PresentationError::WordTooLong {
                length: w.len(),
                depth: self.depth,
            });
        }
        if let Some(&bad) = w.letters().iter().find(|&&x| x as usize >= self.rank) {
            return Err(PresentationError::BadLetter { letter: bad, rank: self.rank });
        }
        Ok(*self
            .memo
            .get(w)
            .expect("every word within the depth is recorded during construction"))
    }

    /// Class of `rep(id) · s`; requires `length_of(id) < depth`.
    pub fn right_multiply(&self, id: ClassId, s: u8) -> ClassId {
        let w = self.reps[id as usize].append(s);
        self.memo[&w]
    }

    /// Class of `s · rep(id)`; requires `length_of(id) < depth`.
    pub fn left_multiply(&self, s: u8, id: ClassId) -> ClassId {
        let w = self.reps[id as usize].prepend(s);
        self.memo[&w]
    }
}

/// Expected number of words visited when enumerating to `depth`.
pub fn estimated_words(rank: usize, depth: usize) -> u64 {
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    for _ in 0..=depth {
        total = total.saturating_add(term);
        term = term.saturating_mul(rank as u64);
    }
    total
}

/// Enumerates the whole congruence class of `seed` (all words of the same length).
fn closure(seed: &Word, rules: &[(Vec<u8>, Vec<u8>)]) -> Vec<Word> {
    let len = seed.len();
    let mut seen: FxHashSet<Word> = FxHashSet::default();
    let mut queue = VecDeque::new();
    seen.insert(seed.clone());
    queue.push_back(seed.clone());
    let mut out = Vec::new();
    while let Some(w) = queue.pop_front() {
        let letters = w.letters();
        for (from, to) in rules {
            let k = from.len();
            if k > len {
                continue;
            }
            for pos in 0..=len - k {
                if &letters[pos..pos + k] == from.as_slice() {
                    let mut next = letters.to_vec();
                    next[pos..pos + k].copy_from_slice(to);
                    let next = Word(next);
                    debug_assert_eq!(next.len(), len);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        out.push(w);
    }
    out
}

fn rewrite_rules(p: &Presentation) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut rules = Vec::with_capacity(2 * p.relations.len());
    for (l, r) in &p.relations {
        rules.push((l.0.clone(), r.0.clone()));
        rules.push((r.0.clone(), l.0.clone()));
    }
    rules
}

/// Enumerates all elements of length `≤ depth`.
pub fn build_element_table(p: &Presentation, depth: usize) -> Result<ElementTable, PresentationError> {
    build_element_table_capped(p, depth, DEFAULT_WORD_CAP)
}

/// [`build_element_table`] with an explicit visited-word ceiling.
pub fn build_element_table_capped(
    p: &Presentation,
    depth: usize,
    cap: u64,
) -> Result<ElementTable, PresentationError> {
    let rank = p.rank();
    let estimate = estimated_words(rank, depth);
    if estimate > cap {
        return Err(PresentationError::CapExceeded { depth, estimate, cap });
    }
    let rules = rewrite_rules(p);
    let mut memo: FxHashMap<Word, ClassId> = FxHashMap::default();
    memo.reserve(estimate as usize);
    let mut by_length: Vec<Vec<ClassRecord>> = Vec::with_capacity(depth + 1);
    let mut reps = Vec::new();
    let mut lengths = Vec::new();

    memo.insert(Word::empty(), 0);
    reps.push(Word::empty());
    lengths.push(0);
    by_length.push(vec![ClassRecord { id: 0, rep: Word::empty() }]);

    for len in 1..=depth {
        let mut level = Vec::new();
        for parent in &by_length[len - 1] {
            for s in 0..rank as u8 {
                let w = parent.rep.append(s);
                if memo.contains_key(&w) {
                    continue;
                }
                let class = closure(&w, &rules);
                let id = reps.len() as ClassId;
                let rep = class.iter().min().cloned().expect("closure contains its seed");
                for word in class {
                    memo.insert(word, id);
                }
                reps.push(rep.clone());
                lengths.push(len);
                level.push(ClassRecord { id, rep });
            }
        }
        by_length.push(level);
    }
    let visited = memo.len() as u64;
    debug_assert_eq!(visited, estimate);
    Ok(ElementTable {
        depth,
        rank,
        by_length,
        lengths,
        reps,
        memo,
        visited,
    })
}

/// Congruence class id of `w` (convenience wrapper over [`ElementTable::class_of`]).
pub fn class_of(_p: &Presentation, w: &Word, table: &ElementTable) -> Result<ClassId, PresentationError> {
    table.class_of(w)
}

/// Left-divisibility covers of the enumerated elements.
///
/// Node ids are class ids; the cover `u ⋖ u·s` is colored by the atom of `s`.
pub fn divisibility_covers(p: &Presentation, table: &ElementTable) -> TruncatedPoset {
    let n = table.class_total();
    let mut ranks: Vec<Vec<u32>> = Vec::with_capacity(table.depth + 1);
    for len in 0..=table.depth {
        ranks.push(table.classes_at(len).iter().map(|c| c.id).collect());
    }
    // generator -> atom index (generators can coincide through length-one relations)
    let atom_of_gen: Vec<u32> = if table.depth == 0 {
        Vec::new()
    } else {
        let atoms: Vec<ClassId> = table.classes_at(1).iter().map(|c| c.id).collect();
        (0..table.rank as u8)
            .map(|s| {
                let id = table.memo[&Word(vec![s])];
                atoms.iter().position(|&a| a == id).expect("length-one class is an atom") as u32
            })
            .collect()
    };
    let mut covers: Vec<(u32, u32, u32)> = Vec::new();
    for len in 0..table.depth {
        for c in table.classes_at(len) {
            let mut targets: Vec<(u32, u32)> = Vec::with_capacity(table.rank);
            for s in 0..table.rank as u8 {
                let t = table.right_multiply(c.id, s);
                if !targets.iter().any(|&(x, _)| x == t) {
                    targets.push((t, atom_of_gen[s as usize]));
                }
            }
            for (t, color) in targets {
                covers.push((c.id, t, color));
            }
        }
    }
    let labels: Vec<String> = (0..n as u32).map(|id| p.format_word(table.rep(id))).collect();
    TruncatedPoset::from_colored_covers(ranks, &covers, Some(labels))
        .expect("divisibility covers always form a valid truncation")
}

/// Outcome of the left-cancellativity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CancellativityVerdict {
    /// Each generator starts at most one relation word, so the monoid is left-cancellative.
    SyntacticPass,
    /// No violation among elements of length `≤ depth`.
    EmpiricalPass(usize),
    /// `s·b = s·c` although `b ≠ c`.
    Violation { s: u8, b: Word, c: Word },
}

impl CancellativityVerdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, CancellativityVerdict::Violation { .. })
    }

    pub fn describe(&self, p: &Presentation) -> String {
        match self {
            CancellativityVerdict::SyntacticPass => "left-cancellative (each generator begins at most one relation word)".into(),
            CancellativityVerdict::EmpiricalPass(n) => format!("no left-cancellativity violation up to length {n}"),
            CancellativityVerdict::Violation { s, b, c } => format!(
                "not left-cancellative: {s}·{b} = {s}·{c} but {b} ≠ {c}",
                s = p.format_word(&Word(vec![*s])),
                b = p.format_word(b),
                c = p.format_word(c)
            ),
        }
    }
}

/// Checks left cancellativity, syntactically if possible and otherwise on the table.
pub fn check_left_cancellative(p: &Presentation, table: &ElementTable) -> CancellativityVerdict {
    if p.has_unique_relation_prefixes() {
        return CancellativityVerdict::SyntacticPass;
    }
    match find_cancellation_violation(table) {
        Some((s, b, c)) => CancellativityVerdict::Violation {
            s,
            b: table.rep(b).clone(),
            c: table.rep(c).clone(),
        },
        None => CancellativityVerdict::EmpiricalPass(table.depth()),
    }
}

/// First `(s, b, c)` with `s·b = s·c`, `b ≠ c`, scanning lengths upward, then
/// generators, then classes in id order. `b` is the earlier class.
pub fn find_cancellation_violation(table: &ElementTable) -> Option<(u8, ClassId, ClassId)> {
    if table.depth() == 0 {
        return None;
    }
    for len in 0..table.depth() {
        for s in 0..table.rank() as u8 {
            let mut hit: FxHashMap<ClassId, ClassId> = FxHashMap::default();
            for c in table.classes_at(len) {
                let t = table.left_multiply(s, c.id);
                if let Some(&prev) = hit.get(&t) {
                    return Some((s, prev, c.id));
                }
                hit.insert(t, c.id);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(p: &Presentation, s: &str) -> Word {
        p.parse_word(s).unwrap()
    }

    #[test]
    fn parses_commutative() {
        let p = parse_presentation("gens: a b\nrel: ab = ba").unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relations().len(), 1);
    }

    #[test]
    fn parses_with_comments_and_blank_lines() {
        let p = parse_presentation("# core inflation\n\ngens: a b c   # three\nrel: aa = ba\nrel: aaa = caa\n").unwrap();
        assert_eq!(p.rank(), 3);
        assert_eq!(p.relations().len(), 2);
        assert_eq!(p.to_mono(), "gens: a b c\nrel: aa = ba\nrel: aaa = caa\n");
    }

    #[test]
    fn multi_char_tokens_are_space_separated() {
        let p = parse_presentation("gens: s1 s2\nrel: s1 s2 = s2 s1").unwrap();
        assert_eq!(p.relations()[0].0, Word(vec![0, 1]));
        assert_eq!(p.to_mono(), "gens: s1 s2\nrel: s1 s2 = s2 s1\n");
    }

    #[test]
    fn rejects_inhomogeneous() {
        let err = parse_presentation("gens: a\nrel: aa = a").unwrap_err();
        assert_eq!(err, PresentationError::Inhomogeneous { line: 2, left: 2, right: 1 });
    }

    #[test]
    fn rejects_unknown_generator_and_syntax() {
        assert!(matches!(
            parse_presentation("gens: a b\nrel: ac = ba"),
            Err(PresentationError::UnknownGenerator { line: 2, .. })
        ));
        assert!(matches!(
            parse_presentation("gens: a b\nrel ab = ba"),
            Err(PresentationError::Syntax { line: 2, column: 1, .. })
        ));
        assert!(matches!(
            parse_presentation("rel: ab = ba"),
            Err(PresentationError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_presentation("gens: a b\nrel: ab ba"),
            Err(PresentationError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn commutative_class_merges() {
        let p = parse_presentation("gens: a b\nrel: ab = ba").unwrap();
        let t = build_element_table(&p, 3).unwrap();
        assert_eq!(class_of(&p, &w(&p, "ab"), &t), class_of(&p, &w(&p, "ba"), &t));
        assert_eq!(t.class_counts(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn free_monoid_counts() {
        let p = parse_presentation("gens: a b").unwrap();
        let t = build_element_table(&p, 3).unwrap();
        assert_eq!(t.class_counts(), vec![1, 2, 4, 8]);
        assert_eq!(check_left_cancellative(&p, &t), CancellativityVerdict::SyntacticPass);
    }

    #[test]
    fn long_relation_class() {
        let p = parse_presentation("gens: a b\nrel: abb = baa").unwrap();
        let t = build_element_table(&p, 3).unwrap();
        assert_eq!(t.class_of(&w(&p, "abb")), t.class_of(&w(&p, "baa")));
        assert_ne!(t.class_of(&w(&p, "aab")), t.class_of(&w(&p, "baa")));
    }

    #[test]
    fn seven_word_class() {
        let p = parse_presentation("gens: a b c\nrel: aa = ba\nrel: bb = cb\nrel: ab = cc").unwrap();
        let t = build_element_table(&p, 3).unwrap();
        let target = t.class_of(&w(&p, "caa")).unwrap();
        for word in ["cba", "bba", "baa", "aaa", "aba", "cca"] {
            assert_eq!(t.class_of(&w(&p, word)).unwrap(), target, "{word}");
        }
        assert_ne!(t.class_of(&w(&p, "aa")), t.class_of(&w(&p, "ca")));
    }

    #[test]
    fn word_too_long() {
        let p = parse_presentation("gens: a b").unwrap();
        let t = build_element_table(&p, 2).unwrap();
        assert_eq!(
            t.class_of(&w(&p, "aba")),
            Err(PresentationError::WordTooLong { length: 3, depth: 2 })
        );
    }

    #[test]
    fn cap_exceeded() {
        let p = parse_presentation("gens: a b c d").unwrap();
        assert!(matches!(
            build_element_table_capped(&p, 10, 1000),
            Err(PresentationError::CapExceeded { .. })
        ));
    }

    #[test]
    fn canonical_rep_is_lex_min() {
        let p = parse_presentation("gens: a b c\nrel: ba = ca\nrel: aa = bb").unwrap();
        let t = build_element_table(&p, 3).unwrap();
        for len in 0..=3 {
            for c in t.classes_at(len) {
                assert_eq!(t.class_of(&c.rep).unwrap(), c.id);
            }
        }
        let id = t.class_of(&w(&p, "ca")).unwrap();
        assert_eq!(p.format_word(t.rep(id)), "ba");
    }

    #[test]
    fn syntactic_condition() {
        let p = parse_presentation("gens: a b c\nrel: ac = bc\nrel: bc = cc").unwrap();
        assert!(p.has_unique_relation_prefixes());
        let q = parse_presentation("gens: a b c\nrel: aa = ba\nrel: bb = cb\nrel: ab = cc").unwrap();
        assert!(!q.has_unique_relation_prefixes());
    }

    #[test]
    fn violation_witness() {
        let p = parse_presentation("gens: a b c\nrel: aa = ba\nrel: bb = cb\nrel: ab = cc").unwrap();
        let t = build_element_table(&p, 3).unwrap();
        let v = check_left_cancellative(&p, &t);
        let CancellativityVerdict::Violation { s, b, c } = v else {
            panic!("expected a violation, got {v:?}");
        };
        assert_ne!(t.class_of(&b), t.class_of(&c));
        assert_eq!(t.class_of(&b.prepend(s)), t.class_of(&c.prepend(s)));
    }

    #[test]
    fn divisibility_covers_of_commutative() {
        let p = parse_presentation("gens: a b\nrel: ab = ba").unwrap();
        let t = build_element_table(&p, 2).unwrap();
        let poset = divisibility_covers(&p, &t);
        assert_eq!(poset.len(), 6);
        assert_eq!(poset.rank_sizes(), vec![1, 2, 3]);
        assert_eq!(poset.edge_count(), 2 + 4);
    }

    #[test]
    fn d2_shape() {
        let p = parse_presentation("gens: a b\nrel: aa = ba").unwrap();
        let t = build_element_table(&p, 2).unwrap();
        let poset = divisibility_covers(&p, &t);
        assert_eq!(poset.rank_sizes(), vec![1, 2, 3]);
        let shared: Vec<u32> = poset.rank(2).filter(|&v| poset.down(v).len() == 2).collect();
        assert_eq!(shared.len(), 1);
        for atom in poset.rank(1) {
            let private = poset.up(atom).iter().filter(|&&u| poset.down(u).len() == 1).count();
            assert_eq!(private, 1);
        }
    }
}
