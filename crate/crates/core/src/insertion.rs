//! Left and right insertion of biletters into bumpless pipe dreams, their inverses,
//! and the two RSK-style correspondences between biwords and (pipe dream, chain) pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::bpd::{validate, BpdGrid, Mode, Segment, Tile};
use crate::error::{Error, Result};
use crate::moves::{bump_crossing, bump_pipes, cross_bump_swap, min_droop, min_undroop, term_move};
use crate::perm::{cover_transposition, MixedChain, Permutation};
use crate::poly::Polynomial;

/// Hard cap on the steps of a single insertion; far above anything a valid input needs.
const MAX_STEPS: usize = 100_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Biletter {
    pub b: usize,
    pub k: usize,
}

impl Biletter {
    pub fn new(b: usize, k: usize) -> Result<Self> {
        if b == 0 || b > k {
            return Err(Error::InvalidBiletter { b, k });
        }
        Ok(Biletter { b, k })
    }
}

impl fmt::Display for Biletter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.b, self.k)
    }
}

impl FromStr for Biletter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (b, k) = s
            .split_once('_')
            .ok_or_else(|| Error::Parse(format!("biletter `{s}` is not of the form B_K")))?;
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in biletter `{s}`")))
        };
        Biletter::new(num(b)?, num(k)?)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Biword(pub Vec<Biletter>);

impl Biword {
    pub fn letters(&self) -> &[Biletter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Biword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for Biword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Biword)
    }
}

impl Serialize for Biword {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `∏ x_b` over the letters.
pub fn biword_weight(q: &Biword) -> Polynomial {
    let mut e = Vec::new();
    for l in &q.0 {
        if e.len() < l.b {
            e.resize(l.b, 0u32);
        }
        e[l.b - 1] += 1;
    }
    Polynomial::monomial(e, 1.into())
}

/// One step of an insertion: the branch taken, the move, and where the active tile went.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    /// Branch of the algorithm: `1`, `2`, `2a`, `2b`, `3a` or `3b`; `0` marks the initial bump.
    pub branch: &'static str,
    pub op: &'static str,
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub grid: BpdGrid,
}

impl Step {
    pub fn name(&self) -> String {
        format!("{}:{}", self.branch, self.op)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "STEP {} ({},{}) -> ({},{})\n{}",
            self.name(),
            self.from.0,
            self.from.1,
            self.to.0,
            self.to.1,
            self.grid
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace(pub Vec<Step>);

impl Trace {
    /// Branch labels in order, leaving out the initial bump of the inverse algorithms.
    pub fn branches(&self) -> Vec<&'static str> {
        self.0
            .iter()
            .map(|s| s.branch)
            .filter(|&b| b != "0")
            .collect()
    }

    fn push(
        &mut self,
        branch: &'static str,
        op: &'static str,
        from: (usize, usize),
        to: (usize, usize),
        grid: &BpdGrid,
    ) {
        self.0.push(Step {
            branch,
            op,
            from,
            to,
            grid: grid.clone(),
        });
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn working_size(n: usize, k: usize) -> usize {
    n.max(k + 1) + 1
}

fn check_plain(d: &BpdGrid) -> Result<Permutation> {
    validate(d, Mode::Plain).map_err(Error::InvalidGrid)?;
    d.perm()
}

fn r_turn_in_row(g: &BpdGrid, r: usize, cols: impl Iterator<Item = usize>) -> Option<usize> {
    cols.into_iter().find(|&c| g.get(r, c) == Tile::RElbow)
}

fn j_turn_in_row(g: &BpdGrid, r: usize, cols: impl Iterator<Item = usize>) -> Option<usize> {
    cols.into_iter().find(|&c| g.get(r, c) == Tile::JElbow)
}

fn exit_row_of(g: &BpdGrid, (r, c): (usize, usize), seg: Segment) -> Result<usize> {
    let pipes = g.pipes()?;
    Ok(pipes.exit_row(pipes.owner(r, c, seg).expect("segment present")))
}

fn missing(op: &'static str, at: (usize, usize), what: &str) -> Error {
    Error::Move {
        op,
        at,
        reason: format!("no {what} in this row"),
    }
}

/// Left insertion `b_k → D`, with its step trace.
pub fn left_insert_traced(d: &BpdGrid, bl: Biletter) -> Result<(BpdGrid, Trace)> {
    check_plain(d)?;
    let k = bl.k;
    let mut g = d.embed(working_size(d.size(), k));
    let n = g.size();
    let mut trace = Trace::default();
    let mut at = (
        bl.b,
        r_turn_in_row(&g, bl.b, 1..=n)
            .ok_or_else(|| missing("left-insert", (bl.b, 1), "r-turn"))?,
    );
    for _ in 0..MAX_STEPS {
        let (next, t) = min_droop(&g, at.0, at.1)?;
        g = next;
        trace.push("1", "min-droop", at, t, &g);
        let (i1, j1) = t;
        if g.get(i1, j1) == Tile::JElbow {
            if i1 <= k {
                let j2 = r_turn_in_row(&g, i1, j1 + 1..=n)
                    .ok_or_else(|| missing("left-insert", t, "r-turn"))?;
                trace.push("2a", "next-r-turn", t, (i1, j2), &g);
                at = (i1, j2);
            } else {
                let j0 = r_turn_in_row(&g, i1, (1..j1).rev())
                    .ok_or_else(|| missing("left-insert", t, "r-turn"))?;
                trace.push("2b", "prev-r-turn", t, (i1, j0), &g);
                at = (i1, j0);
            }
            continue;
        }
        if exit_row_of(&g, t, Segment::RTurn)? <= k {
            trace.push("3a", "continue", t, t, &g);
            at = t;
        } else if bump_crossing(&g, i1, j1)?.is_some() {
            let (next, s) = cross_bump_swap(&g, i1, j1)?;
            g = next;
            trace.push("3b", "cross-bump-swap", t, s, &g);
            at = s;
        } else {
            g = term_move(&g, i1, j1)?;
            trace.push("3b", "term", t, t, &g);
            return Ok((g.trim(), trace));
        }
    }
    Err(Error::NonTerminating("left insertion"))
}

/// Right insertion `D ← b_k`, with its step trace.
pub fn right_insert_traced(d: &BpdGrid, bl: Biletter) -> Result<(BpdGrid, Trace)> {
    check_plain(d)?;
    let k = bl.k;
    let mut g = d.embed(working_size(d.size(), k));
    let n = g.size();
    let mut trace = Trace::default();
    let mut at = (
        bl.b,
        r_turn_in_row(&g, bl.b, (1..=n).rev())
            .ok_or_else(|| missing("right-insert", (bl.b, 1), "r-turn"))?,
    );
    for _ in 0..MAX_STEPS {
        let (next, t) = min_droop(&g, at.0, at.1)?;
        g = next;
        trace.push("1", "min-droop", at, t, &g);
        let (i1, j1) = t;
        if g.get(i1, j1) == Tile::JElbow {
            let j2 = r_turn_in_row(&g, i1, (1..j1).rev())
                .ok_or_else(|| missing("right-insert", t, "r-turn"))?;
            trace.push("2", "prev-r-turn", t, (i1, j2), &g);
            at = (i1, j2);
            continue;
        }
        if bump_crossing(&g, i1, j1)?.is_some() {
            let (next, s) = cross_bump_swap(&g, i1, j1)?;
            g = next;
            trace.push("3a", "cross-bump-swap", t, s, &g);
            at = s;
        } else if exit_row_of(&g, t, Segment::RTurn)? <= k {
            trace.push("3b", "continue", t, t, &g);
            at = t;
        } else {
            g = term_move(&g, i1, j1)?;
            trace.push("3b", "term", t, t, &g);
            return Ok((g.trim(), trace));
        }
    }
    Err(Error::NonTerminating("right insertion"))
}

pub fn left_insert(d: &BpdGrid, bl: Biletter) -> Result<BpdGrid> {
    left_insert_traced(d, bl).map(|(g, _)| g)
}

pub fn right_insert(d: &BpdGrid, bl: Biletter) -> Result<BpdGrid> {
    right_insert_traced(d, bl).map(|(g, _)| g)
}

pub fn insert(side: Side, d: &BpdGrid, bl: Biletter) -> Result<BpdGrid> {
    match side {
        Side::Left => left_insert(d, bl),
        Side::Right => right_insert(d, bl),
    }
}

/// Checks the inverse preconditions and puts a bump on the crossing of the two swapped pipes.
fn start_inverse(
    pi: &Permutation,
    rho: &Permutation,
    k: usize,
    e: &BpdGrid,
    trace: &mut Trace,
) -> Result<(BpdGrid, (usize, usize))> {
    let not_cover = || Error::NotACover {
        lo: pi.to_string(),
        hi: rho.to_string(),
        k,
    };
    let (alpha, beta) = cover_transposition(pi, rho).ok_or_else(not_cover)?;
    if !(alpha <= k && k < beta) {
        return Err(not_cover());
    }
    let got = check_plain(e)?;
    if &got != rho {
        return Err(Error::ChainMismatch(format!(
            "grid has permutation {got}, expected {rho}"
        )));
    }
    let mut g = e.embed(working_size(e.size(), k));
    let pipes = g.pipes()?;
    let (p, q) = (pi.apply(alpha), pi.apply(beta));
    let at = *pipes
        .crossings_between(&g, p, q)
        .first()
        .ok_or_else(|| Error::ChainMismatch(format!("pipes {p} and {q} do not cross")))?;
    g.set(at.0, at.1, Tile::Bump);
    trace.push("0", "uncross", at, at, &g);
    Ok((g, at))
}

/// Inverse of left insertion: recovers `(b_k, D)` from `E ∈ BPD(rho)`.
pub fn inverse_left_insert_traced(
    pi: &Permutation,
    rho: &Permutation,
    k: usize,
    e: &BpdGrid,
) -> Result<(Biletter, BpdGrid, Trace)> {
    let mut trace = Trace::default();
    let (mut g, mut at) = start_inverse(pi, rho, k, e, &mut trace)?;
    for _ in 0..MAX_STEPS {
        let (next, t) = min_undroop(&g, at.0, at.1)?;
        g = next;
        trace.push("1", "min-undroop", at, t, &g);
        let (i1, j1) = t;
        if g.get(i1, j1) == Tile::RElbow {
            if i1 <= k {
                match j_turn_in_row(&g, i1, (1..j1).rev()) {
                    Some(j2) => {
                        trace.push("2a", "prev-j-turn", t, (i1, j2), &g);
                        at = (i1, j2);
                    }
                    None => {
                        trace.push("2a", "output", t, t, &g);
                        return Ok((Biletter::new(i1, k)?, g.trim(), trace));
                    }
                }
            } else {
                let j3 = j_turn_in_row(&g, i1, j1 + 1..=g.size())
                    .ok_or_else(|| missing("inverse-left-insert", t, "j-turn"))?;
                trace.push("2b", "next-j-turn", t, (i1, j3), &g);
                at = (i1, j3);
            }
            continue;
        }
        if exit_row_of(&g, t, Segment::JTurn)? <= k {
            trace.push("3a", "continue", t, t, &g);
            at = t;
        } else {
            let (next, s) = cross_bump_swap(&g, i1, j1)?;
            g = next;
            trace.push("3b", "cross-bump-swap", t, s, &g);
            at = s;
        }
    }
    Err(Error::NonTerminating("inverse left insertion"))
}

/// Inverse of right insertion: recovers `(b_k, D)` from `E ∈ BPD(rho)`.
pub fn inverse_right_insert_traced(
    pi: &Permutation,
    rho: &Permutation,
    k: usize,
    e: &BpdGrid,
) -> Result<(Biletter, BpdGrid, Trace)> {
    let mut trace = Trace::default();
    let (mut g, mut at) = start_inverse(pi, rho, k, e, &mut trace)?;
    for _ in 0..MAX_STEPS {
        let (next, t) = min_undroop(&g, at.0, at.1)?;
        g = next;
        trace.push("1", "min-undroop", at, t, &g);
        let (i1, j1) = t;
        if g.get(i1, j1) == Tile::RElbow {
            match j_turn_in_row(&g, i1, j1 + 1..=g.size()) {
                Some(j2) => {
                    trace.push("2", "next-j-turn", t, (i1, j2), &g);
                    at = (i1, j2);
                }
                None => {
                    trace.push("2", "output", t, t, &g);
                    return Ok((Biletter::new(i1, k)?, g.trim(), trace));
                }
            }
            continue;
        }
        if bump_crossing(&g, i1, j1)?.is_some() {
            let (next, s) = cross_bump_swap(&g, i1, j1)?;
            g = next;
            trace.push("3a", "cross-bump-swap", t, s, &g);
            at = s;
        } else {
            trace.push("3b", "continue", t, t, &g);
            at = t;
        }
    }
    Err(Error::NonTerminating("inverse right insertion"))
}

pub fn inverse_left_insert(
    pi: &Permutation,
    rho: &Permutation,
    k: usize,
    e: &BpdGrid,
) -> Result<(Biletter, BpdGrid)> {
    inverse_left_insert_traced(pi, rho, k, e).map(|(b, d, _)| (b, d))
}

pub fn inverse_right_insert(
    pi: &Permutation,
    rho: &Permutation,
    k: usize,
    e: &BpdGrid,
) -> Result<(Biletter, BpdGrid)> {
    inverse_right_insert_traced(pi, rho, k, e).map(|(b, d, _)| (b, d))
}

pub fn inverse_insert(
    side: Side,
    pi: &Permutation,
    rho: &Permutation,
    k: usize,
    e: &BpdGrid,
) -> Result<(Biletter, BpdGrid)> {
    match side {
        Side::Left => inverse_left_insert(pi, rho, k, e),
        Side::Right => inverse_right_insert(pi, rho, k, e),
    }
}

/// Inserts `letters` in order into `d`, recording each new permutation with the letter's subscript.
fn record(side: Side, letters: impl Iterator<Item = Biletter>) -> Result<(BpdGrid, MixedChain)> {
    let mut d = BpdGrid::identity(1);
    let mut chain = MixedChain::new(Permutation::identity());
    for bl in letters {
        d = insert(side, &d, bl)?;
        chain.push(bl.k, d.perm()?)?;
    }
    Ok((d, chain))
}

/// Left RSK: the letters are inserted from last to first.
pub fn rsk_left(q: &Biword) -> Result<(BpdGrid, MixedChain)> {
    record(Side::Left, q.0.iter().rev().copied())
}

/// Right RSK: the letters are inserted from first to last.
pub fn rsk_right(q: &Biword) -> Result<(BpdGrid, MixedChain)> {
    record(Side::Right, q.0.iter().copied())
}

/// Peels the chain from its top, returning letters in the order they were removed.
fn unrecord(side: Side, d: &BpdGrid, c: &MixedChain) -> Result<Vec<Biletter>> {
    let got = check_plain(d)?;
    if &got != c.end() {
        return Err(Error::ChainMismatch(format!(
            "grid has permutation {got}, chain ends at {}",
            c.end()
        )));
    }
    let perms = c.perms();
    let labels = c.labels();
    let mut d = d.clone();
    let mut out = Vec::with_capacity(labels.len());
    for i in (0..labels.len()).rev() {
        let (bl, prev) = inverse_insert(side, perms[i], perms[i + 1], labels[i], &d)?;
        out.push(bl);
        d = prev;
    }
    Ok(out)
}

pub fn unrsk_left(d: &BpdGrid, c: &MixedChain) -> Result<Biword> {
    unrecord(Side::Left, d, c).map(Biword)
}

pub fn unrsk_right(d: &BpdGrid, c: &MixedChain) -> Result<Biword> {
    let mut letters = unrecord(Side::Right, d, c)?;
    letters.reverse();
    Ok(Biword(letters))
}

/// Whether `(x → D) ← y` and `x → (D ← y)` give the same grid.
pub fn check_commutes(d: &BpdGrid, x: Biletter, y: Biletter) -> bool {
    let a = left_insert(d, x).and_then(|e| right_insert(&e, y));
    let b = right_insert(d, y).and_then(|e| left_insert(&e, x));
    matches!((a, b), (Ok(a), Ok(b)) if a == b)
}

/// The pipe labels of the bump at `at`, `(r-turn pipe, j-turn pipe)`; used by trace checks.
pub fn bump_at(g: &BpdGrid, at: (usize, usize)) -> Result<(usize, usize)> {
    bump_pipes(g, at.0, at.1)
}
