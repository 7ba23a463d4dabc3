//! Permutations of finite support, Bruhat covers labelled by `k`, and mixed chains.
//!
//! A [`Permutation`] is an element of `S_∞` stored in trimmed one-line notation:
//! trailing fixed points are dropped, so `1243` and `12435` compare equal.
//! Positions and values are 1-based throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation {
    one_line: Vec<usize>,
}

/// Descent positions of a permutation together with the first (`d1`) and last (`d2`) one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descents {
    pub positions: Vec<usize>,
    pub d1: Option<usize>,
    pub d2: Option<usize>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a permutation from one-line notation, checking that it is a bijection of `1..=n`.
    pub fn new(one_line: Vec<usize>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in &one_line {
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{one_line:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Self::from_vec(one_line))
    }

    pub(crate) fn from_vec(mut one_line: Vec<usize>) -> Self {
        while let Some(&last) = one_line.last() {
            if last == one_line.len() {
                one_line.pop();
            } else {
                break;
            }
        }
        Permutation { one_line }
    }

    /// Smallest `n` with the permutation in `S_n` (0 for the identity).
    pub fn size(&self) -> usize {
        self.one_line.len()
    }

    pub fn is_identity(&self) -> bool {
        self.one_line.is_empty()
    }

    /// `π(i)` for a 1-based position; positions past the support are fixed.
    pub fn apply(&self, i: usize) -> usize {
        debug_assert!(i >= 1);
        self.one_line.get(i - 1).copied().unwrap_or(i)
    }

    /// One-line notation of length `max(n, size)`.
    pub fn padded(&self, n: usize) -> Vec<usize> {
        let m = n.max(self.size());
        (1..=m).map(|i| self.apply(i)).collect()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.one_line
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.size()];
        for (i, &v) in self.one_line.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Self::from_vec(inv)
    }

    /// Product `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Permutation) -> Self {
        let n = self.size().max(other.size());
        Self::from_vec((1..=n).map(|i| self.apply(other.apply(i))).collect())
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        self.code().iter().sum()
    }

    /// Lehmer code: `code_i = #{j > i : π(j) < π(i)}`, trailing zeros trimmed.
    pub fn code(&self) -> Vec<usize> {
        let w = &self.one_line;
        let mut code: Vec<usize> = (0..w.len())
            .map(|i| w[i + 1..].iter().filter(|&&x| x < w[i]).count())
            .collect();
        while code.last() == Some(&0) {
            code.pop();
        }
        code
    }

    /// The unique permutation of `S_∞` whose Lehmer code is `code`.
    pub fn from_code(code: &[usize]) -> Self {
        let mut len = code.len();
        while len > 0 && code[len - 1] == 0 {
            len -= 1;
        }
        let code = &code[..len];
        // Entry i needs code_i smaller values still unused to its right.
        let n = (0..len).map(|i| i + code[i] + 1).max().unwrap_or(0);
        let mut available: Vec<usize> = (1..=n).collect();
        let mut one_line = Vec::with_capacity(n);
        for i in 0..n {
            let c = code.get(i).copied().unwrap_or(0);
            one_line.push(available.remove(c));
        }
        Self::from_vec(one_line)
    }

    pub fn descents(&self) -> Descents {
        let w = &self.one_line;
        let positions: Vec<usize> = (1..w.len()).filter(|&i| w[i - 1] > w[i]).collect();
        Descents {
            d1: positions.first().copied(),
            d2: positions.last().copied(),
            positions,
        }
    }

    /// `π · t_{ab}`: swap the entries in positions `a` and `b`.
    pub fn swap_positions(&self, a: usize, b: usize) -> Self {
        let mut w = self.padded(a.max(b));
        w.swap(a - 1, b - 1);
        Self::from_vec(w)
    }

    /// `s_m · π`: swap the values `m` and `m + 1`.
    pub fn swap_values(&self, m: usize) -> Self {
        let w = self
            .padded(m + 1)
            .into_iter()
            .map(|v| {
                if v == m {
                    m + 1
                } else if v == m + 1 {
                    m
                } else {
                    v
                }
            })
            .collect();
        Self::from_vec(w)
    }

    /// Whether `π · t_{ab}` covers `π` in Bruhat order (`a < b`).
    pub fn transposition_covers(&self, a: usize, b: usize) -> bool {
        debug_assert!(a < b);
        let (lo, hi) = (self.apply(a), self.apply(b));
        lo < hi && (a + 1..b).all(|c| !(lo < self.apply(c) && self.apply(c) < hi))
    }

    /// Every `π · t_{αβ}` covering `π` with `α ≤ k < β ≤ bound`.
    pub fn k_covers_up(&self, k: usize, bound: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        for a in 1..=k {
            for b in (k + 1)..=bound {
                if self.transposition_covers(a, b) {
                    out.push(self.swap_positions(a, b));
                }
            }
        }
        out.sort();
        out
    }

    /// `k`-covers with the default bound `max(n, k) + 1`, which already contains all of them.
    pub fn all_k_covers_up(&self, k: usize) -> Vec<Permutation> {
        self.k_covers_up(k, self.size().max(k) + 1)
    }

    pub fn display_padded(&self, n: usize) -> String {
        format_one_line(&self.padded(n.max(1)))
    }
}

fn format_one_line(w: &[usize]) -> String {
    if w.iter().all(|&v| v <= 9) {
        w.iter().map(|v| v.to_string()).collect()
    } else {
        w.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// The positions `(a, b)`, `a < b`, with `hi = lo · t_{ab}` and `ℓ(hi) = ℓ(lo) + 1`.
pub fn cover_transposition(lo: &Permutation, hi: &Permutation) -> Option<(usize, usize)> {
    let n = lo.size().max(hi.size());
    let diff: Vec<usize> = (1..=n).filter(|&i| lo.apply(i) != hi.apply(i)).collect();
    match diff[..] {
        [a, b] if lo.swap_positions(a, b) == *hi && lo.transposition_covers(a, b) => Some((a, b)),
        _ => None,
    }
}

/// `hi ⋗_k lo`: `hi = lo · t_{αβ}` is a Bruhat cover with `α ≤ k < β`.
pub fn is_k_cover(lo: &Permutation, hi: &Permutation, k: usize) -> bool {
    matches!(cover_transposition(lo, hi), Some((a, b)) if a <= k && k < b)
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_padded(1))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty permutation".into()));
        }
        let values: Option<Vec<usize>> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<usize>().ok())
                .collect()
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect()
        };
        let values = values.ok_or_else(|| Error::Parse(format!("bad permutation `{s}`")))?;
        Permutation::new(values)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All permutations of `S_n`, in lexicographic order of one-line notation.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(Permutation::from_vec(prefix.clone()));
            return;
        }
        for v in 1..=n {
            if !used[v - 1] {
                used[v - 1] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v - 1] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// A saturated chain `start ⋖_{k_1} p_1 ⋖_{k_2} … ⋖_{k_m} p_m` with one label per step.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct MixedChain {
    pub start: Permutation,
    pub steps: Vec<(usize, Permutation)>,
}

impl MixedChain {
    pub fn new(start: Permutation) -> Self {
        MixedChain {
            start,
            steps: Vec::new(),
        }
    }

    /// Builds a chain from labels and permutations, checking every step.
    pub fn from_steps(start: Permutation, steps: Vec<(usize, Permutation)>) -> Result<Self> {
        let mut chain = MixedChain::new(start);
        for (k, p) in steps {
            chain.push(k, p)?;
        }
        Ok(chain)
    }

    pub fn push(&mut self, k: usize, p: Permutation) -> Result<()> {
        if !is_k_cover(self.end(), &p, k) {
            return Err(Error::NotACover {
                lo: self.end().to_string(),
                hi: p.to_string(),
                k,
            });
        }
        self.steps.push((k, p));
        Ok(())
    }

    pub fn end(&self) -> &Permutation {
        self.steps.last().map(|(_, p)| p).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.steps.iter().map(|(k, _)| *k).collect()
    }

    /// `start, p_1, …, p_m`.
    pub fn perms(&self) -> Vec<&Permutation> {
        std::iter::once(&self.start)
            .chain(self.steps.iter().map(|(_, p)| p))
            .collect()
    }

    /// The chain without its last step.
    pub fn truncated(&self) -> MixedChain {
        let mut c = self.clone();
        c.steps.pop();
        c
    }

    pub fn is_valid(&self) -> bool {
        let perms = self.perms();
        self.steps
            .iter()
            .enumerate()
            .all(|(i, (k, p))| is_k_cover(perms[i], p, *k))
    }

    fn width(&self) -> usize {
        self.perms()
            .iter()
            .map(|p| p.size())
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

impl fmt::Display for MixedChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.width();
        write!(f, "{}", self.start.display_padded(n))?;
        for (k, p) in &self.steps {
            write!(f, " <{k} {}", p.display_padded(n))?;
        }
        Ok(())
    }
}

impl FromStr for MixedChain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let start: Permutation = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty chain".into()))?
            .parse()?;
        let mut chain = MixedChain::new(start);
        while let Some(tok) = tokens.next() {
            let k = tok
                .strip_prefix('<')
                .and_then(|k| k.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse(format!("expected `<k`, found `{tok}`")))?;
            let p: Permutation = tokens
                .next()
                .ok_or_else(|| Error::Parse("chain ends after a label".into()))?
                .parse()?;
            chain.push(k, p)?;
        }
        Ok(chain)
    }
}

/// The up-chain: repeatedly strip `s_{w(i)}` for the largest position `i` where it lowers
/// the length, labelling that step `i - 1`. Labels come out weakly increasing.
pub fn up_chain(w: &Permutation) -> MixedChain {
    let mut rev = Vec::new();
    let mut cur = w.clone();
    while !cur.is_identity() {
        let n = cur.size();
        let inv = cur.inverse();
        let i = (1..=n)
            .rev()
            .find(|&i| inv.apply(cur.apply(i) + 1) < i)
            .expect("non-identity permutation has a left descent");
        rev.push((i - 1, cur.clone()));
        cur = cur.swap_values(cur.apply(i));
    }
    rev.reverse();
    MixedChain {
        start: Permutation::identity(),
        steps: rev,
    }
}

/// The down-chain: repeatedly undo `w · t_{ij}` for the first non-fixed position `i` and
/// the largest `j` giving a cover, labelling that step `i`. Labels come out weakly decreasing
/// and never exceed the last descent of `w`.
///
/// Taking the smallest `j` instead breaks the last bound (`1423` would start with label 3),
/// and the growth rule then miscounts products such as `132 · 1423`.
pub fn down_chain(w: &Permutation) -> MixedChain {
    let mut rev = Vec::new();
    let mut cur = w.clone();
    while !cur.is_identity() {
        let n = cur.size();
        let i = (1..=n).find(|&i| cur.apply(i) != i).unwrap();
        let j = (i + 1..=n)
            .rev()
            .find(|&j| {
                let lower = cur.swap_positions(i, j);
                lower.transposition_covers(i, j)
            })
            .expect("non-identity permutation has a down step");
        rev.push((i, cur.clone()));
        cur = cur.swap_positions(i, j);
    }
    rev.reverse();
    MixedChain {
        start: Permutation::identity(),
        steps: rev,
    }
}

/// Every mixed chain from the identity to `w`, with every admissible label on each step.
pub fn all_mixed_chains(w: &Permutation) -> Vec<MixedChain> {
    fn rec(target: &Permutation, cur: &mut MixedChain, out: &mut Vec<MixedChain>, bound: usize) {
        if cur.end().length() == target.length() {
            if cur.end() == target {
                out.push(cur.clone());
            }
            return;
        }
        let end = cur.end().clone();
        for a in 1..bound {
            for b in a + 1..=bound {
                if !end.transposition_covers(a, b) {
                    continue;
                }
                let next = end.swap_positions(a, b);
                if !bruhat_le(&next, target) {
                    continue;
                }
                for k in a..b {
                    cur.steps.push((k, next.clone()));
                    rec(target, cur, out, bound);
                    cur.steps.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(
        w,
        &mut MixedChain::new(Permutation::identity()),
        &mut out,
        w.size(),
    );
    out
}

/// Bruhat order via the tableau (rank-matrix) criterion.
pub fn bruhat_le(u: &Permutation, w: &Permutation) -> bool {
    let n = u.size().max(w.size());
    for i in 1..=n {
        for j in 1..=n {
            let ru = (1..=i).filter(|&p| u.apply(p) >= j).count();
            let rw = (1..=i).filter(|&p| w.apply(p) >= j).count();
            if ru > rw {
                return false;
            }
        }
    }
    true
}
