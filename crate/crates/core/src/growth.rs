//! k-growth diagrams, jeu de taquin on mixed chains, and the structure constants of
//! Schubert products with separated descents.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde_json::json;

use crate::bpd::BpdGrid;
use crate::error::{Error, Result};
use crate::insertion::{right_insert, unrsk_right};
use crate::par;
use crate::perm::{down_chain, is_k_cover, up_chain, MixedChain, Permutation};
use crate::poly::schubert_product;

/// A filled diagram. `entries[i][j]` is `π_{i,j}`: `i` runs along the bottom, `j` upward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthDiagram {
    pub entries: Vec<Vec<Permutation>>,
    /// `k_1..k_m`, the labels of horizontal edges.
    pub row_labels: Vec<usize>,
    /// `l_1..l_n`, the labels of vertical edges.
    pub col_labels: Vec<usize>,
}

fn growth_err(msg: String) -> Error {
    Error::Growth(msg)
}

/// The elements strictly between `lo` and `hi` when `ℓ(hi) = ℓ(lo) + 2`.
fn open_interval(lo: &Permutation, hi: &Permutation) -> Vec<Permutation> {
    let n = lo.size().max(hi.size());
    let mut out = Vec::new();
    for a in 1..n {
        for b in a + 1..=n {
            if lo.transposition_covers(a, b) {
                let x = lo.swap_positions(a, b);
                if crate::perm::cover_transposition(&x, hi).is_some() {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Completes a square from its bottom-left, bottom-right and top-right corners.
pub fn square_fill_topleft(
    bl: &Permutation,
    br: &Permutation,
    tr: &Permutation,
    k: usize,
    l: usize,
) -> Result<Permutation> {
    if !is_k_cover(bl, br, k) || !is_k_cover(br, tr, l) {
        return Err(growth_err(format!(
            "square {bl} <{k} {br} <{l} {tr} is not a pair of covers"
        )));
    }
    let interval = open_interval(bl, tr);
    if interval.len() != 2 || !interval.contains(br) {
        return Err(growth_err(format!(
            "interval ({bl}, {tr}) has {} interior elements",
            interval.len()
        )));
    }
    let x = interval.into_iter().find(|x| x != br).unwrap();
    let tl = if is_k_cover(&x, tr, k) && is_k_cover(bl, &x, l) {
        x
    } else {
        br.clone()
    };
    if !is_k_cover(bl, &tl, l) || !is_k_cover(&tl, tr, k) {
        return Err(growth_err(format!(
            "top-left {tl} of square ({bl}, {br}, {tr}) breaks the labels k={k}, l={l}"
        )));
    }
    Ok(tl)
}

/// Given column `j - 1` and the new top entry `π_{m,j}`, computes column `j` top-down.
fn next_column(
    prev: &[Permutation],
    top: Permutation,
    ks: &[usize],
    l: usize,
) -> Result<Vec<Permutation>> {
    let m = ks.len();
    let mut col = vec![Permutation::identity(); m + 1];
    col[m] = top;
    for i in (1..=m).rev() {
        col[i - 1] = square_fill_topleft(&prev[i - 1], &prev[i], &col[i], ks[i - 1], l)?;
    }
    Ok(col)
}

/// The unique diagram with bottom row `bottom` and right column `right`.
pub fn fill_growth(bottom: &MixedChain, right: &MixedChain) -> Result<GrowthDiagram> {
    if !bottom.start.is_identity() {
        return Err(growth_err(format!(
            "bottom chain starts at {}",
            bottom.start
        )));
    }
    if bottom.end() != &right.start {
        return Err(growth_err(format!(
            "bottom chain ends at {} but right chain starts at {}",
            bottom.end(),
            right.start
        )));
    }
    let ks = bottom.labels();
    let ls = right.labels();
    let mut columns: Vec<Vec<Permutation>> = vec![bottom.perms().into_iter().cloned().collect()];
    for (j, (l, top)) in right.steps.iter().enumerate() {
        let col = next_column(&columns[j], top.clone(), &ks, *l)?;
        columns.push(col);
    }
    // Stored as entries[i][j].
    let m = ks.len();
    let entries = (0..=m)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let g = GrowthDiagram {
        entries,
        row_labels: ks,
        col_labels: ls,
    };
    g.check()?;
    Ok(g)
}

/// The left column of the diagram filled from `c` and `d`.
pub fn jdt(c: &MixedChain, d: &MixedChain) -> Result<MixedChain> {
    Ok(fill_growth(c, d)?.left_column())
}

impl GrowthDiagram {
    pub fn width(&self) -> usize {
        self.row_labels.len()
    }

    pub fn height(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Permutation {
        &self.entries[i][j]
    }

    pub fn left_column(&self) -> MixedChain {
        MixedChain {
            start: self.entries[0][0].clone(),
            steps: (1..=self.height())
                .map(|j| (self.col_labels[j - 1], self.entries[0][j].clone()))
                .collect(),
        }
    }

    pub fn top_row(&self) -> MixedChain {
        let n = self.height();
        MixedChain {
            start: self.entries[0][n].clone(),
            steps: (1..=self.width())
                .map(|i| (self.row_labels[i - 1], self.entries[i][n].clone()))
                .collect(),
        }
    }

    /// Verifies the identity corner, both families of covers, and the square rule.
    pub fn check(&self) -> Result<()> {
        let (m, n) = (self.width(), self.height());
        if !self.entries[0][0].is_identity() {
            return Err(growth_err("corner (0,0) is not the identity".into()));
        }
        for i in 0..=m {
            for j in 0..=n {
                let p = &self.entries[i][j];
                if i > 0 && !is_k_cover(&self.entries[i - 1][j], p, self.row_labels[i - 1]) {
                    return Err(growth_err(format!(
                        "horizontal edge into ({i},{j}) is not a cover"
                    )));
                }
                if j > 0 && !is_k_cover(&self.entries[i][j - 1], p, self.col_labels[j - 1]) {
                    return Err(growth_err(format!(
                        "vertical edge into ({i},{j}) is not a cover"
                    )));
                }
                if i > 0 && j > 0 {
                    let tl = square_fill_topleft(
                        &self.entries[i - 1][j - 1],
                        &self.entries[i][j - 1],
                        p,
                        self.row_labels[i - 1],
                        self.col_labels[j - 1],
                    )?;
                    if tl != self.entries[i - 1][j] {
                        return Err(growth_err(format!(
                            "square at ({i},{j}) breaks the local rule"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Tab-separated matrix, top row first, then the two label lines.
    pub fn to_tsv(&self) -> String {
        let width = self
            .entries
            .iter()
            .flatten()
            .map(|p| p.size())
            .max()
            .unwrap_or(1);
        let mut out = String::new();
        for j in (0..=self.height()).rev() {
            let row: Vec<String> = (0..=self.width())
                .map(|i| self.entries[i][j].display_padded(width))
                .collect();
            writeln!(out, "{}", row.join("\t")).unwrap();
        }
        let labels = |ls: &[usize]| ls.iter().map(|l| format!("\t{l}")).collect::<String>();
        writeln!(out, "k{}", labels(&self.row_labels)).unwrap();
        write!(out, "l{}", labels(&self.col_labels)).unwrap();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "entries": self.entries,
            "row_labels": self.row_labels,
            "col_labels": self.col_labels,
        })
    }
}

/// Checks that every `l_j` is at most the first descent of the entries left of its edges,
/// and every `k_i` at least the last descent of the entries below its edges.
#[allow(clippy::needless_range_loop)]
pub fn check_separated_descent_conditions(g: &GrowthDiagram) -> Result<()> {
    let ks = &g.row_labels;
    let ls = &g.col_labels;
    if !ks.windows(2).all(|w| w[0] <= w[1]) || !ls.windows(2).all(|w| w[0] >= w[1]) {
        return Err(growth_err("labels are not monotone".into()));
    }
    if let (Some(k1), Some(l1)) = (ks.first(), ls.first()) {
        if l1 > k1 {
            return Err(growth_err(format!("l_1 = {l1} exceeds k_1 = {k1}")));
        }
    }
    for i in 0..=g.width() {
        for j in 0..=g.height() {
            let d = g.entries[i][j].descents();
            if j < g.height() {
                if let Some(d1) = d.d1 {
                    if ls[j] > d1 {
                        return Err(growth_err(format!(
                            "l_{} = {} exceeds the first descent {d1} at ({i},{j})",
                            j + 1,
                            ls[j]
                        )));
                    }
                }
            }
            if i < g.width() {
                if let Some(d2) = d.d2 {
                    if ks[i] < d2 {
                        return Err(growth_err(format!(
                            "k_{} = {} is below the last descent {d2} at ({i},{j})",
                            i + 1,
                            ks[i]
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `d1(w) ≥ d2(v)`, vacuous when either is the identity.
pub fn check_separated(w: &Permutation, v: &Permutation) -> Result<()> {
    match (w.descents().d1, v.descents().d2) {
        (Some(d1), Some(d2)) if d1 < d2 => Err(Error::SeparatedDescent { d1, d2 }),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug)]
pub struct RuleOptions {
    /// Compare against the polynomial expansion before returning.
    pub verify: bool,
    /// Replaces the up chain of `w`: labels weakly increasing.
    pub w_chain: Option<MixedChain>,
    /// Replaces the down chain of `v`: labels weakly decreasing, first label at most `k_1`.
    pub v_chain: Option<MixedChain>,
}

impl Default for RuleOptions {
    fn default() -> Self {
        RuleOptions {
            verify: true,
            w_chain: None,
            v_chain: None,
        }
    }
}

fn rule_chains(
    w: &Permutation,
    v: &Permutation,
    opts: &RuleOptions,
) -> Result<(MixedChain, MixedChain)> {
    check_separated(w, v)?;
    let c = opts.w_chain.clone().unwrap_or_else(|| up_chain(w));
    let d = opts.v_chain.clone().unwrap_or_else(|| down_chain(v));
    if !c.start.is_identity() || c.end() != w || !c.is_valid() {
        return Err(Error::ChainMismatch(format!(
            "{c} is not a chain from the identity to {w}"
        )));
    }
    if !d.start.is_identity() || d.end() != v || !d.is_valid() {
        return Err(Error::ChainMismatch(format!(
            "{d} is not a chain from the identity to {v}"
        )));
    }
    let (kl, ll) = (c.labels(), d.labels());
    if !kl.windows(2).all(|x| x[0] <= x[1]) {
        return Err(Error::ChainMismatch(format!(
            "labels of {c} are not weakly increasing"
        )));
    }
    if !ll.windows(2).all(|x| x[0] >= x[1]) {
        return Err(Error::ChainMismatch(format!(
            "labels of {d} are not weakly decreasing"
        )));
    }
    if let (Some(k1), Some(l1)) = (kl.first(), ll.first()) {
        if l1 > k1 {
            return Err(Error::ChainMismatch(format!(
                "first label {l1} of {d} exceeds {k1}"
            )));
        }
    }
    Ok((c, d))
}

/// Counts chains `𝐝` from `w` whose jdt against `c` is `target`, grouped by their end.
fn count_chains(c: &MixedChain, target: &MixedChain) -> Result<BTreeMap<Permutation, u64>> {
    let ks = c.labels();
    let goal = target.perms();
    let ls = target.labels();
    let first: Vec<Permutation> = c.perms().into_iter().cloned().collect();

    fn dfs(
        col: &[Permutation],
        j: usize,
        ks: &[usize],
        ls: &[usize],
        goal: &[&Permutation],
        out: &mut BTreeMap<Permutation, u64>,
    ) -> Result<()> {
        let top = col.last().unwrap();
        if j == ls.len() {
            *out.entry(top.clone()).or_default() += 1;
            return Ok(());
        }
        for next in top.all_k_covers_up(ls[j]) {
            let new_col = next_column(col, next, ks, ls[j])?;
            if &new_col[0] == goal[j + 1] {
                dfs(&new_col, j + 1, ks, ls, goal, out)?;
            }
        }
        Ok(())
    }

    if ls.is_empty() {
        return Ok(BTreeMap::from([(c.end().clone(), 1)]));
    }
    let top = first.last().unwrap().clone();
    let branches = top.all_k_covers_up(ls[0]);
    let partials = par::map(branches, |next| -> Result<BTreeMap<Permutation, u64>> {
        let mut out = BTreeMap::new();
        let col = next_column(&first, next, &ks, ls[0])?;
        if &col[0] == goal[1] {
            dfs(&col, 1, &ks, &ls, &goal, &mut out)?;
        }
        Ok(out)
    });
    let mut total = BTreeMap::new();
    for part in partials {
        for (u, n) in part? {
            *total.entry(u).or_default() += n;
        }
    }
    Ok(total)
}

/// `c^u_{w,v}` for `d1(w) ≥ d2(v)`, counted by growth diagrams.
pub fn structure_constants_separated(
    w: &Permutation,
    v: &Permutation,
    opts: &RuleOptions,
) -> Result<BTreeMap<Permutation, u64>> {
    let (c, d) = rule_chains(w, v, opts)?;
    let counts = count_chains(&c, &d)?;
    if opts.verify {
        let expected = schubert_product(w, v)?;
        let got: BTreeMap<Permutation, BigInt> = counts
            .iter()
            .map(|(u, n)| (u.clone(), BigInt::from(*n)))
            .collect();
        if got != expected {
            let show = |m: &BTreeMap<Permutation, BigInt>| {
                m.iter()
                    .map(|(u, c)| format!("{u}:{c}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            return Err(growth_err(format!(
                "growth count for {w} * {v} disagrees with the polynomial product\n  growth:     {}\n  polynomial: {}",
                show(&got),
                show(&expected)
            )));
        }
    }
    Ok(counts)
}

/// The image of `(D_w, D_v)`: right-inserts the word of `D_v` into `D_w`.
///
/// Returns the end permutation, its pipe dream, and the recording chain from `w`.
pub fn bijection_image(
    dw: &BpdGrid,
    dv: &BpdGrid,
    w: &Permutation,
    v: &Permutation,
) -> Result<(Permutation, BpdGrid, MixedChain)> {
    check_separated(w, v)?;
    if &dw.perm()? != w {
        return Err(Error::ChainMismatch(format!(
            "first grid is not a pipe dream of {w}"
        )));
    }
    let down = down_chain(v);
    let word = unrsk_right(dv, &down)?;
    let mut d = dw.clone();
    let mut chain = MixedChain::new(w.clone());
    for bl in word.letters() {
        d = right_insert(&d, *bl)?;
        chain.push(bl.k, d.perm()?)?;
    }
    if jdt(&up_chain(w), &chain)? != down {
        return Err(growth_err(format!(
            "recording chain {chain} does not rectify to {down}"
        )));
    }
    Ok((chain.end().clone(), d, chain))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn chain(s: &str) -> MixedChain {
        s.parse().unwrap()
    }

    #[test]
    fn square_examples() {
        assert_eq!(
            square_fill_topleft(&p("1234"), &p("1243"), &p("1342"), 3, 3).unwrap(),
            p("1243")
        );
        assert_eq!(
            square_fill_topleft(&p("1243"), &p("1342"), &p("2341"), 3, 2).unwrap(),
            p("1342")
        );
        assert_eq!(
            square_fill_topleft(&p("1342"), &p("13524"), &p("23514"), 4, 2).unwrap(),
            p("2341")
        );
        assert!(square_fill_topleft(&p("1234"), &p("1342"), &p("1432"), 3, 2).is_err());
    }

    #[test]
    fn small_diagram() {
        let c = chain("1234 <2 1324 <3 1342");
        let d = chain("1342 <3 13524 <2 15324");
        let g = fill_growth(&c, &d).unwrap();
        let rows: Vec<Vec<String>> = (0..=2)
            .rev()
            .map(|j| (0..=2).map(|i| g.get(i, j).to_string()).collect())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec!["1342", "1432", "15324"],
                vec!["1243", "1342", "13524"],
                vec!["1", "132", "1342"],
            ]
        );
        assert_eq!(jdt(&c, &d).unwrap(), chain("1234 <3 1243 <2 1342"));
        assert_eq!(
            g.to_tsv(),
            "13425\t14325\t15324\n12435\t13425\t13524\n12345\t13245\t13425\nk\t2\t3\nl\t3\t2"
        );
    }

    #[test]
    fn degenerate_diagrams() {
        let d = chain("1 <1 21 <2 231");
        assert_eq!(
            jdt(&MixedChain::new(Permutation::identity()), &d).unwrap(),
            d
        );
        let c = chain("1 <1 21");
        assert_eq!(
            jdt(&c, &MixedChain::new(p("21"))).unwrap(),
            MixedChain::new(Permutation::identity())
        );
    }

    #[test]
    fn descent_conditions() {
        let g = fill_growth(
            &up_chain(&p("13542")),
            &chain("13542 <3 14532 <2 24531 <2 34521"),
        )
        .unwrap();
        assert!(check_separated_descent_conditions(&g).is_ok());
        let g = fill_growth(
            &chain("1234 <2 1324 <3 1342"),
            &chain("1342 <3 13524 <2 15324"),
        )
        .unwrap();
        assert!(check_separated_descent_conditions(&g).is_err());
    }

    #[test]
    fn rule_examples() {
        let got = structure_constants_separated(&p("13542"), &p("1432"), &RuleOptions::default())
            .unwrap();
        let expect: BTreeMap<Permutation, u64> = [
            "34521", "25431", "35412", "246315", "263415", "156324", "164325",
        ]
        .iter()
        .map(|s| (p(s), 1))
        .collect();
        assert_eq!(got, expect);
        let got = structure_constants_separated(
            &p("2413"),
            &Permutation::identity(),
            &RuleOptions::default(),
        )
        .unwrap();
        assert_eq!(got, BTreeMap::from([(p("2413"), 1)]));
        assert!(matches!(
            structure_constants_separated(&p("1432"), &p("13542"), &RuleOptions::default()),
            Err(Error::SeparatedDescent { d1: 2, d2: 4 })
        ));
    }

    #[test]
    fn custom_chains_are_checked() {
        let opts = RuleOptions {
            verify: true,
            w_chain: Some(chain("1234 <3 1243 <2 1342")),
            v_chain: None,
        };
        assert!(matches!(
            structure_constants_separated(&p("1342"), &p("21"), &opts),
            Err(Error::ChainMismatch(_))
        ));
    }
}
