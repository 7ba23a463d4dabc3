//! Bumpless pipe dreams: tiles, grids, pipe tracing, validation and enumeration.
//!
//! Rows are numbered from 1 at the top, columns from 1 at the left. Pipes enter through
//! the south boundary and leave through the east boundary, travelling only north and
//! east. Pipes are labelled by the column they enter; in a pipe dream of `π` the pipe
//! leaving row `i` is pipe `π(i)`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::par;
use crate::perm::Permutation;
use crate::poly::Polynomial;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Tile {
    Blank,
    Cross,
    Horizontal,
    Vertical,
    RElbow,
    JElbow,
    Bump,
}

/// One pipe's passage through a tile.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Segment {
    /// South to north.
    Vertical,
    /// West to east.
    Horizontal,
    /// South to east (an r-turn).
    RTurn,
    /// West to north (a j-turn).
    JTurn,
}

impl Segment {
    fn enters_south(self) -> bool {
        matches!(self, Segment::Vertical | Segment::RTurn)
    }

    fn exits_north(self) -> bool {
        matches!(self, Segment::Vertical | Segment::JTurn)
    }
}

impl Tile {
    pub const ALL: [Tile; 7] = [
        Tile::Blank,
        Tile::Cross,
        Tile::Horizontal,
        Tile::Vertical,
        Tile::RElbow,
        Tile::JElbow,
        Tile::Bump,
    ];

    pub fn segments(self) -> &'static [Segment] {
        use Segment as S;
        match self {
            Tile::Blank => &[],
            Tile::Cross => &[S::Vertical, S::Horizontal],
            Tile::Horizontal => &[S::Horizontal],
            Tile::Vertical => &[S::Vertical],
            Tile::RElbow => &[S::RTurn],
            Tile::JElbow => &[S::JTurn],
            Tile::Bump => &[S::RTurn, S::JTurn],
        }
    }

    /// The tile made of exactly these segments, if one exists.
    pub fn from_segments(segs: &[Segment]) -> Option<Tile> {
        let mut sorted = segs.to_vec();
        sorted.sort();
        Tile::ALL.into_iter().find(|t| {
            let mut own = t.segments().to_vec();
            own.sort();
            own == sorted
        })
    }

    pub fn has(self, seg: Segment) -> bool {
        self.segments().contains(&seg)
    }

    pub fn with(self, seg: Segment) -> Option<Tile> {
        let mut segs = self.segments().to_vec();
        if segs.contains(&seg) {
            return None;
        }
        segs.push(seg);
        Tile::from_segments(&segs)
    }

    pub fn without(self, seg: Segment) -> Option<Tile> {
        let segs: Vec<Segment> = self
            .segments()
            .iter()
            .copied()
            .filter(|&s| s != seg)
            .collect();
        if segs.len() == self.segments().len() {
            return None;
        }
        Tile::from_segments(&segs)
    }

    pub fn north(self) -> bool {
        self.segments().iter().any(|s| s.exits_north())
    }

    pub fn south(self) -> bool {
        self.segments().iter().any(|s| s.enters_south())
    }

    pub fn west(self) -> bool {
        self.segments()
            .iter()
            .any(|s| matches!(s, Segment::Horizontal | Segment::JTurn))
    }

    pub fn east(self) -> bool {
        self.segments()
            .iter()
            .any(|s| matches!(s, Segment::Horizontal | Segment::RTurn))
    }

    pub fn has_r_turn(self) -> bool {
        self.has(Segment::RTurn)
    }

    pub fn has_j_turn(self) -> bool {
        self.has(Segment::JTurn)
    }

    pub fn to_char(self) -> char {
        match self {
            Tile::Blank => '.',
            Tile::Cross => '+',
            Tile::Horizontal => '-',
            Tile::Vertical => '|',
            Tile::RElbow => 'r',
            Tile::JElbow => 'J',
            Tile::Bump => '%',
        }
    }

    pub fn from_char(c: char) -> Option<Tile> {
        Tile::ALL.into_iter().find(|t| t.to_char() == c)
    }
}

/// Which tiles a grid may contain.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Plain,
    /// Up to `max_bumps` bump tiles, as in the intermediate states of insertion.
    Activated {
        max_bumps: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BpdGrid {
    n: usize,
    tiles: Vec<Tile>,
}

impl BpdGrid {
    pub fn from_rows(rows: Vec<Vec<Tile>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::GridParse {
                row: 1 + rows.iter().position(|r| r.len() != n).unwrap(),
                col: 1,
                msg: "grid is not square".into(),
            });
        }
        Ok(BpdGrid {
            n,
            tiles: rows.into_iter().flatten().collect(),
        })
    }

    /// The identity pipe dream of size `n`.
    pub fn identity(n: usize) -> Self {
        rothe_bpd_sized(&Permutation::identity(), n)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Tile {
        self.tiles[(r - 1) * self.n + (c - 1)]
    }

    pub fn try_get(&self, r: usize, c: usize) -> Option<Tile> {
        (r >= 1 && c >= 1 && r <= self.n && c <= self.n).then(|| self.get(r, c))
    }

    pub fn set(&mut self, r: usize, c: usize, t: Tile) {
        self.tiles[(r - 1) * self.n + (c - 1)] = t;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Tile]> {
        self.tiles.chunks(self.n.max(1))
    }

    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..=n).flat_map(move |r| (1..=n).map(move |c| (r, c)))
    }

    pub fn count(&self, tile: Tile) -> usize {
        self.tiles.iter().filter(|&&t| t == tile).count()
    }

    pub fn blanks(&self) -> Vec<(usize, usize)> {
        self.positions()
            .filter(|&(r, c)| self.get(r, c) == Tile::Blank)
            .collect()
    }

    pub fn render(&self) -> String {
        self.rows()
            .map(|row| row.iter().map(|t| t.to_char()).collect::<String>())
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Traces every pipe. Fails if some pipe cannot be followed to the east boundary.
    pub fn pipes(&self) -> Result<Pipes> {
        Pipes::trace(self)
    }

    /// The permutation of a plain or activated grid, read off the east boundary.
    pub fn perm(&self) -> Result<Permutation> {
        let pipes = self.pipes()?;
        Permutation::new((1..=self.n).map(|r| pipes.exiting_row(r)).collect())
    }

    /// Pads to `m × m` with the identity pattern on the new rows and columns.
    pub fn embed(&self, m: usize) -> BpdGrid {
        if m <= self.n {
            return self.clone();
        }
        let mut out = BpdGrid {
            n: m,
            tiles: vec![Tile::Blank; m * m],
        };
        for r in 1..=m {
            for c in 1..=m {
                let t = if r <= self.n && c <= self.n {
                    self.get(r, c)
                } else if r == c {
                    Tile::RElbow
                } else if r < c {
                    Tile::Horizontal
                } else {
                    Tile::Vertical
                };
                out.set(r, c, t);
            }
        }
        out
    }

    /// Removes trailing identity rows and columns, keeping at least a 1 × 1 grid.
    pub fn trim(&self) -> BpdGrid {
        let mut n = self.n;
        while n > 1 && self.identity_corner(n) {
            n -= 1;
        }
        if n == self.n {
            return self.clone();
        }
        let mut out = BpdGrid {
            n,
            tiles: Vec::with_capacity(n * n),
        };
        for r in 1..=n {
            for c in 1..=n {
                out.tiles.push(self.get(r, c));
            }
        }
        out
    }

    fn identity_corner(&self, n: usize) -> bool {
        self.get(n, n) == Tile::RElbow
            && (1..n).all(|r| self.get(r, n) == Tile::Horizontal)
            && (1..n).all(|c| self.get(n, c) == Tile::Vertical)
    }

    /// Product of `x_r` over blank tiles `(r, c)`.
    pub fn weight(&self) -> Polynomial {
        let mut e = vec![0u32; self.n];
        for (r, _) in self.blanks() {
            e[r - 1] += 1;
        }
        Polynomial::monomial(e, 1.into())
    }

    pub fn weight_exponents(&self) -> Vec<u32> {
        let mut e = vec![0u32; self.n];
        for (r, _) in self.blanks() {
            e[r - 1] += 1;
        }
        while e.last() == Some(&0) {
            e.pop();
        }
        e
    }
}

impl fmt::Display for BpdGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for BpdGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BpdGrid(\n{}\n)", self.render())
    }
}

impl FromStr for BpdGrid {
    type Err = Error;

    /// Parses the ASCII form: `n` lines of `n` tile characters.
    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<&str> = s.trim_end_matches('\n').split('\n').collect();
        let n = lines.len();
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.iter().enumerate() {
            let line = line.trim_end_matches('\r');
            let mut row = Vec::with_capacity(n);
            for (j, ch) in line.chars().enumerate() {
                let t = Tile::from_char(ch).ok_or_else(|| Error::GridParse {
                    row: i + 1,
                    col: j + 1,
                    msg: format!("unknown tile character `{ch}`"),
                })?;
                row.push(t);
            }
            if row.len() != n {
                return Err(Error::GridParse {
                    row: i + 1,
                    col: row.len().min(n) + 1,
                    msg: format!("expected {n} tiles, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        BpdGrid::from_rows(rows)
    }
}

/// Pipe labels of every segment of a grid.
#[derive(Clone, Debug)]
pub struct Pipes {
    n: usize,
    /// `owners[cell][segment as usize]`.
    owners: Vec<[Option<usize>; 4]>,
    exit_row: Vec<usize>,
    row_exit: Vec<usize>,
    paths: Vec<Vec<(usize, usize, Segment)>>,
}

impl Pipes {
    fn trace(grid: &BpdGrid) -> Result<Self> {
        let n = grid.n;
        let mut pipes = Pipes {
            n,
            owners: vec![[None; 4]; n * n],
            exit_row: vec![0; n + 1],
            row_exit: vec![0; n + 1],
            paths: vec![Vec::new(); n + 1],
        };
        for label in 1..=n {
            let (mut r, mut c) = (n, label);
            let mut from_south = true;
            loop {
                let tile = grid.get(r, c);
                let seg = tile
                    .segments()
                    .iter()
                    .copied()
                    .find(|s| s.enters_south() == from_south)
                    .ok_or(Error::InvalidGrid(Violation {
                        at: Some((r, c)),
                        message: format!("pipe {label} cannot enter this tile"),
                    }))?;
                let slot = &mut pipes.owners[(r - 1) * n + (c - 1)][seg as usize];
                if slot.is_some() {
                    return Err(Error::InvalidGrid(Violation {
                        at: Some((r, c)),
                        message: "two pipes share a segment".into(),
                    }));
                }
                *slot = Some(label);
                pipes.paths[label].push((r, c, seg));
                if seg.exits_north() {
                    if r == 1 {
                        return Err(Error::InvalidGrid(Violation {
                            at: Some((r, c)),
                            message: format!("pipe {label} leaves through the north boundary"),
                        }));
                    }
                    r -= 1;
                    from_south = true;
                } else if c == n {
                    if pipes.row_exit[r] != 0 {
                        return Err(Error::InvalidGrid(Violation {
                            at: Some((r, c)),
                            message: "two pipes exit the same row".into(),
                        }));
                    }
                    pipes.exit_row[label] = r;
                    pipes.row_exit[r] = label;
                    break;
                } else {
                    c += 1;
                    from_south = false;
                }
            }
        }
        Ok(pipes)
    }

    pub fn owner(&self, r: usize, c: usize, seg: Segment) -> Option<usize> {
        self.owners[(r - 1) * self.n + (c - 1)][seg as usize]
    }

    /// Row where `pipe` leaves through the east boundary.
    pub fn exit_row(&self, pipe: usize) -> usize {
        self.exit_row[pipe]
    }

    /// Label of the pipe leaving row `r`.
    pub fn exiting_row(&self, r: usize) -> usize {
        self.row_exit[r]
    }

    pub fn path(&self, pipe: usize) -> &[(usize, usize, Segment)] {
        &self.paths[pipe]
    }

    /// Cross tiles where pipes `p` and `q` meet.
    pub fn crossings_between(&self, grid: &BpdGrid, p: usize, q: usize) -> Vec<(usize, usize)> {
        self.paths[p]
            .iter()
            .filter(|&&(r, c, _)| grid.get(r, c) == Tile::Cross)
            .filter(|&&(r, c, seg)| {
                let other = if seg == Segment::Vertical {
                    Segment::Horizontal
                } else {
                    Segment::Vertical
                };
                self.owner(r, c, other) == Some(q)
            })
            .map(|&(r, c, _)| (r, c))
            .collect()
    }

    /// Every crossing as `(position, horizontal pipe, vertical pipe)`.
    pub fn crossings(&self, grid: &BpdGrid) -> Vec<((usize, usize), usize, usize)> {
        grid.positions()
            .filter(|&(r, c)| grid.get(r, c) == Tile::Cross)
            .map(|(r, c)| {
                (
                    (r, c),
                    self.owner(r, c, Segment::Horizontal).unwrap(),
                    self.owner(r, c, Segment::Vertical).unwrap(),
                )
            })
            .collect()
    }
}

/// The first problem found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub at: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.at {
            Some((r, c)) => write!(f, "({r},{c}): {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn violation(at: (usize, usize), message: impl Into<String>) -> Violation {
    Violation {
        at: Some(at),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    pub mode: Mode,
    /// Reject states where the pipe turning at this tile runs horizontally through a cross.
    pub right_marker: Option<(usize, usize)>,
}

impl ValidateOptions {
    pub fn plain() -> Self {
        ValidateOptions {
            mode: Mode::Plain,
            right_marker: None,
        }
    }

    pub fn activated(max_bumps: usize) -> Self {
        ValidateOptions {
            mode: Mode::Activated { max_bumps },
            right_marker: None,
        }
    }
}

/// Checks edge consistency, boundary occupancy, bump count and that no two pipes cross twice.
pub fn validate(grid: &BpdGrid, mode: Mode) -> std::result::Result<(), Violation> {
    validate_with(
        grid,
        ValidateOptions {
            mode,
            right_marker: None,
        },
    )
}

pub fn validate_with(grid: &BpdGrid, opts: ValidateOptions) -> std::result::Result<(), Violation> {
    let n = grid.size();
    for (r, c) in grid.positions() {
        let t = grid.get(r, c);
        if r == 1 && t.north() {
            return Err(violation((r, c), "north boundary is occupied"));
        }
        if c == 1 && t.west() {
            return Err(violation((r, c), "west boundary is occupied"));
        }
        if r == n && !t.south() {
            return Err(violation((r, c), "south boundary is unoccupied"));
        }
        if c == n && !t.east() {
            return Err(violation((r, c), "east boundary is unoccupied"));
        }
        if c < n && t.east() != grid.get(r, c + 1).west() {
            return Err(violation((r, c), "east edge disagrees with the next tile"));
        }
        if r < n && t.south() != grid.get(r + 1, c).north() {
            return Err(violation(
                (r, c),
                "south edge disagrees with the tile below",
            ));
        }
    }
    let bumps = grid.count(Tile::Bump);
    match opts.mode {
        Mode::Plain if bumps > 0 => {
            let at = grid
                .positions()
                .find(|&(r, c)| grid.get(r, c) == Tile::Bump)
                .unwrap();
            return Err(violation(at, "bump tile in a plain pipe dream"));
        }
        Mode::Activated { max_bumps } if bumps > max_bumps => {
            return Err(Violation {
                at: None,
                message: format!("{bumps} bump tiles, at most {max_bumps} allowed"),
            });
        }
        _ => {}
    }
    let pipes = grid.pipes().map_err(|e| match e {
        Error::InvalidGrid(v) => v,
        other => Violation {
            at: None,
            message: other.to_string(),
        },
    })?;
    let mut seen = HashSet::new();
    for (at, h, v) in pipes.crossings(grid) {
        if !seen.insert((h.min(v), h.max(v))) {
            return Err(violation(at, format!("pipes {h} and {v} cross twice")));
        }
    }
    if let Some((r, c)) = opts.right_marker {
        let t = grid.get(r, c);
        let seg = if t.has_r_turn() {
            Segment::RTurn
        } else if t.has_j_turn() {
            Segment::JTurn
        } else {
            return Err(violation((r, c), "marker is not on an elbow"));
        };
        let p = pipes.owner(r, c, seg).unwrap();
        if let Some(&(rr, cc, _)) = pipes
            .path(p)
            .iter()
            .find(|&&(rr, cc, s)| s == Segment::Horizontal && grid.get(rr, cc) == Tile::Cross)
        {
            return Err(violation(
                (rr, cc),
                format!("marked pipe {p} runs horizontally through a cross"),
            ));
        }
    }
    Ok(())
}

pub fn rothe_bpd(p: &Permutation) -> BpdGrid {
    rothe_bpd_sized(p, p.size().max(1))
}

fn rothe_bpd_sized(p: &Permutation, n: usize) -> BpdGrid {
    let inv = p.inverse();
    let mut tiles = Vec::with_capacity(n * n);
    for r in 1..=n {
        for c in 1..=n {
            let vertical = r > inv.apply(c);
            let horizontal = c > p.apply(r);
            tiles.push(match (vertical, horizontal) {
                _ if c == p.apply(r) => Tile::RElbow,
                (true, true) => Tile::Cross,
                (true, false) => Tile::Vertical,
                (false, true) => Tile::Horizontal,
                (false, false) => Tile::Blank,
            });
        }
    }
    BpdGrid { n, tiles }
}

/// Backtracking state: rows are filled bottom-up, left to right, tracking pipe labels.
struct Search<'a> {
    n: usize,
    target: &'a [usize],
    inverse: Vec<usize>,
    length: usize,
}

#[derive(Clone)]
struct Partial {
    /// Rows filled so far, bottom row first.
    rows: Vec<Vec<Tile>>,
    /// Pipe occupying each column's north edge of the last filled row.
    up: Vec<Option<usize>>,
    crossed: Vec<bool>,
    blanks: usize,
    crosses: usize,
}

impl Search<'_> {
    /// All completions of the next row (`r`, counting from the top) after `state`.
    fn next_rows(&self, state: &Partial) -> Vec<Partial> {
        let r = self.n - state.rows.len();
        let mut out = Vec::new();
        let mut row = Vec::with_capacity(self.n);
        let mut up = vec![None; self.n];
        let mut st = state.clone();
        self.fill(r, 1, None, &mut row, &mut up, &mut st, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        r: usize,
        c: usize,
        west: Option<usize>,
        row: &mut Vec<Tile>,
        up: &mut Vec<Option<usize>>,
        st: &mut Partial,
        out: &mut Vec<Partial>,
    ) {
        let n = self.n;
        if c > n {
            if west != Some(self.target[r - 1]) || (r == 1 && up.iter().any(|u| u.is_some())) {
                return;
            }
            let mut next = st.clone();
            next.rows.push(row.clone());
            next.up = up.clone();
            out.push(next);
            return;
        }
        let south = st.up[c - 1];
        let mut options: Vec<(Tile, Option<usize>, Option<usize>)> = Vec::with_capacity(2);
        match (west, south) {
            (None, None) => options.push((Tile::Blank, None, None)),
            (None, Some(p)) => {
                options.push((Tile::Vertical, Some(p), None));
                options.push((Tile::RElbow, None, Some(p)));
            }
            (Some(h), None) => {
                options.push((Tile::Horizontal, None, Some(h)));
                if r > 1 {
                    options.push((Tile::JElbow, Some(h), None));
                }
            }
            (Some(h), Some(v)) => options.push((Tile::Cross, Some(v), Some(h))),
        }
        for (tile, north, east) in options {
            let mut undo_cross = None;
            match tile {
                Tile::Blank => {
                    if st.blanks == self.length {
                        continue;
                    }
                    st.blanks += 1;
                }
                Tile::Cross => {
                    let (h, v) = (east.unwrap(), north.unwrap());
                    let (a, b) = (h.min(v), h.max(v));
                    // Pipes a < b cross exactly when a leaves below b.
                    if self.inverse[a] < self.inverse[b] || st.crossed[a * (n + 1) + b] {
                        continue;
                    }
                    st.crossed[a * (n + 1) + b] = true;
                    st.crosses += 1;
                    undo_cross = Some(a * (n + 1) + b);
                }
                _ => {}
            }
            row.push(tile);
            up[c - 1] = north;
            self.fill(r, c + 1, east, row, up, st, out);
            up[c - 1] = None;
            row.pop();
            if tile == Tile::Blank {
                st.blanks -= 1;
            }
            if let Some(i) = undo_cross {
                st.crossed[i] = false;
                st.crosses -= 1;
            }
        }
    }

    fn finish(&self, state: Partial) -> Option<BpdGrid> {
        if state.blanks != self.length || state.crosses != self.length {
            return None;
        }
        let mut rows = state.rows;
        rows.reverse();
        BpdGrid::from_rows(rows).ok()
    }

    fn dfs(&self, state: Partial, out: &mut Vec<BpdGrid>) {
        if state.rows.len() == self.n {
            out.extend(self.finish(state));
            return;
        }
        for next in self.next_rows(&state) {
            self.dfs(next, out);
        }
    }
}

/// Every bumpless pipe dream of `p` on a `max(n, 1)` square, sorted by rendered text.
pub fn enumerate_bpds(p: &Permutation) -> Vec<BpdGrid> {
    let n = p.size().max(1);
    let target = p.padded(n);
    let inv = p.inverse();
    let mut inverse = vec![0; n + 1];
    for (v, slot) in inverse.iter_mut().enumerate().skip(1) {
        *slot = inv.apply(v);
    }
    let search = Search {
        n,
        target: &target,
        inverse,
        length: p.length(),
    };
    let root = Partial {
        rows: Vec::new(),
        up: (1..=n).map(Some).collect(),
        crossed: vec![false; (n + 1) * (n + 1)],
        blanks: 0,
        crosses: 0,
    };
    // Split the search tree after the bottom two rows.
    let mut frontier = vec![root];
    for _ in 0..2.min(n) {
        frontier = frontier.iter().flat_map(|s| search.next_rows(s)).collect();
    }
    let mut grids: Vec<BpdGrid> = par::flat_map(frontier, |state| {
        let mut out = Vec::new();
        search.dfs(state, &mut out);
        out
    });
    sort_by_text(&mut grids);
    grids
}

pub(crate) fn sort_by_text(grids: &mut [BpdGrid]) {
    grids.sort_by_cached_key(|g| g.render());
}

/// Droops an r-turn at `(a, b)` into the blank `(c, d)`, if the reroute gives a valid
/// pipe dream of the same permutation.
fn general_droop(
    grid: &BpdGrid,
    pipes: &Pipes,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
) -> Option<BpdGrid> {
    use Segment as S;
    let p = pipes.owner(a, b, S::RTurn)?;
    let mut g = grid.clone();
    let edit =
        |g: &mut BpdGrid, r: usize, col: usize, remove: Option<S>, add: Option<S>| -> Option<()> {
            let mut t = g.get(r, col);
            if let Some(s) = remove {
                if pipes.owner(r, col, s) != Some(p) {
                    return None;
                }
                t = t.without(s)?;
            }
            if let Some(s) = add {
                t = t.with(s)?;
            }
            g.set(r, col, t);
            Some(())
        };
    edit(&mut g, a, b, Some(S::RTurn), None)?;
    for r in a + 1..c {
        edit(&mut g, r, b, Some(S::Vertical), None)?;
    }
    edit(&mut g, c, b, Some(S::Vertical), Some(S::RTurn))?;
    for col in b + 1..d {
        edit(&mut g, c, col, None, Some(S::Horizontal))?;
        edit(&mut g, a, col, Some(S::Horizontal), None)?;
    }
    edit(&mut g, c, d, None, Some(S::JTurn))?;
    for r in a + 1..c {
        edit(&mut g, r, d, None, Some(S::Vertical))?;
    }
    let top = g.get(a, d);
    if top.has(S::Horizontal) && pipes.owner(a, d, S::Horizontal) == Some(p) {
        edit(&mut g, a, d, Some(S::Horizontal), Some(S::RTurn))?;
    } else if top.has(S::JTurn) && pipes.owner(a, d, S::JTurn) == Some(p) {
        edit(&mut g, a, d, Some(S::JTurn), Some(S::Vertical))?;
    } else {
        return None;
    }
    validate(&g, Mode::Plain).ok()?;
    Some(g)
}

/// Closure of `{rothe_bpd(p)}` under droops; an independent route to `BPD(p)`.
pub fn droop_closure(p: &Permutation) -> Vec<BpdGrid> {
    let start = rothe_bpd(p);
    let mut seen: BTreeSet<BpdGrid> = BTreeSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(g) = queue.pop_front() {
        let pipes = g.pipes().expect("closure only holds valid grids");
        let n = g.size();
        for (a, b) in g.positions() {
            if g.get(a, b) != Tile::RElbow {
                continue;
            }
            for c in a + 1..=n {
                for d in b + 1..=n {
                    if g.get(c, d) != Tile::Blank {
                        continue;
                    }
                    if let Some(h) = general_droop(&g, &pipes, a, b, c, d) {
                        if h.perm().ok().as_ref() == Some(p) && seen.insert(h.clone()) {
                            queue.push_back(h);
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<BpdGrid> = seen.into_iter().collect();
    sort_by_text(&mut out);
    out
}

/// `Σ_{D ∈ BPD(p)} wt(D)`.
pub fn schubert_via_bpds(p: &Permutation) -> Polynomial {
    enumerate_bpds(p).iter().map(|d| d.weight()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::poly::schubert_oracle;

    fn grid(s: &str) -> BpdGrid {
        s.parse().unwrap()
    }

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn tile_segments_roundtrip() {
        for t in Tile::ALL {
            assert_eq!(Tile::from_segments(t.segments()), Some(t));
            assert_eq!(Tile::from_char(t.to_char()), Some(t));
        }
        assert_eq!(Tile::RElbow.with(Segment::JTurn), Some(Tile::Bump));
        assert_eq!(Tile::Horizontal.with(Segment::RTurn), None);
        assert_eq!(
            Tile::Cross.without(Segment::Horizontal),
            Some(Tile::Vertical)
        );
    }

    #[test]
    fn perm_of_examples() {
        assert!(BpdGrid::identity(4).perm().unwrap().is_identity());
        assert_eq!(grid("..r\nr-+\n|r+").perm().unwrap(), perm("312"));
        assert_eq!(grid("..r\nr-+\n|r+").weight(), "x1^2".parse().unwrap());
        for d in enumerate_bpds(&perm("31524")) {
            assert_eq!(d.perm().unwrap(), perm("31524"));
        }
    }

    #[test]
    fn weights() {
        assert_eq!(BpdGrid::identity(3).weight(), Polynomial::one());
        assert_eq!(grid(".r\nr+").weight(), Polynomial::var(1));
    }

    #[test]
    fn rothe_examples() {
        assert_eq!(rothe_bpd(&Permutation::identity()), BpdGrid::identity(1));
        assert_eq!(rothe_bpd(&perm("21")), grid(".r\nr+"));
        let d = rothe_bpd(&perm("31524"));
        assert_eq!(d.blanks(), vec![(1, 1), (1, 2), (3, 2), (3, 4)]);
        assert_eq!(d.weight(), "x1^2 x3^2".parse().unwrap());
        assert_eq!(d.perm().unwrap(), perm("31524"));
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            enumerate_bpds(&Permutation::identity()),
            vec![BpdGrid::identity(1)]
        );
        assert_eq!(enumerate_bpds(&perm("31524")).len(), 5);
        let ds = enumerate_bpds(&perm("1432"));
        let mut weights: Vec<String> = ds.iter().map(|d| d.weight().to_string()).collect();
        weights.sort();
        let mut expect = vec!["x2^2 x3", "x1 x2 x3", "x1^2 x3", "x1 x2^2", "x1^2 x2"];
        expect.sort();
        assert_eq!(weights, expect);
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate(&BpdGrid::identity(3), Mode::Plain), Ok(()));
        let mut bad = BpdGrid::identity(3);
        bad.set(1, 1, Tile::Blank);
        let v = validate(&bad, Mode::Plain).unwrap_err();
        assert_eq!(v.at.map(|(r, _)| r), Some(1));
        let g = grid("..r\n.r+\nr++");
        assert_eq!(validate(&g, Mode::Plain), Ok(()));
        assert_eq!(g.perm().unwrap(), perm("321"));
        assert_eq!(g.weight(), "x1^2 x2".parse().unwrap());
    }

    #[test]
    fn validate_rejects_bumps_and_double_crossings() {
        let g = grid(".r\nr%");
        assert!(validate(&g, Mode::Plain).is_err());
        assert_eq!(validate(&g, Mode::Activated { max_bumps: 1 }), Ok(()));
        // Pipes 1 and 2 cross at (3,2) and again at (2,3).
        let g = grid("..r\nr++\n|+J");
        assert!(validate(&g, Mode::Plain).is_err());
    }

    #[test]
    fn embed_and_trim() {
        let d = grid(".r\nr+");
        assert_eq!(d.embed(3), grid(".r-\nr+-\n||r"));
        assert_eq!(d.embed(3).perm().unwrap(), perm("21"));
        assert_eq!(BpdGrid::identity(2).embed(4), BpdGrid::identity(4));
        for w in all_permutations(4) {
            for d in enumerate_bpds(&w) {
                assert_eq!(d.embed(6).trim(), d);
            }
        }
    }

    #[test]
    fn render_and_parse() {
        let d = grid(".r\nr+");
        assert_eq!(d.render(), ".r\nr+");
        assert_eq!(d.render().parse::<BpdGrid>().unwrap(), d);
        match ".x".parse::<BpdGrid>() {
            Err(Error::GridParse { row, col, .. }) => assert_eq!((row, col), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            "..\n.".parse::<BpdGrid>(),
            Err(Error::GridParse { row: 2, .. })
        ));
    }

    #[test]
    fn bpd_sums_match_oracle_s4() {
        for w in all_permutations(4) {
            assert_eq!(schubert_via_bpds(&w), schubert_oracle(&w), "{w}");
        }
    }

    #[test]
    fn enumerated_grids_are_reduced_and_inversion_faithful() {
        for w in all_permutations(4) {
            let inv = w.inverse();
            for d in enumerate_bpds(&w) {
                assert_eq!(validate(&d, Mode::Plain), Ok(()));
                let pipes = d.pipes().unwrap();
                let n = d.size();
                for a in 1..=n {
                    for b in a + 1..=n {
                        let crosses = pipes.crossings_between(&d, a, b).len();
                        let inverted = inv.apply(a) > inv.apply(b);
                        assert_eq!(crosses, usize::from(inverted), "{w} pipes {a},{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn rothe_is_lex_min_and_present() {
        for w in all_permutations(5) {
            let ds = enumerate_bpds(&w);
            let r = rothe_bpd(&w);
            assert!(ds.contains(&r));
            let min = ds.iter().map(|d| d.weight_exponents()).min().unwrap();
            assert_eq!(min, r.weight_exponents());
            assert_eq!(ds.iter().filter(|d| d.weight_exponents() == min).count(), 1);
        }
    }

    #[test]
    fn embedding_keeps_count() {
        for w in all_permutations(4) {
            let n = enumerate_bpds(&w).len();
            let embedded = Permutation::new(w.padded(6)).unwrap();
            assert_eq!(enumerate_bpds(&embedded).len(), n);
        }
    }

    #[test]
    fn droop_closure_agrees() {
        for w in all_permutations(5) {
            assert_eq!(droop_closure(&w), enumerate_bpds(&w), "{w}");
        }
    }
}
