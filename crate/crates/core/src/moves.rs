//! The basic moves on activated pipe dreams: droops, undroops, cross-bump swaps and terms.
//!
//! Each move edits a fixed set of tiles and fails with [`Error::Move`] at the first tile
//! that does not admit its edit.

use crate::bpd::{validate, BpdGrid, Mode, Segment, Tile};
use crate::error::{Error, Result};

use Tile::*;

fn fail(op: &'static str, at: (usize, usize), reason: impl Into<String>) -> Error {
    Error::Move {
        op,
        at,
        reason: reason.into(),
    }
}

fn edit(
    g: &mut BpdGrid,
    op: &'static str,
    (r, c): (usize, usize),
    table: &[(Tile, Tile)],
) -> Result<()> {
    let t = g.get(r, c);
    let (_, to) = table.iter().find(|(from, _)| *from == t).ok_or_else(|| {
        fail(
            op,
            (r, c),
            format!("tile `{}` does not admit the edit", t.to_char()),
        )
    })?;
    g.set(r, c, *to);
    Ok(())
}

/// Steps from `(r, c)` by `(dr, dc)` until the first tile that is not a cross.
fn first_non_cross(
    g: &BpdGrid,
    op: &'static str,
    (r, c): (usize, usize),
    (dr, dc): (isize, isize),
) -> Result<usize> {
    let mut steps = 1;
    loop {
        let rr = r as isize + dr * steps as isize;
        let cc = c as isize + dc * steps as isize;
        match (rr >= 1 && cc >= 1)
            .then(|| g.try_get(rr as usize, cc as usize))
            .flatten()
        {
            None => return Err(fail(op, (r, c), "droop rectangle leaves the grid")),
            Some(Cross) => steps += 1,
            Some(_) => return Ok(steps),
        }
    }
}

/// Droops the r-turn at `(a, b)` to the nearest corner past the crosses below and to the right.
pub fn min_droop(d: &BpdGrid, a: usize, b: usize) -> Result<(BpdGrid, (usize, usize))> {
    const OP: &str = "min-droop";
    if !d.try_get(a, b).is_some_and(|t| t.has_r_turn()) {
        return Err(fail(OP, (a, b), "not an r-turn"));
    }
    let x = first_non_cross(d, OP, (a, b), (1, 0))?;
    let y = first_non_cross(d, OP, (a, b), (0, 1))?;
    let (c, e) = (a + x, b + y);
    if c > d.size() || e > d.size() {
        return Err(fail(OP, (a, b), "target out of grid"));
    }
    let mut g = d.clone();
    edit(&mut g, OP, (a, b), &[(RElbow, Blank), (Bump, JElbow)])?;
    for r in a + 1..c {
        edit(&mut g, OP, (r, b), &[(Cross, Horizontal)])?;
        edit(
            &mut g,
            OP,
            (r, e),
            &[(Blank, Vertical), (Horizontal, Cross)],
        )?;
    }
    edit(
        &mut g,
        OP,
        (c, b),
        &[(Vertical, RElbow), (JElbow, Horizontal)],
    )?;
    for col in b + 1..e {
        edit(
            &mut g,
            OP,
            (c, col),
            &[(Blank, Horizontal), (Vertical, Cross)],
        )?;
        edit(&mut g, OP, (a, col), &[(Cross, Vertical)])?;
    }
    edit(&mut g, OP, (c, e), &[(Blank, JElbow), (RElbow, Bump)])?;
    edit(
        &mut g,
        OP,
        (a, e),
        &[(Horizontal, RElbow), (JElbow, Vertical)],
    )?;
    Ok((g, (c, e)))
}

/// Inverse of [`min_droop`], starting from the j-turn at `(c, e)`.
pub fn min_undroop(d: &BpdGrid, c: usize, e: usize) -> Result<(BpdGrid, (usize, usize))> {
    const OP: &str = "min-undroop";
    if !d.try_get(c, e).is_some_and(|t| t.has_j_turn()) {
        return Err(fail(OP, (c, e), "not a j-turn"));
    }
    let x = first_non_cross(d, OP, (c, e), (-1, 0))?;
    let y = first_non_cross(d, OP, (c, e), (0, -1))?;
    let (a, b) = (c - x, e - y);
    let mut g = d.clone();
    edit(&mut g, OP, (c, e), &[(JElbow, Blank), (Bump, RElbow)])?;
    for r in a + 1..c {
        edit(
            &mut g,
            OP,
            (r, e),
            &[(Cross, Horizontal), (Vertical, Blank)],
        )?;
        edit(&mut g, OP, (r, b), &[(Horizontal, Cross)])?;
    }
    edit(
        &mut g,
        OP,
        (a, e),
        &[(RElbow, Horizontal), (Vertical, JElbow)],
    )?;
    for col in b + 1..e {
        edit(
            &mut g,
            OP,
            (c, col),
            &[(Cross, Vertical), (Horizontal, Blank)],
        )?;
        edit(&mut g, OP, (a, col), &[(Vertical, Cross)])?;
    }
    edit(
        &mut g,
        OP,
        (c, b),
        &[(RElbow, Vertical), (Horizontal, JElbow)],
    )?;
    edit(&mut g, OP, (a, b), &[(Blank, RElbow), (JElbow, Bump)])?;
    Ok((g, (a, b)))
}

/// The two pipes meeting at a bump: `(r-turn pipe, j-turn pipe)`.
pub fn bump_pipes(d: &BpdGrid, a: usize, b: usize) -> Result<(usize, usize)> {
    if d.try_get(a, b) != Some(Bump) {
        return Err(fail("bump", (a, b), "no bump here"));
    }
    let pipes = d.pipes()?;
    Ok((
        pipes.owner(a, b, Segment::RTurn).unwrap(),
        pipes.owner(a, b, Segment::JTurn).unwrap(),
    ))
}

/// Whether the two pipes at the bump `(a, b)` also cross somewhere, and where.
pub fn bump_crossing(d: &BpdGrid, a: usize, b: usize) -> Result<Option<(usize, usize)>> {
    let (p, q) = bump_pipes(d, a, b)?;
    let pipes = d.pipes()?;
    Ok(pipes.crossings_between(d, p, q).first().copied())
}

/// Exchanges the bump at `(a, b)` with the cross of the same two pipes.
pub fn cross_bump_swap(d: &BpdGrid, a: usize, b: usize) -> Result<(BpdGrid, (usize, usize))> {
    const OP: &str = "cross-bump-swap";
    let at =
        bump_crossing(d, a, b)?.ok_or_else(|| fail(OP, (a, b), "the two pipes do not cross"))?;
    let mut g = d.clone();
    g.set(a, b, Cross);
    g.set(at.0, at.1, Bump);
    validate(&g, Mode::Activated { max_bumps: 1 })
        .map_err(|v| fail(OP, (a, b), format!("result is invalid: {v}")))?;
    Ok((g, at))
}

/// Turns the bump at `(a, b)` of two pipes that never cross into a cross.
pub fn term_move(d: &BpdGrid, a: usize, b: usize) -> Result<BpdGrid> {
    const OP: &str = "term";
    if bump_crossing(d, a, b)?.is_some() {
        return Err(fail(OP, (a, b), "the two pipes already cross"));
    }
    let mut g = d.clone();
    g.set(a, b, Cross);
    Ok(g)
}

/// Nearest tile strictly left of `(r, c)` in row `r` with an r-turn.
pub fn r_turn_left_of(d: &BpdGrid, r: usize, c: usize) -> Option<usize> {
    (1..c).rev().find(|&j| d.get(r, j).has_r_turn())
}

/// Repeats [`min_droop`] while the next droop starts in the same column.
///
/// After a droop lands on a j-turn, the next droop would start at the nearest r-turn to
/// its left; the sequence continues only while that r-turn sits in column `b`.
pub fn max_droop(d: &BpdGrid, a: usize, b: usize) -> Result<(BpdGrid, (usize, usize))> {
    let (mut g, mut target) = min_droop(d, a, b)?;
    while g.get(target.0, target.1) == JElbow {
        match r_turn_left_of(&g, target.0, target.1) {
            Some(j) if j == b => {
                let (next, t) = min_droop(&g, target.0, b)?;
                g = next;
                target = t;
            }
            _ => break,
        }
    }
    Ok((g, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpd::enumerate_bpds;
    use crate::perm::{all_permutations, Permutation};

    fn grid(s: &str) -> BpdGrid {
        s.parse().unwrap()
    }

    #[test]
    fn droop_examples() {
        let (g, t) = min_droop(&BpdGrid::identity(2), 1, 1).unwrap();
        assert_eq!((g.clone(), t), (grid(".r\nr%"), (2, 2)));
        assert_eq!(validate(&g, Mode::Activated { max_bumps: 1 }), Ok(()));

        let (g, t) = min_droop(&grid(".r\nr+").embed(3), 1, 2).unwrap();
        assert_eq!((g.clone(), t), (grid("..r\nr-+\n|r%"), (3, 3)));
        assert_eq!(validate(&g, Mode::Activated { max_bumps: 1 }), Ok(()));

        assert!(matches!(
            min_droop(&BpdGrid::identity(2), 1, 2),
            Err(Error::Move { at: (1, 2), .. })
        ));
    }

    #[test]
    fn undroop_examples() {
        assert_eq!(
            min_undroop(&grid(".r\nr%"), 2, 2).unwrap(),
            (BpdGrid::identity(2), (1, 1))
        );
        assert!(min_undroop(&BpdGrid::identity(2), 1, 1).is_err());
    }

    #[test]
    fn term_examples() {
        assert_eq!(term_move(&grid(".r\nr%"), 2, 2).unwrap(), grid(".r\nr+"));
        let g = term_move(&grid("..r\nr-+\n|r%"), 3, 3).unwrap();
        assert_eq!(g.perm().unwrap(), "312".parse().unwrap());
        assert_eq!(g.weight(), "x1^2".parse().unwrap());
        assert!(cross_bump_swap(&grid(".r\nr%"), 2, 2).is_err());
        assert!(term_move(&BpdGrid::identity(2), 1, 1).is_err());
    }

    #[test]
    fn cross_bump_swap_is_involution() {
        let mut swaps = 0;
        for w in all_permutations(4) {
            for d in enumerate_bpds(&w) {
                let d = d.embed(6);
                for (a, b) in d.positions() {
                    let Ok((e, t)) = min_droop(&d, a, b) else {
                        continue;
                    };
                    if e.get(t.0, t.1) != Bump || bump_crossing(&e, t.0, t.1).unwrap().is_none() {
                        continue;
                    }
                    swaps += 1;
                    let (f, at) = cross_bump_swap(&e, t.0, t.1).unwrap();
                    assert_eq!(f.get(t.0, t.1), Cross);
                    assert_eq!(f.get(at.0, at.1), Bump);
                    assert_eq!(f.blanks(), e.blanks());
                    assert_eq!(cross_bump_swap(&f, at.0, at.1).unwrap(), (e, t));
                }
            }
        }
        assert!(swaps > 0);
    }

    #[test]
    fn droop_roundtrip_exhaustive() {
        let mut droops = 0;
        for w in all_permutations(4) {
            for d in enumerate_bpds(&w) {
                let d = d.embed(6);
                for (a, b) in d.positions() {
                    if d.get(a, b) != RElbow {
                        continue;
                    }
                    let Ok((g, t)) = min_droop(&d, a, b) else {
                        continue;
                    };
                    droops += 1;
                    assert_eq!(validate(&g, Mode::Activated { max_bumps: 1 }), Ok(()));
                    assert!(matches!(g.get(t.0, t.1), JElbow | Bump));
                    assert_eq!(min_undroop(&g, t.0, t.1).unwrap(), (d.clone(), (a, b)));
                }
            }
        }
        assert!(droops > 100);
    }

    #[test]
    fn term_adds_one_inversion() {
        let g = grid(".r\nr%");
        let (p, q) = bump_pipes(&g, 2, 2).unwrap();
        let before = Permutation::identity();
        let after = term_move(&g, 2, 2).unwrap().perm().unwrap();
        assert_eq!(after.length(), before.length() + 1);
        let pipes = term_move(&g, 2, 2).unwrap().pipes().unwrap();
        let (r1, r2) = (pipes.exit_row(p), pipes.exit_row(q));
        assert_eq!(after, before.swap_positions(r1.min(r2), r1.max(r2)));
    }

    #[test]
    fn max_droop_without_repeat_is_min_droop() {
        let d = BpdGrid::identity(2);
        assert_eq!(max_droop(&d, 1, 1).unwrap(), min_droop(&d, 1, 1).unwrap());
        assert!(max_droop(&d, 2, 1).is_err());
    }
}
