//! Chain rotations.
//!
//! A direct move `rot([u-v],w)` on a left chain `[u-v]` whose top `u` is the
//! right child of `w` lifts `u` into the place of `w`, hangs `w` as the left
//! child of `v`, and hands the old left subtree of `v` to `w` as its right
//! subtree. The inverse move `rot(w,[u-v])`, with `w` the left child of `v`,
//! undoes it. Right chains mirror both. A classical rotation is the case of a
//! single-vertex chain.
//!
//! Every move rewrites exactly three child slots, counting the external root
//! pointer as a slot.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{Side, Tree, TreeError, Vertex, NIL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Direct,
    Inverse,
}

/// Which moves define the neighbourhood of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveSet {
    /// Classical rotations only (singleton chains).
    Rot,
    /// All chain rotations.
    Crot,
}

impl fmt::Display for MoveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveSet::Rot => "rot",
            MoveSet::Crot => "crot",
        })
    }
}

impl FromStr for MoveSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rot" => Ok(MoveSet::Rot),
            "crot" => Ok(MoveSet::Crot),
            other => Err(format!("unknown move set `{other}` (expected rot or crot)")),
        }
    }
}

/// A c-rotation descriptor. `[u-v]` is the chain (top `u`, bottom `v`) and
/// `w` the pivot: the parent of `u` for a direct move, the same-side child of
/// `v` for an inverse one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    pub kind: MoveKind,
    pub side: Side,
    pub u: Vertex,
    pub v: Vertex,
    pub w: Vertex,
}

impl Move {
    pub fn direct(side: Side, u: Vertex, v: Vertex, w: Vertex) -> Move {
        Move {
            kind: MoveKind::Direct,
            side,
            u,
            v,
            w,
        }
    }

    pub fn inverse(side: Side, u: Vertex, v: Vertex, w: Vertex) -> Move {
        Move {
            kind: MoveKind::Inverse,
            side,
            u,
            v,
            w,
        }
    }

    pub fn invert(self) -> Move {
        let kind = match self.kind {
            MoveKind::Direct => MoveKind::Inverse,
            MoveKind::Inverse => MoveKind::Direct,
        };
        Move { kind, ..self }
    }

    /// A classical rotation.
    pub fn is_singleton(&self) -> bool {
        self.u == self.v
    }

    /// Serialized form with the side suffix, e.g. `rot([7-5],3) L`.
    pub fn to_line(&self) -> String {
        format!("{} {}", self, self.side.letter())
    }

    fn chain_text(&self) -> String {
        if self.u == self.v {
            format!("[{}]", self.u)
        } else {
            format!("[{}-{}]", self.u, self.v)
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MoveKind::Direct => write!(f, "rot({},{})", self.chain_text(), self.w),
            MoveKind::Inverse => write!(f, "rot({},{})", self.w, self.chain_text()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse move `{text}`: {reason}")]
pub struct MoveParseError {
    pub text: String,
    pub reason: String,
}

impl FromStr for Move {
    type Err = MoveParseError;

    /// Accepts `rot([u-v],w)` and `rot(w,[u-v])`, optionally followed by an
    /// `L`/`R` side suffix. Without a suffix the side follows from the
    /// labels: a left chain always sits above its pivot (`w < u`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| MoveParseError {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (body, suffix) = match compact.rfind(')') {
            Some(i) => (&compact[..=i], &compact[i + 1..]),
            None => return Err(fail("missing `)`")),
        };
        let inner = body
            .strip_prefix("rot(")
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| fail("expected rot(...)"))?;
        let num = |t: &str| t.parse::<Vertex>().map_err(|_| fail("bad vertex label"));
        let chain = |t: &str| -> Result<(Vertex, Vertex), MoveParseError> {
            let t = t
                .strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| fail("chain must be bracketed"))?;
            match t.split_once('-') {
                Some((a, b)) => Ok((num(a)?, num(b)?)),
                None => {
                    let a = num(t)?;
                    Ok((a, a))
                }
            }
        };
        let (kind, (u, v), w) = if inner.starts_with('[') {
            let (c, w) = inner.rsplit_once(',').ok_or_else(|| fail("missing pivot"))?;
            (MoveKind::Direct, chain(c)?, num(w)?)
        } else {
            let (w, c) = inner.split_once(',').ok_or_else(|| fail("missing chain"))?;
            (MoveKind::Inverse, chain(c)?, num(w)?)
        };
        let inferred = if w < u { Side::Left } else { Side::Right };
        let side = match suffix {
            "" => inferred,
            "L" | "l" => Side::Left,
            "R" | "r" => Side::Right,
            _ => return Err(fail("side suffix must be L or R")),
        };
        Ok(Move {
            kind,
            side,
            u,
            v,
            w,
        })
    }
}

impl Serialize for Move {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_line())
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllegalMove {
    #[error("{mv}: vertex {vertex} is not in the tree")]
    UnknownVertex { mv: Move, vertex: Vertex },
    #[error("{mv}: [{u}-{v}] is not a {side} chain")]
    ChainBroken {
        mv: Move,
        side: Side,
        u: Vertex,
        v: Vertex,
    },
    #[error("{mv}: {reason}")]
    WrongPivot { mv: Move, reason: String },
    #[error("{mv}: labels are inconsistent with a {side} chain")]
    WrongSide { mv: Move, side: Side },
}

/// Applies `mv` to `tree`, returning the rotated tree.
pub fn apply(tree: &Tree, mv: &Move) -> Result<Tree, IllegalMove> {
    check(tree, mv)?;
    let s = mv.side;
    let o = s.opposite();
    let (root, left, right, parent) = tree.clone().into_parts();
    let mut b = Builder {
        root,
        left,
        right,
        parent,
    };
    match mv.kind {
        MoveKind::Direct => {
            let sub = tree.child_raw(mv.v, s);
            b.replace(tree, mv.w, mv.u);
            b.set(mv.v, s, mv.w);
            b.set(mv.w, o, sub);
        }
        MoveKind::Inverse => {
            let sub = tree.child_raw(mv.w, o);
            b.replace(tree, mv.u, mv.w);
            b.set(mv.w, o, mv.u);
            b.set(mv.v, s, sub);
        }
    }
    Ok(Tree::from_parts_unchecked(b.root, b.left, b.right, b.parent))
}

/// Checks that `mv` is legal in `tree` without applying it.
pub fn check(tree: &Tree, mv: &Move) -> Result<(), IllegalMove> {
    for x in [mv.u, mv.v, mv.w] {
        if !tree.contains(x) {
            return Err(IllegalMove::UnknownVertex { mv: *mv, vertex: x });
        }
    }
    let s = mv.side;
    // left chains descend to smaller labels and sit above their pivot
    let ordered = match s {
        Side::Left => mv.w < mv.v && mv.v <= mv.u,
        Side::Right => mv.u <= mv.v && mv.v < mv.w,
    };
    if !ordered {
        return Err(IllegalMove::WrongSide { mv: *mv, side: s });
    }
    if tree.chain(mv.u, mv.v, s).is_none() {
        return Err(IllegalMove::ChainBroken {
            mv: *mv,
            side: s,
            u: mv.u,
            v: mv.v,
        });
    }
    match mv.kind {
        MoveKind::Direct => {
            if tree.child(mv.w, s.opposite()) != Some(mv.u) {
                return Err(IllegalMove::WrongPivot {
                    mv: *mv,
                    reason: format!("{} is not the {} child of {}", mv.u, s.opposite(), mv.w),
                });
            }
        }
        MoveKind::Inverse => {
            if tree.child(mv.v, s) != Some(mv.w) {
                return Err(IllegalMove::WrongPivot {
                    mv: *mv,
                    reason: format!("{} is not the {} child of {}", mv.w, s, mv.v),
                });
            }
        }
    }
    Ok(())
}

struct Builder {
    root: Vertex,
    left: Vec<Vertex>,
    right: Vec<Vertex>,
    parent: Vec<Vertex>,
}

impl Builder {
    fn set(&mut self, p: Vertex, side: Side, c: Vertex) {
        match side {
            Side::Left => self.left[p as usize] = c,
            Side::Right => self.right[p as usize] = c,
        }
        if c != NIL {
            self.parent[c as usize] = p;
        }
    }

    /// Puts `new` where `old` hangs in `tree` (or makes it the root).
    fn replace(&mut self, tree: &Tree, old: Vertex, new: Vertex) {
        match (tree.parent(old), tree.side_of(old)) {
            (Some(x), Some(side)) => self.set(x, side, new),
            _ => {
                self.root = new;
                self.parent[new as usize] = NIL;
            }
        }
    }
}

/// All legal moves of `set` in `tree`: direct moves first, then inverse ones,
/// each ordered by chain top, then bottom. Different descriptors may yield the
/// same tree.
pub fn enumerate_moves(tree: &Tree, set: MoveSet) -> Vec<Move> {
    let mut out = Vec::new();
    for_each_move(tree, set, |m| out.push(m));
    out
}

pub(crate) fn for_each_move(tree: &Tree, set: MoveSet, mut f: impl FnMut(Move)) {
    let singles = set == MoveSet::Rot;
    // direct: u hangs on the side opposite to its chain
    for u in tree.vertices() {
        let (Some(w), Some(hang)) = (tree.parent(u), tree.side_of(u)) else {
            continue;
        };
        let side = hang.opposite();
        let mut v = u;
        loop {
            f(Move::direct(side, u, v, w));
            if singles {
                break;
            }
            match tree.child(v, side) {
                Some(c) => v = c,
                None => break,
            }
        }
    }
    // inverse: w is the same-side child of v; u climbs the chain above v
    for v in tree.vertices() {
        for side in [Side::Left, Side::Right] {
            let Some(w) = tree.child(v, side) else {
                continue;
            };
            let mut u = v;
            loop {
                f(Move::inverse(side, u, v, w));
                if singles || tree.side_of(u) != Some(side) {
                    break;
                }
                u = tree.parent(u).unwrap();
            }
        }
    }
}

/// Child slots that differ between `a` and `b`, plus one if the roots differ.
pub fn pointer_delta(a: &Tree, b: &Tree) -> Result<usize, TreeError> {
    if a.n() != b.n() {
        return Err(TreeError::SizeMismatch(a.n(), b.n()));
    }
    let (al, ar) = a.child_arrays();
    let (bl, br) = b.child_arrays();
    let slots = al.iter().zip(&bl).filter(|(x, y)| x != y).count()
        + ar.iter().zip(&br).filter(|(x, y)| x != y).count();
    Ok(slots + usize::from(a.root() != b.root()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::enumerate_trees;

    fn t(s: &str) -> Tree {
        s.parse().unwrap()
    }

    fn fig1() -> Tree {
        t("9(3(2(1,·),7(5(4,6),8)),10)")
    }

    #[test]
    fn figure_two_direct_and_back() {
        let m = Move::direct(Side::Left, 7, 5, 3);
        assert_eq!(m.to_string(), "rot([7-5],3)");
        let t2 = apply(&fig1(), &m).unwrap();
        assert_eq!(t2, t("9(7(5(3(2(1,·),4),6),8),10)"));
        assert_eq!(pointer_delta(&fig1(), &t2).unwrap(), 3);
        let back = m.invert();
        assert_eq!(back.to_string(), "rot(3,[7-5])");
        assert_eq!(apply(&t2, &back).unwrap(), fig1());
    }

    #[test]
    fn standard_rotation_is_a_singleton_inverse() {
        let m = Move::inverse(Side::Left, 7, 7, 5);
        assert_eq!(m.to_string(), "rot(5,[7])");
        let tp = apply(&fig1(), &m).unwrap();
        assert_eq!(tp, t("9(3(2(1,·),5(4,7(6,8))),10)"));
        let (l, r) = tp.child_arrays();
        let (l0, r0) = fig1().child_arrays();
        // right pointers of 3 and 5, left pointer of 7
        let changed: Vec<String> = (0..10)
            .flat_map(|i| {
                let mut c = Vec::new();
                if l[i] != l0[i] {
                    c.push(format!("L{}", i + 1));
                }
                if r[i] != r0[i] {
                    c.push(format!("R{}", i + 1));
                }
                c
            })
            .collect();
        assert_eq!(changed, ["R3", "R5", "L7"]);
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let tr = fig1();
        assert!(matches!(
            apply(&tr, &Move::direct(Side::Left, 7, 6, 3)),
            Err(IllegalMove::ChainBroken { .. }) | Err(IllegalMove::WrongSide { .. })
        ));
        assert!(matches!(
            apply(&tr, &Move::direct(Side::Left, 5, 4, 3)),
            Err(IllegalMove::WrongPivot { .. })
        ));
        assert!(matches!(
            apply(&tr, &Move::direct(Side::Right, 7, 5, 3)),
            Err(IllegalMove::WrongSide { .. })
        ));
        // [9-3] is a left chain but 9 has no pivot
        assert!(matches!(
            apply(&tr, &Move::direct(Side::Left, 9, 3, 1)),
            Err(IllegalMove::WrongSide { .. }) | Err(IllegalMove::WrongPivot { .. })
        ));
        // the maximal chain [7-4] cannot be split below 4
        assert!(matches!(
            apply(&tr, &Move::inverse(Side::Left, 7, 4, 3)),
            Err(IllegalMove::WrongSide { .. }) | Err(IllegalMove::WrongPivot { .. })
        ));
        assert!(matches!(
            apply(&tr, &Move::direct(Side::Left, 11, 5, 3)),
            Err(IllegalMove::UnknownVertex { vertex: 11, .. })
        ));
    }

    #[test]
    fn direct_moves_from_seven() {
        let from7: Vec<String> = enumerate_moves(&fig1(), MoveSet::Crot)
            .into_iter()
            .filter(|m| m.kind == MoveKind::Direct && m.side == Side::Left && m.u == 7)
            .map(|m| m.to_string())
            .collect();
        assert_eq!(from7, ["rot([7],3)", "rot([7-5],3)", "rot([7-4],3)"]);
    }

    #[test]
    fn two_vertex_moves() {
        assert!(enumerate_moves(&Tree::single(), MoveSet::Crot).is_empty());
        let lc = t("2(1,·)");
        let moves = enumerate_moves(&lc, MoveSet::Crot);
        assert_eq!(moves.len(), 2);
        for m in &moves {
            assert_eq!(apply(&lc, m).unwrap(), t("1(·,2)"));
        }
    }

    #[test]
    fn parse_and_print() {
        for (text, m) in [
            ("rot([7-5],3)", Move::direct(Side::Left, 7, 5, 3)),
            ("rot(3,[7-5])", Move::inverse(Side::Left, 7, 5, 3)),
            ("rot(5,[7])", Move::inverse(Side::Left, 7, 7, 5)),
            ("rot([2-4],6)", Move::direct(Side::Right, 2, 4, 6)),
        ] {
            assert_eq!(text.parse::<Move>().unwrap(), m);
            assert_eq!(m.to_string(), text);
            assert_eq!(m.to_line().parse::<Move>().unwrap(), m);
        }
        assert_eq!(
            "rot( [7-5] , 3 ) L".parse::<Move>().unwrap(),
            Move::direct(Side::Left, 7, 5, 3)
        );
        assert!("rot([7-5],3) X".parse::<Move>().is_err());
        assert!("rot(7-5,3)".parse::<Move>().is_err());
        assert!("spin([7],3)".parse::<Move>().is_err());
    }

    #[test]
    fn rot_is_subset_of_crot() {
        for tree in enumerate_trees(6) {
            let crot = enumerate_moves(&tree, MoveSet::Crot);
            for m in enumerate_moves(&tree, MoveSet::Rot) {
                assert!(m.is_singleton());
                assert!(crot.contains(&m));
            }
        }
    }

    #[test]
    fn exhaustive_three_pointer_and_round_trip() {
        for n in 1..=6 {
            for tree in enumerate_trees(n) {
                for m in enumerate_moves(&tree, MoveSet::Crot) {
                    let next = apply(&tree, &m).unwrap();
                    assert!(next.check_infix());
                    assert_eq!(pointer_delta(&tree, &next).unwrap(), 3, "{tree} {m}");
                    assert_eq!(apply(&next, &m.invert()).unwrap(), tree);
                }
            }
        }
    }

    #[test]
    fn delta_requires_equal_sizes() {
        assert_eq!(pointer_delta(&fig1(), &fig1()).unwrap(), 0);
        assert!(pointer_delta(&fig1(), &Tree::single()).is_err());
    }
}
