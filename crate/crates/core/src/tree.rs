//! Infix-labelled binary trees.
//!
//! A tree of `n` vertices uses the labels `1..=n`, assigned so that an
//! in-order traversal visits them in increasing order. The shape alone
//! therefore determines every label, and every subtree spans a contiguous
//! label interval.
//!
//! Child slots are stored as dense arrays indexed by label, with `0` as the
//! "no child" sentinel. Trees are immutable values; operations that look like
//! mutation return a new tree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalan;

/// A vertex label in `1..=n`.
pub type Vertex = u32;

/// Sentinel for an empty child slot.
pub(crate) const NIL: Vertex = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l" | "left" => Ok(Side::Left),
            "r" | "right" => Ok(Side::Right),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("child maps must both have length {expected}, got {left} and {right}")]
    MapLength {
        expected: usize,
        left: usize,
        right: usize,
    },
    #[error("vertex {vertex} is outside 1..={n}")]
    OutOfRange { vertex: u64, n: usize },
    #[error("duplicate child: vertex {child} is attached more than once")]
    DuplicateChild { child: Vertex },
    #[error("cycle: vertex {vertex} is its own ancestor")]
    Cycle { vertex: Vertex },
    #[error("forest: vertex {vertex} is not reachable from root {root}")]
    Forest { vertex: Vertex, root: Vertex },
    #[error("infix order violated: in-order position {position} holds vertex {found}")]
    InfixViolation { position: usize, found: Vertex },
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("malformed shape bitstring: {0}")]
    MalformedShape(String),
    #[error("invalid tree JSON: {0}")]
    Json(String),
    #[error("size mismatch: {0} vs {1} vertices")]
    SizeMismatch(usize, usize),
}

/// The contiguous label range `[lo, hi]` spanned by a subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Vertex,
    pub hi: Vertex,
}

impl Interval {
    pub fn new(lo: Vertex, hi: Vertex) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// A left or right chain `[top-bottom]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    pub side: Side,
    pub top: Vertex,
    pub bottom: Vertex,
    pub vertices: Vec<Vertex>,
    pub maximal: bool,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.top == self.bottom {
            write!(f, "[{}]", self.top)
        } else {
            write!(f, "[{}-{}]", self.top, self.bottom)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    root: Vertex,
    // index 0 unused
    left: Vec<Vertex>,
    right: Vec<Vertex>,
    parent: Vec<Vertex>,
}

impl Tree {
    /// Builds and validates a tree from child arrays of length `n`, where
    /// entry `i` holds the child of vertex `i + 1` and `0` marks no child.
    pub fn build(root: Vertex, left: &[Vertex], right: &[Vertex]) -> Result<Tree, TreeError> {
        let n = left.len();
        if n == 0 && right.is_empty() {
            return Err(TreeError::Empty);
        }
        if right.len() != n {
            return Err(TreeError::MapLength {
                expected: n.max(right.len()),
                left: n,
                right: right.len(),
            });
        }
        let mut l = Vec::with_capacity(n + 1);
        let mut r = Vec::with_capacity(n + 1);
        l.push(NIL);
        r.push(NIL);
        l.extend_from_slice(left);
        r.extend_from_slice(right);
        Tree::validate(root, l, r)
    }

    /// Same as [`Tree::build`] but with `Option` children.
    pub fn from_options(
        root: Vertex,
        left: &[Option<Vertex>],
        right: &[Option<Vertex>],
    ) -> Result<Tree, TreeError> {
        let l: Vec<Vertex> = left.iter().map(|c| c.unwrap_or(NIL)).collect();
        let r: Vec<Vertex> = right.iter().map(|c| c.unwrap_or(NIL)).collect();
        Tree::build(root, &l, &r)
    }

    fn validate(root: Vertex, left: Vec<Vertex>, right: Vec<Vertex>) -> Result<Tree, TreeError> {
        let n = left.len() - 1;
        let check = |v: Vertex| {
            if v as usize > n {
                Err(TreeError::OutOfRange { vertex: v as u64, n })
            } else {
                Ok(())
            }
        };
        if root == NIL {
            return Err(TreeError::OutOfRange { vertex: 0, n });
        }
        check(root)?;
        let mut parent = vec![NIL; n + 1];
        let mut attached = vec![false; n + 1];
        for v in 1..=n {
            for c in [left[v], right[v]] {
                if c == NIL {
                    continue;
                }
                check(c)?;
                if attached[c as usize] {
                    return Err(TreeError::DuplicateChild { child: c });
                }
                attached[c as usize] = true;
                parent[c as usize] = v as Vertex;
            }
        }

        // walk from the root; with in-degree <= 1 a revisit can only be a cycle
        let mut seen = vec![false; n + 1];
        let mut stack = vec![root];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            if seen[v as usize] {
                return Err(TreeError::Cycle { vertex: v });
            }
            seen[v as usize] = true;
            count += 1;
            for c in [left[v as usize], right[v as usize]] {
                if c != NIL {
                    stack.push(c);
                }
            }
        }
        if attached[root as usize] {
            return Err(TreeError::Cycle { vertex: root });
        }
        if count != n {
            // an unreachable vertex without a parent roots another component;
            // if every unreachable vertex has a parent they sit on a cycle
            let unreached: Vec<usize> = (1..=n).filter(|&v| !seen[v]).collect();
            return match unreached.iter().find(|&&v| !attached[v]) {
                Some(&v) => Err(TreeError::Forest {
                    vertex: v as Vertex,
                    root,
                }),
                None => Err(TreeError::Cycle {
                    vertex: unreached[0] as Vertex,
                }),
            };
        }

        let tree = Tree {
            root,
            left,
            right,
            parent,
        };
        for (position, v) in tree.inorder().into_iter().enumerate() {
            if v as usize != position + 1 {
                return Err(TreeError::InfixViolation {
                    position: position + 1,
                    found: v,
                });
            }
        }
        Ok(tree)
    }

    /// Assembles a tree from arrays known to be valid (index 0 unused).
    pub(crate) fn from_parts_unchecked(
        root: Vertex,
        left: Vec<Vertex>,
        right: Vec<Vertex>,
        parent: Vec<Vertex>,
    ) -> Tree {
        let t = Tree {
            root,
            left,
            right,
            parent,
        };
        debug_assert!(t.check_infix(), "infix invariant broken: {t}");
        t
    }

    pub(crate) fn into_parts(self) -> (Vertex, Vec<Vertex>, Vec<Vertex>, Vec<Vertex>) {
        (self.root, self.left, self.right, self.parent)
    }

    pub fn single() -> Tree {
        Tree {
            root: 1,
            left: vec![NIL; 2],
            right: vec![NIL; 2],
            parent: vec![NIL; 2],
        }
    }

    pub fn n(&self) -> usize {
        self.left.len() - 1
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n() as Vertex
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v != NIL && (v as usize) <= self.n()
    }

    pub fn left(&self, v: Vertex) -> Option<Vertex> {
        opt(self.left[v as usize])
    }

    pub fn right(&self, v: Vertex) -> Option<Vertex> {
        opt(self.right[v as usize])
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        opt(self.parent[v as usize])
    }

    pub fn child(&self, v: Vertex, side: Side) -> Option<Vertex> {
        match side {
            Side::Left => self.left(v),
            Side::Right => self.right(v),
        }
    }

    pub(crate) fn child_raw(&self, v: Vertex, side: Side) -> Vertex {
        match side {
            Side::Left => self.left[v as usize],
            Side::Right => self.right[v as usize],
        }
    }

    /// Which side of its parent `v` hangs on; `None` for the root.
    pub fn side_of(&self, v: Vertex) -> Option<Side> {
        let p = self.parent(v)?;
        if self.left[p as usize] == v {
            Some(Side::Left)
        } else {
            Some(Side::Right)
        }
    }

    /// Left and right child arrays of length `n` (0 = absent).
    pub fn child_arrays(&self) -> (Vec<Vertex>, Vec<Vertex>) {
        (self.left[1..].to_vec(), self.right[1..].to_vec())
    }

    pub fn depth(&self, mut v: Vertex) -> usize {
        let mut d = 0;
        while let Some(p) = self.parent(v) {
            v = p;
            d += 1;
        }
        d
    }

    /// Depth of every vertex, indexed by label (index 0 unused).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.n() + 1];
        for v in self.preorder() {
            if let Some(p) = self.parent(v) {
                depth[v as usize] = depth[p as usize] + 1;
            }
        }
        depth
    }

    pub fn preorder(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.n());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            let (l, r) = (self.left[v as usize], self.right[v as usize]);
            if r != NIL {
                stack.push(r);
            }
            if l != NIL {
                stack.push(l);
            }
        }
        out
    }

    pub fn inorder(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.n());
        let mut stack = Vec::new();
        let mut cur = self.root;
        loop {
            while cur != NIL {
                stack.push(cur);
                cur = self.left[cur as usize];
            }
            match stack.pop() {
                Some(v) => {
                    out.push(v);
                    cur = self.right[v as usize];
                }
                None => break,
            }
        }
        out
    }

    /// True when the in-order traversal is 1, 2, ..., n.
    pub fn check_infix(&self) -> bool {
        self.inorder()
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    /// Interval spanned by the subtree rooted at `v`.
    pub fn subtree_interval(&self, v: Vertex) -> Interval {
        let mut lo = v;
        while self.left[lo as usize] != NIL {
            lo = self.left[lo as usize];
        }
        let mut hi = v;
        while self.right[hi as usize] != NIL {
            hi = self.right[hi as usize];
        }
        Interval { lo, hi }
    }

    /// Subtree intervals of all vertices, indexed by label, in one pass.
    pub fn intervals(&self) -> Vec<Interval> {
        let n = self.n();
        let mut out = vec![Interval { lo: 0, hi: 0 }; n + 1];
        for v in self.preorder().into_iter().rev() {
            let l = self.left[v as usize];
            let r = self.right[v as usize];
            let lo = if l == NIL { v } else { out[l as usize].lo };
            let hi = if r == NIL { v } else { out[r as usize].hi };
            out[v as usize] = Interval { lo, hi };
        }
        out
    }

    /// `(L, R)`: the number of maximal left and right chains.
    ///
    /// Every maximal left chain except the root's starts at a right child, so
    /// `L` is the number of non-empty right slots plus one (and mirrored for
    /// `R`).
    pub fn chain_counts(&self) -> (usize, usize) {
        let rights = self.right[1..].iter().filter(|&&c| c != NIL).count();
        let lefts = self.left[1..].iter().filter(|&&c| c != NIL).count();
        (rights + 1, lefts + 1)
    }

    /// All maximal chains of one side, deepest top first, ties by label.
    pub fn maximal_chains(&self, side: Side) -> Vec<Chain> {
        let depth = self.depths();
        let mut tops: Vec<Vertex> = self
            .vertices()
            .filter(|&v| self.side_of(v) != Some(side))
            .collect();
        tops.sort_by_key(|&v| (std::cmp::Reverse(depth[v as usize]), v));
        tops.into_iter()
            .map(|top| {
                let vertices = self.walk(top, side);
                Chain {
                    side,
                    top,
                    bottom: *vertices.last().unwrap(),
                    vertices,
                    maximal: true,
                }
            })
            .collect()
    }

    /// The chain of `side` pointers starting at `top` and running to the end.
    pub fn walk(&self, top: Vertex, side: Side) -> Vec<Vertex> {
        let mut out = vec![top];
        let mut cur = top;
        while let Some(c) = self.child(cur, side) {
            out.push(c);
            cur = c;
        }
        out
    }

    /// The chain `[top-bottom]` if `bottom` is reached from `top` through
    /// `side` pointers.
    pub fn chain(&self, top: Vertex, bottom: Vertex, side: Side) -> Option<Chain> {
        if !self.contains(top) || !self.contains(bottom) {
            return None;
        }
        let mut vertices = vec![top];
        let mut cur = top;
        while cur != bottom {
            cur = self.child(cur, side)?;
            vertices.push(cur);
        }
        let maximal = self.side_of(top) != Some(side) && self.child(bottom, side).is_none();
        Some(Chain {
            side,
            top,
            bottom,
            vertices,
            maximal,
        })
    }

    /// The pure left spine (`side = Left`, root `n`) or right spine (root `1`).
    pub fn complete_chain(n: usize, side: Side) -> Tree {
        assert!(n >= 1, "a tree needs at least one vertex");
        let mut left = vec![NIL; n + 1];
        let mut right = vec![NIL; n + 1];
        let mut parent = vec![NIL; n + 1];
        let root = match side {
            Side::Left => {
                for k in 2..=n {
                    left[k] = (k - 1) as Vertex;
                    parent[k - 1] = k as Vertex;
                }
                n as Vertex
            }
            Side::Right => {
                for k in 1..n {
                    right[k] = (k + 1) as Vertex;
                    parent[k + 1] = k as Vertex;
                }
                1
            }
        };
        Tree::from_parts_unchecked(root, left, right, parent)
    }

    /// Builds a tree from a shape given as nested child indices; labels are
    /// assigned by in-order rank. `kids[i]` holds the children of node `i`
    /// and node 0 is the root.
    pub(crate) fn from_shape(kids: &[(Option<usize>, Option<usize>)]) -> Tree {
        let n = kids.len();
        let mut label = vec![0 as Vertex; n];
        // in-order numbering over node indices
        let mut stack = Vec::new();
        let mut cur = Some(0usize);
        let mut next = 1;
        loop {
            while let Some(c) = cur {
                stack.push(c);
                cur = kids[c].0;
            }
            match stack.pop() {
                Some(c) => {
                    label[c] = next;
                    next += 1;
                    cur = kids[c].1;
                }
                None => break,
            }
        }
        let mut left = vec![NIL; n + 1];
        let mut right = vec![NIL; n + 1];
        let mut parent = vec![NIL; n + 1];
        for (i, &(l, r)) in kids.iter().enumerate() {
            let v = label[i] as usize;
            if let Some(l) = l {
                left[v] = label[l];
                parent[label[l] as usize] = v as Vertex;
            }
            if let Some(r) = r {
                right[v] = label[r];
                parent[label[r] as usize] = v as Vertex;
            }
        }
        Tree::from_parts_unchecked(label[0], left, right, parent)
    }

    /// Preorder shape code: `1` for a node followed by its left and right
    /// codes, `0` for an empty slot. Always `2n + 1` bits.
    pub fn shape_key(&self) -> ShapeKey {
        let mut key = ShapeKey::with_len(2 * self.n() + 1);
        let mut i = 0;
        self.emit_shape(|bit| {
            if bit {
                key.set(i);
            }
            i += 1;
        });
        key
    }

    fn emit_shape(&self, mut emit: impl FnMut(bool)) {
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if v == NIL {
                emit(false);
            } else {
                emit(true);
                stack.push(self.right[v as usize]);
                stack.push(self.left[v as usize]);
            }
        }
    }

    /// The shape code packed into one word; `None` when `n > 31`.
    pub fn packed_key(&self) -> Option<u64> {
        if self.n() > MAX_PACKED_N {
            return None;
        }
        let mut key = 0u64;
        let mut i = 0;
        self.emit_shape(|bit| {
            if bit {
                key |= 1 << i;
            }
            i += 1;
        });
        Some(key)
    }

    /// Inverse of [`Tree::packed_key`] for a known vertex count.
    pub fn from_packed(n: usize, key: u64) -> Result<Tree, TreeError> {
        if n > MAX_PACKED_N {
            return Err(TreeError::MalformedShape(format!(
                "packed keys hold at most {MAX_PACKED_N} vertices"
            )));
        }
        decode_shape(2 * n + 1, |i| key >> i & 1 == 1)
    }

    /// Parses a tree from a literal, a shape bitstring or the JSON form,
    /// chosen by the first non-blank character.
    pub fn parse_any(input: &str) -> Result<Tree, TreeError> {
        let s = input.trim();
        if s.starts_with('{') {
            Tree::from_json(s)
        } else if !s.is_empty() && s.chars().all(|c| c == '0' || c == '1') {
            s.parse::<ShapeKey>()?.to_tree()
        } else {
            s.parse()
        }
    }

    pub fn from_json(s: &str) -> Result<Tree, TreeError> {
        let j: TreeJson = serde_json::from_str(s).map_err(|e| TreeError::Json(e.to_string()))?;
        Tree::try_from(j)
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson::from(self)
    }
}

pub(crate) const MAX_PACKED_N: usize = 31;

fn opt(v: Vertex) -> Option<Vertex> {
    if v == NIL {
        None
    } else {
        Some(v)
    }
}

/// Reads a preorder shape code of `len` bits through `bit(i)`.
fn decode_shape(len: usize, bit: impl Fn(usize) -> bool) -> Result<Tree, TreeError> {
    if len == 0 || !bit(0) {
        return Err(TreeError::MalformedShape(
            "a shape code starts with 1".into(),
        ));
    }
    let mut kids: Vec<(Option<usize>, Option<usize>)> = vec![(None, None)];
    // (node, next slot is the right one)
    let mut pending: Vec<(usize, bool)> = vec![(0, false)];
    let mut pos = 1;
    while let Some(&(node, right_slot)) = pending.last() {
        if pos >= len {
            return Err(TreeError::MalformedShape(format!(
                "code ends after {len} bits with open slots"
            )));
        }
        let b = bit(pos);
        pos += 1;
        if right_slot {
            pending.pop();
        } else {
            pending.last_mut().unwrap().1 = true;
        }
        if b {
            let q = kids.len();
            kids.push((None, None));
            if right_slot {
                kids[node].1 = Some(q);
            } else {
                kids[node].0 = Some(q);
            }
            pending.push((q, false));
        }
    }
    if pos != len || len != 2 * kids.len() + 1 {
        return Err(TreeError::MalformedShape(format!(
            "{len} bits given but the shape closes after {pos}"
        )));
    }
    Ok(Tree::from_shape(&kids))
}

/// Canonical shape code of a tree: the preorder bitstring of length `2n + 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeKey {
    len: usize,
    words: Vec<u64>,
}

impl ShapeKey {
    fn with_len(len: usize) -> Self {
        ShapeKey {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn bit(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of bits, `2n + 1`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n(&self) -> usize {
        self.len / 2
    }

    pub fn to_tree(&self) -> Result<Tree, TreeError> {
        decode_shape(self.len, |i| self.bit(i))
    }

    /// Single-word form, available for `n <= 31`.
    pub fn packed(&self) -> Option<u64> {
        (self.len <= 2 * MAX_PACKED_N + 1).then(|| self.words[0])
    }
}

impl fmt::Display for ShapeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.bit(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for ShapeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShapeKey({self})")
    }
}

impl FromStr for ShapeKey {
    type Err = TreeError;

    /// Parses and checks a bitstring; rejects anything that is not a complete
    /// preorder shape code.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut key = ShapeKey::with_len(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => key.set(i),
                '0' => {}
                other => {
                    return Err(TreeError::MalformedShape(format!(
                        "unexpected character `{other}`"
                    )))
                }
            }
        }
        if s.len().is_multiple_of(2) {
            return Err(TreeError::MalformedShape(format!(
                "length {} is even; a code has 2n+1 bits",
                s.len()
            )));
        }
        key.to_tree()?;
        Ok(key)
    }
}

impl Serialize for ShapeKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ShapeKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// JSON form of a tree: child arrays of length `n`, `0` for no child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub n: usize,
    pub root: Vertex,
    pub left: Vec<Vertex>,
    pub right: Vec<Vertex>,
}

impl From<&Tree> for TreeJson {
    fn from(t: &Tree) -> Self {
        let (left, right) = t.child_arrays();
        TreeJson {
            n: t.n(),
            root: t.root,
            left,
            right,
        }
    }
}

impl TryFrom<TreeJson> for Tree {
    type Error = TreeError;

    fn try_from(j: TreeJson) -> Result<Self, Self::Error> {
        if j.n == 0 {
            return Err(TreeError::Empty);
        }
        if j.left.len() != j.n || j.right.len() != j.n {
            return Err(TreeError::MapLength {
                expected: j.n,
                left: j.left.len(),
                right: j.right.len(),
            });
        }
        Tree::build(j.root, &j.left, &j.right)
    }
}

impl Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TreeJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = TreeJson::deserialize(d)?;
        Tree::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Literal form `v(L,R)`; leaves print as a bare label and empty slots as `·`.
impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Tok {
            Node(Vertex),
            Text(&'static str),
        }
        let mut stack = vec![Tok::Node(self.root)];
        while let Some(tok) = stack.pop() {
            match tok {
                Tok::Text(s) => f.write_str(s)?,
                Tok::Node(NIL) => f.write_str("·")?,
                Tok::Node(v) => {
                    write!(f, "{v}")?;
                    let (l, r) = (self.left[v as usize], self.right[v as usize]);
                    if l != NIL || r != NIL {
                        stack.push(Tok::Text(")"));
                        stack.push(Tok::Node(r));
                        stack.push(Tok::Text(","));
                        stack.push(Tok::Node(l));
                        stack.push(Tok::Text("("));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl FromStr for Tree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LiteralParser::new(s).parse()
    }
}

struct LiteralParser<'a> {
    src: &'a str,
    pos: usize,
    // (label, left, right) per parsed node
    nodes: Vec<(u64, Option<usize>, Option<usize>)>,
}

impl<'a> LiteralParser<'a> {
    fn new(src: &'a str) -> Self {
        LiteralParser {
            src,
            pos: 0,
            nodes: Vec::new(),
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, TreeError> {
        Err(TreeError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<(), TreeError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => self.err(format!("expected `{want}`, found `{c}`")),
            None => self.err(format!("expected `{want}`, found end of input")),
        }
    }

    fn parse(mut self) -> Result<Tree, TreeError> {
        if self.peek().is_none() {
            return Err(TreeError::Empty);
        }
        let root = match self.slot()? {
            Some(r) => r,
            None => return Err(TreeError::Empty),
        };
        if let Some(c) = self.peek() {
            return self.err(format!("trailing input starting at `{c}`"));
        }
        let n = self.nodes.len();
        let mut left = vec![NIL; n];
        let mut right = vec![NIL; n];
        let mut seen = vec![false; n + 1];
        let label = |i: usize| self.nodes[i].0;
        for &(v, l, r) in &self.nodes {
            if v == 0 || v as usize > n {
                return Err(TreeError::OutOfRange { vertex: v, n });
            }
            if std::mem::replace(&mut seen[v as usize], true) {
                return Err(TreeError::DuplicateChild { child: v as Vertex });
            }
            left[v as usize - 1] = l.map_or(NIL, |i| label(i) as Vertex);
            right[v as usize - 1] = r.map_or(NIL, |i| label(i) as Vertex);
        }
        Tree::build(label(root) as Vertex, &left, &right)
    }

    /// A node or an empty slot.
    fn slot(&mut self) -> Result<Option<usize>, TreeError> {
        match self.peek() {
            Some('·') | Some('.') => {
                self.pos += self.peek().unwrap().len_utf8();
                Ok(None)
            }
            Some(c) if c.is_ascii_digit() => self.node().map(Some),
            Some(',') | Some(')') => Ok(None),
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }

    fn node(&mut self) -> Result<usize, TreeError> {
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let label: u64 = match self.src[start..self.pos].parse() {
            Ok(v) => v,
            Err(_) => return self.err("label too large"),
        };
        let id = self.nodes.len();
        self.nodes.push((label, None, None));
        if self.peek() == Some('(') {
            self.pos += 1;
            let l = self.slot()?;
            self.expect(',')?;
            let r = self.slot()?;
            self.expect(')')?;
            self.nodes[id].1 = l;
            self.nodes[id].2 = r;
        }
        Ok(id)
    }
}

/// Every tree of `n` vertices, each shape exactly once, in rank order
/// (root label ascending, then left rank, then right rank).
pub fn enumerate_trees(n: usize) -> impl Iterator<Item = Tree> {
    assert!(n >= 1, "a tree needs at least one vertex");
    assert!(n <= catalan::MAX_U64_N, "too many shapes to enumerate");
    let table = catalan::CatalanTable::<u64>::new(n);
    let count = *table.get(n);
    (0..count).map(move |r| table.unrank(n, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig1() -> Tree {
        "9(3(2(1,·),7(5(4,6),8)),10)".parse().unwrap()
    }

    #[test]
    fn builds_figure_one_tree() {
        let t = fig1();
        assert_eq!(t.n(), 10);
        assert_eq!(t.root(), 9);
        assert_eq!(t.left(9), Some(3));
        assert_eq!(t.right(3), Some(7));
        assert_eq!(t.parent(4), Some(5));
        assert_eq!(t.inorder(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn single_vertex() {
        let t = Tree::build(1, &[0], &[0]).unwrap();
        assert_eq!(t, Tree::single());
        assert_eq!(t.chain_counts(), (1, 1));
        assert_eq!(t.shape_key().to_string(), "100");
    }

    #[test]
    fn build_error_kinds() {
        assert_eq!(
            Tree::build(1, &[2, 0], &[0, 0]),
            Err(TreeError::InfixViolation {
                position: 1,
                found: 2
            })
        );
        assert_eq!(
            Tree::build(2, &[1, 0], &[0, 1]),
            Err(TreeError::DuplicateChild { child: 1 })
        );
        assert_eq!(
            Tree::build(1, &[0, 0], &[0, 0]),
            Err(TreeError::Forest { vertex: 2, root: 1 })
        );
        // 2 -> 3 -> 2 is a cycle off to the side of root 1
        assert_eq!(
            Tree::build(1, &[0, 0, 2], &[0, 3, 0]),
            Err(TreeError::Cycle { vertex: 2 })
        );
        assert_eq!(
            Tree::build(1, &[1], &[0]),
            Err(TreeError::Cycle { vertex: 1 })
        );
        assert_eq!(
            Tree::build(1, &[3], &[0]),
            Err(TreeError::OutOfRange { vertex: 3, n: 1 })
        );
        assert_eq!(Tree::build(1, &[], &[]), Err(TreeError::Empty));
    }

    #[test]
    fn literal_rejects_wrong_labels() {
        assert!(matches!(
            "1(2,·)".parse::<Tree>(),
            Err(TreeError::InfixViolation { .. })
        ));
        assert!(matches!(
            "2(1,1)".parse::<Tree>(),
            Err(TreeError::DuplicateChild { child: 1 })
        ));
        assert!(matches!("3(1,·)".parse::<Tree>(), Err(TreeError::OutOfRange { .. })));
        assert!(matches!("2(1,".parse::<Tree>(), Err(TreeError::Syntax { .. })));
        assert!(matches!("2(1,·)x".parse::<Tree>(), Err(TreeError::Syntax { .. })));
    }

    #[test]
    fn literal_accepts_ascii_dot_and_explicit_leaves() {
        let a: Tree = "2(1,.)".parse().unwrap();
        let b: Tree = "2(1(·,·),·)".parse().unwrap();
        let c: Tree = " 2 ( 1 , ) ".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.to_string(), "2(1,·)");
    }

    #[test]
    fn intervals() {
        let t = fig1();
        assert_eq!(t.subtree_interval(7), Interval::new(4, 8));
        assert_eq!(t.subtree_interval(2), Interval::new(1, 2));
        assert_eq!(t.subtree_interval(9), Interval::new(1, 10));
        let all = t.intervals();
        for v in t.vertices() {
            assert_eq!(all[v as usize], t.subtree_interval(v));
        }
    }

    #[test]
    fn figure_one_chains() {
        let t = fig1();
        let left = t.maximal_chains(Side::Left);
        let right = t.maximal_chains(Side::Right);
        assert_eq!(t.chain_counts(), (5, 6));
        assert_eq!((left.len(), right.len()), (5, 6));
        let names = |cs: &[Chain]| cs.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        // deepest top first, ties by label
        assert_eq!(names(&left), ["[6]", "[8]", "[7-4]", "[10]", "[9-1]"]);
        assert_eq!(names(&right), ["[4]", "[1]", "[5-6]", "[2]", "[3-8]", "[9-10]"]);
        assert!(left.iter().all(|c| c.maximal));
    }

    #[test]
    fn chain_lookup() {
        let t = fig1();
        let c = t.chain(7, 5, Side::Left).unwrap();
        assert_eq!(c.vertices, vec![7, 5]);
        assert!(!c.maximal);
        assert!(t.chain(7, 4, Side::Left).unwrap().maximal);
        assert!(t.chain(7, 6, Side::Left).is_none());
    }

    #[test]
    fn shape_key_examples() {
        let t = fig1();
        let key = t.shape_key();
        assert_eq!(key.to_string(), "111100011100100100100");
        assert_eq!(key.len(), 21);
        assert_eq!(key.to_tree().unwrap(), t);
        assert_eq!(Tree::from_packed(10, t.packed_key().unwrap()).unwrap(), t);
        assert!("10".parse::<ShapeKey>().is_err());
        assert!("1".parse::<ShapeKey>().is_err());
        assert!("110".parse::<ShapeKey>().is_err());
        assert!("10000".parse::<ShapeKey>().is_err());
        assert!("0".parse::<ShapeKey>().is_err());
    }

    #[test]
    fn complete_chain_keys() {
        let t = Tree::complete_chain(10, Side::Left);
        assert_eq!(
            t.shape_key().to_string(),
            format!("{}{}", "1".repeat(10), "0".repeat(11))
        );
        assert_eq!(t.to_string(), "10(9(8(7(6(5(4(3(2(1,·),·),·),·),·),·),·),·),·)");
        assert_eq!(Tree::complete_chain(3, Side::Right).to_string(), "1(·,2(·,3))");
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(enumerate_trees(1).count(), 1);
        assert_eq!(enumerate_trees(3).count(), 5);
        assert_eq!(enumerate_trees(10).count(), 16796);
    }

    #[test]
    fn json_and_auto_detect() {
        let t = fig1();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(Tree::parse_any(&json).unwrap(), t);
        assert_eq!(Tree::parse_any("111100011100100100100").unwrap(), t);
        assert_eq!(Tree::parse_any(&t.to_string()).unwrap(), t);
        assert!(matches!(
            Tree::parse_any(r#"{"n":2,"root":1,"left":[2,0],"right":[0,0]}"#),
            Err(TreeError::InfixViolation { .. })
        ));
    }
}
