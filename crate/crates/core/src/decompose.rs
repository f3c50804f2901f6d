//! Equivalent edges and the split of a tree pair into independent pairs.
//!
//! An edge of `S` and an edge of `T` are equivalent when the subtrees below
//! them span the same label interval. Cutting every such pair of edges breaks
//! `(S, T)` into `e + 1` pairs: one for the region above all cuts and one for
//! each equivalent interval, with the nested equivalent subtrees removed.
//! Each part is relabelled to `1..m` by infix rank.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::tree::{Interval, Tree, TreeError, Vertex, NIL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquivalentEdgePair {
    pub interval: Interval,
    /// `(parent, child)` in `S`.
    pub s_edge: (Vertex, Vertex),
    /// `(parent, child)` in `T`.
    pub t_edge: (Vertex, Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPair {
    /// Region of the original trees this pair came from; `[1,n]` for the
    /// top region.
    pub interval: Interval,
    pub s_part: Tree,
    pub t_part: Tree,
    /// `label_map[i]` is the original vertex behind label `i + 1`.
    pub label_map: Vec<Vertex>,
}

fn check_sizes(s: &Tree, t: &Tree) -> Result<(), TreeError> {
    if s.n() != t.n() {
        return Err(TreeError::SizeMismatch(s.n(), t.n()));
    }
    Ok(())
}

/// All equivalent edge pairs, ordered by interval.
pub fn equivalent_edges(s: &Tree, t: &Tree) -> Result<Vec<EquivalentEdgePair>, TreeError> {
    check_sizes(s, t)?;
    let si = s.intervals();
    let ti = t.intervals();
    let t_by_interval: FxHashMap<Interval, Vertex> = t
        .vertices()
        .filter(|&v| v != t.root())
        .map(|v| (ti[v as usize], v))
        .collect();
    let mut out: Vec<EquivalentEdgePair> = s
        .vertices()
        .filter(|&v| v != s.root())
        .filter_map(|v| {
            let iv = si[v as usize];
            t_by_interval.get(&iv).map(|&tv| EquivalentEdgePair {
                interval: iv,
                s_edge: (s.parent(v).unwrap(), v),
                t_edge: (t.parent(tv).unwrap(), tv),
            })
        })
        .collect();
    out.sort_by_key(|p| p.interval);
    Ok(out)
}

/// Number of equivalent edge pairs.
pub fn count_equivalent(s: &Tree, t: &Tree) -> Result<usize, TreeError> {
    Ok(equivalent_edges(s, t)?.len())
}

/// Splits `(s, t)` at every equivalent edge pair. Pairs come innermost first
/// (by interval length, then position); the top region comes last.
pub fn split(s: &Tree, t: &Tree) -> Result<Vec<SplitPair>, TreeError> {
    let edges = equivalent_edges(s, t)?;
    let n = s.n();
    let mut cut_s = vec![false; n + 1];
    let mut cut_t = vec![false; n + 1];
    for e in &edges {
        cut_s[e.s_edge.1 as usize] = true;
        cut_t[e.t_edge.1 as usize] = true;
    }
    let mut regions: Vec<(Interval, Vertex, Vertex)> = edges
        .iter()
        .map(|e| (e.interval, e.s_edge.1, e.t_edge.1))
        .collect();
    regions.sort_by_key(|(iv, _, _)| (iv.len(), iv.lo));
    regions.push((Interval::new(1, n as Vertex), s.root(), t.root()));

    let mut relabel = vec![0 as Vertex; n + 1];
    let mut out = Vec::with_capacity(regions.len());
    for (interval, s_top, t_top) in regions {
        let label_map = part_inorder(s, s_top, &cut_s);
        for (i, &v) in label_map.iter().enumerate() {
            relabel[v as usize] = i as Vertex + 1;
        }
        let s_part = extract(s, s_top, &cut_s, &label_map, &relabel);
        let t_part = extract(t, t_top, &cut_t, &label_map, &relabel);
        debug_assert_eq!(part_inorder(t, t_top, &cut_t), label_map);
        out.push(SplitPair {
            interval,
            s_part,
            t_part,
            label_map,
        });
    }
    Ok(out)
}

/// In-order vertices below `top`, skipping subtrees hanging from cut edges.
fn part_inorder(tree: &Tree, top: Vertex, cut: &[bool]) -> Vec<Vertex> {
    let keep = |c: Option<Vertex>| c.filter(|&c| !cut[c as usize]).unwrap_or(NIL);
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let mut cur = top;
    loop {
        while cur != NIL {
            stack.push(cur);
            cur = keep(tree.left(cur));
        }
        match stack.pop() {
            Some(v) => {
                out.push(v);
                cur = keep(tree.right(v));
            }
            None => break,
        }
    }
    out
}

fn extract(
    tree: &Tree,
    top: Vertex,
    cut: &[bool],
    members: &[Vertex],
    relabel: &[Vertex],
) -> Tree {
    let m = members.len();
    let map = |c: Option<Vertex>| match c {
        Some(c) if !cut[c as usize] => relabel[c as usize],
        _ => NIL,
    };
    let mut left = vec![NIL; m];
    let mut right = vec![NIL; m];
    for &v in members {
        let i = relabel[v as usize] as usize - 1;
        left[i] = map(tree.left(v));
        right[i] = map(tree.right(v));
    }
    Tree::build(relabel[top as usize], &left, &right).expect("split part is a valid tree")
}
