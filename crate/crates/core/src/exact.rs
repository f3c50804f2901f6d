//! Exact chain and rotation distances by breadth-first search over the move
//! graph: one vertex per tree shape of size `n` (Catalan(n) of them), one
//! edge per move. Every move has an inverse, so the graph is undirected.
//!
//! States are identified by their packed shape code, so `n` is limited to 31
//! here and, more practically, by the configured caps.
//!
//! Search levels are expanded in parallel and merged at level boundaries.
//! Distances are deterministic; when several optimal scripts exist, which one
//! is returned as the witness is not.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::Script;
use crate::catalan;
use crate::decompose;
use crate::moves::{apply, for_each_move, Move, MoveSet};
use crate::par::Exec;
use crate::tree::{enumerate_trees, ShapeKey, Tree, MAX_PACKED_N};

#[derive(Debug, Clone)]
pub struct ExactConfig {
    /// Largest `n` accepted by [`distance`].
    pub max_n_distance: usize,
    /// Largest `n` for a full single-source sweep with chain rotations.
    pub max_n_sssp_crot: usize,
    /// Largest `n` for a full single-source sweep with rotations.
    pub max_n_sssp_rot: usize,
    /// Largest `n` for [`audit`].
    pub max_n_audit: usize,
    /// Largest `n` for [`diameter`].
    pub max_n_diameter: usize,
    /// Random triples checked for the triangle inequality during an audit.
    pub triangle_samples: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            max_n_distance: 12,
            max_n_sssp_crot: 11,
            max_n_sssp_rot: 12,
            max_n_audit: 8,
            max_n_diameter: 10,
            triangle_samples: 100_000,
            seed: 0x5eed,
            exec: Exec::default(),
        }
    }
}

impl ExactConfig {
    /// Every cap set to `max_n`.
    pub fn with_max_n(mut self, max_n: usize) -> Self {
        self.max_n_distance = max_n;
        self.max_n_sssp_crot = max_n;
        self.max_n_sssp_rot = max_n;
        self.max_n_audit = max_n;
        self.max_n_diameter = max_n;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    fn sssp_cap(&self, set: MoveSet) -> usize {
        match set {
            MoveSet::Crot => self.max_n_sssp_crot,
            MoveSet::Rot => self.max_n_sssp_rot,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("size mismatch: {0} vs {1} vertices")]
    SizeMismatch(usize, usize),
    #[error(
        "refusing {what} at n={n} (cap {cap}): the move graph has Catalan({n}) = {states} states; raise --max-n to proceed"
    )]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
        states: String,
    },
}

fn cap_check(what: &'static str, n: usize, cap: usize) -> Result<(), ExactError> {
    let cap = cap.min(MAX_PACKED_N);
    if n > cap {
        return Err(ExactError::CapExceeded {
            what,
            n,
            cap,
            states: catalan::catalan(n).to_string(),
        });
    }
    Ok(())
}

fn pack(t: &Tree) -> u64 {
    t.packed_key().expect("state space limited to n <= 31")
}

fn unpack(n: usize, key: u64) -> Tree {
    Tree::from_packed(n, key).expect("packed key of a generated tree")
}

/// Trees one move away from `tree`, with the move that reaches them.
fn neighbours(tree: &Tree, set: MoveSet) -> Vec<(u64, Move)> {
    let mut out = Vec::new();
    for_each_move(tree, set, |m| {
        let next = apply(tree, &m).expect("enumerated move is legal");
        out.push((pack(&next), m));
    });
    out
}

#[derive(Debug, Clone, Copy)]
struct Link {
    parent: u64,
    mv: Option<Move>,
    depth: u32,
}

type Links = FxHashMap<u64, Link>;

fn root_links(key: u64) -> Links {
    let mut m = Links::default();
    m.insert(
        key,
        Link {
            parent: key,
            mv: None,
            depth: 0,
        },
    );
    m
}

/// Expands one BFS level: `(found, from, move)` for every move out of the
/// frontier.
fn expand(n: usize, frontier: &[u64], set: MoveSet, exec: Exec) -> Vec<Vec<(u64, u64, Move)>> {
    exec.map(frontier, |&x| {
        let tree = unpack(n, x);
        neighbours(&tree, set)
            .into_iter()
            .map(|(y, m)| (y, x, m))
            .collect()
    })
}

/// Moves along `links` from the root of the search to `key`.
fn path_to(links: &Links, mut key: u64) -> Vec<Move> {
    let mut moves = Vec::new();
    while let Some(Link { parent, mv: Some(m), .. }) = links.get(&key) {
        moves.push(*m);
        key = *parent;
    }
    moves.reverse();
    moves
}

fn same_size(s: &Tree, t: &Tree) -> Result<usize, ExactError> {
    if s.n() != t.n() {
        return Err(ExactError::SizeMismatch(s.n(), t.n()));
    }
    Ok(s.n())
}

/// Exact distance between `s` and `t` under `set`, with an optimal script.
///
/// Bidirectional search: the smaller frontier is expanded one full level at a
/// time, and the best meeting point of that level gives the distance.
pub fn distance(
    s: &Tree,
    t: &Tree,
    set: MoveSet,
    cfg: &ExactConfig,
) -> Result<(usize, Script), ExactError> {
    let n = same_size(s, t)?;
    cap_check("distance", n, cfg.max_n_distance)?;
    let (sk, tk) = (pack(s), pack(t));
    if sk == tk {
        return Ok((0, Script::empty(s)));
    }
    let mut fwd = root_links(sk);
    let mut bwd = root_links(tk);
    let mut fwd_front = vec![sk];
    let mut bwd_front = vec![tk];
    let mut fwd_depth = 0u32;
    let mut bwd_depth = 0u32;
    loop {
        let forward = fwd_front.len() <= bwd_front.len();
        let (this, other, front, depth) = if forward {
            (&mut fwd, &bwd, &mut fwd_front, &mut fwd_depth)
        } else {
            (&mut bwd, &fwd, &mut bwd_front, &mut bwd_depth)
        };
        let found = expand(n, front, set, cfg.exec);
        let mut next = Vec::new();
        let mut best: Option<(u32, u64)> = None;
        for (y, x, m) in found.into_iter().flatten() {
            if this.contains_key(&y) {
                continue;
            }
            // backward links store the move leading back towards t
            let mv = if forward { m } else { m.invert() };
            this.insert(
                y,
                Link {
                    parent: x,
                    mv: Some(mv),
                    depth: *depth + 1,
                },
            );
            next.push(y);
            if let Some(o) = other.get(&y) {
                let total = *depth + 1 + o.depth;
                if best.is_none_or(|(b, _)| total < b) {
                    best = Some((total, y));
                }
            }
        }
        *depth += 1;
        *front = next;
        if let Some((total, meet)) = best {
            let mut moves = path_to(&fwd, meet);
            let mut tail = path_to(&bwd, meet);
            tail.reverse();
            moves.extend(tail);
            debug_assert_eq!(moves.len(), total as usize);
            let script = Script {
                start: s.shape_key(),
                end: t.shape_key(),
                moves,
            };
            return Ok((total as usize, script));
        }
        assert!(!front.is_empty(), "move graph is disconnected");
    }
}

/// Plain breadth-first search from `s` until `t` is reached.
pub fn distance_unidirectional(
    s: &Tree,
    t: &Tree,
    set: MoveSet,
    cfg: &ExactConfig,
) -> Result<(usize, Script), ExactError> {
    let n = same_size(s, t)?;
    cap_check("distance", n, cfg.max_n_distance)?;
    let (sk, tk) = (pack(s), pack(t));
    let mut links = root_links(sk);
    let mut front = vec![sk];
    let mut depth = 0;
    while !links.contains_key(&tk) {
        assert!(!front.is_empty(), "move graph is disconnected");
        let mut next = Vec::new();
        for (y, x, m) in expand(n, &front, set, cfg.exec).into_iter().flatten() {
            if let std::collections::hash_map::Entry::Vacant(e) = links.entry(y) {
                e.insert(Link {
                    parent: x,
                    mv: Some(m),
                    depth: depth + 1,
                });
                next.push(y);
            }
        }
        front = next;
        depth += 1;
    }
    let moves = path_to(&links, tk);
    Ok((
        moves.len(),
        Script {
            start: s.shape_key(),
            end: t.shape_key(),
            moves,
        },
    ))
}

/// Distances from one source to every shape of the same size.
#[derive(Debug, Clone)]
pub struct Sssp {
    pub n: usize,
    dist: FxHashMap<u64, u32>,
}

impl Sssp {
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn get(&self, t: &Tree) -> Option<u32> {
        if t.n() != self.n {
            return None;
        }
        self.dist.get(&pack(t)).copied()
    }

    pub fn max(&self) -> u32 {
        self.dist.values().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ShapeKey, u32)> + '_ {
        self.dist
            .iter()
            .map(|(&k, &d)| (unpack(self.n, k).shape_key(), d))
    }
}

pub fn sssp(s: &Tree, set: MoveSet, cfg: &ExactConfig) -> Result<Sssp, ExactError> {
    let n = s.n();
    cap_check("sssp", n, cfg.sssp_cap(set))?;
    let sk = pack(s);
    let mut dist = FxHashMap::default();
    dist.insert(sk, 0u32);
    let mut front = vec![sk];
    let mut depth = 0;
    while !front.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for (y, _, _) in expand(n, &front, set, cfg.exec).into_iter().flatten() {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(y) {
                e.insert(depth);
                next.push(y);
            }
        }
        front = next;
    }
    Ok(Sssp { n, dist })
}

/// The move graph on all shapes of size `n`, materialized as adjacency
/// lists over shape ranks.
#[derive(Debug, Clone)]
pub struct MoveGraph {
    pub n: usize,
    pub set: MoveSet,
    keys: Vec<u64>,
    index: FxHashMap<u64, u32>,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl MoveGraph {
    pub fn build(n: usize, set: MoveSet, exec: Exec) -> MoveGraph {
        assert!((1..=MAX_PACKED_N).contains(&n));
        let trees: Vec<Tree> = enumerate_trees(n).collect();
        let keys: Vec<u64> = exec.map(&trees, pack);
        let index: FxHashMap<u64, u32> = keys
            .iter()
            .enumerate()
            .map(|(i, &k)| (k, i as u32))
            .collect();
        let adjacency: Vec<Vec<u32>> = exec.map(&trees, |t| {
            let mut nb: Vec<u32> = neighbours(t, set)
                .into_iter()
                .map(|(k, _)| index[&k])
                .collect();
            nb.sort_unstable();
            nb.dedup();
            nb
        });
        let mut offsets = Vec::with_capacity(keys.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for nb in adjacency {
            targets.extend(nb);
            offsets.push(targets.len() as u32);
        }
        MoveGraph {
            n,
            set,
            keys,
            index,
            offsets,
            targets,
        }
    }

    /// Number of shapes.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn index_of(&self, t: &Tree) -> Option<usize> {
        if t.n() != self.n {
            return None;
        }
        self.index.get(&pack(t)).map(|&i| i as usize)
    }

    pub fn tree(&self, i: usize) -> Tree {
        unpack(self.n, self.keys[i])
    }

    pub fn neighbours(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// BFS distances from `src` into `dist` (`u8::MAX` = unreached).
    pub fn bfs_into(&self, src: usize, dist: &mut [u8], queue: &mut Vec<u32>) {
        dist.fill(u8::MAX);
        queue.clear();
        dist[src] = 0;
        queue.push(src as u32);
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head] as usize;
            head += 1;
            let d = dist[x] + 1;
            for &y in self.neighbours(x) {
                if dist[y as usize] == u8::MAX {
                    dist[y as usize] = d;
                    queue.push(y);
                }
            }
        }
    }

    pub fn distances_from(&self, src: usize) -> Vec<u8> {
        let mut dist = vec![0; self.len()];
        self.bfs_into(src, &mut dist, &mut Vec::new());
        dist
    }

    /// Row-major all-pairs distance matrix.
    pub fn all_pairs(&self, exec: Exec) -> DistanceMatrix {
        let v = self.len();
        let rows = exec.map_range_with(
            0..v,
            || Vec::with_capacity(v),
            |queue, i| {
                let mut row = vec![0; v];
                self.bfs_into(i, &mut row, queue);
                row
            },
        );
        DistanceMatrix {
            size: v,
            data: rows.concat(),
        }
    }

    /// Eccentricity of every shape, 64 sources at a time: each vertex carries
    /// one bit per source in the batch, and a level of the search is a single
    /// pull over the adjacency lists.
    pub fn eccentricities(&self, exec: Exec) -> Vec<u32> {
        let v = self.len();
        let batches = v.div_ceil(64);
        let scratch = || (vec![0u64; v], vec![0u64; v], vec![0u64; v]);
        exec.map_range_with(0..batches, scratch, |(visited, frontier, next), b| {
            let base = b * 64;
            let count = (v - base).min(64);
            visited.fill(0);
            frontier.fill(0);
            for i in 0..count {
                visited[base + i] = 1 << i;
                frontier[base + i] = 1 << i;
            }
            let mut ecc = [0u32; 64];
            let mut level = 0;
            loop {
                level += 1;
                let mut any = 0u64;
                for x in 0..v {
                    let mut acc = 0u64;
                    for &y in self.neighbours(x) {
                        acc |= frontier[y as usize];
                    }
                    acc &= !visited[x];
                    next[x] = acc;
                    any |= acc;
                }
                if any == 0 {
                    break;
                }
                let mut bits = any;
                while bits != 0 {
                    ecc[bits.trailing_zeros() as usize] = level;
                    bits &= bits - 1;
                }
                for x in 0..v {
                    visited[x] |= next[x];
                }
                std::mem::swap(frontier, next);
            }
            ecc[..count].to_vec()
        })
        .concat()
    }

    /// Graphviz form, one node per shape labelled by its literal.
    pub fn to_dot(&self) -> String {
        let mut out = format!("graph move_graph_{}_n{} {{\n", self.set, self.n);
        for i in 0..self.len() {
            let _ = writeln!(out, "  s{i} [label=\"{}\"];", self.tree(i));
        }
        for i in 0..self.len() {
            for &j in self.neighbours(i) {
                if (i as u32) < j {
                    let _ = writeln!(out, "  s{i} -- s{j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<u8>,
}

impl DistanceMatrix {
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.size + j] as u32
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.size..(i + 1) * self.size]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diameter {
    pub n: usize,
    pub moves: MoveSet,
    pub diameter: u32,
    pub s: Tree,
    pub t: Tree,
    pub shapes: usize,
    pub edges: usize,
}

/// Largest exact distance between two shapes of size `n`, with a witness.
pub fn diameter(n: usize, set: MoveSet, cfg: &ExactConfig) -> Result<Diameter, ExactError> {
    cap_check("diameter", n, cfg.max_n_diameter)?;
    let graph = MoveGraph::build(n, set, cfg.exec);
    Ok(diameter_of(&graph, cfg.exec))
}

pub fn diameter_of(graph: &MoveGraph, exec: Exec) -> Diameter {
    let ecc = graph.eccentricities(exec);
    let (src, &d) = ecc
        .iter()
        .enumerate()
        .max_by_key(|&(i, &e)| (e, std::cmp::Reverse(i)))
        .unwrap();
    let dist = graph.distances_from(src);
    let far = dist.iter().position(|&x| x as u32 == d).unwrap();
    Diameter {
        n: graph.n,
        moves: graph.set,
        diameter: d,
        s: graph.tree(src),
        t: graph.tree(far),
        shapes: graph.len(),
        edges: graph.edge_count(),
    }
}

/// One failed check of the audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub s: ShapeKey,
    pub t: ShapeKey,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditivityCase {
    pub s: ShapeKey,
    pub t: ShapeKey,
    pub e: usize,
    pub whole: u32,
    pub parts: Vec<u32>,
    pub parts_sum: u32,
}

/// How the chain distance of a pair with equivalent edges compares with the
/// sum over its split pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Additivity {
    pub pairs_with_equivalent_edges: u64,
    pub additive: u64,
    pub whole_below_sum: u64,
    pub whole_above_sum: u64,
    /// First non-additive pairs found, in source order.
    pub examples: Vec<AdditivityCase>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleCheck {
    pub samples: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub n: usize,
    pub shapes: usize,
    pub pairs: u64,
    /// Total failed checks; `violations` lists the first ones verbatim.
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub symmetric: bool,
    pub max_chain_distance: u32,
    pub max_rotation_distance: u32,
    pub max_lower_bound: u32,
    pub max_upper_bound: u32,
    /// Pairs where the chain distance equals the lower (upper) bound.
    pub lower_bound_tight: u64,
    pub upper_bound_tight: u64,
    /// Pairs with no equivalent edges.
    pub pairs_without_equivalent_edges: u64,
    /// `chain_histogram[d]` = ordered pairs at chain distance `d`.
    pub chain_histogram: Vec<u64>,
    pub rotation_histogram: Vec<u64>,
    pub triangle: TriangleCheck,
    pub additivity: Additivity,
}

const MAX_LISTED: usize = 64;

#[derive(Default)]
struct Partial {
    pairs: u64,
    violation_count: u64,
    violations: Vec<Violation>,
    symmetric: bool,
    max_c: u32,
    max_d: u32,
    max_lb: u32,
    max_ub: u32,
    lb_tight: u64,
    ub_tight: u64,
    no_equiv: u64,
    c_hist: Vec<u64>,
    d_hist: Vec<u64>,
    additivity: Additivity,
}

impl Partial {
    fn violation(&mut self, check: &str, s: &Tree, t: &Tree, detail: String) {
        self.violation_count += 1;
        if self.violations.len() < MAX_LISTED {
            self.violations.push(Violation {
                check: check.into(),
                s: s.shape_key(),
                t: t.shape_key(),
                detail,
            });
        }
    }

    fn merge(&mut self, o: Partial) {
        self.pairs += o.pairs;
        self.violation_count += o.violation_count;
        let room = MAX_LISTED.saturating_sub(self.violations.len());
        self.violations.extend(o.violations.into_iter().take(room));
        self.symmetric &= o.symmetric;
        self.max_c = self.max_c.max(o.max_c);
        self.max_d = self.max_d.max(o.max_d);
        self.max_lb = self.max_lb.max(o.max_lb);
        self.max_ub = self.max_ub.max(o.max_ub);
        self.lb_tight += o.lb_tight;
        self.ub_tight += o.ub_tight;
        self.no_equiv += o.no_equiv;
        add_hist(&mut self.c_hist, &o.c_hist);
        add_hist(&mut self.d_hist, &o.d_hist);
        let a = &mut self.additivity;
        a.pairs_with_equivalent_edges += o.additivity.pairs_with_equivalent_edges;
        a.additive += o.additivity.additive;
        a.whole_below_sum += o.additivity.whole_below_sum;
        a.whole_above_sum += o.additivity.whole_above_sum;
        let room = MAX_LISTED.saturating_sub(a.examples.len());
        a.examples
            .extend(o.additivity.examples.into_iter().take(room));
    }
}

fn add_hist(into: &mut Vec<u64>, from: &[u64]) {
    if into.len() < from.len() {
        into.resize(from.len(), 0);
    }
    for (a, b) in into.iter_mut().zip(from) {
        *a += b;
    }
}

fn bump(hist: &mut Vec<u64>, d: u32) {
    let d = d as usize;
    if hist.len() <= d {
        hist.resize(d + 1, 0);
    }
    hist[d] += 1;
}

/// Exact chain distances for every size below `n`, used to score split pairs.
struct SmallTables {
    graphs: Vec<MoveGraph>,
    dists: Vec<DistanceMatrix>,
}

impl SmallTables {
    fn new(max_m: usize, exec: Exec) -> Self {
        let graphs: Vec<MoveGraph> = (1..=max_m)
            .map(|m| MoveGraph::build(m, MoveSet::Crot, exec))
            .collect();
        let dists = graphs.iter().map(|g| g.all_pairs(exec)).collect();
        SmallTables { graphs, dists }
    }

    fn chain_distance(&self, s: &Tree, t: &Tree) -> u32 {
        let g = &self.graphs[s.n() - 1];
        let (i, j) = (g.index_of(s).unwrap(), g.index_of(t).unwrap());
        self.dists[s.n() - 1].get(i, j)
    }
}

/// Sorted non-root subtree intervals, packed for merging.
fn edge_intervals(t: &Tree) -> Vec<u64> {
    let iv = t.intervals();
    let mut out: Vec<u64> = t
        .vertices()
        .filter(|&v| v != t.root())
        .map(|v| (iv[v as usize].lo as u64) << 32 | iv[v as usize].hi as u64)
        .collect();
    out.sort_unstable();
    out
}

fn common_count(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Checks every ordered pair of shapes of size `n` against the bounds:
/// `|L_s-L_t| <= C <= min(L_s+L_t-2, R_s+R_t-2) <= n-1`, `C <= D`,
/// `D >= n-1` when there are no equivalent edges, symmetry of `C`, and a
/// sample of triangle inequalities. Also measures whether `C` adds up over
/// the split pairs of every pair with equivalent edges.
pub fn audit(n: usize, cfg: &ExactConfig) -> Result<AuditReport, ExactError> {
    cap_check("audit", n, cfg.max_n_audit)?;
    let exec = cfg.exec;
    let crot = MoveGraph::build(n, MoveSet::Crot, exec);
    let rot = MoveGraph::build(n, MoveSet::Rot, exec);
    let c = crot.all_pairs(exec);
    let d = rot.all_pairs(exec);
    let small = SmallTables::new(n.saturating_sub(1), exec);

    let v = crot.len();
    let trees: Vec<Tree> = (0..v).map(|i| crot.tree(i)).collect();
    debug_assert!((0..v).all(|i| rot.index_of(&trees[i]) == Some(i)));
    let counts: Vec<(usize, usize)> = trees.iter().map(|t| t.chain_counts()).collect();
    let intervals: Vec<Vec<u64>> = exec.map(&trees, edge_intervals);
    let cap = n.saturating_sub(1) as u32;

    let partials = exec.map_range(0..v, |i| {
        let mut p = Partial {
            symmetric: true,
            ..Partial::default()
        };
        let s = &trees[i];
        let (ls, rs) = counts[i];
        for j in 0..v {
            let t = &trees[j];
            let (lt, rt) = counts[j];
            let cd = c.get(i, j);
            let dd = d.get(i, j);
            let lb = ls.abs_diff(lt) as u32;
            let ub = (ls + lt - 2).min(rs + rt - 2) as u32;
            let e = common_count(&intervals[i], &intervals[j]);
            p.pairs += 1;
            bump(&mut p.c_hist, cd);
            bump(&mut p.d_hist, dd);
            p.max_c = p.max_c.max(cd);
            p.max_d = p.max_d.max(dd);
            p.max_lb = p.max_lb.max(lb);
            p.max_ub = p.max_ub.max(ub);
            p.lb_tight += u64::from(cd == lb);
            p.ub_tight += u64::from(cd == ub);
            if lb > cd {
                p.violation("lower<=C", s, t, format!("lower {lb} > C {cd}"));
            }
            if cd > ub {
                p.violation("C<=upper", s, t, format!("C {cd} > upper {ub}"));
            }
            if ub > cap {
                p.violation("upper<=n-1", s, t, format!("upper {ub} > {cap}"));
            }
            if cd > dd {
                p.violation("C<=D", s, t, format!("C {cd} > D {dd}"));
            }
            if c.get(j, i) != cd {
                p.symmetric = false;
                p.violation("symmetry", s, t, format!("C {cd} vs {}", c.get(j, i)));
            }
            if e == 0 {
                p.no_equiv += 1;
                if dd < cap {
                    p.violation("D>=n-1 (e=0)", s, t, format!("D {dd} < {cap}"));
                }
            } else {
                let parts = decompose::split(s, t).expect("equal sizes");
                debug_assert_eq!(parts.len(), e + 1);
                let scores: Vec<u32> = parts
                    .iter()
                    .map(|sp| small.chain_distance(&sp.s_part, &sp.t_part))
                    .collect();
                let sum: u32 = scores.iter().sum();
                let a = &mut p.additivity;
                a.pairs_with_equivalent_edges += 1;
                match cd.cmp(&sum) {
                    std::cmp::Ordering::Equal => a.additive += 1,
                    std::cmp::Ordering::Less => a.whole_below_sum += 1,
                    std::cmp::Ordering::Greater => a.whole_above_sum += 1,
                }
                if cd != sum && a.examples.len() < MAX_LISTED {
                    a.examples.push(AdditivityCase {
                        s: s.shape_key(),
                        t: t.shape_key(),
                        e,
                        whole: cd,
                        parts: scores,
                        parts_sum: sum,
                    });
                }
            }
        }
        p
    });

    let mut total = Partial {
        symmetric: true,
        ..Partial::default()
    };
    for p in partials {
        total.merge(p);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut triangle = TriangleCheck::default();
    for _ in 0..cfg.triangle_samples {
        let (a, b, x) = (rng.gen_range(0..v), rng.gen_range(0..v), rng.gen_range(0..v));
        triangle.samples += 1;
        if c.get(a, x) > c.get(a, b) + c.get(b, x) {
            triangle.violations += 1;
            total.violation(
                "triangle",
                &trees[a],
                &trees[x],
                format!("via {}: {} > {} + {}", trees[b], c.get(a, x), c.get(a, b), c.get(b, x)),
            );
        }
    }

    Ok(AuditReport {
        n,
        shapes: v,
        pairs: total.pairs,
        violation_count: total.violation_count,
        violations: total.violations,
        symmetric: total.symmetric,
        max_chain_distance: total.max_c,
        max_rotation_distance: total.max_d,
        max_lower_bound: total.max_lb,
        max_upper_bound: total.max_ub,
        lower_bound_tight: total.lb_tight,
        upper_bound_tight: total.ub_tight,
        pairs_without_equivalent_edges: total.no_equiv,
        chain_histogram: total.c_hist,
        rotation_histogram: total.d_hist,
        triangle,
        additivity: total.additivity,
    })
}
