//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Expected values come from independent oracles written here (pointer
//! diffs, slot counts, direct graph sweeps) or from the worked
//! example, not from the functions under test.

use std::io::Write;
use std::time::{Duration, Instant};

use chainrot::exact::{self, ExactConfig, MoveGraph};
use chainrot::{
    apply, chain_lower_bound, chain_upper_bound, enumerate_moves, equivalent_edges, figure4_pair,
    pointer_delta, random_tree, rotleft, rotright, transform_script, verify_script, Move, MoveSet,
    Side, Tree,
};

type Outcome = Result<String, String>;

fn report(id: u32, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let mut outcome = f();
    let took = start.elapsed();
    if let (Ok(msg), Some(limit)) = (&outcome, limit) {
        if took > limit {
            outcome = Err(format!("{msg}; took {took:.2?}, limit {limit:?}"));
        }
    }
    let line = match &outcome {
        Ok(msg) => format!("criterion {id} PASS [{took:.2?}] {title}: {msg}\n"),
        Err(msg) => format!("criterion {id} FAIL [{took:.2?}] {title}: {msg}\n"),
    };
    // Written to the raw handle so the line shows even when output is captured.
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(msg) = outcome {
        panic!("criterion {id} failed: {msg}");
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn catalan_oracle(n: usize) -> u64 {
    let mut c = vec![1u64; n + 1];
    for m in 1..=n {
        c[m] = (0..m).map(|k| c[k] * c[m - 1 - k]).sum();
    }
    c[n]
}

fn shapes(n: usize) -> Vec<Tree> {
    chainrot::enumerate_trees(n).collect()
}

/// `(L, R)` straight from the pointer arrays: a maximal left chain starts at
/// the root or at a right child, and symmetrically.
fn counts_oracle(t: &Tree) -> (usize, usize) {
    let (left, right) = t.child_arrays();
    let l = 1 + right.iter().filter(|&&x| x != 0).count();
    let r = 1 + left.iter().filter(|&&x| x != 0).count();
    (l, r)
}

/// Number of pointer slots (child slots plus the root) that differ.
fn slot_diff(a: &Tree, b: &Tree) -> usize {
    let (al, ar) = a.child_arrays();
    let (bl, br) = b.child_arrays();
    let kids = al.iter().zip(&bl).filter(|(x, y)| x != y).count()
        + ar.iter().zip(&br).filter(|(x, y)| x != y).count();
    kids + usize::from(a.root() != b.root())
}

fn fig1() -> Tree {
    "9(3(2(1,·),7(5(4,6),8)),10)".parse().unwrap()
}

fn default_cfg() -> exact::ExactConfig {
    ExactConfig::default()
}

#[test]
fn criterion_1_chain_count_identity() {
    report(1, "L + R = n + 1", Some(Duration::from_secs(5)), || {
        let mut checked = 0usize;
        for n in 1..=8 {
            let all = shapes(n);
            ensure!(
                all.len() as u64 == catalan_oracle(n),
                "n={n}: {} shapes, expected {}",
                all.len(),
                catalan_oracle(n)
            );
            for t in &all {
                let (l, r) = t.chain_counts();
                ensure!(l + r == n + 1, "{t}: L={l} R={r}");
                ensure!((l, r) == counts_oracle(t), "{t}: counts disagree with pointer count");
                ensure!(
                    t.maximal_chains(Side::Left).len() == l
                        && t.maximal_chains(Side::Right).len() == r,
                    "{t}: maximal chain lists disagree with counts"
                );
                checked += 1;
            }
        }
        for n in [16, 32, 64] {
            for seed in 0..1000u64 {
                let t = random_tree(n, seed ^ (n as u64) << 32);
                let (l, r) = t.chain_counts();
                ensure!(l + r == n + 1, "n={n} seed={seed}: L={l} R={r}");
                ensure!((l, r) == counts_oracle(&t), "n={n} seed={seed}: oracle mismatch");
                checked += 1;
            }
        }
        Ok(format!("{checked} trees"))
    });
}

#[test]
fn criterion_2_three_pointer_property() {
    report(2, "every move changes 3 pointers", Some(Duration::from_secs(10)), || {
        let mut moves = 0usize;
        for n in 1..=7 {
            let all = shapes(n);
            if n == 7 {
                ensure!(all.len() == 429, "expected 429 shapes, got {}", all.len());
            }
            for t in &all {
                for set in [MoveSet::Rot, MoveSet::Crot] {
                    for m in enumerate_moves(t, set) {
                        let post = apply(t, &m).map_err(|e| format!("{t} {m}: {e}"))?;
                        let (l, r) = post.child_arrays();
                        ensure!(
                            post.check_infix() && Tree::build(post.root(), &l, &r).is_ok(),
                            "{t} {m}: result not a valid infix tree"
                        );
                        let d = pointer_delta(t, &post).map_err(|e| e.to_string())?;
                        ensure!(d == 3, "{t} {m}: pointer_delta {d}");
                        ensure!(slot_diff(t, &post) == 3, "{t} {m}: {} slots differ", slot_diff(t, &post));
                        moves += 1;
                    }
                }
            }
        }
        Ok(format!("{moves} moves"))
    });
}

#[test]
fn criterion_3_worked_example() {
    report(3, "worked example goldens", None, || {
        let t = fig1();
        let t2: Tree = "9(7(5(3(2(1,·),4),6),8),10)".parse().unwrap();
        let t1: Tree = "9(3(2(1,·),5(4,7(6,8))),10)".parse().unwrap();

        ensure!(t.chain_counts() == (5, 6), "L,R = {:?}", t.chain_counts());
        let direct: Move = "rot([7-5],3)".parse().unwrap();
        let got = apply(&t, &direct).map_err(|e| e.to_string())?;
        ensure!(got == t2, "rot([7-5],3) gave {got}");
        let inverse: Move = "rot(3,[7-5])".parse().unwrap();
        let back = apply(&t2, &inverse).map_err(|e| e.to_string())?;
        ensure!(back == t, "rot(3,[7-5]) gave {back}");
        let (c, _) = exact::distance(&t, &t2, MoveSet::Crot, &default_cfg()).map_err(|e| e.to_string())?;
        ensure!(c == 1, "C(T,T'') = {c}");

        let single: Move = "rot(5,[7])".parse().unwrap();
        ensure!(apply(&t, &single).map_err(|e| e.to_string())? == t1, "T' mismatch");

        let pairs = equivalent_edges(&t, &t1).map_err(|e| e.to_string())?;
        let highlighted = pairs.iter().find(|p| p.interval.lo == 4 && p.interval.hi == 8);
        ensure!(
            highlighted.is_some_and(|p| p.s_edge == (3, 7) && p.t_edge == (3, 5)),
            "pair [4,8] via (3,7)/(3,5) missing"
        );
        let listed: Vec<String> = pairs.iter().map(|p| p.interval.to_string()).collect();
        ensure!(
            pairs.len() == 1,
            "equivalent_edges(T, T') = {{{}}} ({} pairs), expected exactly {{[4,8]}}",
            listed.join(", "),
            pairs.len()
        );
        Ok("all goldens match".into())
    });
}

#[test]
fn criterion_4_constructive_bound() {
    report(4, "transform_script length = min formula", Some(Duration::from_secs(60)), || {
        let mut pairs = 0u64;
        let check_pair = |s: &Tree, t: &Tree, ls: (usize, usize), lt: (usize, usize)| -> Outcome {
            let sc = transform_script(s, t).map_err(|e| e.to_string())?;
            let want = (ls.0 + lt.0 - 2).min(ls.1 + lt.1 - 2);
            ensure!(sc.len() == want, "{s} -> {t}: length {} != {want}", sc.len());
            verify_script(s, &sc, t).map_err(|e| format!("{s} -> {t}: {e}"))?;
            Ok(String::new())
        };
        for n in 1..=8 {
            let all = shapes(n);
            let counts: Vec<_> = all.iter().map(counts_oracle).collect();
            for (i, s) in all.iter().enumerate() {
                let (l, r) = counts[i];
                let left = rotleft(s);
                let right = rotright(s);
                ensure!(left.len() == l - 1, "{s}: rotleft {} vs L-1 = {}", left.len(), l - 1);
                ensure!(right.len() == r - 1, "{s}: rotright {} vs R-1 = {}", right.len(), r - 1);
                ensure!(
                    left.replay(s).ok() == Some(Tree::complete_chain(n, Side::Left)),
                    "{s}: rotleft does not reach the left chain"
                );
                ensure!(
                    right.replay(s).ok() == Some(Tree::complete_chain(n, Side::Right)),
                    "{s}: rotright does not reach the right chain"
                );
                for (j, t) in all.iter().enumerate() {
                    check_pair(s, t, counts[i], counts[j])?;
                    pairs += 1;
                }
            }
        }
        for k in 0..500u64 {
            let s = random_tree(20, 2 * k + 11);
            let t = random_tree(20, 2 * k + 12);
            check_pair(&s, &t, counts_oracle(&s), counts_oracle(&t))?;
            pairs += 1;
        }
        Ok(format!("{pairs} pairs"))
    });
}

#[test]
fn criterion_5_bound_sandwich() {
    report(5, "exhaustive audit at n = 8", Some(Duration::from_secs(600)), || {
        let rep = exact::audit(8, &ExactConfig::default()).map_err(|e| e.to_string())?;
        ensure!(rep.shapes == 1430, "shapes {}", rep.shapes);
        ensure!(rep.pairs == 1430 * 1430, "pairs {}", rep.pairs);
        ensure!(
            rep.violation_count == 0,
            "{} violations, first: {:?}",
            rep.violation_count,
            rep.violations.first()
        );
        ensure!(rep.symmetric, "C not symmetric");
        ensure!(rep.max_upper_bound <= 7, "max upper {}", rep.max_upper_bound);

        // Spot-check the audit's distances against a plain BFS sweep.
        let g = MoveGraph::build(8, MoveSet::Crot, chainrot::Exec::Sequential);
        let r = MoveGraph::build(8, MoveSet::Rot, chainrot::Exec::Sequential);
        for src in (0..g.len()).step_by(97) {
            let dc = g.distances_from(src);
            let dr = r.distances_from(r.index_of(&g.tree(src)).unwrap());
            let s = g.tree(src);
            for j in 0..g.len() {
                let t = g.tree(j);
                let c = dc[j] as usize;
                let d = dr[r.index_of(&t).unwrap()] as usize;
                let lb = chain_lower_bound(&s, &t).unwrap();
                let ub = chain_upper_bound(&s, &t).unwrap();
                ensure!(lb <= c && c <= ub && ub <= 7 && c <= d, "{s} vs {t}: {lb} {c} {ub} {d}");
            }
        }
        Ok(format!(
            "{} pairs, 0 violations, max C {}, max D {}, triangle samples {}",
            rep.pairs, rep.max_chain_distance, rep.max_rotation_distance, rep.triangle.samples
        ))
    });
}

#[test]
fn criterion_6_tightness() {
    report(6, "figure-4 pairs are tight at n - c", Some(Duration::from_secs(300)), || {
        let cfg = ExactConfig::default();
        let mut checked = 0;
        for n in 5..=10 {
            let rc = Tree::complete_chain(n, Side::Right);
            let sweep = MoveGraph::build(n, MoveSet::Crot, cfg.exec);
            let from_t = sweep.distances_from(sweep.index_of(&rc).unwrap());
            for c in 1..n {
                let (s, t) = figure4_pair(n, c).map_err(|e| e.to_string())?;
                ensure!(t == rc, "T is not the right chain");
                let lb = chain_lower_bound(&s, &t).unwrap();
                let ub = chain_upper_bound(&s, &t).unwrap();
                ensure!(lb == n - c && ub == n - c, "n={n} c={c}: LB {lb} UB {ub}");
                ensure!(
                    equivalent_edges(&s, &t).unwrap().is_empty(),
                    "n={n} c={c}: pair has equivalent edges"
                );
                let (d, sc) = exact::distance(&s, &t, MoveSet::Crot, &cfg).map_err(|e| e.to_string())?;
                ensure!(d == n - c, "n={n} c={c}: C = {d}");
                verify_script(&s, &sc, &t).map_err(|e| e.to_string())?;
                let swept = from_t[sweep.index_of(&s).unwrap()] as usize;
                ensure!(swept == d, "n={n} c={c}: BFS sweep gives {swept}, search gives {d}");
                checked += 1;
            }
            let lc = Tree::complete_chain(n, Side::Left);
            let chains = from_t[sweep.index_of(&lc).unwrap()] as usize;
            ensure!(chains == n - 1, "n={n}: C(left chain, right chain) = {chains}");
        }
        Ok(format!("{checked} pairs, C(chain, chain) = n-1 for n = 5..10"))
    });
}

#[test]
fn criterion_7_inversion_round_trip() {
    report(7, "apply(apply(t, m), invert(m)) = t", None, || {
        let mut moves = 0;
        for n in 1..=6 {
            for t in shapes(n) {
                for m in enumerate_moves(&t, MoveSet::Crot) {
                    let post = apply(&t, &m).map_err(|e| format!("{t} {m}: {e}"))?;
                    let back = apply(&post, &m.invert()).map_err(|e| format!("{t} {m}: {e}"))?;
                    ensure!(back == t, "{t} {m}: round trip gave {back}");
                    ensure!(m.invert().invert() == m, "{m}: invert is not an involution");
                    moves += 1;
                }
            }
        }
        Ok(format!("{moves} moves"))
    });
}

#[test]
fn criterion_8_rotation_diameter() {
    report(8, "ROT diameter for n <= 10 (reported)", None, || {
        let cfg = ExactConfig::default();
        let mut diameters = Vec::new();
        for n in 1..=10 {
            let rot = exact::diameter(n, MoveSet::Rot, &cfg).map_err(|e| e.to_string())?;
            let crot = exact::diameter(n, MoveSet::Crot, &cfg).map_err(|e| e.to_string())?;
            ensure!(rot.diameter >= crot.diameter, "n={n}: ROT {} < CROT {}", rot.diameter, crot.diameter);
            let lc = Tree::complete_chain(n, Side::Left);
            let rc = Tree::complete_chain(n, Side::Right);
            let (d, _) = exact::distance(&lc, &rc, MoveSet::Rot, &cfg).map_err(|e| e.to_string())?;
            let (c, _) = exact::distance(&lc, &rc, MoveSet::Crot, &cfg).map_err(|e| e.to_string())?;
            ensure!(d >= c, "n={n}: D {d} < C {c} on the chain pair");
            ensure!(d + 1 >= n, "n={n}: D {d} < n-1 on the chain pair");
            diameters.push(rot.diameter);
        }
        Ok(format!("ROT diameters n=1..10: {diameters:?}"))
    });
}

#[test]
fn criterion_9_additivity_probe() {
    report(9, "additivity report over split pairs", None, || {
        let mut summary = Vec::new();
        for n in 1..=8 {
            let rep = exact::audit(n, &ExactConfig::default()).map_err(|e| e.to_string())?;
            let json = serde_json::to_value(&rep).map_err(|e| e.to_string())?;
            let a = &json["additivity"];
            for key in ["pairs_with_equivalent_edges", "additive", "whole_below_sum", "whole_above_sum"] {
                ensure!(a[key].is_u64(), "n={n}: additivity.{key} missing");
            }
            let total = rep.additivity.pairs_with_equivalent_edges;
            ensure!(
                rep.additivity.additive + rep.additivity.whole_below_sum + rep.additivity.whole_above_sum
                    == total,
                "n={n}: additivity counts do not add up"
            );
            ensure!(
                total + rep.pairs_without_equivalent_edges == rep.pairs,
                "n={n}: pair partition does not add up"
            );
            let back: exact::AuditReport =
                serde_json::from_value(json).map_err(|e| e.to_string())?;
            ensure!(back == rep, "n={n}: report does not round-trip");
            summary.push(format!("n={n} {}/{}", rep.additivity.additive, total));
        }
        Ok(format!("additive/with-e: {}", summary.join(", ")))
    });
}
