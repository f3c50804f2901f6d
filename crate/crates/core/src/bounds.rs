//! Constructive transformations to the complete chains and the closed-form
//! bounds on the chain distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose;
use crate::moves::{apply, IllegalMove, Move, MoveParseError};
use crate::tree::{ShapeKey, Side, Tree, TreeError};

/// A move sequence together with the shapes it connects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    pub start: ShapeKey,
    pub end: ShapeKey,
    pub moves: Vec<Move>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("move {index} is illegal: {source}")]
    Illegal {
        index: usize,
        #[source]
        source: IllegalMove,
    },
    #[error("script starts at {script} but the tree is {tree}")]
    StartMismatch { script: ShapeKey, tree: ShapeKey },
    #[error("replay ends at {reached}, expected {expected}")]
    EndMismatch { reached: ShapeKey, expected: ShapeKey },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

impl Script {
    pub fn empty(tree: &Tree) -> Script {
        let key = tree.shape_key();
        Script {
            start: key.clone(),
            end: key,
            moves: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn n(&self) -> usize {
        self.start.n()
    }

    /// Replays the moves from `from`, returning every tree visited
    /// (including `from`).
    pub fn trace(&self, from: &Tree) -> Result<Vec<Tree>, ScriptError> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        out.push(from.clone());
        for (index, m) in self.moves.iter().enumerate() {
            let next = apply(out.last().unwrap(), m)
                .map_err(|source| ScriptError::Illegal { index, source })?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn replay(&self, from: &Tree) -> Result<Tree, ScriptError> {
        let mut cur = from.clone();
        for (index, m) in self.moves.iter().enumerate() {
            cur = apply(&cur, m).map_err(|source| ScriptError::Illegal { index, source })?;
        }
        Ok(cur)
    }

    /// The script that undoes this one.
    pub fn reversed(&self) -> Script {
        Script {
            start: self.end.clone(),
            end: self.start.clone(),
            moves: self.moves.iter().rev().map(|m| m.invert()).collect(),
        }
    }

    /// `self` followed by `next`; `next` must start where `self` ends.
    pub fn then(mut self, next: Script) -> Script {
        debug_assert_eq!(self.end, next.start);
        self.end = next.end;
        self.moves.extend(next.moves);
        self
    }
}

/// Text file form: a header `n=<n> start=<bits> end=<bits>` and one move per
/// line with its side suffix.
impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} start={} end={}", self.n(), self.start, self.end)?;
        for m in &self.moves {
            writeln!(f, "{}", m.to_line())?;
        }
        Ok(())
    }
}

impl FromStr for Script {
    type Err = ScriptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(ScriptError::Format {
            line: 1,
            message: "missing header".into(),
        })?;
        let bad = |line: usize, message: String| ScriptError::Format { line, message };
        let (mut n, mut start, mut end) = (None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| bad(hline, format!("expected key=value, got `{field}`")))?;
            match k {
                "n" => {
                    n = Some(
                        v.parse::<usize>()
                            .map_err(|e| bad(hline, format!("bad n: {e}")))?,
                    )
                }
                "start" => start = Some(v.parse::<ShapeKey>()?),
                "end" => end = Some(v.parse::<ShapeKey>()?),
                other => return Err(bad(hline, format!("unknown header field `{other}`"))),
            }
        }
        let (Some(n), Some(start), Some(end)) = (n, start, end) else {
            return Err(bad(hline, "header needs n, start and end".into()));
        };
        if start.n() != n || end.n() != n {
            return Err(bad(hline, format!("start/end do not have {n} vertices")));
        }
        let moves = lines
            .map(|(i, l)| {
                l.parse::<Move>()
                    .map_err(|e: MoveParseError| bad(i, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Script { start, end, moves })
    }
}

/// Direct moves turning `y` into the complete chain of `side`: while more than
/// one maximal chain of that side exists, merge the one whose top is deepest
/// (smallest label on ties) into the chain of its top's parent.
pub fn rot_to_chain(y: &Tree, side: Side) -> Script {
    let mut cur = y.clone();
    let mut moves = Vec::new();
    loop {
        let depth = cur.depths();
        let next = cur
            .vertices()
            .filter(|&v| cur.side_of(v) == Some(side.opposite()))
            .min_by_key(|&v| (std::cmp::Reverse(depth[v as usize]), v));
        let Some(u) = next else { break };
        let w = cur.parent(u).unwrap();
        let v = *cur.walk(u, side).last().unwrap();
        let m = Move::direct(side, u, v, w);
        cur = apply(&cur, &m).expect("maximal chain move is always legal");
        moves.push(m);
    }
    Script {
        start: y.shape_key(),
        end: cur.shape_key(),
        moves,
    }
}

/// Transformation into the complete left chain `[n-1]`; `L - 1` moves.
pub fn rotleft(y: &Tree) -> Script {
    rot_to_chain(y, Side::Left)
}

/// Transformation into the complete right chain `[1-n]`; `R - 1` moves.
pub fn rotright(y: &Tree) -> Script {
    rot_to_chain(y, Side::Right)
}

fn same_size(s: &Tree, t: &Tree) -> Result<usize, TreeError> {
    if s.n() != t.n() {
        Err(TreeError::SizeMismatch(s.n(), t.n()))
    } else {
        Ok(s.n())
    }
}

/// `s` to a complete chain and back up to `t`, through whichever chain needs
/// fewer moves (the left one on ties).
pub fn transform_script(s: &Tree, t: &Tree) -> Result<Script, TreeError> {
    same_size(s, t)?;
    let (ls, rs) = s.chain_counts();
    let (lt, rt) = t.chain_counts();
    let side = if ls + lt <= rs + rt {
        Side::Left
    } else {
        Side::Right
    };
    Ok(rot_to_chain(s, side).then(rot_to_chain(t, side).reversed()))
}

/// `min(L_s + L_t - 2, R_s + R_t - 2)`, never more than `n - 1`.
pub fn chain_upper_bound(s: &Tree, t: &Tree) -> Result<usize, TreeError> {
    let n = same_size(s, t)?;
    let (ls, rs) = s.chain_counts();
    let (lt, rt) = t.chain_counts();
    let ub = (ls + lt - 2).min(rs + rt - 2);
    assert!(ub < n.max(1), "upper bound {ub} exceeds n-1 for n={n}");
    Ok(ub)
}

/// `|L_s - L_t|`: each c-rotation changes the number of maximal left chains
/// by at most one.
pub fn chain_lower_bound(s: &Tree, t: &Tree) -> Result<usize, TreeError> {
    same_size(s, t)?;
    let (ls, rs) = s.chain_counts();
    let (lt, rt) = t.chain_counts();
    debug_assert_eq!(ls.abs_diff(lt), rs.abs_diff(rt));
    Ok(ls.abs_diff(lt))
}

/// Lower bound on the classical rotation distance from equivalent edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationLowerBound {
    /// Number of equivalent-edge pairs.
    pub e: usize,
    /// `n - e - 1`.
    pub raw: usize,
    /// Sum of `m - 1` over the `e + 1` split pairs of sizes `m`.
    pub per_pair: usize,
}

impl RotationLowerBound {
    pub fn value(&self) -> usize {
        self.raw
    }
}

pub fn rotation_lower_bound(s: &Tree, t: &Tree) -> Result<RotationLowerBound, TreeError> {
    let n = same_size(s, t)?;
    let e = decompose::equivalent_edges(s, t)?.len();
    let per_pair = decompose::split(s, t)?
        .iter()
        .map(|p| p.s_part.n() - 1)
        .sum();
    Ok(RotationLowerBound {
        e,
        raw: n - e - 1,
        per_pair,
    })
}

/// Checks that `script` is a legal path from `s` to `t`.
pub fn verify_script(s: &Tree, script: &Script, t: &Tree) -> Result<(), ScriptError> {
    let sk = s.shape_key();
    if script.start != sk {
        return Err(ScriptError::StartMismatch {
            script: script.start.clone(),
            tree: sk,
        });
    }
    let reached = script.replay(s)?;
    let (rk, tk) = (reached.shape_key(), t.shape_key());
    if rk != tk {
        return Err(ScriptError::EndMismatch {
            reached: rk,
            expected: tk,
        });
    }
    if script.end != tk {
        return Err(ScriptError::EndMismatch {
            reached: script.end.clone(),
            expected: tk,
        });
    }
    Ok(())
}

/// Bounds (and optionally the exact value) of the chain distance of a pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub n: usize,
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
    #[serde(with = "script_lines")]
    pub script: Option<Script>,
    pub e: usize,
    pub rotation_lower: usize,
    pub rotation_lower_per_pair: usize,
}

impl DistanceReport {
    /// Bounds plus the constructive script witnessing `upper`.
    pub fn bounds(s: &Tree, t: &Tree) -> Result<DistanceReport, TreeError> {
        let rlb = rotation_lower_bound(s, t)?;
        Ok(DistanceReport {
            n: s.n(),
            lower: chain_lower_bound(s, t)?,
            upper: chain_upper_bound(s, t)?,
            exact: None,
            script: Some(transform_script(s, t)?),
            e: rlb.e,
            rotation_lower: rlb.raw,
            rotation_lower_per_pair: rlb.per_pair,
        })
    }

    /// Attaches an exact distance and its optimal witness.
    pub fn with_exact(mut self, distance: usize, script: Script) -> DistanceReport {
        debug_assert!(self.lower <= distance && distance <= self.upper);
        debug_assert_eq!(script.len(), distance);
        self.exact = Some(distance);
        self.script = Some(script);
        self
    }
}

mod script_lines {
    use super::Script;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(script: &Option<Script>, s: S) -> Result<S::Ok, S::Error> {
        script
            .as_ref()
            .map(|sc| sc.moves.iter().map(|m| m.to_line()).collect::<Vec<_>>())
            .serialize(s)
    }

    // the flat form drops the endpoints, so it reads back as no script
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Script>, D::Error> {
        Option::<Vec<String>>::deserialize(d)?;
        Ok(None)
    }
}
