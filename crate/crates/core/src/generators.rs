//! Named tree families and uniform random shapes.

use num_bigint::{BigUint, RandBigInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bounds::{chain_lower_bound, chain_upper_bound};
use crate::catalan::{self, CatalanTable};
use crate::decompose::equivalent_edges;
use crate::tree::{Side, Tree, Vertex, NIL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("need 1 <= c <= n-1, got n={n}, c={c}")]
    InvalidC { n: usize, c: usize },
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("generated pair fails its own contract: {0}")]
    Contract(String),
}

/// Pure left spine (root `n`) or right spine (root `1`).
pub fn complete_chain(n: usize, side: Side) -> Result<Tree, GenError> {
    if n == 0 {
        return Err(GenError::Empty);
    }
    Ok(Tree::complete_chain(n, side))
}

/// A pair `(S, T)` with `L_S = c`, `L_T = n` and no equivalent edges, for
/// which the chain-count lower bound and the constructive upper bound meet
/// at `n - c`.
///
/// `T` is the complete right chain. `S` is the left spine
/// `n -> n-1 -> ... -> c+1` whose last vertex has left child `1`, and `1`
/// carries the right chain `2 -> 3 -> ... -> c`. For `c = 1` this is the pair
/// of complete chains.
pub fn figure4_pair(n: usize, c: usize) -> Result<(Tree, Tree), GenError> {
    if n < 2 || c == 0 || c >= n {
        return Err(GenError::InvalidC { n, c });
    }
    let mut left = vec![NIL; n];
    let mut right = vec![NIL; n];
    for k in c + 2..=n {
        left[k - 1] = (k - 1) as Vertex;
    }
    left[c] = 1; // vertex c+1
    for k in 1..c {
        right[k - 1] = (k + 1) as Vertex;
    }
    let s = Tree::build(n as Vertex, &left, &right)
        .map_err(|e| GenError::Contract(e.to_string()))?;
    let t = Tree::complete_chain(n, Side::Right);

    let lb = chain_lower_bound(&s, &t).expect("same size");
    let ub = chain_upper_bound(&s, &t).expect("same size");
    let checks = [
        (s.chain_counts().0 == c, "L_S != c"),
        (t.chain_counts().0 == n, "L_T != n"),
        (lb == n - c, "lower bound != n-c"),
        (ub == n - c, "upper bound != n-c"),
        (
            equivalent_edges(&s, &t).expect("same size").is_empty(),
            "pair has equivalent edges",
        ),
    ];
    if let Some((_, why)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(GenError::Contract(format!("n={n}, c={c}: {why}")));
    }
    Ok((s, t))
}

/// A uniformly random shape of `n` vertices, reproducible from `seed`.
pub fn random_tree(n: usize, seed: u64) -> Tree {
    random_tree_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_tree_with<R: Rng>(n: usize, rng: &mut R) -> Tree {
    assert!(n >= 1, "a tree needs at least one vertex");
    if n <= 33 {
        let table = CatalanTable::<u64>::new(n);
        let r = rng.gen_range(0..*table.get(n));
        table.unrank(n, r)
    } else {
        let table = CatalanTable::<BigUint>::new(n);
        let r = rng.gen_biguint_below(table.get(n));
        table.unrank(n, r)
    }
}

/// The shape of rank `rank` in root-split order.
pub fn tree_of_rank(n: usize, rank: &BigUint) -> Option<Tree> {
    if n == 0 || rank >= &catalan::catalan(n) {
        return None;
    }
    Some(catalan::unrank(n, rank.clone()))
}
