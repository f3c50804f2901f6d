//! Catalan numbers and the root-split ranking of tree shapes.
//!
//! Shapes of `n` vertices are ordered by root label, then by the rank of the
//! left subtree, then by the rank of the right subtree. A shape with root `k`
//! has `C(k-1) * C(n-k)` siblings sharing that root.

use std::ops::{Add, Div, Mul, Rem, Sub};

use num_bigint::BigUint;

use crate::tree::Tree;

/// Largest `n` whose Catalan number fits in a `u64`.
pub const MAX_U64_N: usize = 35;

pub trait Count:
    Clone
    + Ord
    + From<u64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Rem<Output = Self>
{
}

impl Count for u64 {}
impl Count for BigUint {}

/// `C(0..=n)`.
#[derive(Debug, Clone)]
pub struct CatalanTable<T> {
    c: Vec<T>,
}

impl<T: Count> CatalanTable<T> {
    pub fn new(n: usize) -> Self {
        let mut c: Vec<T> = vec![T::from(1)];
        for i in 1..=n {
            let mut sum = T::from(0);
            for j in 0..i {
                sum = sum + c[j].clone() * c[i - 1 - j].clone();
            }
            c.push(sum);
        }
        CatalanTable { c }
    }

    pub fn get(&self, n: usize) -> &T {
        &self.c[n]
    }

    pub fn max_n(&self) -> usize {
        self.c.len() - 1
    }

    /// The shape of rank `rank` among trees of `n` vertices.
    pub fn unrank(&self, n: usize, rank: T) -> Tree {
        assert!(n >= 1 && n <= self.max_n(), "n out of table range");
        assert!(rank < self.c[n], "rank out of range");
        let mut kids: Vec<(Option<usize>, Option<usize>)> = vec![(None, None)];
        // (node, size, rank)
        let mut work = vec![(0usize, n, rank)];
        while let Some((node, size, mut r)) = work.pop() {
            let mut k = 1;
            loop {
                let block = self.c[k - 1].clone() * self.c[size - k].clone();
                if r < block {
                    break;
                }
                r = r - block;
                k += 1;
            }
            let right_count = self.c[size - k].clone();
            let left_rank = r.clone() / right_count.clone();
            let right_rank = r % right_count;
            if k > 1 {
                let q = kids.len();
                kids.push((None, None));
                kids[node].0 = Some(q);
                work.push((q, k - 1, left_rank));
            }
            if size > k {
                let q = kids.len();
                kids.push((None, None));
                kids[node].1 = Some(q);
                work.push((q, size - k, right_rank));
            }
        }
        Tree::from_shape(&kids)
    }

    /// Inverse of [`CatalanTable::unrank`].
    pub fn rank(&self, tree: &Tree) -> T {
        assert!(tree.n() <= self.max_n(), "tree larger than table");
        let intervals = tree.intervals();
        // postorder: children are ranked before their parent
        let mut rank: Vec<Option<T>> = vec![None; tree.n() + 1];
        for v in tree.preorder().into_iter().rev() {
            let iv = intervals[v as usize];
            let size = iv.len();
            let k = (v - iv.lo + 1) as usize;
            let mut r = T::from(0);
            for j in 1..k {
                r = r + self.c[j - 1].clone() * self.c[size - j].clone();
            }
            let lr = tree
                .left(v)
                .map_or(T::from(0), |l| rank[l as usize].take().unwrap());
            let rr = tree
                .right(v)
                .map_or(T::from(0), |c| rank[c as usize].take().unwrap());
            r = r + lr * self.c[size - k].clone() + rr;
            rank[v as usize] = Some(r);
        }
        rank[tree.root() as usize].take().unwrap()
    }
}

pub fn catalan_u64(n: usize) -> Option<u64> {
    (n <= MAX_U64_N).then(|| *CatalanTable::<u64>::new(n).get(n))
}

pub fn catalan(n: usize) -> BigUint {
    CatalanTable::<BigUint>::new(n).get(n).clone()
}

pub fn unrank_u64(n: usize, rank: u64) -> Tree {
    CatalanTable::<u64>::new(n).unrank(n, rank)
}

pub fn rank_u64(tree: &Tree) -> Option<u64> {
    (tree.n() <= MAX_U64_N).then(|| CatalanTable::<u64>::new(tree.n()).rank(tree))
}

pub fn unrank(n: usize, rank: BigUint) -> Tree {
    CatalanTable::<BigUint>::new(n).unrank(n, rank)
}

pub fn rank(tree: &Tree) -> BigUint {
    CatalanTable::<BigUint>::new(tree.n()).rank(tree)
}
