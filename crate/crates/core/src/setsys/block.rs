use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 512;
const WORDS: usize = MAX_N / 64;

/// A subset of the ground set `{1..n}`, stored as a fixed-width bitset.
/// Element `x` lives in bit `x − 1`.
///
/// Ordering is lexicographic on the ascending member sequences, so
/// `{1,2} < {1,2,3} < {1,3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Block {
    bits: [u64; WORDS],
}

impl Block {
    pub const fn empty() -> Self {
        Block { bits: [0; WORDS] }
    }

    /// Builds a block from 1-based members; duplicates collapse.
    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Result<Self> {
        let mut b = Block::empty();
        for x in members {
            if x == 0 || x > MAX_N {
                return Err(Error::params(format!("element {x} outside 1..={MAX_N}")));
            }
            b.insert(x);
        }
        Ok(b)
    }

    /// `{1, …, m}`.
    pub fn prefix(m: usize) -> Self {
        let mut b = Block::empty();
        for x in 1..=m {
            b.insert(x);
        }
        b
    }

    pub fn from_low_mask(mask: u64) -> Self {
        let mut b = Block::empty();
        b.bits[0] = mask;
        b
    }

    /// The low 64 bits; exact whenever every member is `<= 64`.
    pub fn low_mask(&self) -> u64 {
        self.bits[0]
    }

    pub fn insert(&mut self, x: usize) {
        debug_assert!((1..=MAX_N).contains(&x));
        self.bits[(x - 1) / 64] |= 1 << ((x - 1) % 64);
    }

    pub fn remove(&mut self, x: usize) {
        debug_assert!((1..=MAX_N).contains(&x));
        self.bits[(x - 1) / 64] &= !(1 << ((x - 1) % 64));
    }

    pub fn with(mut self, x: usize) -> Self {
        self.insert(x);
        self
    }

    pub fn without(mut self, x: usize) -> Self {
        self.remove(x);
        self
    }

    pub fn contains(&self, x: usize) -> bool {
        x >= 1 && x <= MAX_N && self.bits[(x - 1) / 64] >> ((x - 1) % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn max_member(&self) -> Option<usize> {
        (0..WORDS)
            .rev()
            .find(|&w| self.bits[w] != 0)
            .map(|w| w * 64 + 64 - self.bits[w].leading_zeros() as usize)
    }

    pub fn min_member(&self) -> Option<usize> {
        (0..WORDS)
            .find(|&w| self.bits[w] != 0)
            .map(|w| w * 64 + self.bits[w].trailing_zeros() as usize + 1)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b + 1)
            })
        })
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Block) -> Block {
        let mut b = *self;
        for (x, y) in b.bits.iter_mut().zip(other.bits.iter()) {
            *x |= y;
        }
        b
    }

    pub fn intersection(&self, other: &Block) -> Block {
        let mut b = *self;
        for (x, y) in b.bits.iter_mut().zip(other.bits.iter()) {
            *x &= y;
        }
        b
    }

    /// `self \ other`.
    pub fn difference(&self, other: &Block) -> Block {
        let mut b = *self;
        for (x, y) in b.bits.iter_mut().zip(other.bits.iter()) {
            *x &= !y;
        }
        b
    }

    /// `|self \ other|`.
    pub fn difference_len(&self, other: &Block) -> usize {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .map(|(x, y)| (x & !y).count_ones() as usize)
            .sum()
    }

    pub fn intersection_len(&self, other: &Block) -> usize {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &Block) -> bool {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .all(|(x, y)| x & !y == 0)
    }

    /// `{1..n} \ self`.
    pub fn complement(&self, n: usize) -> Block {
        Block::prefix(n).difference(self)
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        // The smallest element of the symmetric difference decides, unless
        // the block lacking it has nothing beyond it (then it is a prefix).
        let Some(first) = (0..WORDS).find(|&w| self.bits[w] != other.bits[w]) else {
            return Ordering::Equal;
        };
        let diff = self.bits[first] ^ other.bits[first];
        let bit = diff.trailing_zeros();
        let e = first * 64 + bit as usize + 1;
        let beyond = |b: &Block| b.max_member().is_some_and(|m| m > e);
        if self.contains(e) {
            if beyond(other) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if beyond(self) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `a` covers `x` when exactly one element of `x` lies outside `a`.
pub fn covers(a: &Block, x: &Block) -> bool {
    x.difference_len(a) == 1
}

/// Lexicographic `k`-subsets of `{0..n-1}` as index vectors.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }

    /// Starts at the combination of lexicographic rank `rank`.
    pub fn starting_at(n: usize, k: usize, rank: u128) -> Self {
        match unrank_lex(n, k, rank) {
            Some(idx) => Combinations {
                n,
                idx,
                done: false,
            },
            None => Combinations {
                n,
                idx: Vec::new(),
                done: true,
            },
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// `C(n, k)` as `u128`, saturating.
pub(crate) fn count_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The `k`-subset of `{0..n-1}` with lexicographic rank `rank`.
pub fn unrank_lex(n: usize, k: usize, mut rank: u128) -> Option<Vec<usize>> {
    if k > n || rank >= count_u128(n, k) {
        return None;
    }
    let mut out = Vec::with_capacity(k);
    let mut x = 0usize;
    for slot in 0..k {
        loop {
            // Combinations whose `slot`-th element is `x`.
            let with_x = count_u128(n - x - 1, k - slot - 1);
            if rank < with_x {
                out.push(x);
                x += 1;
                break;
            }
            rank -= with_x;
            x += 1;
        }
    }
    Some(out)
}

pub(crate) fn block_from_indices(idx: &[usize]) -> Block {
    let mut b = Block::empty();
    for &i in idx {
        b.insert(i + 1);
    }
    b
}

/// All `k`-subsets of `{1..n}` in lexicographic order.
pub fn all_subsets(n: usize, k: usize) -> impl Iterator<Item = Block> {
    Combinations::new(n, k).map(|idx| block_from_indices(&idx))
}
