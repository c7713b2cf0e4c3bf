//! Blocks, set systems, exhaustive verifiers and the block-file format.
//!
//! The ground set is `{1..n}` everywhere. Verifiers scan target subsets by
//! size, then lexicographically, and report the first uncovered one.

mod block;
mod io;

pub use block::{all_subsets, covers, unrank_lex, Block, Combinations, MAX_N};
pub(crate) use block::{block_from_indices, count_u128};
pub use io::{parse_blocks, read_blocks, render_blocks, write_blocks};

use crate::exec::{chunk_ranges, Strategy};
use crate::{Error, Result};

/// Default cap on the number of target subsets a verifier may enumerate.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// What property a system claims.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// `(n,t)`-single-exclusion system; blocks have size `t`.
    Se,
    /// Complements of an SE system (supports of minimum-weight rows).
    SeComplement,
    /// Every `s`-subset contains a block.
    Turan { s: usize },
    /// Every `covered`-subset lies inside a block.
    Covering { covered: usize },
    Unspecified,
}

impl Kind {
    pub fn label(&self) -> String {
        match self {
            Kind::Se => "se".into(),
            Kind::SeComplement => "se-complement".into(),
            Kind::Turan { s } => format!("turan {s}"),
            Kind::Covering { covered } => format!("covering {covered}"),
            Kind::Unspecified => "unspecified".into(),
        }
    }

    pub fn parse_label(s: &str) -> Option<Kind> {
        let mut parts = s.split_whitespace();
        let head = parts.next()?;
        let arg = parts.next().and_then(|a| a.parse().ok());
        match (head, arg) {
            ("se", None) => Some(Kind::Se),
            ("se-complement", None) => Some(Kind::SeComplement),
            ("turan", Some(s)) => Some(Kind::Turan { s }),
            ("covering", Some(covered)) => Some(Kind::Covering { covered }),
            ("unspecified", None) => Some(Kind::Unspecified),
            _ => None,
        }
    }
}

/// A family of distinct `t`-subsets of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    pub n: usize,
    /// Block size.
    pub t: usize,
    pub kind: Kind,
    blocks: Vec<Block>,
}

impl SetSystem {
    /// Validates sizes and ranges, drops nothing: duplicates are an error.
    pub fn new(n: usize, t: usize, kind: Kind, blocks: Vec<Block>) -> Result<Self> {
        if n == 0 || n > MAX_N || t > n {
            return Err(Error::params(format!("need t <= n <= {MAX_N}, got n={n} t={t}")));
        }
        for b in &blocks {
            if b.len() != t {
                return Err(Error::params(format!("block {b} does not have size {t}")));
            }
            if b.max_member().is_some_and(|m| m > n) {
                return Err(Error::params(format!("block {b} leaves 1..={n}")));
            }
        }
        let mut sys = SetSystem { n, t, kind, blocks };
        let before = sys.blocks.len();
        sys.canonicalize();
        if sys.blocks.len() != before {
            return Err(Error::params("duplicate blocks"));
        }
        Ok(sys)
    }

    /// Like [`SetSystem::new`] but silently merges duplicate blocks.
    pub fn from_blocks_dedup(n: usize, t: usize, kind: Kind, mut blocks: Vec<Block>) -> Result<Self> {
        blocks.sort();
        blocks.dedup();
        Self::new(n, t, kind, blocks)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Sorts blocks lexicographically and removes duplicates.
    pub fn canonicalize(&mut self) {
        self.blocks.sort();
        self.blocks.dedup();
    }

    pub fn with_kind(mut self, kind: Kind) -> Self {
        self.kind = kind;
        self
    }
}

/// Outcome of a verifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// The first target (by size, then lexicographically) that fails.
    Uncovered(Block),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn witness(&self) -> Option<&Block> {
        match self {
            Verdict::Valid => None,
            Verdict::Uncovered(b) => Some(b),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub budget: u128,
    pub strategy: Strategy,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: DEFAULT_BUDGET,
            strategy: Strategy::default(),
        }
    }
}

/// Relation between a block and a target subset.
#[derive(Clone, Copy)]
enum Relation {
    /// block covers target (`|target \ block| = 1`)
    Covers,
    /// block ⊆ target
    InsideTarget,
    /// target ⊆ block
    ContainsTarget,
}

fn related(rel: Relation, block: &Block, target: &Block) -> bool {
    match rel {
        Relation::Covers => covers(block, target),
        Relation::InsideTarget => block.is_subset(target),
        Relation::ContainsTarget => target.is_subset(block),
    }
}

fn related_mask(rel: Relation, block: u64, target: u64) -> bool {
    match rel {
        Relation::Covers => (target & !block).count_ones() == 1,
        Relation::InsideTarget => block & !target == 0,
        Relation::ContainsTarget => target & !block == 0,
    }
}

/// Finds the first target of the given sizes (sizes ascending, then
/// lexicographic) that no block relates to.
fn first_unrelated(
    sys: &SetSystem,
    sizes: std::ops::RangeInclusive<usize>,
    rel: Relation,
    opts: &VerifyOptions,
) -> Result<Verdict> {
    let n = sys.n;
    let total: u128 = sizes
        .clone()
        .map(|i| count_u128(n, i))
        .fold(0u128, |a, b| a.saturating_add(b));
    if total > opts.budget {
        return Err(Error::BudgetExceeded {
            what: "target subsets",
            needed: total,
            budget: opts.budget,
        });
    }
    let masks: Option<Vec<u64>> = (n <= 64).then(|| sys.blocks.iter().map(|b| b.low_mask()).collect());
    for i in sizes {
        let count = count_u128(n, i);
        let ranges = chunk_ranges(count, 256);
        let hit = opts.strategy.find_map_first(ranges.len(), |c| {
            let (lo, hi) = ranges[c];
            let mut combos = Combinations::starting_at(n, i, lo);
            for _ in lo..hi {
                let idx = combos.next().expect("rank in range");
                let target = block_from_indices(&idx);
                let ok = match &masks {
                    Some(m) => {
                        let tm = target.low_mask();
                        m.iter().any(|&bm| related_mask(rel, bm, tm))
                    }
                    None => sys.blocks.iter().any(|b| related(rel, b, &target)),
                };
                if !ok {
                    return Some(target);
                }
            }
            None
        });
        if let Some(w) = hit {
            return Ok(Verdict::Uncovered(w));
        }
    }
    Ok(Verdict::Valid)
}

/// Checks that every `i`-subset, `i = 1..=t+1`, is covered by a block.
pub fn is_se_system(sys: &SetSystem) -> Result<Verdict> {
    is_se_system_with(sys, &VerifyOptions::default())
}

pub fn is_se_system_with(sys: &SetSystem, opts: &VerifyOptions) -> Result<Verdict> {
    if sys.t >= sys.n {
        return Err(Error::params(format!(
            "SE systems need t < n, got n={} t={}",
            sys.n, sys.t
        )));
    }
    first_unrelated(sys, 1..=sys.t + 1, Relation::Covers, opts)
}

/// Checks that every `s`-subset contains a block.
pub fn is_turan_system(sys: &SetSystem, s: usize) -> Result<Verdict> {
    is_turan_system_with(sys, s, &VerifyOptions::default())
}

pub fn is_turan_system_with(sys: &SetSystem, s: usize, opts: &VerifyOptions) -> Result<Verdict> {
    if s < sys.t || s > sys.n {
        return Err(Error::params(format!(
            "Turán check needs t <= s <= n, got n={} t={} s={s}",
            sys.n, sys.t
        )));
    }
    first_unrelated(sys, s..=s, Relation::InsideTarget, opts)
}

/// Checks that every `covered`-subset lies inside some block (blocks have
/// size `sys.t`, playing the role of `s`).
pub fn is_covering_design(sys: &SetSystem, covered: usize) -> Result<Verdict> {
    is_covering_design_with(sys, covered, &VerifyOptions::default())
}

pub fn is_covering_design_with(sys: &SetSystem, covered: usize, opts: &VerifyOptions) -> Result<Verdict> {
    if covered > sys.t {
        return Err(Error::params(format!(
            "covering check needs covered <= block size, got {covered} > {}",
            sys.t
        )));
    }
    first_unrelated(sys, covered..=covered, Relation::ContainsTarget, opts)
}

/// Verifies whatever property `sys.kind` claims.
pub fn verify_kind(sys: &SetSystem, opts: &VerifyOptions) -> Result<Verdict> {
    match sys.kind {
        Kind::Se => is_se_system_with(sys, opts),
        Kind::Turan { s } => is_turan_system_with(sys, s, opts),
        Kind::Covering { covered } => is_covering_design_with(sys, covered, opts),
        Kind::SeComplement => is_se_system_with(&complement_system(sys), opts),
        Kind::Unspecified => Err(Error::params("system has no kind to verify")),
    }
}

/// Replaces every block by its complement in `{1..n}` and dualises the
/// kind via `T(n,s,t) = C(n, n−t, n−s)`.
pub fn complement_system(sys: &SetSystem) -> SetSystem {
    let n = sys.n;
    let kind = match sys.kind {
        Kind::Se => Kind::SeComplement,
        Kind::SeComplement => Kind::Se,
        Kind::Turan { s } => Kind::Covering { covered: n - s },
        Kind::Covering { covered } => Kind::Turan { s: n - covered },
        Kind::Unspecified => Kind::Unspecified,
    };
    let mut blocks: Vec<Block> = sys.blocks.iter().map(|b| b.complement(n)).collect();
    blocks.sort();
    SetSystem {
        n,
        t: n - sys.t,
        kind,
        blocks,
    }
}

/// Complements `sys` and checks that both it and its dual pass their
/// verifiers.
pub fn complement_verified(sys: &SetSystem, opts: &VerifyOptions) -> Result<SetSystem> {
    let dual = complement_system(sys);
    for (label, s) in [("original", sys), ("complement", &dual)] {
        if let Verdict::Uncovered(w) = verify_kind(s, opts)? {
            return Err(Error::Verification(format!("{label} fails at {w}")));
        }
    }
    Ok(dual)
}
