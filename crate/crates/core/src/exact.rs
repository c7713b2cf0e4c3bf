//! Exact minimum sizes of SE systems, Turán systems and covering designs on
//! tiny instances, by branch-and-bound set cover.
//!
//! Every result comes with a witness that has been re-checked by the
//! exhaustive verifiers in [`crate::setsys`].

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rug::Integer;

use crate::setsys::{all_subsets, covers, is_covering_design, is_se_system, is_turan_system, Block, Kind, SetSystem};
use crate::{Error, Result};

/// Largest candidate × target incidence table built without an override.
pub const DEFAULT_INCIDENCE_BUDGET: u128 = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Cap on candidate × target incidence bits.
    pub incidence_budget: u128,
    /// Cap on search nodes; `None` searches to completion.
    pub node_budget: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            incidence_budget: DEFAULT_INCIDENCE_BUDGET,
            node_budget: None,
        }
    }
}

/// Lower bound from deleting one point: the chosen family, restricted to
/// blocks avoiding any fixed point, must still solve the same problem on
/// the remaining `n−1` points, which needs at least `per_point` blocks.
#[derive(Clone, Debug)]
struct PointBound {
    n: usize,
    per_point: usize,
    /// Points outside each candidate.
    avoided: usize,
}

/// A set-cover instance: pick the fewest candidates so that every target
/// is hit by at least one of them.
#[derive(Clone, Debug)]
pub struct CoverInstance {
    targets: Vec<Block>,
    candidates: Vec<Block>,
    incidence: Vec<FixedBitSet>,
    coverers: Vec<Vec<usize>>,
    /// Some optimal solution contains candidate 0 (the candidates form a
    /// single orbit under a symmetry of the instance).
    force_first: bool,
    point_bound: Option<PointBound>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSolution {
    /// Indices into the instance's candidates, ascending.
    pub chosen: Vec<usize>,
    pub nodes: u64,
}

impl CoverInstance {
    /// Builds the incidence table of `hits(candidate, target)`. Targets are
    /// sorted lexicographically; candidate order is kept.
    pub fn new<F>(mut targets: Vec<Block>, candidates: Vec<Block>, hits: F, budget: u128) -> Result<Self>
    where
        F: Fn(&Block, &Block) -> bool,
    {
        let needed = targets.len() as u128 * candidates.len() as u128;
        if needed > budget {
            return Err(Error::BudgetExceeded {
                what: "candidate x target incidence bits",
                needed,
                budget,
            });
        }
        targets.sort();
        let mut incidence = Vec::with_capacity(candidates.len());
        let mut coverers = vec![Vec::new(); targets.len()];
        for (ci, c) in candidates.iter().enumerate() {
            let mut row = FixedBitSet::with_capacity(targets.len());
            for (ti, x) in targets.iter().enumerate() {
                if hits(c, x) {
                    row.insert(ti);
                    coverers[ti].push(ci);
                }
            }
            incidence.push(row);
        }
        Ok(CoverInstance {
            targets,
            candidates,
            incidence,
            coverers,
            force_first: false,
            point_bound: None,
        })
    }

    /// All `t`-subsets against all `i`-subsets, `1 <= i <= t+1`, under the
    /// single-exclusion relation `|X \ A| = 1`.
    pub fn se(n: usize, t: usize, budget: u128) -> Result<Self> {
        check_se(n, t)?;
        let targets = (1..=t + 1).flat_map(|i| all_subsets(n, i)).collect();
        let mut inst = Self::new(targets, all_subsets(n, t).collect(), covers, budget)?;
        inst.force_first = true;
        Ok(inst)
    }

    /// All `t`-subsets against all `s`-subsets, hit when contained.
    pub fn turan(n: usize, s: usize, t: usize, budget: u128) -> Result<Self> {
        check_turan(n, s, t)?;
        let mut inst = Self::new(all_subsets(n, s).collect(), all_subsets(n, t).collect(), |a, x| a.is_subset(x), budget)?;
        inst.force_first = true;
        Ok(inst)
    }

    /// All `s`-subsets against all `t`-subsets, hit when containing.
    pub fn covering(n: usize, s: usize, t: usize, budget: u128) -> Result<Self> {
        check_turan(n, s, t)?;
        let mut inst = Self::new(all_subsets(n, t).collect(), all_subsets(n, s).collect(), |a, x| x.is_subset(a), budget)?;
        inst.force_first = true;
        Ok(inst)
    }

    pub fn targets(&self) -> &[Block] {
        &self.targets
    }

    pub fn candidates(&self) -> &[Block] {
        &self.candidates
    }

    pub fn incidence_bits(&self) -> u128 {
        self.targets.len() as u128 * self.candidates.len() as u128
    }

    fn with_point_bound(mut self, n: usize, per_point: usize, block_size: usize) -> Self {
        self.point_bound = Some(PointBound {
            n,
            per_point,
            avoided: n - block_size,
        });
        self
    }

    /// Greedy cover: repeatedly the candidate hitting most unhit targets,
    /// ties to the lowest index. `None` if some target has no coverer.
    pub fn greedy(&self) -> Option<Vec<usize>> {
        let mut open = full(self.targets.len());
        let mut chosen = Vec::new();
        while open.count_ones(..) > 0 {
            let (best, gain) = (0..self.candidates.len())
                .map(|c| (c, self.incidence[c].intersection_count(&open)))
                .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if gain == 0 {
                return None;
            }
            open.difference_with(&self.incidence[best]);
            chosen.push(best);
        }
        chosen.sort_unstable();
        Some(chosen)
    }

    /// A minimum cover. Branches on the open target with fewest remaining
    /// coverers (ties to the lexicographically first target) and tries its
    /// coverers in index order, excluding each from later siblings.
    pub fn solve(&self, opts: &SolveOptions) -> Result<CoverSolution> {
        let Some(greedy) = self.greedy() else {
            return Err(Error::params("some target has no covering candidate"));
        };
        let mut search = Search {
            inst: self,
            excluded: FixedBitSet::with_capacity(self.candidates.len()),
            chosen: Vec::new(),
            avoid: vec![0; self.point_bound.as_ref().map_or(0, |b| b.n + 1)],
            best: greedy,
            nodes: 0,
            node_budget: opts.node_budget,
        };
        let open = full(self.targets.len());
        if self.force_first && !self.candidates.is_empty() {
            search.push(0);
            let mut rest = open.clone();
            rest.difference_with(&self.incidence[0]);
            search.dfs(&rest)?;
        } else {
            search.dfs(&open)?;
        }
        let mut chosen = search.best;
        chosen.sort_unstable();
        Ok(CoverSolution {
            chosen,
            nodes: search.nodes,
        })
    }
}

fn full(len: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(len);
    b.insert_range(..);
    b
}

struct Search<'a> {
    inst: &'a CoverInstance,
    excluded: FixedBitSet,
    chosen: Vec<usize>,
    /// Chosen blocks avoiding each point (1-based).
    avoid: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    node_budget: Option<u64>,
}

impl Search<'_> {
    fn push(&mut self, c: usize) {
        self.chosen.push(c);
        if self.inst.point_bound.is_some() {
            let block = &self.inst.candidates[c];
            for v in 1..self.avoid.len() {
                if !block.contains(v) {
                    self.avoid[v] += 1;
                }
            }
        }
    }

    fn pop(&mut self) {
        let c = self.chosen.pop().expect("pop after push");
        if self.inst.point_bound.is_some() {
            let block = &self.inst.candidates[c];
            for v in 1..self.avoid.len() {
                if !block.contains(v) {
                    self.avoid[v] -= 1;
                }
            }
        }
    }

    /// Blocks still needed, at least.
    fn lower_bound(&self, open: &FixedBitSet, remaining: usize) -> usize {
        let mut gains: Vec<usize> = (0..self.inst.candidates.len())
            .filter(|&c| !self.excluded.contains(c))
            .map(|c| self.inst.incidence[c].intersection_count(open))
            .filter(|&g| g > 0)
            .collect();
        gains.sort_unstable_by(|a, b| b.cmp(a));
        let mut need = 0;
        let mut sum = 0;
        for g in gains {
            if sum >= remaining {
                break;
            }
            sum += g;
            need += 1;
        }
        if sum < remaining {
            return usize::MAX;
        }
        if let Some(pb) = &self.inst.point_bound {
            let deficit: usize = self.avoid[1..].iter().map(|&a| pb.per_point.saturating_sub(a)).sum();
            need = need.max(deficit.div_ceil(pb.avoided));
        }
        need
    }

    fn dfs(&mut self, open: &FixedBitSet) -> Result<()> {
        self.nodes += 1;
        if let Some(cap) = self.node_budget {
            if self.nodes > cap {
                return Err(Error::BudgetExceeded {
                    what: "search nodes",
                    needed: self.nodes as u128,
                    budget: cap as u128,
                });
            }
        }
        let remaining = open.count_ones(..);
        if remaining == 0 {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return Ok(());
        }
        let lb = self.lower_bound(open, remaining);
        if lb == usize::MAX || self.chosen.len() + lb >= self.best.len() {
            return Ok(());
        }
        // most constrained open target
        let mut pick: Option<(usize, usize)> = None;
        for x in open.ones() {
            let k = self.inst.coverers[x].iter().filter(|&&c| !self.excluded.contains(c)).count();
            if pick.map_or(true, |(_, bk)| k < bk) {
                pick = Some((x, k));
                if k == 0 {
                    return Ok(());
                }
            }
        }
        let (x, _) = pick.expect("open target exists");
        let options: Vec<usize> = self.inst.coverers[x]
            .iter()
            .copied()
            .filter(|&c| !self.excluded.contains(c))
            .collect();
        let mut newly_excluded = Vec::new();
        for c in options {
            self.push(c);
            let mut next = open.clone();
            next.difference_with(&self.inst.incidence[c]);
            let r = self.dfs(&next);
            self.pop();
            r?;
            self.excluded.insert(c);
            newly_excluded.push(c);
            if self.chosen.len() + 1 >= self.best.len() {
                break;
            }
        }
        for c in newly_excluded {
            self.excluded.set(c, false);
        }
        Ok(())
    }
}

fn check_se(n: usize, t: usize) -> Result<()> {
    if t >= n {
        return Err(Error::params(format!("an SE system needs t < n, got n={n} t={t}")));
    }
    Ok(())
}

fn check_turan(n: usize, s: usize, t: usize) -> Result<()> {
    if t > s || s > n {
        return Err(Error::params(format!("need t <= s <= n, got n={n} s={s} t={t}")));
    }
    Ok(())
}

/// Memoised exact solver; smaller Turán numbers feed the point-deletion
/// bound of larger instances.
#[derive(Default)]
pub struct ExactSolver {
    pub opts: SolveOptions,
    turan: HashMap<(usize, usize, usize), usize>,
}

impl ExactSolver {
    pub fn new(opts: SolveOptions) -> Self {
        ExactSolver {
            opts,
            turan: HashMap::new(),
        }
    }

    /// `T(n−1,s,t)` when the deleted-point instance is nontrivial.
    fn turan_below(&mut self, n: usize, s: usize, t: usize) -> Result<Option<usize>> {
        if t == 0 || s + 1 > n {
            return Ok(None);
        }
        Ok(Some(self.min_turan(n - 1, s, t)?.0.to_usize().expect("small")))
    }

    /// `S(n,t)` with a witness.
    pub fn min_se(&mut self, n: usize, t: usize) -> Result<(Integer, SetSystem)> {
        check_se(n, t)?;
        let mut inst = CoverInstance::se(n, t, self.opts.incidence_budget)?;
        // Blocks avoiding a point still cover every (t+1)-subset there.
        if let Some(below) = self.turan_below(n, t + 1, t)? {
            inst = inst.with_point_bound(n, below, t);
        }
        let sol = inst.solve(&self.opts)?;
        let sys = witness(&inst, &sol, n, t, Kind::Se)?;
        if !is_se_system(&sys)?.is_valid() {
            return Err(Error::Internal(format!("exact SE witness for n={n} t={t} fails verification")));
        }
        Ok((Integer::from(sys.len()), sys))
    }

    /// `T(n,s,t)` with a witness.
    pub fn min_turan(&mut self, n: usize, s: usize, t: usize) -> Result<(Integer, SetSystem)> {
        check_turan(n, s, t)?;
        let mut inst = CoverInstance::turan(n, s, t, self.opts.incidence_budget)?;
        if let Some(below) = self.turan_below(n, s, t)? {
            inst = inst.with_point_bound(n, below, t);
        }
        let sol = inst.solve(&self.opts)?;
        let sys = witness(&inst, &sol, n, t, Kind::Turan { s })?;
        if !is_turan_system(&sys, s)?.is_valid() {
            return Err(Error::Internal(format!("exact Turán witness for n={n} s={s} t={t} fails verification")));
        }
        self.turan.insert((n, s, t), sys.len());
        Ok((Integer::from(sys.len()), sys))
    }

    /// `C(n,s,t)`: fewest `s`-subsets containing every `t`-subset.
    pub fn min_covering(&mut self, n: usize, s: usize, t: usize) -> Result<(Integer, SetSystem)> {
        let inst = CoverInstance::covering(n, s, t, self.opts.incidence_budget)?;
        let sol = inst.solve(&self.opts)?;
        let sys = witness(&inst, &sol, n, s, Kind::Covering { covered: t })?;
        if !is_covering_design(&sys, t)?.is_valid() {
            return Err(Error::Internal(format!("exact covering witness for n={n} s={s} t={t} fails verification")));
        }
        Ok((Integer::from(sys.len()), sys))
    }
}

fn witness(inst: &CoverInstance, sol: &CoverSolution, n: usize, t: usize, kind: Kind) -> Result<SetSystem> {
    let blocks = sol.chosen.iter().map(|&c| inst.candidates[c]).collect();
    SetSystem::new(n, t, kind, blocks)
}

pub fn min_se(n: usize, t: usize) -> Result<(Integer, SetSystem)> {
    ExactSolver::default().min_se(n, t)
}

pub fn min_turan(n: usize, s: usize, t: usize) -> Result<(Integer, SetSystem)> {
    ExactSolver::default().min_turan(n, s, t)
}

pub fn min_covering(n: usize, s: usize, t: usize) -> Result<(Integer, SetSystem)> {
    ExactSolver::default().min_covering(n, s, t)
}

/// Whether `S(n,3) = T(n,4,3)`, both solved exactly; `n ∈ {6,7,8}`.
pub fn verify_se3_equals_turan43(n: usize) -> Result<bool> {
    if !(6..=8).contains(&n) {
        return Err(Error::params(format!("direct check covers n = 6, 7, 8, got {n}")));
    }
    let mut solver = ExactSolver::default();
    let (t, _) = solver.min_turan(n, 4, 3)?;
    let (s, _) = solver.min_se(n, 3)?;
    Ok(s == t)
}
