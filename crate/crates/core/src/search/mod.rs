//! Exhaustive search for good colorings.
//!
//! A coloring of `Q_N` is good for `(m, n)` when it has no red copy of
//! `Q_m` and no blue copy of `Q_n`; a good coloring certifies
//! `R(Q_m, Q_n) > N`, and a completed refutation certifies `R ≤ N`.
//!
//! Sets are colored in increasing integer order (interior sets only in hat
//! mode), red before blue. After each assignment only copies through the
//! newly colored set are searched for: any monochromatic copy in a total
//! coloring is complete at the moment its last set is colored, so checking
//! the last set suffices.

mod cnf;
mod symmetry;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cnf::{
    export_cnf, import_model, parse_dimacs, parse_model, solve_exhaustive, Cnf,
    CnfStats, ModelCheck,
};
pub use symmetry::SymmetryOptions;
use symmetry::LexLeader;

use crate::coloring::{Color, ColorView, Coloring, PartialColoring};
use crate::copies::{self, CopyCert, Embedder, Pool, DEFAULT_NODE_CAP};
use crate::error::{Error, Result};
use crate::lattice::full_mask;

/// Largest ground set for native search.
pub const MAX_SEARCH_WIDTH: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub ground: u32,
    pub m: u32,
    pub n: u32,
    pub hat: bool,
    pub symmetry: SymmetryOptions,
    pub node_cap: Option<u64>,
    pub workers: usize,
}

impl SearchProblem {
    /// Plain problem: no symmetry pruning, no cap, one worker.
    pub fn new(ground: u32, m: u32, n: u32) -> Self {
        SearchProblem {
            ground,
            m,
            n,
            hat: false,
            symmetry: SymmetryOptions::none(),
            node_cap: None,
            workers: 1,
        }
    }

    pub fn with_symmetry(mut self, symmetry: SymmetryOptions) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn with_hat(mut self, hat: bool) -> Self {
        self.hat = hat;
        self
    }

    pub fn with_node_cap(mut self, cap: Option<u64>) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.n < 1 {
            return Err(Error::arg("m and n must be at least 1"));
        }
        if self.ground > MAX_SEARCH_WIDTH {
            return Err(Error::arg(format!(
                "native search is capped at N = {MAX_SEARCH_WIDTH}; use CNF export beyond that"
            )));
        }
        if self.hat && self.ground == 0 {
            return Err(Error::arg("hat mode needs N ≥ 1"));
        }
        if self.node_cap == Some(0) {
            return Err(Error::arg("node cap must be positive"));
        }
        if self.symmetry.color_swap && self.m != self.n {
            return Err(Error::arg("color-swap symmetry requires m = n"));
        }
        if self.workers == 0 {
            return Err(Error::arg("worker count must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchTag {
    Witness,
    Exhausted,
    CapHit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Color assignments made.
    pub nodes: u64,
    pub copy_prunes: u64,
    pub symmetry_prunes: u64,
    /// Nodes explored inside the incremental copy checks.
    pub copy_search_nodes: u64,
    pub wall_ms: u64,
}

impl SearchStats {
    fn merge(self, other: SearchStats) -> SearchStats {
        SearchStats {
            nodes: self.nodes + other.nodes,
            copy_prunes: self.copy_prunes + other.copy_prunes,
            symmetry_prunes: self.symmetry_prunes + other.symmetry_prunes,
            copy_search_nodes: self.copy_search_nodes + other.copy_search_nodes,
            wall_ms: self.wall_ms.max(other.wall_ms),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub tag: SearchTag,
    pub witness: Option<Coloring>,
    pub stats: SearchStats,
}

/// True iff `view` holds a copy of `Q_dim` in `color` anywhere.
fn has_copy<V: ColorView>(view: &V, dim: u32, color: Color) -> Result<bool> {
    if dim > view.width() {
        return Ok(false);
    }
    let mut e = Embedder::new(Pool::Colored(view, color), view.width(), dim, DEFAULT_NODE_CAP);
    Ok(e.first()?.is_some())
}

/// A monochromatic red `Q_m` or blue `Q_n` in `c`, if any.
pub fn find_violation(c: &Coloring, m: u32, n: u32) -> Result<Option<CopyCert>> {
    for (dim, color) in [(m, Color::Red), (n, Color::Blue)] {
        if dim <= c.width() {
            if let Some(cert) = copies::find_mono_copy(c, dim, color)? {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// True iff `c` has neither a red `Q_m` nor a blue `Q_n`.
pub fn verify_witness(c: &Coloring, m: u32, n: u32) -> Result<bool> {
    Ok(find_violation(c, m, n)?.is_none())
}

struct Shared<'a> {
    problem: &'a SearchProblem,
    order: Vec<u64>,
    lex: LexLeader,
    found: AtomicBool,
    nodes: AtomicU64,
    cap_hit: AtomicBool,
}

struct Worker<'a, 'b> {
    shared: &'b Shared<'a>,
    pc: PartialColoring,
    stats: SearchStats,
    pending_nodes: u64,
}

enum Step {
    Done,
    Witness(Coloring),
    Stop,
}

impl Worker<'_, '_> {
    fn flush_nodes(&mut self) -> bool {
        let total = self.shared.nodes.fetch_add(self.pending_nodes, Ordering::Relaxed)
            + self.pending_nodes;
        self.pending_nodes = 0;
        if let Some(cap) = self.shared.problem.node_cap {
            if total > cap {
                self.shared.cap_hit.store(true, Ordering::Relaxed);
                return false;
            }
        }
        true
    }

    /// Assigns `color` to the set at `depth`; returns false when the branch
    /// is refuted.
    fn try_assign(&mut self, depth: usize, color: Color) -> Result<bool> {
        let p = self.shared.problem;
        let e = self.shared.order[depth];
        self.pc.assign(e, color);
        self.stats.nodes += 1;
        self.pending_nodes += 1;
        let dim = match color {
            Color::Red => p.m,
            Color::Blue => p.n,
        };
        let mut inner = 0;
        let hit = copies::through(&self.pc, dim, color, e, DEFAULT_NODE_CAP, &mut inner)?;
        self.stats.copy_search_nodes += inner;
        if hit.is_some() {
            self.stats.copy_prunes += 1;
            return Ok(false);
        }
        if self.shared.lex.is_active() && self.shared.lex.dominated(&self.pc) {
            self.stats.symmetry_prunes += 1;
            return Ok(false);
        }
        Ok(true)
    }

    fn colors_at(&self, depth: usize) -> &'static [Color] {
        if depth == 0 && self.shared.problem.symmetry.color_swap {
            &[Color::Red]
        } else {
            &[Color::Red, Color::Blue]
        }
    }

    fn dfs(&mut self, depth: usize) -> Result<Step> {
        if self.shared.found.load(Ordering::Relaxed) || self.shared.cap_hit.load(Ordering::Relaxed)
        {
            return Ok(Step::Stop);
        }
        if depth == self.shared.order.len() {
            return Ok(Step::Witness(self.pc.to_coloring()?));
        }
        if self.pending_nodes >= 1024 && !self.flush_nodes() {
            return Ok(Step::Stop);
        }
        let e = self.shared.order[depth];
        for &color in self.colors_at(depth) {
            if self.try_assign(depth, color)? {
                match self.dfs(depth + 1)? {
                    Step::Done => {}
                    other => {
                        self.pc.unassign(e);
                        return Ok(other);
                    }
                }
            }
            self.pc.unassign(e);
        }
        Ok(Step::Done)
    }
}

/// Fan-out depth: at least two levels, deeper when more workers are
/// available, never past the whole assignment order.
fn split_depth(workers: usize, len: usize) -> usize {
    let extra = (usize::BITS - workers.saturating_sub(1).leading_zeros()) as usize;
    (2 + extra + 2 * usize::from(workers > 1)).min(len)
}

/// Enumerates the surviving prefixes of length `depth` in DFS order.
fn prefixes(worker: &mut Worker<'_, '_>, depth: usize) -> Result<Vec<Vec<Color>>> {
    fn rec(
        w: &mut Worker<'_, '_>,
        d: usize,
        target: usize,
        cur: &mut Vec<Color>,
        out: &mut Vec<Vec<Color>>,
    ) -> Result<()> {
        if d == target {
            out.push(cur.clone());
            return Ok(());
        }
        let e = w.shared.order[d];
        for &color in w.colors_at(d) {
            if w.try_assign(d, color)? {
                cur.push(color);
                rec(w, d + 1, target, cur, out)?;
                cur.pop();
            }
            w.pc.unassign(e);
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(worker, 0, depth, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Runs the exhaustive search.
pub fn search_good_coloring(p: &SearchProblem) -> Result<SearchOutcome> {
    p.validate()?;
    let start = Instant::now();
    let width = p.ground;
    let top = full_mask(width);
    let order: Vec<u64> = (0..=top).filter(|&s| !(p.hat && (s == 0 || s == top))).collect();

    let initial = PartialColoring::new(width, p.hat)?;
    // In hat mode the endpoints alone may already form a forbidden copy.
    if has_copy(&initial, p.m, Color::Red)? || has_copy(&initial, p.n, Color::Blue)? {
        return Ok(SearchOutcome {
            tag: SearchTag::Exhausted,
            witness: None,
            stats: SearchStats {
                wall_ms: start.elapsed().as_millis() as u64,
                ..SearchStats::default()
            },
        });
    }

    let shared = Shared {
        problem: p,
        order,
        lex: LexLeader::new(width, &p.symmetry),
        found: AtomicBool::new(false),
        nodes: AtomicU64::new(0),
        cap_hit: AtomicBool::new(false),
    };
    let new_worker = || Worker {
        shared: &shared,
        pc: initial.clone(),
        stats: SearchStats::default(),
        pending_nodes: 0,
    };

    let (witness, mut stats) = if p.workers == 1 {
        let mut w = new_worker();
        let step = w.dfs(0)?;
        w.flush_nodes();
        match step {
            Step::Witness(c) => (Some(c), w.stats),
            _ => (None, w.stats),
        }
    } else {
        let depth = split_depth(p.workers, shared.order.len());
        let mut root = new_worker();
        let tasks = prefixes(&mut root, depth)?;
        root.flush_nodes();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(p.workers)
            .build()
            .map_err(|e| Error::arg(format!("cannot start worker pool: {e}")))?;
        let results: Vec<Result<(Option<Coloring>, SearchStats)>> = pool.install(|| {
            tasks
                .par_iter()
                .map(|prefix| {
                    let mut w = new_worker();
                    for (d, &color) in prefix.iter().enumerate() {
                        w.pc.assign(shared.order[d], color);
                    }
                    let step = w.dfs(prefix.len())?;
                    w.flush_nodes();
                    Ok(match step {
                        Step::Witness(c) => {
                            shared.found.store(true, Ordering::Relaxed);
                            (Some(c), w.stats)
                        }
                        _ => (None, w.stats),
                    })
                })
                .collect()
        });
        let mut witness = None;
        let mut stats = root.stats;
        for r in results {
            let (wit, s) = r?;
            stats = stats.merge(s);
            if witness.is_none() {
                witness = wit;
            }
        }
        (witness, stats)
    };
    stats.wall_ms = start.elapsed().as_millis() as u64;

    let tag = if witness.is_some() {
        SearchTag::Witness
    } else if shared.cap_hit.load(Ordering::Relaxed) {
        SearchTag::CapHit
    } else {
        SearchTag::Exhausted
    };
    if let Some(c) = &witness {
        if !verify_witness(c, p.m, p.n)? {
            return Err(Error::Defect(format!(
                "search produced a coloring that is not good: {}",
                c.render()
            )));
        }
    }
    Ok(SearchOutcome {
        tag,
        witness,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, parity_coloring};

    fn tag(ground: u32, m: u32, n: u32) -> SearchTag {
        search_good_coloring(&SearchProblem::new(ground, m, n)).unwrap().tag
    }

    #[test]
    fn q2_q2_small_cases() {
        assert_eq!(tag(3, 2, 2), SearchTag::Witness);
        assert_eq!(tag(4, 2, 2), SearchTag::Exhausted);
    }

    #[test]
    fn q1_qn() {
        assert_eq!(tag(2, 1, 2), SearchTag::Witness);
        assert_eq!(tag(3, 1, 2), SearchTag::Exhausted);
        assert_eq!(tag(3, 1, 3), SearchTag::Witness);
    }

    #[test]
    fn parity_witness_for_q2_q3() {
        assert_eq!(tag(4, 2, 3), SearchTag::Witness);
        let p = parity_coloring(4).unwrap();
        assert!(verify_witness(&p, 2, 3).unwrap());
        assert!(!verify_witness(&p, 2, 2).unwrap());
        let blue = constant_coloring(3, Color::Blue).unwrap();
        assert!(!verify_witness(&blue, 2, 3).unwrap());
    }

    #[test]
    fn validation() {
        assert!(search_good_coloring(&SearchProblem::new(9, 2, 2)).is_err());
        assert!(search_good_coloring(&SearchProblem::new(3, 0, 2)).is_err());
        let bad_swap = SearchProblem::new(3, 2, 3).with_symmetry(SymmetryOptions {
            color_swap: true,
            ..SymmetryOptions::none()
        });
        assert!(search_good_coloring(&bad_swap).is_err());
        assert!(search_good_coloring(&SearchProblem::new(3, 2, 2).with_node_cap(Some(0))).is_err());
    }

    #[test]
    fn cap_hit_carries_no_claim() {
        let p = SearchProblem::new(4, 2, 2).with_node_cap(Some(5));
        let out = search_good_coloring(&p).unwrap();
        assert_eq!(out.tag, SearchTag::CapHit);
        assert!(out.witness.is_none());
    }

    #[test]
    fn symmetry_and_workers_keep_tags() {
        for (g, m, n) in [(3, 2, 2), (4, 2, 2), (4, 2, 3), (3, 1, 2), (3, 1, 3)] {
            let plain = tag(g, m, n);
            for workers in [1, 3] {
                let p = SearchProblem::new(g, m, n)
                    .with_symmetry(SymmetryOptions::standard(m, n))
                    .with_workers(workers);
                assert_eq!(search_good_coloring(&p).unwrap().tag, plain, "{g} {m} {n} w={workers}");
            }
        }
    }

    #[test]
    fn hat_mode_smoke() {
        // Q*_2 = {{1},{2}} is an antichain; endpoints serve both colors.
        let p = SearchProblem::new(2, 2, 2).with_hat(true);
        let out = search_good_coloring(&p).unwrap();
        // Any coloring of {1},{2} completes a Q_2 of the color used twice
        // or, if mixed, neither: {∅,{1},{2},[2]} needs both middle sets.
        assert_eq!(out.tag, SearchTag::Witness);
        let w = out.witness.unwrap();
        assert!(w.is_hat());
    }

    #[test]
    fn split_depth_bounds() {
        assert_eq!(split_depth(1, 100), 2);
        assert!(split_depth(8, 100) >= 5);
        assert_eq!(split_depth(8, 3), 3);
    }
}
