//! Backtracking embedder for copies of `Q_m` inside a colored `Q_N`.
//!
//! Sources are the subsets of `[m]`, visited level by level and by integer
//! encoding within a level. When a source `x` is reached every proper
//! subset of `x` already has an image, so a candidate image `y` must
//! contain the union `U` of those images (and differ from it when `x` is a
//! singleton). Incomparable sources are checked pairwise. Candidates are
//! supersets of `U` tried in increasing integer order, restricted to the
//! admissible color class.

use std::ops::ControlFlow;

use crate::coloring::{Color, ColorView};
use crate::error::{Error, Result};
use crate::lattice::{full_mask, submasks};

/// Which sets may serve as images.
#[derive(Clone, Copy)]
pub(crate) enum Pool<'a, V: ColorView> {
    Any,
    Colored(&'a V, Color),
}

impl<V: ColorView> Pool<'_, V> {
    #[inline]
    fn admits(&self, bits: u64) -> bool {
        match self {
            Pool::Any => true,
            Pool::Colored(v, c) => v.has_color(bits, *c),
        }
    }
}

/// Sources of `Q_dim` in level-then-integer order.
pub(crate) fn source_order(dim: u32) -> Vec<u64> {
    let mut v: Vec<u64> = (0..1u64 << dim).collect();
    v.sort_by_key(|&s| (s.count_ones(), s));
    v
}

pub(crate) struct Embedder<'a, V: ColorView> {
    pool: Pool<'a, V>,
    width: u32,
    dim: u32,
    order: Vec<u64>,
    images: Vec<u64>,
    assigned: Vec<bool>,
    pivot: Option<(u64, u64)>,
    /// Coordinate blocks for singleton ordering; `None` disables it.
    blocks: Option<Vec<u32>>,
    pub(crate) nodes: u64,
    cap: u64,
}

impl<'a, V: ColorView> Embedder<'a, V> {
    pub(crate) fn new(pool: Pool<'a, V>, width: u32, dim: u32, cap: u64) -> Self {
        let n = 1usize << dim;
        Embedder {
            pool,
            width,
            dim,
            order: source_order(dim),
            images: vec![0; n],
            assigned: vec![false; n],
            pivot: None,
            blocks: None,
            nodes: 0,
            cap,
        }
    }

    /// Forces `source` to map onto `image`.
    pub(crate) fn with_pivot(mut self, source: u64, image: u64) -> Self {
        self.pivot = Some((source, image));
        self.images[source as usize] = image;
        self.assigned[source as usize] = true;
        self
    }

    /// Requires images of singletons in the same block to increase with the
    /// element label. Sound whenever the permutations inside each block fix
    /// every other constraint, since relabelling `[m]` maps copies to copies
    /// with the same image family.
    pub(crate) fn with_singleton_order(mut self, blocks: Vec<u32>) -> Self {
        debug_assert_eq!(blocks.len(), self.dim as usize);
        self.blocks = Some(blocks);
        self
    }

    /// Visits every complete map (indexed by source bits). The visitor may
    /// stop the search by returning `Break`.
    pub(crate) fn run<F>(&mut self, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[u64]) -> ControlFlow<()>,
    {
        if self.dim > self.width {
            return Ok(ControlFlow::Continue(()));
        }
        if let Some((_, img)) = self.pivot {
            if !self.pool.admits(img) {
                return Ok(ControlFlow::Continue(()));
            }
        }
        self.extend(0, visit)
    }

    /// Returns the first complete map in canonical order.
    pub(crate) fn first(&mut self) -> Result<Option<Vec<u64>>> {
        let mut found = None;
        let _ = self.run(&mut |imgs: &[u64]| {
            found = Some(imgs.to_vec());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    fn extend<F>(&mut self, pos: usize, visit: &mut F) -> Result<ControlFlow<()>>
    where
        F: FnMut(&[u64]) -> ControlFlow<()>,
    {
        if pos == self.order.len() {
            return Ok(visit(&self.images));
        }
        let x = self.order[pos];
        if matches!(self.pivot, Some((src, _)) if src == x) {
            return self.extend(pos + 1, visit);
        }

        let level = x.count_ones();
        let mut lower = 0u64;
        let mut bits = x;
        while bits != 0 {
            let low = bits & bits.wrapping_neg();
            lower |= self.images[(x ^ low) as usize];
            bits ^= low;
        }
        let mut upper = full_mask(self.width);
        let mut max_level = self.width - (self.dim - level);
        let mut strict_upper = false;
        if let Some((src, img)) = self.pivot {
            if x & src == x {
                upper = img;
                strict_upper = true;
                max_level = max_level
                    .min(img.count_ones().saturating_sub(src.count_ones() - level));
            }
        }
        if lower & !upper != 0 {
            return Ok(ControlFlow::Continue(()));
        }
        let floor = self.singleton_floor(x);

        let free = upper & !lower;
        for sub in submasks(free) {
            let y = lower | sub;
            // With two or more covers the union already sits strictly above
            // each of their images.
            if level == 1 && y == lower {
                continue;
            }
            if strict_upper && y == upper {
                break;
            }
            if y.count_ones() > max_level {
                continue;
            }
            if let Some(f) = floor {
                if y <= f {
                    continue;
                }
            }
            if !self.pool.admits(y) {
                continue;
            }
            if !self.incomparable_ok(pos, x, y) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.cap {
                return Err(Error::resource(
                    format!("copy search for Q_{} in Q_{}", self.dim, self.width),
                    self.nodes,
                ));
            }
            self.images[x as usize] = y;
            self.assigned[x as usize] = true;
            let flow = self.extend(pos + 1, visit)?;
            self.assigned[x as usize] = false;
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    fn singleton_floor(&self, x: u64) -> Option<u64> {
        let blocks = self.blocks.as_ref()?;
        if x.count_ones() != 1 {
            return None;
        }
        let i = x.trailing_zeros() as usize;
        let prev = (0..i).rev().find(|&j| blocks[j] == blocks[i])?;
        let s = 1u64 << prev;
        self.assigned[s as usize].then(|| self.images[s as usize])
    }

    #[inline]
    fn incomparable_ok(&self, pos: usize, x: u64, y: u64) -> bool {
        let check = |s: u64| {
            if s & x == s || s & x == x {
                return true;
            }
            let img = self.images[s as usize];
            img & y != img && img & y != y
        };
        if let Some((src, _)) = self.pivot {
            if !check(src) {
                return false;
            }
        }
        self.order[..pos]
            .iter()
            .all(|&s| !self.assigned[s as usize] || check(s))
    }
}
