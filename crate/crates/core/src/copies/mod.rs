//! Copies of `Q_m` inside `Q_N`.
//!
//! A copy is an injection `f` from the subsets of `[m]` into `Q_N` with
//! `x ⊆ y` if and only if `f(x) ⊆ f(y)`. Both directions are checked
//! everywhere; order-preserving maps that are not order-reflecting are
//! never accepted.

mod algebra;
mod engine;
mod poset;

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

pub use algebra::{contains_boolean_algebra, BooleanAlgebra};
pub(crate) use engine::{Embedder, Pool};
pub use poset::{dim2, SmallPoset};

use crate::coloring::{Color, ColorView, Coloring};
use crate::error::{Error, Result};
use crate::lattice::{full_mask, render_bits, ElementSet};

/// Largest ground set for the general copy finders.
pub const MAX_FIND_WIDTH: u32 = 20;
/// Default node cap for a single copy search.
pub const DEFAULT_NODE_CAP: u64 = 2_000_000_000;
/// Node cap for [`enumerate_copy_images`].
pub const ENUMERATION_NODE_CAP: u64 = 200_000_000;

/// A claimed copy of `Q_dim` in `Q_ground`, with sets integer-encoded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyCert {
    pub ground: u32,
    pub dim: u32,
    pub color: Option<Color>,
    /// `(source, image)` pairs sorted by source.
    pub map: Vec<(u64, u64)>,
}

impl CopyCert {
    fn from_images(ground: u32, dim: u32, color: Option<Color>, images: &[u64]) -> Self {
        CopyCert {
            ground,
            dim,
            color,
            map: images.iter().enumerate().map(|(s, &i)| (s as u64, i)).collect(),
        }
    }

    pub fn image(&self, source: u64) -> Option<u64> {
        self.map
            .binary_search_by_key(&source, |&(s, _)| s)
            .ok()
            .map(|i| self.map[i].1)
    }

    /// Image sets in increasing integer order.
    pub fn image_family(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.map.iter().map(|&(_, i)| i).collect();
        v.sort_unstable();
        v
    }

    /// Human-readable `source -> image` listing.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .map
            .iter()
            .map(|&(s, i)| format!("{}->{}", render_bits(s), render_bits(i)))
            .collect();
        let color = self.color.map_or("uncolored".to_string(), |c| c.to_string());
        format!("{color} Q_{} in Q_{}: {}", self.dim, self.ground, parts.join(" "))
    }
}

/// Checks the two-sided order condition, injectivity, and, when a coloring
/// is supplied, the color claim. Malformed maps verify as `false`.
pub fn verify_copy(cert: &CopyCert, coloring: Option<&Coloring>) -> Result<bool> {
    if let Some(c) = coloring {
        if c.width() != cert.ground {
            return Err(Error::arg(format!(
                "certificate is over Q_{} but the coloring is over Q_{}",
                cert.ground,
                c.width()
            )));
        }
    }
    if cert.dim > cert.ground || cert.ground > 64 || cert.dim > MAX_FIND_WIDTH {
        return Ok(false);
    }
    let n = 1usize << cert.dim;
    if cert.map.len() != n {
        return Ok(false);
    }
    let limit = full_mask(cert.ground);
    let mut images = vec![0u64; n];
    for (k, &(s, i)) in cert.map.iter().enumerate() {
        if s != k as u64 || i & !limit != 0 {
            return Ok(false);
        }
        images[k] = i;
    }
    for x in 0..n {
        for y in 0..n {
            let src = x & y == x;
            let img = images[x] & images[y] == images[x];
            if src != img {
                return Ok(false);
            }
            if x != y && images[x] == images[y] {
                return Ok(false);
            }
        }
    }
    if let (Some(c), Some(color)) = (coloring, cert.color) {
        if !images.iter().all(|&i| c.has_color(i, color)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_find_args(width: u32, m: u32) -> Result<()> {
    if width > MAX_FIND_WIDTH {
        return Err(Error::resource(
            format!("copy search is capped at N = {MAX_FIND_WIDTH}, got {width}"),
            0,
        ));
    }
    if m > width {
        return Err(Error::arg(format!("Q_{m} cannot fit in Q_{width}")));
    }
    Ok(())
}

/// First monochromatic copy of `Q_m` in canonical backtracking order.
pub fn find_mono_copy(c: &Coloring, m: u32, color: Color) -> Result<Option<CopyCert>> {
    find_mono_copy_capped(c, m, color, DEFAULT_NODE_CAP)
}

pub fn find_mono_copy_capped(
    c: &Coloring,
    m: u32,
    color: Color,
    cap: u64,
) -> Result<Option<CopyCert>> {
    check_find_args(c.width(), m)?;
    let mut e = Embedder::new(Pool::Colored(c, color), c.width(), m, cap);
    Ok(e.first()?
        .map(|imgs| CopyCert::from_images(c.width(), m, Some(color), &imgs)))
}

/// Searches for a monochromatic copy whose image contains `pivot`.
pub fn find_mono_copy_through(
    c: &Coloring,
    m: u32,
    color: Color,
    pivot: ElementSet,
) -> Result<Option<CopyCert>> {
    check_find_args(c.width(), m)?;
    if pivot.width() != c.width() {
        return Err(Error::arg("pivot width differs from coloring width"));
    }
    if !c.has_color(pivot.bits(), color) {
        return Err(Error::arg(format!("pivot {pivot} is not {color}")));
    }
    let mut nodes = 0;
    Ok(through(c, m, color, pivot.bits(), DEFAULT_NODE_CAP, &mut nodes)?
        .map(|imgs| CopyCert::from_images(c.width(), m, Some(color), &imgs)))
}

/// Core of the incremental check. The automorphisms of `Q_m` act
/// transitively on each level, so it suffices to try the pivot as the
/// image of `{1..l}` for each level `l`. Inside that, coordinates
/// `1..l` and `l+1..m` can each be relabelled freely, so singleton images
/// are required to increase within each block.
pub(crate) fn through<V: ColorView>(
    view: &V,
    m: u32,
    color: Color,
    pivot: u64,
    cap: u64,
    nodes: &mut u64,
) -> Result<Option<Vec<u64>>> {
    let width = view.width();
    if m > width {
        return Ok(None);
    }
    let plevel = pivot.count_ones();
    for l in 0..=m {
        // The image of an l-set has at least l elements and at most N - (m - l).
        if plevel < l || width - plevel < m - l {
            continue;
        }
        let src = full_mask(l);
        let blocks = (0..m).map(|j| u32::from(j >= l)).collect();
        let mut e = Embedder::new(Pool::Colored(view, color), width, m, cap.saturating_sub(*nodes))
            .with_pivot(src, pivot)
            .with_singleton_order(blocks);
        let found = e.first();
        *nodes += e.nodes;
        if let Some(imgs) = found? {
            return Ok(Some(imgs));
        }
    }
    Ok(None)
}

/// Largest `(N, m)` accepted by [`enumerate_copy_images`]: `N ≤ 6`.
pub const MAX_ENUMERATION_WIDTH: u32 = 6;

/// Every distinct image family of a copy of `Q_m` in `Q_N`, each sorted,
/// the families in lexicographic order.
pub fn enumerate_copy_images(width: u32, m: u32) -> Result<Vec<Vec<u64>>> {
    if width > MAX_ENUMERATION_WIDTH {
        return Err(Error::resource(
            format!("copy enumeration is capped at N = {MAX_ENUMERATION_WIDTH}, got {width}"),
            0,
        ));
    }
    let mut out = BTreeSet::new();
    if m > width {
        return Ok(Vec::new());
    }
    let mut e = Embedder::<Coloring>::new(Pool::Any, width, m, ENUMERATION_NODE_CAP)
        .with_singleton_order(vec![0; m as usize]);
    let _ = e.run(&mut |imgs: &[u64]| {
        let mut fam = imgs.to_vec();
        fam.sort_unstable();
        out.insert(fam);
        ControlFlow::Continue(())
    })?;
    Ok(out.into_iter().collect())
}
