//! The Boolean lattice `Q_N` as plain bit patterns.
//!
//! A subset of the ground set `[N] = {1, ..., N}` is stored as a `u64`
//! where bit `i - 1` is set iff element `i` belongs to the set. Every
//! iterator in this module yields sets in increasing integer order, which
//! is the canonical order used by certificates and search.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set the lattice model accepts.
pub const MAX_WIDTH: u32 = 64;

/// Bit mask of the full ground set `[width]`.
#[inline]
pub fn full_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A subset of `[width]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementSet {
    bits: u64,
    width: u32,
}

impl ElementSet {
    pub fn new(bits: u64, width: u32) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::arg(format!("width {width} exceeds {MAX_WIDTH}")));
        }
        if bits & !full_mask(width) != 0 {
            return Err(Error::arg(format!(
                "bit pattern {bits:#x} is not a subset of [{width}]"
            )));
        }
        Ok(ElementSet { bits, width })
    }

    /// Builds a set from 1-based element labels.
    pub fn from_elements(elements: &[u32], width: u32) -> Result<Self> {
        let mut bits = 0u64;
        for &e in elements {
            if e == 0 || e > width {
                return Err(Error::arg(format!("element {e} is outside [{width}]")));
            }
            bits |= 1 << (e - 1);
        }
        ElementSet::new(bits, width)
    }

    pub fn empty(width: u32) -> Self {
        ElementSet { bits: 0, width }
    }

    pub fn full(width: u32) -> Self {
        ElementSet {
            bits: full_mask(width),
            width,
        }
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn width(self) -> u32 {
        self.width
    }

    /// Cardinality of the set, i.e. its level in `Q_N`.
    #[inline]
    pub fn level(self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn is_subset(self, other: ElementSet) -> bool {
        self.bits & other.bits == self.bits
    }

    pub fn contains(self, element: u32) -> bool {
        element >= 1 && element <= self.width && self.bits >> (element - 1) & 1 == 1
    }

    pub fn complement(self) -> ElementSet {
        ElementSet {
            bits: !self.bits & full_mask(self.width),
            width: self.width,
        }
    }

    pub fn union(self, other: ElementSet) -> ElementSet {
        ElementSet {
            bits: self.bits | other.bits,
            width: self.width.max(other.width),
        }
    }

    pub fn difference(self, other: ElementSet) -> ElementSet {
        ElementSet {
            bits: self.bits & !other.bits,
            width: self.width,
        }
    }

    /// Sorted 1-based element labels.
    pub fn elements(self) -> Vec<u32> {
        bit_positions(self.bits).map(|p| p + 1).collect()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Renders a raw bit pattern the same way [`ElementSet`] does.
pub fn render_bits(bits: u64) -> String {
    let parts: Vec<String> = bit_positions(bits).map(|p| (p + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Zero-based positions of the set bits, ascending.
pub fn bit_positions(mut bits: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let p = bits.trailing_zeros();
            bits &= bits - 1;
            Some(p)
        }
    })
}

/// Scatters the low bits of `value` into the set positions of `mask`,
/// lowest first. Monotone in `value`, so increasing `value` yields
/// increasing results.
#[inline]
pub fn deposit(mut value: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    while mask != 0 && value != 0 {
        let low = mask & mask.wrapping_neg();
        if value & 1 == 1 {
            out |= low;
        }
        value >>= 1;
        mask &= mask - 1;
    }
    out
}

/// Inverse of [`deposit`]: gathers the bits of `bits` at the positions of
/// `mask` into the low bits of the result.
#[inline]
pub fn extract(bits: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    let mut i = 0;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if bits & low != 0 {
            out |= 1 << i;
        }
        i += 1;
        mask &= mask - 1;
    }
    out
}

/// All submasks of `mask` in increasing order, starting with 0.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        let succ = cur.wrapping_sub(mask) & mask;
        next = if succ == 0 { None } else { Some(succ) };
        Some(cur)
    })
}

fn check_width(width: u32) -> Result<()> {
    if width > MAX_WIDTH {
        Err(Error::arg(format!("width {width} exceeds {MAX_WIDTH}")))
    } else {
        Ok(())
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Iterator over the `k`-element subsets of `[width]`, increasing order.
#[derive(Clone, Debug)]
pub struct LevelMembers {
    next: Option<u64>,
    width: u32,
}

impl Iterator for LevelMembers {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        let cur = self.next?;
        let limit = full_mask(self.width);
        // Gosper's hack, guarded against overflow past the top bit.
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let (ripple, carry) = cur.overflowing_add(low);
            if carry || ripple == 0 {
                None
            } else {
                let ones = ((cur ^ ripple) >> 2) >> low.trailing_zeros();
                let succ = ripple | ones;
                (succ & !limit == 0).then_some(succ)
            }
        };
        Some(ElementSet {
            bits: cur,
            width: self.width,
        })
    }
}

/// The `k`-th level of `Q_width`.
pub fn level_members(width: u32, k: u32) -> Result<LevelMembers> {
    check_width(width)?;
    if k > width {
        return Err(Error::arg(format!("level {k} exceeds width {width}")));
    }
    Ok(LevelMembers {
        next: Some(full_mask(k)),
        width,
    })
}

/// Every set of `Q_width` in increasing order.
pub fn all_members(width: u32) -> impl Iterator<Item = ElementSet> {
    submasks(full_mask(width)).map(move |bits| ElementSet { bits, width })
}

/// `Q*_width`: everything except the empty set and the full set.
pub fn interior_members(width: u32) -> Result<impl Iterator<Item = ElementSet>> {
    check_width(width)?;
    if width == 0 {
        return Err(Error::domain("Q*_0 is undefined"));
    }
    let top = full_mask(width);
    Ok(all_members(width).filter(move |s| s.bits != 0 && s.bits != top))
}

/// The sub-poset `{F : lo ⊆ F ⊆ hi}` of `Q_width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: ElementSet,
    hi: ElementSet,
}

impl Interval {
    pub fn new(lo: ElementSet, hi: ElementSet) -> Result<Self> {
        if lo.width != hi.width {
            return Err(Error::arg(format!(
                "interval endpoints have widths {} and {}",
                lo.width, hi.width
            )));
        }
        if !lo.is_subset(hi) {
            return Err(Error::domain(format!("{lo} is not a subset of {hi}")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> ElementSet {
        self.lo
    }

    pub fn hi(&self) -> ElementSet {
        self.hi
    }

    pub fn width(&self) -> u32 {
        self.lo.width
    }

    /// Mask of the coordinates that vary inside the interval.
    pub fn free_mask(&self) -> u64 {
        self.hi.bits & !self.lo.bits
    }

    pub fn dimension(&self) -> u32 {
        self.free_mask().count_ones()
    }

    /// Number of members; saturates for 64-dimensional intervals.
    pub fn len(&self) -> u64 {
        1u64.checked_shl(self.dimension()).unwrap_or(u64::MAX)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: ElementSet) -> bool {
        self.lo.is_subset(s) && s.is_subset(self.hi)
    }

    /// Members in increasing integer order.
    pub fn iter(&self) -> impl Iterator<Item = ElementSet> {
        let lo = self.lo.bits;
        let width = self.lo.width;
        submasks(self.free_mask()).map(move |f| ElementSet {
            bits: lo | f,
            width,
        })
    }

    /// Maps a set of the `dimension()`-dimensional lattice onto the
    /// interval, sending local coordinate `j` to the `j`-th free ground
    /// element in increasing order.
    pub fn embed(&self, local: u64) -> ElementSet {
        ElementSet {
            bits: self.lo.bits | deposit(local, self.free_mask()),
            width: self.lo.width,
        }
    }
}

/// Shorthand for [`Interval::new`].
pub fn interval(lo: ElementSet, hi: ElementSet) -> Result<Interval> {
    Interval::new(lo, hi)
}

pub fn complement(s: ElementSet) -> ElementSet {
    s.complement()
}
