//! Lex-leader pruning under ground-element permutations.
//!
//! A permutation `π` of `[N]` acts on colorings by `c^π(S) = c(π⁻¹(S))`.
//! Reading a coloring as a word over `R < B` indexed by integer encoding,
//! a branch is pruned when some configured permutation provably produces a
//! strictly smaller word. Every orbit keeps its lexicographically least
//! member, which is never smaller than any of its images, so pruning with
//! any subset of the group is sound.

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, PartialColoring};

/// Which symmetries the search may exploit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryOptions {
    /// Lex-leader pruning under coordinate permutations.
    pub coordinate_permutations: bool,
    /// Use every permutation of `[N]` instead of the adjacent
    /// transpositions `(i i+1)`. Exact canonicity, much slower.
    pub full_group: bool,
    /// Force the first assigned set red. Only legal when `m = n`.
    pub color_swap: bool,
}

impl SymmetryOptions {
    pub fn none() -> Self {
        SymmetryOptions {
            coordinate_permutations: false,
            full_group: false,
            color_swap: false,
        }
    }

    /// Adjacent transpositions, plus color swap where legal.
    pub fn standard(m: u32, n: u32) -> Self {
        SymmetryOptions {
            coordinate_permutations: true,
            full_group: false,
            color_swap: m == n,
        }
    }

    /// Human-readable list of the permutation generators in use.
    pub fn generator_subset(&self, width: u32) -> Vec<String> {
        if !self.coordinate_permutations || width < 2 {
            return Vec::new();
        }
        if self.full_group {
            return vec![format!("all {}! permutations of [{width}]", width)];
        }
        (1..width).map(|i| format!("({} {})", i, i + 1)).collect()
    }
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        SymmetryOptions::none()
    }
}

/// Applies a permutation of ground elements (0-based images) to a set.
pub(crate) fn permute_set(perm: &[u32], bits: u64) -> u64 {
    let mut out = 0;
    let mut b = bits;
    while b != 0 {
        let p = b.trailing_zeros();
        out |= 1 << perm[p as usize];
        b &= b - 1;
    }
    out
}

fn all_permutations(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n).collect();
    heap_permute(n as usize, &mut cur, &mut out);
    out.sort();
    out
}

fn heap_permute(k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, cur, out);
        let j = if k.is_multiple_of(2) { i } else { 0 };
        cur.swap(j, k - 1);
    }
}

/// Precomputed permutation tables. Entry `t[S]` is `π⁻¹(S)`, so the
/// permuted word reads position `S` from the original word at `t[S]`.
pub(crate) struct LexLeader {
    tables: Vec<Vec<u32>>,
}

impl LexLeader {
    pub(crate) fn new(width: u32, opts: &SymmetryOptions) -> Self {
        if !opts.coordinate_permutations || width < 2 {
            return LexLeader { tables: Vec::new() };
        }
        let perms: Vec<Vec<u32>> = if opts.full_group {
            all_permutations(width)
                .into_iter()
                .filter(|p| p.iter().enumerate().any(|(i, &v)| i as u32 != v))
                .collect()
        } else {
            (0..width - 1)
                .map(|i| {
                    let mut p: Vec<u32> = (0..width).collect();
                    p.swap(i as usize, i as usize + 1);
                    p
                })
                .collect()
        };
        let len = 1u64 << width;
        let tables = perms
            .iter()
            .map(|p| {
                let mut inv = vec![0u32; p.len()];
                for (i, &v) in p.iter().enumerate() {
                    inv[v as usize] = i as u32;
                }
                (0..len).map(|s| permute_set(&inv, s) as u32).collect()
            })
            .collect();
        LexLeader { tables }
    }

    pub(crate) fn is_active(&self) -> bool {
        !self.tables.is_empty()
    }

    /// True when some permutation yields a word that is strictly smaller on
    /// the determined prefix.
    pub(crate) fn dominated(&self, pc: &PartialColoring) -> bool {
        let key = |s: u64| -> Option<u8> {
            if !pc.is_assigned(s) {
                return None;
            }
            // Endpoints are fixed by every permutation.
            Some(match pc.get(s) {
                Some(Color::Red) => 0,
                Some(Color::Blue) => 1,
                None => 2,
            })
        };
        self.tables.iter().any(|t| {
            for (s, &src) in t.iter().enumerate() {
                let (Some(orig), Some(perm)) = (key(s as u64), key(src as u64)) else {
                    return false;
                };
                if perm != orig {
                    return perm < orig;
                }
            }
            false
        })
    }
}
