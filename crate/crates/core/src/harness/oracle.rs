//! Brute-force copy finder used as a cross-check of the backtracking engine.

use crate::coloring::{Color, ColorView, Coloring};
use crate::error::{Error, Result};

/// Largest ground set the brute force accepts.
pub const MAX_NAIVE_WIDTH: u32 = 3;

/// Tries every injective assignment of the `2^m` sources to sets of the
/// given color and returns the first (by source order) that is a copy.
pub fn naive_mono_copy(c: &Coloring, m: u32, color: Color) -> Result<Option<Vec<u64>>> {
    if c.width() > MAX_NAIVE_WIDTH {
        return Err(Error::resource(
            format!("the brute-force copy finder is capped at N = {MAX_NAIVE_WIDTH}"),
            0,
        ));
    }
    if m > c.width() {
        return Ok(None);
    }
    let pool: Vec<u64> = (0..1u64 << c.width())
        .filter(|&s| c.has_color(s, color))
        .collect();
    let size = 1usize << m;
    let mut chosen = Vec::with_capacity(size);
    let mut used = vec![false; pool.len()];
    Ok(assign(&pool, size, &mut chosen, &mut used).then_some(chosen))
}

fn assign(pool: &[u64], size: usize, chosen: &mut Vec<u64>, used: &mut [bool]) -> bool {
    if chosen.len() == size {
        return is_copy(chosen);
    }
    for i in 0..pool.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        chosen.push(pool[i]);
        if assign(pool, size, chosen, used) {
            return true;
        }
        chosen.pop();
        used[i] = false;
    }
    false
}

fn is_copy(images: &[u64]) -> bool {
    (0..images.len()).all(|x| {
        (0..images.len()).all(|y| (x & y == x) == (images[x] & images[y] == images[x]))
    })
}
