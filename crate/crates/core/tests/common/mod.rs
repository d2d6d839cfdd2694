//! Test-side oracles, written without the library's copy engine.
#![allow(dead_code)]

/// Color word over 'R'/'B' for `word`, bit `i` set meaning set `i` is red.
pub fn word_of(bits: u64, len: usize) -> String {
    (0..len).map(|i| if bits >> i & 1 == 1 { 'R' } else { 'B' }).collect()
}

/// Sets of one color class, as integer encodings.
pub fn class(word: &[u8], letter: u8) -> Vec<u64> {
    word.iter()
        .enumerate()
        .filter(|&(_, &c)| c == letter || c == b'*')
        .map(|(i, _)| i as u64)
        .collect()
}

fn subset(a: u64, b: u64) -> bool {
    a & b == a
}

/// The two-sided order condition on a full image list indexed by source.
pub fn is_copy(images: &[u64]) -> bool {
    let n = images.len();
    (0..n).all(|x| {
        (0..n).all(|y| {
            let ok = ((x & y) == x) == subset(images[x], images[y]);
            ok && (x == y || images[x] != images[y])
        })
    })
}

/// Every injection of the `2^m` sources into `pool`, no pruning at all.
pub fn brute_copy(pool: &[u64], m: u32) -> bool {
    fn go(pool: &[u64], size: usize, used: &mut Vec<bool>, cur: &mut Vec<u64>) -> bool {
        if cur.len() == size {
            return is_copy(cur);
        }
        for i in 0..pool.len() {
            if !used[i] {
                used[i] = true;
                cur.push(pool[i]);
                let hit = go(pool, size, used, cur);
                cur.pop();
                used[i] = false;
                if hit {
                    return true;
                }
            }
        }
        false
    }
    let size = 1usize << m;
    if pool.len() < size {
        return false;
    }
    go(pool, size, &mut vec![false; pool.len()], &mut Vec::new())
}

/// Injections built source by source, rejecting a partial map as soon as
/// two assigned sources violate the order condition. Same answer as
/// [`brute_copy`], fast enough for pools of a dozen sets.
pub fn pruned_copy(pool: &[u64], m: u32) -> bool {
    fn go(pool: &[u64], size: usize, used: &mut Vec<bool>, cur: &mut Vec<u64>) -> bool {
        let x = cur.len();
        if x == size {
            return true;
        }
        for i in 0..pool.len() {
            if used[i] {
                continue;
            }
            let y = pool[i];
            let fits = cur.iter().enumerate().all(|(s, &img)| {
                ((s & x) == s) == subset(img, y) && ((s & x) == x) == subset(y, img)
            });
            if fits {
                used[i] = true;
                cur.push(y);
                let hit = go(pool, size, used, cur);
                cur.pop();
                used[i] = false;
                if hit {
                    return true;
                }
            }
        }
        false
    }
    let size = 1usize << m;
    pool.len() >= size && go(pool, size, &mut vec![false; pool.len()], &mut Vec::new())
}

/// `Q_2` directly: incomparable `B`, `C` with a common lower bound below
/// `B ∩ C` and a common upper bound above `B ∪ C`, all in `pool`.
pub fn has_q2(pool: &[u64]) -> bool {
    pool.iter().any(|&b| {
        pool.iter().any(|&c| {
            !subset(b, c)
                && !subset(c, b)
                && pool.iter().any(|&a| subset(a, b & c))
                && pool.iter().any(|&d| subset(b | c, d))
        })
    })
}

/// Longest chain (by strict inclusion) inside `pool`.
pub fn longest_chain(pool: &[u64]) -> usize {
    let mut sorted = pool.to_vec();
    sorted.sort_by_key(|s| s.count_ones());
    let mut best = vec![1usize; sorted.len()];
    for i in 0..sorted.len() {
        for j in 0..i {
            if sorted[j] != sorted[i] && subset(sorted[j], sorted[i]) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

/// Red `Q_m` or blue `Q_n` in a color word, by [`pruned_copy`].
pub fn has_violation(word: &str, m: u32, n: u32) -> bool {
    let w = word.as_bytes();
    pruned_copy(&class(w, b'R'), m) || pruned_copy(&class(w, b'B'), n)
}
