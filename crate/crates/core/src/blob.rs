//! Constructive blob embedding.
//!
//! Given a coloring of `Q_N`, a base copy `i` of `Q_n` inside `Q_{n'}` and a
//! partition of `[N] \ [n']` into blocks `X_1, ..., X_k` with
//! `k = n + 1 - a - b` and every `|X_j| ≥ m`, the embedder grows a blue copy
//! of `Q_n` level by level:
//!
//! * levels `0..a` map to `i(S)`, blue by hypothesis;
//! * level `a + j - 1` (for `j = 1..=k`) maps to the lowest blue set of the
//!   interval `[i(S) ∪ X_1 ∪ … ∪ X_{j-1}, i(S) ∪ X_1 ∪ … ∪ X_j]`;
//! * levels `n - b + 1..=n` map to `i(S) ∪ X_1 ∪ … ∪ X_k`, blue by hypothesis.
//!
//! Every image meets `[n']` exactly in `i(S)`, and images on higher levels
//! sit above the block unions of lower levels, so the map is a copy. When
//! an interval has no blue set it is entirely red, its free coordinates are
//! a whole block of size at least `m`, and a red `Q_m` is read off it.

use serde::{Deserialize, Serialize};

use crate::coloring::{Color, ColorView, Coloring};
use crate::copies::{verify_copy, CopyCert};
use crate::error::{Error, Result};
use crate::lattice::{deposit, full_mask, ElementSet, Interval};

/// Parameters of one blob embedding. Sets are integer-encoded over `[N]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlobSpec {
    ground: u32,
    n: u32,
    n_prime: u32,
    m: u32,
    a: u32,
    b: u32,
    partition: Vec<u64>,
    injection: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlobTag {
    BlueCopy,
    RedCopy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlobOutcome {
    pub tag: BlobTag,
    pub cert: CopyCert,
}

fn is_copy(images: &[u64]) -> bool {
    let n = images.len();
    (0..n).all(|x| {
        (0..n).all(|y| {
            let src = x & y == x;
            let img = images[x] & images[y] == images[x];
            src == img && (x == y || images[x] != images[y])
        })
    })
}

impl BlobSpec {
    /// Validates every structural invariant: the size conditions, the block
    /// partition of `[N] \ [n']`, and that `injection` (indexed by the subsets
    /// of `[n]`) is a copy of `Q_n` inside `Q_{n'}`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        ground: u32,
        n: u32,
        n_prime: u32,
        m: u32,
        a: u32,
        b: u32,
        partition: Vec<u64>,
        injection: Vec<u64>,
    ) -> Result<Self> {
        if ground > 20 {
            return Err(Error::resource("blob embedding is capped at N = 20", 0));
        }
        if !(ground >= n_prime && n_prime >= n && n >= a + b && ground >= m) {
            return Err(Error::arg(format!(
                "need N ≥ n' ≥ n ≥ a + b and N ≥ m, got N={ground} n'={n_prime} n={n} a={a} b={b} m={m}"
            )));
        }
        let k = (n + 1 - a - b) as usize;
        if partition.len() != k {
            return Err(Error::arg(format!(
                "expected k = n + 1 - a - b = {k} blocks, got {}",
                partition.len()
            )));
        }
        let base = full_mask(n_prime);
        let mut covered = base;
        for (j, &x) in partition.iter().enumerate() {
            if x & covered != 0 {
                return Err(Error::arg(format!("block X_{} overlaps earlier parts", j + 1)));
            }
            if x.count_ones() < m {
                return Err(Error::arg(format!(
                    "block X_{} has {} elements, fewer than m = {m}",
                    j + 1,
                    x.count_ones()
                )));
            }
            covered |= x;
        }
        if covered != full_mask(ground) {
            return Err(Error::arg("[n'] and the blocks do not cover [N]"));
        }
        if (ground as u64) < n_prime as u64 + k as u64 * m as u64 {
            return Err(Error::arg("N < n' + k·m"));
        }
        if injection.len() != 1usize << n {
            return Err(Error::arg(format!(
                "base injection must list 2^{n} images, got {}",
                injection.len()
            )));
        }
        if injection.iter().any(|&i| i & !base != 0) {
            return Err(Error::arg("base injection leaves Q_{n'}"));
        }
        if !is_copy(&injection) {
            return Err(Error::arg("base injection is not a copy of Q_n"));
        }
        Ok(BlobSpec {
            ground,
            n,
            n_prime,
            m,
            a,
            b,
            partition,
            injection,
        })
    }

    /// Identity base injection on `[n]` with `n' = n`.
    pub fn with_identity(ground: u32, n: u32, m: u32, a: u32, b: u32, partition: Vec<u64>) -> Result<Self> {
        let injection = (0..1u64 << n).collect();
        BlobSpec::new(ground, n, n, m, a, b, partition, injection)
    }

    pub fn ground(&self) -> u32 {
        self.ground
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn n_prime(&self) -> u32 {
        self.n_prime
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn a(&self) -> u32 {
        self.a
    }
    pub fn b(&self) -> u32 {
        self.b
    }
    pub fn partition(&self) -> &[u64] {
        &self.partition
    }
    pub fn injection(&self) -> &[u64] {
        &self.injection
    }

    /// `[N] \ [n']`, the union of all blocks.
    fn outside(&self) -> u64 {
        full_mask(self.ground) & !full_mask(self.n_prime)
    }

    fn block_union(&self, j: usize) -> u64 {
        self.partition[..j].iter().fold(0, |a, &x| a | x)
    }
}

/// True iff the coloring meets the layer conditions: `i(S)` is blue on
/// levels `0..a`, and `i(S) ∪ ([N] \ [n'])` is blue on levels `n-b+1..=n`.
pub fn check_hypotheses(spec: &BlobSpec, c: &Coloring) -> bool {
    if c.width() != spec.ground {
        return false;
    }
    let outside = spec.outside();
    spec.injection.iter().enumerate().all(|(s, &img)| {
        let level = (s as u64).count_ones();
        if level < spec.a {
            c.has_color(img, Color::Blue)
        } else if level + spec.b > spec.n {
            c.has_color(img | outside, Color::Blue)
        } else {
            true
        }
    })
}

fn sublattice_cert(ground: u32, lo: u64, coords: u64, m: u32, color: Color) -> CopyCert {
    CopyCert {
        ground,
        dim: m,
        color: Some(color),
        map: (0..1u64 << m).map(|t| (t, lo | deposit(t, coords))).collect(),
    }
}

/// Runs the staged construction. Fails with a contract error when the
/// hypotheses do not hold.
pub fn blob_embed(spec: &BlobSpec, c: &Coloring) -> Result<BlobOutcome> {
    if c.width() != spec.ground {
        return Err(Error::Contract(format!(
            "spec is over Q_{} but the coloring is over Q_{}",
            spec.ground,
            c.width()
        )));
    }
    if !check_hypotheses(spec, c) {
        return Err(Error::Contract("coloring violates the blob hypotheses".into()));
    }
    let outcome = embed_unchecked(spec, c);
    if !verify_copy(&outcome.cert, Some(c))? {
        return Err(Error::Defect(format!(
            "constructed certificate failed verification: {}",
            outcome.cert.describe()
        )));
    }
    Ok(outcome)
}

fn embed_unchecked(spec: &BlobSpec, c: &Coloring) -> BlobOutcome {
    let n = spec.n;
    let mut sources: Vec<u64> = (0..1u64 << n).collect();
    sources.sort_by_key(|&s| (s.count_ones(), s));
    let mut images = vec![0u64; 1 << n];
    for s in sources {
        let level = s.count_ones();
        let base = spec.injection[s as usize];
        images[s as usize] = if level < spec.a {
            base
        } else if level + spec.b > n {
            base | spec.outside()
        } else {
            let j = (level - spec.a + 1) as usize;
            let lo = base | spec.block_union(j - 1);
            let hi = lo | spec.partition[j - 1];
            match lowest_blue(c, lo, hi) {
                Some(y) => y,
                None => {
                    // The whole interval is red; its free coordinates are X_j.
                    let coords = deposit(full_mask(spec.m), spec.partition[j - 1]);
                    return BlobOutcome {
                        tag: BlobTag::RedCopy,
                        cert: sublattice_cert(spec.ground, lo, coords, spec.m, Color::Red),
                    };
                }
            }
        };
    }
    BlobOutcome {
        tag: BlobTag::BlueCopy,
        cert: CopyCert {
            ground: spec.ground,
            dim: n,
            color: Some(Color::Blue),
            map: images.into_iter().enumerate().map(|(s, i)| (s as u64, i)).collect(),
        },
    }
}

/// Blue member of `[lo, hi]` of least level, ties broken by integer value.
fn lowest_blue(c: &Coloring, lo: u64, hi: u64) -> Option<u64> {
    let w = c.width();
    let interval = Interval::new(
        ElementSet::new(lo, w).expect("within ground set"),
        ElementSet::new(hi, w).expect("within ground set"),
    )
    .expect("lo ⊆ hi");
    interval
        .iter()
        .map(ElementSet::bits)
        .filter(|&y| c.has_color(y, Color::Blue))
        .min_by_key(|&y| (y.count_ones(), y))
}

/// Result of [`auto_spec`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutoSpec {
    Found(BlobSpec),
    Absent(String),
}

impl AutoSpec {
    pub fn spec(&self) -> Option<&BlobSpec> {
        match self {
            AutoSpec::Found(s) => Some(s),
            AutoSpec::Absent(_) => None,
        }
    }
}

/// Tries `n' = n` with the identity base injection and consecutive blocks:
/// `X_j` takes the next `m` elements after `[n]`, and the last block absorbs
/// the remainder.
pub fn auto_spec(ground: u32, n: u32, m: u32, a: u32, b: u32, c: &Coloring) -> Result<AutoSpec> {
    if !(ground >= n && n >= a + b && ground >= m) {
        return Err(Error::arg(format!(
            "need N ≥ n ≥ a + b and N ≥ m, got N={ground} n={n} a={a} b={b} m={m}"
        )));
    }
    if c.width() != ground {
        return Err(Error::arg("coloring width differs from N"));
    }
    let k = n + 1 - a - b;
    let need = n as u64 + k as u64 * m as u64;
    if (ground as u64) < need {
        return Ok(AutoSpec::Absent(format!(
            "infeasible: N = {ground} < n + (n+1-a-b)·m = {need}"
        )));
    }
    let mut partition = Vec::with_capacity(k as usize);
    let mut next = n;
    for j in 0..k {
        let len = if j + 1 == k { ground - next } else { m };
        partition.push(full_mask(next + len) & !full_mask(next));
        next += len;
    }
    let spec = BlobSpec::with_identity(ground, n, m, a, b, partition)?;
    if check_hypotheses(&spec, c) {
        Ok(AutoSpec::Found(spec))
    } else {
        Ok(AutoSpec::Absent(
            "identity base injection violates the layer color conditions".into(),
        ))
    }
}

/// JSON form of a [`BlobSpec`]: blocks as element lists, the injection as
/// `[source, image]` pairs of integer-encoded sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlobSpecFile {
    pub ground: u32,
    pub n: u32,
    pub n_prime: u32,
    pub m: u32,
    pub a: u32,
    pub b: u32,
    pub partition: Vec<Vec<u32>>,
    /// Omitted means the identity on `[n]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection: Option<Vec<(u64, u64)>>,
}

impl BlobSpecFile {
    pub fn into_spec(self) -> Result<BlobSpec> {
        let partition = self
            .partition
            .iter()
            .map(|block| ElementSet::from_elements(block, self.ground).map(ElementSet::bits))
            .collect::<Result<Vec<u64>>>()?;
        let injection = match self.injection {
            None => (0..1u64 << self.n).collect(),
            Some(pairs) => {
                let mut v = vec![None; 1usize << self.n];
                for (s, i) in pairs {
                    let slot = v
                        .get_mut(s as usize)
                        .ok_or_else(|| Error::arg(format!("source {s} is outside Q_{}", self.n)))?;
                    if slot.replace(i).is_some() {
                        return Err(Error::arg(format!("source {s} listed twice")));
                    }
                }
                v.into_iter()
                    .enumerate()
                    .map(|(s, i)| i.ok_or_else(|| Error::arg(format!("source {s} has no image"))))
                    .collect::<Result<Vec<u64>>>()?
            }
        };
        BlobSpec::new(
            self.ground,
            self.n,
            self.n_prime,
            self.m,
            self.a,
            self.b,
            partition,
            injection,
        )
    }

    pub fn from_spec(spec: &BlobSpec) -> Self {
        BlobSpecFile {
            ground: spec.ground,
            n: spec.n,
            n_prime: spec.n_prime,
            m: spec.m,
            a: spec.a,
            b: spec.b,
            partition: spec
                .partition
                .iter()
                .map(|&x| ElementSet::new(x, spec.ground).expect("valid block").elements())
                .collect(),
            injection: Some(
                spec.injection
                    .iter()
                    .enumerate()
                    .map(|(s, &i)| (s as u64, i))
                    .collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, from_string, parity_coloring};

    fn elems(e: &[u32], w: u32) -> u64 {
        ElementSet::from_elements(e, w).unwrap().bits()
    }

    fn small_spec() -> BlobSpec {
        BlobSpec::with_identity(5, 1, 2, 0, 0, vec![elems(&[2, 3], 5), elems(&[4, 5], 5)]).unwrap()
    }

    /// Blue everywhere except the listed sets.
    fn blue_except(width: u32, red: &[u64]) -> Coloring {
        let mut word: Vec<char> = vec!['B'; 1 << width];
        for &r in red {
            word[r as usize] = 'R';
        }
        from_string(width, &word.into_iter().collect::<String>(), false).unwrap()
    }

    #[test]
    fn all_blue_satisfies_any_hypotheses() {
        let c = constant_coloring(5, Color::Blue).unwrap();
        assert!(check_hypotheses(&small_spec(), &c));
        let spec = BlobSpec::with_identity(5, 2, 1, 1, 1, vec![elems(&[3, 4, 5], 5)]).unwrap();
        assert!(check_hypotheses(&spec, &c));
    }

    #[test]
    fn zero_layers_means_no_conditions() {
        let c = constant_coloring(5, Color::Red).unwrap();
        assert!(check_hypotheses(&small_spec(), &c));
    }

    #[test]
    fn violated_bottom_layers() {
        // a = 2: levels 0 and 1 of Q_2 must map to blue sets.
        let spec = BlobSpec::with_identity(6, 2, 2, 2, 0, vec![elems(&[3, 4, 5, 6], 6)]).unwrap();
        let c = blue_except(6, &[elems(&[1], 6)]);
        assert!(!check_hypotheses(&spec, &c));
        assert!(matches!(blob_embed(&spec, &c), Err(Error::Contract(_))));
    }

    #[test]
    fn constant_blue_gives_nested_unions() {
        let c = constant_coloring(5, Color::Blue).unwrap();
        let out = blob_embed(&small_spec(), &c).unwrap();
        assert_eq!(out.tag, BlobTag::BlueCopy);
        // Every probe takes the bottom of its interval: i(S) ∪ X_1 ∪ … ∪ X_{j-1}.
        assert_eq!(out.cert.map, vec![(0, 0), (1, elems(&[1, 2, 3], 5))]);
    }

    #[test]
    fn constant_red_fails_at_first_probe() {
        let c = constant_coloring(5, Color::Red).unwrap();
        let out = blob_embed(&small_spec(), &c).unwrap();
        assert_eq!(out.tag, BlobTag::RedCopy);
        assert_eq!(out.cert.image_family(), vec![0, 0b10, 0b100, 0b110]);
    }

    #[test]
    fn red_interval_above_the_singleton() {
        // The interval [{1} ∪ X_1, {1} ∪ X_1 ∪ X_2] is red, everything else blue.
        let red: Vec<u64> = [&[1, 2, 3][..], &[1, 2, 3, 4], &[1, 2, 3, 5], &[1, 2, 3, 4, 5]]
            .iter()
            .map(|e| elems(e, 5))
            .collect();
        let c = blue_except(5, &red);
        let out = blob_embed(&small_spec(), &c).unwrap();
        assert_eq!(out.tag, BlobTag::RedCopy);
        let mut want = red.clone();
        want.sort_unstable();
        assert_eq!(out.cert.image_family(), want);
    }

    #[test]
    fn red_square_below_the_first_block_is_skipped() {
        // {1},{1,2},{1,3},{1,2,3} red: level 0 takes ∅, level 1 probes
        // [{1,2,3}, [5]] whose lowest blue member is {1,2,3,4}.
        let red: Vec<u64> = [&[1][..], &[1, 2], &[1, 3], &[1, 2, 3]]
            .iter()
            .map(|e| elems(e, 5))
            .collect();
        let c = blue_except(5, &red);
        let out = blob_embed(&small_spec(), &c).unwrap();
        assert_eq!(out.tag, BlobTag::BlueCopy);
        assert_eq!(out.cert.map, vec![(0, 0), (1, elems(&[1, 2, 3, 4], 5))]);
    }

    #[test]
    fn auto_spec_examples() {
        let blue = constant_coloring(5, Color::Blue).unwrap();
        assert!(auto_spec(5, 1, 2, 0, 0, &blue).unwrap().spec().is_some());

        let c4 = constant_coloring(4, Color::Blue).unwrap();
        assert!(matches!(auto_spec(4, 2, 2, 0, 0, &c4).unwrap(), AutoSpec::Absent(r) if r.contains("infeasible")));

        let p = parity_coloring(8).unwrap();
        assert!(matches!(auto_spec(8, 2, 2, 2, 0, &p).unwrap(), AutoSpec::Absent(_)));
    }

    #[test]
    fn spec_validation() {
        // Blocks overlapping [n'].
        assert!(BlobSpec::with_identity(5, 1, 2, 0, 0, vec![elems(&[1, 2], 5), elems(&[4, 5], 5)]).is_err());
        // Block too small.
        assert!(BlobSpec::with_identity(5, 1, 2, 0, 0, vec![elems(&[2], 5), elems(&[3, 4, 5], 5)]).is_err());
        // Wrong number of blocks.
        assert!(BlobSpec::with_identity(5, 1, 2, 0, 0, vec![elems(&[2, 3, 4, 5], 5)]).is_err());
        // Injection that is not a copy.
        assert!(BlobSpec::new(5, 1, 1, 2, 0, 0, vec![elems(&[2, 3], 5), elems(&[4, 5], 5)], vec![1, 1]).is_err());
    }

    #[test]
    fn spec_file_roundtrip() {
        let spec = small_spec();
        let file = BlobSpecFile::from_spec(&spec);
        let json = serde_json::to_string(&file).unwrap();
        let back: BlobSpecFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_spec().unwrap(), spec);
        let bare = r#"{"ground":5,"n":1,"n_prime":1,"m":2,"a":0,"b":0,"partition":[[2,3],[4,5]]}"#;
        let parsed: BlobSpecFile = serde_json::from_str(bare).unwrap();
        assert_eq!(parsed.into_spec().unwrap(), spec);
    }
}
