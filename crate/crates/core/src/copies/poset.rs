use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{full_mask, submasks};

/// Largest poset accepted by [`dim2`].
pub const MAX_POSET_SIZE: usize = 10;
const DIM2_NODE_CAP: u64 = 500_000_000;

/// A finite poset given by its full relation matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct SmallPoset {
    size: usize,
    leq: Vec<Vec<bool>>,
}

impl SmallPoset {
    /// Validates reflexivity, antisymmetry and transitivity.
    pub fn new(leq: Vec<Vec<bool>>) -> Result<Self> {
        let size = leq.len();
        if leq.iter().any(|row| row.len() != size) {
            return Err(Error::arg("relation matrix is not square"));
        }
        for i in 0..size {
            if !leq[i][i] {
                return Err(Error::domain(format!("relation is not reflexive at {i}")));
            }
            for j in 0..size {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::domain(format!(
                        "relation is not antisymmetric at ({i}, {j})"
                    )));
                }
                for k in 0..size {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::domain(format!(
                            "relation is not transitive at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(SmallPoset { size, leq })
    }

    pub fn chain(size: usize) -> Self {
        SmallPoset::new((0..size).map(|i| (0..size).map(|j| i <= j).collect()).collect())
            .expect("a chain is a poset")
    }

    pub fn antichain(size: usize) -> Self {
        SmallPoset::new((0..size).map(|i| (0..size).map(|j| i == j).collect()).collect())
            .expect("an antichain is a poset")
    }

    /// `Q_n` itself, elements indexed by integer encoding.
    pub fn boolean_lattice(n: u32) -> Self {
        let size = 1usize << n;
        SmallPoset::new(
            (0..size)
                .map(|i| (0..size).map(|j| i & j == i).collect())
                .collect(),
        )
        .expect("a Boolean lattice is a poset")
    }

    /// Parses the text form: the size on the first line, then one row of
    /// `0`/`1` characters per element.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let size: usize = lines
            .next()
            .ok_or_else(|| Error::parse("empty poset file"))?
            .parse()
            .map_err(|_| Error::parse("first line must be the poset size"))?;
        let mut leq = Vec::with_capacity(size);
        for r in 0..size {
            let line = lines
                .next()
                .ok_or_else(|| Error::parse(format!("missing row {r}")))?;
            let row = line
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::parse(format!("bad character {other:?} in row {r}"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            if row.len() != size {
                return Err(Error::parse(format!("row {r} has length {}", row.len())));
            }
            leq.push(row);
        }
        if lines.next().is_some() {
            return Err(Error::parse("trailing rows after the relation matrix"));
        }
        SmallPoset::new(leq).map_err(|e| Error::parse(e.to_string()))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// Element indices in a linear extension (stable by index).
    fn linear_extension(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.size).collect();
        let below = |i: usize| (0..self.size).filter(|&j| self.leq[j][i]).count();
        v.sort_by_key(|&i| (below(i), i));
        v
    }
}

impl fmt::Display for SmallPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.size)?;
        for row in &self.leq {
            let s: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SmallPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmallPoset({})", self.size)
    }
}

struct Dim2Search<'a> {
    p: &'a SmallPoset,
    order: &'a [usize],
    images: Vec<u64>,
    width: u32,
    nodes: u64,
}

impl Dim2Search<'_> {
    fn extend(&mut self, pos: usize) -> Result<bool> {
        if pos == self.order.len() {
            return Ok(true);
        }
        let order = self.order;
        let x = order[pos];
        let placed = &order[..pos];
        // Every element below x precedes it in the linear extension.
        let lower = placed
            .iter()
            .filter(|&&s| self.p.leq(s, x))
            .fold(0u64, |acc, &s| acc | self.images[s]);
        for sub in submasks(full_mask(self.width) & !lower) {
            let y = lower | sub;
            let ok = placed.iter().all(|&s| {
                let img = self.images[s];
                let below = img & y == img;
                let above = img & y == y;
                below == self.p.leq(s, x) && above == self.p.leq(x, s)
            });
            if !ok {
                continue;
            }
            self.nodes += 1;
            if self.nodes > DIM2_NODE_CAP {
                return Err(Error::resource("2-dimension search", self.nodes));
            }
            self.images[x] = y;
            if self.extend(pos + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Least `n` such that `Q_n` contains a copy of `p`.
///
/// The down-set map `x -> {y : y ≤ x}` is always a copy in `Q_|p|`, so the
/// search over `n = 0, 1, ...` stops at `|p|` at the latest.
pub fn dim2(p: &SmallPoset) -> Result<u32> {
    if p.size() > MAX_POSET_SIZE {
        return Err(Error::resource(
            format!("2-dimension is capped at {MAX_POSET_SIZE} elements"),
            0,
        ));
    }
    let mut nodes = 0;
    let order = p.linear_extension();
    for width in 0..=p.size() as u32 {
        if p.size() > 1usize << width {
            continue;
        }
        let mut s = Dim2Search {
            p,
            order: &order,
            images: vec![0; p.size()],
            width,
            nodes,
        };
        let found = s.extend(0)?;
        nodes = s.nodes;
        if found {
            return Ok(width);
        }
    }
    Err(Error::Defect("down-set embedding was not found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim2_examples() {
        assert_eq!(dim2(&SmallPoset::chain(2)).unwrap(), 1);
        assert_eq!(dim2(&SmallPoset::antichain(2)).unwrap(), 2);
        assert_eq!(dim2(&SmallPoset::boolean_lattice(2)).unwrap(), 2);
    }

    #[test]
    fn dim2_more() {
        assert_eq!(dim2(&SmallPoset::new(vec![]).unwrap()).unwrap(), 0);
        assert_eq!(dim2(&SmallPoset::chain(1)).unwrap(), 0);
        assert_eq!(dim2(&SmallPoset::chain(5)).unwrap(), 4);
        // Largest antichain of Q_4 has 6 sets, of Q_3 only 3.
        assert_eq!(dim2(&SmallPoset::antichain(6)).unwrap(), 4);
        assert_eq!(dim2(&SmallPoset::antichain(4)).unwrap(), 4);
        assert_eq!(dim2(&SmallPoset::boolean_lattice(3)).unwrap(), 3);
    }

    #[test]
    fn parse_and_render() {
        let p = SmallPoset::parse("3\n100\n110\n101\n").unwrap();
        assert_eq!(p.size(), 3);
        assert!(p.leq(1, 0) && !p.leq(1, 2));
        assert_eq!(SmallPoset::parse(&p.to_string()).unwrap(), p);
        // Two incomparable elements below a common top.
        assert_eq!(dim2(&p).unwrap(), 2);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SmallPoset::parse(""), Err(Error::Parse(_))));
        assert!(matches!(SmallPoset::parse("2\n10\n"), Err(Error::Parse(_))));
        assert!(matches!(SmallPoset::parse("2\n12\n01"), Err(Error::Parse(_))));
        // Not antisymmetric.
        assert!(matches!(SmallPoset::parse("2\n11\n11"), Err(Error::Parse(_))));
    }

    #[test]
    fn rejects_non_transitive() {
        let leq = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        assert!(matches!(SmallPoset::new(leq), Err(Error::Domain(_))));
    }
}
