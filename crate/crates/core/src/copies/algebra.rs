use crate::bitset::BitArray;
use crate::error::{Error, Result};
use crate::lattice::{full_mask, ElementSet};

/// Largest ground set for [`contains_boolean_algebra`].
pub const MAX_ALGEBRA_WIDTH: u32 = 16;
const ALGEBRA_NODE_CAP: u64 = 100_000_000;

/// Witness of a Boolean algebra `{X_0 ∪ ⋃_{i∈I} X_i : I ⊆ [d]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanAlgebra {
    pub base: ElementSet,
    pub atoms: Vec<ElementSet>,
}

impl BooleanAlgebra {
    /// All `2^d` members, indexed by the subset `I` of atoms.
    pub fn members(&self) -> Vec<u64> {
        let d = self.atoms.len();
        (0..1u64 << d)
            .map(|sel| {
                self.atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| sel >> i & 1 == 1)
                    .fold(self.base.bits(), |acc, (_, a)| acc | a.bits())
            })
            .collect()
    }
}

struct AlgebraSearch<'a> {
    family: &'a BitArray,
    members: &'a [u64],
    d: usize,
    base: u64,
    atoms: Vec<u64>,
    /// Unions of the chosen atoms over every subset of them.
    unions: Vec<u64>,
    nodes: u64,
}

impl AlgebraSearch<'_> {
    fn extend(&mut self) -> Result<bool> {
        if self.atoms.len() == self.d {
            return Ok(true);
        }
        let used = self.atoms.iter().fold(self.base, |a, &b| a | b);
        // Atoms are chosen in increasing order to skip permutations.
        let floor = self.atoms.last().copied().unwrap_or(0);
        for &f in self.members {
            if f & self.base != self.base {
                continue;
            }
            let atom = f & !self.base;
            if atom <= floor || atom & used != 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > ALGEBRA_NODE_CAP {
                return Err(Error::resource("Boolean algebra search", self.nodes));
            }
            let ok = self
                .unions
                .iter()
                .all(|&u| self.family.get((u | atom) as usize));
            if !ok {
                continue;
            }
            let added: Vec<u64> = self.unions.iter().map(|&u| u | atom).collect();
            self.unions.extend(added);
            self.atoms.push(atom);
            if self.extend()? {
                return Ok(true);
            }
            self.atoms.pop();
            let half = self.unions.len() / 2;
            self.unions.truncate(half);
        }
        Ok(false)
    }
}

/// Looks for a Boolean algebra of dimension `d` among `family`.
pub fn contains_boolean_algebra(
    family: &[ElementSet],
    d: usize,
) -> Result<Option<BooleanAlgebra>> {
    if d == 0 {
        return Err(Error::arg("Boolean algebra dimension must be at least 1"));
    }
    let Some(first) = family.first() else {
        return Ok(None);
    };
    let width = first.width();
    if family.iter().any(|s| s.width() != width) {
        return Err(Error::arg("family members have different ground sets"));
    }
    if width > MAX_ALGEBRA_WIDTH {
        return Err(Error::resource(
            format!("Boolean algebra search is capped at N = {MAX_ALGEBRA_WIDTH}"),
            0,
        ));
    }
    let mut bits = BitArray::new(1usize << width);
    for s in family {
        bits.set(s.bits() as usize, true);
    }
    let members: Vec<u64> = bits.iter_ones().map(|i| i as u64).collect();
    let mut nodes = 0;
    for &base in &members {
        let mut s = AlgebraSearch {
            family: &bits,
            members: &members,
            d,
            base,
            atoms: Vec::with_capacity(d),
            unions: vec![base],
            nodes,
        };
        let found = s.extend()?;
        nodes = s.nodes;
        if found {
            let mk = |b| ElementSet::new(b, width).expect("member of the family");
            return Ok(Some(BooleanAlgebra {
                base: mk(base),
                atoms: s.atoms.iter().map(|&a| mk(a)).collect(),
            }));
        }
    }
    debug_assert!(members.iter().all(|&m| m & !full_mask(width) == 0));
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(bits: &[u64], w: u32) -> Vec<ElementSet> {
        bits.iter().map(|&b| ElementSet::new(b, w).unwrap()).collect()
    }

    #[test]
    fn full_q2_is_an_algebra() {
        let got = contains_boolean_algebra(&fam(&[0, 1, 2, 3], 2), 2)
            .unwrap()
            .unwrap();
        assert_eq!(got.base, ElementSet::empty(2));
        assert_eq!(got.atoms, fam(&[1, 2], 2));
    }

    #[test]
    fn a_chain_holds_no_square() {
        assert!(contains_boolean_algebra(&fam(&[0, 1, 3], 2), 2)
            .unwrap()
            .is_none());
    }

    #[test]
    fn one_dimensional() {
        let got = contains_boolean_algebra(&fam(&[0, 1], 1), 1).unwrap().unwrap();
        assert_eq!(got.members(), vec![0, 1]);
    }

    #[test]
    fn copy_without_algebra() {
        // {∅, {1}, {2}, {1,2,3}} is a copy of Q_2 in Q_3 but not an algebra:
        // the top must equal the union of the two atoms.
        let f = fam(&[0, 0b001, 0b010, 0b111], 3);
        assert!(contains_boolean_algebra(&f, 2).unwrap().is_none());
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(contains_boolean_algebra(&fam(&[0], 1), 0).is_err());
    }
}
