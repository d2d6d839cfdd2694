//! DIMACS CNF encoding of the good-coloring problem.
//!
//! Variable `int(S) + 1` is true iff `S` is red. Each image family of a
//! copy of `Q_m` contributes the clause "not all red" and each family of a
//! copy of `Q_n` the clause "not all blue". In hat mode the two endpoint
//! variables are dropped from every clause but still counted in the
//! header, keeping the numbering stable.

use std::io::Write;

use crate::bitset::BitArray;
use crate::coloring::Coloring;
use crate::copies::{enumerate_copy_images, CopyCert};
use crate::error::{Error, Result};
use crate::lattice::full_mask;

use super::find_violation;

/// Largest variable count accepted by [`solve_exhaustive`].
pub const MAX_EXHAUSTIVE_VARS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    /// Clauses with literals sorted by variable; clauses sorted and unique.
    pub clauses: Vec<Vec<i64>>,
    pub comments: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CnfStats {
    pub vars: usize,
    pub clauses: usize,
}

fn sort_literals(clause: &mut [i64]) {
    clause.sort_by_key(|l| (l.unsigned_abs(), *l > 0));
}

impl Cnf {
    /// Builds the encoding for colorings of `Q_ground`.
    pub fn build(ground: u32, m: u32, n: u32, hat: bool) -> Result<Cnf> {
        let top = full_mask(ground);
        let skip = |s: u64| hat && (s == 0 || s == top);
        let mut clauses = Vec::new();
        for (dim, sign) in [(m, -1i64), (n, 1i64)] {
            for family in enumerate_copy_images(ground, dim)? {
                let mut clause: Vec<i64> = family
                    .into_iter()
                    .filter(|&s| !skip(s))
                    .map(|s| sign * (s as i64 + 1))
                    .collect();
                sort_literals(&mut clause);
                clauses.push(clause);
            }
        }
        clauses.sort();
        clauses.dedup();
        Ok(Cnf {
            vars: 1usize << ground,
            clauses,
            comments: vec![
                format!("poset-ramsey {}", env!("CARGO_PKG_VERSION")),
                format!("N={ground} m={m} n={n} hat={hat}"),
                "variable int(S)+1 is true iff S is red".to_string(),
            ],
        })
    }

    pub fn stats(&self) -> CnfStats {
        CnfStats {
            vars: self.vars,
            clauses: self.clauses.len(),
        }
    }

    pub fn write_dimacs(&self, sink: &mut dyn Write) -> Result<CnfStats> {
        for c in &self.comments {
            writeln!(sink, "c {c}")?;
        }
        writeln!(sink, "p cnf {} {}", self.vars, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(sink, "{lit} ")?;
            }
            writeln!(sink, "0")?;
        }
        Ok(self.stats())
    }

    /// True iff `assignment` (index `v - 1` for variable `v`) satisfies
    /// every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// Writes the DIMACS encoding for `(N, m, n)` to `sink`.
pub fn export_cnf(
    ground: u32,
    m: u32,
    n: u32,
    hat: bool,
    sink: &mut dyn Write,
) -> Result<CnfStats> {
    Cnf::build(ground, m, n, hat)?.write_dimacs(sink)
}

/// Parses DIMACS CNF text.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut vars = None;
    let mut expected = 0usize;
    let mut comments = Vec::new();
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('c') {
            comments.push(c.trim().to_string());
            continue;
        }
        if let Some(h) = line.strip_prefix("p cnf") {
            let nums: Vec<usize> = h
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::parse(format!("bad header {line:?}"))))
                .collect::<Result<_>>()?;
            if nums.len() != 2 {
                return Err(Error::parse(format!("bad header {line:?}")));
            }
            vars = Some(nums[0]);
            expected = nums[1];
            continue;
        }
        let nvars = vars.ok_or_else(|| Error::parse("clause before the p cnf header"))?;
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                if lit.unsigned_abs() as usize > nvars {
                    return Err(Error::parse(format!("literal {lit} exceeds {nvars} variables")));
                }
                cur.push(lit);
            }
        }
    }
    if !cur.is_empty() {
        return Err(Error::parse("last clause is not terminated by 0"));
    }
    let vars = vars.ok_or_else(|| Error::parse("missing p cnf header"))?;
    if clauses.len() != expected {
        return Err(Error::parse(format!(
            "header announces {expected} clauses, found {}",
            clauses.len()
        )));
    }
    Ok(Cnf {
        vars,
        clauses,
        comments,
    })
}

/// Complete satisfiability check by enumerating every assignment. Meant
/// for cross-checking small instances only.
pub fn solve_exhaustive(cnf: &Cnf) -> Result<Option<Vec<bool>>> {
    if cnf.vars > MAX_EXHAUSTIVE_VARS {
        return Err(Error::resource(
            format!("exhaustive CNF check is capped at {MAX_EXHAUSTIVE_VARS} variables"),
            0,
        ));
    }
    // Clause as (positive mask, negative mask) over assignment bits.
    let masks: Vec<(u64, u64)> = cnf
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(p, n), &l| {
                let bit = 1u64 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    let all = full_mask(cnf.vars as u32);
    for a in 0..=all {
        if masks.iter().all(|&(p, n)| a & p != 0 || !a & n != 0) {
            return Ok(Some((0..cnf.vars).map(|v| a >> v & 1 == 1).collect()));
        }
    }
    Ok(None)
}

/// Reads a solver model: `v`-prefixed or bare signed integers, optionally
/// terminated by `0`. `s` and `c` lines are ignored.
pub fn parse_model(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        let body = line.strip_prefix('v').unwrap_or(line);
        for tok in body.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(format!("bad model literal {tok:?}")))?;
            if lit == 0 {
                return Ok(out);
            }
            out.push(lit);
        }
    }
    Ok(out)
}

/// Outcome of decoding a model.
#[derive(Clone, Debug)]
pub enum ModelCheck {
    Good(Coloring),
    /// The decoded coloring contains the named forbidden copy.
    Violation { coloring: Coloring, copy: CopyCert },
}

/// Decodes a model into a coloring and verifies it independently of the
/// encoding.
pub fn import_model(ground: u32, model: &[i64], m: u32, n: u32, hat: bool) -> Result<ModelCheck> {
    let vars = 1usize << ground;
    let mut seen = vec![None; vars];
    for &lit in model {
        let v = lit.unsigned_abs() as usize;
        if lit == 0 || v > vars {
            return Err(Error::parse(format!("literal {lit} is outside 1..={vars}")));
        }
        if seen[v - 1].replace(lit > 0).is_some() {
            return Err(Error::parse(format!("variable {v} assigned twice")));
        }
    }
    let mut red = BitArray::new(vars);
    let top = vars - 1;
    for (i, val) in seen.into_iter().enumerate() {
        let val = val.ok_or_else(|| Error::parse(format!("model does not assign variable {}", i + 1)))?;
        if !(hat && (i == 0 || i == top)) {
            red.set(i, val);
        }
    }
    let coloring = Coloring::from_red(ground, red, hat)?;
    match find_violation(&coloring, m, n)? {
        None => Ok(ModelCheck::Good(coloring)),
        Some(copy) => Ok(ModelCheck::Violation { coloring, copy }),
    }
}
