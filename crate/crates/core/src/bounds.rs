//! Bound formulas and known values for `R(Q_m, Q_n)` and its hat variant.
//!
//! Every formula is evaluated as an exact rational; an upper bound on an
//! integer quantity is the floor of its value. Entries are stated for an
//! ordered pair (first argument the red lattice), and since both numbers
//! are symmetric under swapping colors an entry applies to `(m, n)` when it
//! applies to either ordering.

use std::fmt::Write as _;
use std::io::Write;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

/// Largest `max_n` accepted by [`bounds_table`].
pub const MAX_TABLE_N: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Upper,
    /// Both sides: a known value.
    Exact,
}

/// One stated bound. `applies` and `value` take the ordered pair.
#[derive(Clone, Copy)]
pub struct BoundEntry {
    pub name: &'static str,
    pub direction: Direction,
    pub source: &'static str,
    /// Extra caveat shown next to the entry when it binds.
    pub note: Option<&'static str>,
    pub applies: fn(i64, i64) -> bool,
    pub value: fn(i64, i64) -> Q,
}

/// Hat-variant entries share the shape; they are always upper bounds.
pub type HatBoundEntry = BoundEntry;

impl std::fmt::Debug for BoundEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundEntry")
            .field("name", &self.name)
            .field("direction", &self.direction)
            .finish()
    }
}

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn frac(a: i64, b: i64) -> Q {
    Q::new(a, b)
}

pub static ENTRIES: &[BoundEntry] = &[
    BoundEntry {
        name: "Theorem 1 (i)",
        direction: Direction::Lower,
        source: "2n <= R(Q_n, Q_n)",
        note: None,
        applies: |m, n| m == n,
        value: |_, n| q(2 * n),
    },
    BoundEntry {
        name: "Theorem 1 (i)",
        direction: Direction::Upper,
        source: "R(Q_n, Q_n) <= n^2 + 2n",
        note: None,
        applies: |m, n| m == n,
        value: |_, n| q(n * n + 2 * n),
    },
    BoundEntry {
        name: "Theorem 1 (ii)",
        direction: Direction::Exact,
        source: "R(Q_1, Q_n) = n + 1",
        note: None,
        applies: |m, _| m == 1,
        value: |_, n| q(n + 1),
    },
    BoundEntry {
        name: "Theorem 1 (iii)",
        direction: Direction::Upper,
        source: "R(Q_2, Q_n) <= 2n + 2",
        note: None,
        applies: |m, _| m == 2,
        value: |_, n| q(2 * n + 2),
    },
    BoundEntry {
        name: "Theorem 1 (iv)",
        direction: Direction::Lower,
        source: "n + m <= R(Q_n, Q_m)",
        note: None,
        applies: |_, _| true,
        value: |m, n| q(n + m),
    },
    BoundEntry {
        name: "Theorem 1 (iv)",
        direction: Direction::Upper,
        source: "R(Q_n, Q_m) <= mn + n + m",
        note: None,
        applies: |_, _| true,
        value: |m, n| q(m * n + n + m),
    },
    BoundEntry {
        name: "Theorem 1 (v)",
        direction: Direction::Exact,
        source: "R(Q_2, Q_2) = 4",
        note: None,
        applies: |m, n| m == 2 && n == 2,
        value: |_, _| q(4),
    },
    BoundEntry {
        name: "Theorem 1 (v)",
        direction: Direction::Lower,
        source: "R(Q_3, Q_3) in {7, 8}",
        note: None,
        applies: |m, n| m == 3 && n == 3,
        value: |_, _| q(7),
    },
    BoundEntry {
        name: "Theorem 1 (v)",
        direction: Direction::Upper,
        source: "R(Q_3, Q_3) in {7, 8}",
        note: None,
        applies: |m, n| m == 3 && n == 3,
        value: |_, _| q(8),
    },
    BoundEntry {
        name: "Theorem 2",
        direction: Direction::Upper,
        source: "R(Q_n, Q_n) <= n^2 + 1",
        note: None,
        applies: |m, n| m == n,
        value: |_, n| q(n * n + 1),
    },
    BoundEntry {
        name: "Theorem 4",
        direction: Direction::Upper,
        source: "R(Q_2, Q_n) <= 5n/3 + 2",
        note: Some("the proof ends at 5n/3 + 1; the stated bound is used"),
        applies: |m, _| m == 2,
        value: |_, n| frac(5 * n, 3) + 2,
    },
    BoundEntry {
        name: "Theorem 5",
        direction: Direction::Upper,
        source: "R(Q_n, Q_n) <= n^2 - n + 2",
        note: None,
        applies: |m, n| m == n,
        value: |_, n| q(n * n - n + 2),
    },
    BoundEntry {
        name: "Theorem 6",
        direction: Direction::Upper,
        source: "R(Q_3, Q_n) <= 37n/16 + 39/16",
        note: Some("stated for all n; the proof assumes n >= 4"),
        applies: |m, _| m == 3,
        value: |_, n| frac(37 * n + 39, 16),
    },
    BoundEntry {
        name: "Theorem 7",
        direction: Direction::Upper,
        source: "R(Q_m, Q_n) <= (m - 2 + (9m - 9)/((2m - 3)(m + 1)))n + m + 3, n >= m >= 4",
        note: None,
        applies: |m, n| n >= m && m >= 4,
        value: |m, n| (q(m - 2) + frac(9 * m - 9, (2 * m - 3) * (m + 1))) * n + m + 3,
    },
    BoundEntry {
        name: "Theorem 8",
        direction: Direction::Exact,
        source: "R(Q_2, Q_3) = 5",
        note: None,
        applies: |m, n| m == 2 && n == 3,
        value: |_, _| q(5),
    },
];

pub static HAT_ENTRIES: &[HatBoundEntry] = &[
    BoundEntry {
        name: "Claim c",
        direction: Direction::Upper,
        source: "hat-R(Q_n, Q_n) <= n^2 - n, n >= 3",
        note: None,
        applies: |m, n| m == n && n >= 3,
        value: |_, n| q(n * n - n),
    },
    BoundEntry {
        name: "Claim d",
        direction: Direction::Upper,
        source: "hat-R(Q_3, Q_n) <= 7n/4 + 9/4",
        note: None,
        applies: |m, _| m == 3,
        value: |_, n| frac(7 * n + 9, 4),
    },
    BoundEntry {
        name: "Claim f",
        direction: Direction::Upper,
        source: "hat-R(Q_m, Q_n) <= (m - 2 + 3/(2m - 3))n + m, n >= m >= 4",
        note: None,
        applies: |m, n| n >= m && m >= 4,
        value: |m, n| (q(m - 2) + frac(3, 2 * m - 3)) * n + m,
    },
];

/// Floor of a rational, integer-only.
pub fn floor(v: Q) -> i64 {
    v.floor().to_integer()
}

/// Evaluates `e` at `(m, n)`, trying both orderings. Returns the better
/// value in the entry's direction.
fn evaluate(e: &BoundEntry, m: i64, n: i64) -> Option<Q> {
    let a = (e.applies)(m, n).then(|| (e.value)(m, n));
    let b = (m != n && (e.applies)(n, m)).then(|| (e.value)(n, m));
    match (a, b) {
        (Some(x), Some(y)) => Some(match e.direction {
            Direction::Lower => x.max(y),
            _ => x.min(y),
        }),
        (x, y) => x.or(y),
    }
}

fn label(e: &BoundEntry) -> String {
    match e.note {
        Some(note) => format!("{} ({note})", e.name),
        None => e.name.to_string(),
    }
}

fn check_args(m: u32, n: u32) -> Result<(i64, i64)> {
    if m == 0 || n == 0 {
        return Err(Error::arg(format!("dimensions must be at least 1, got ({m}, {n})")));
    }
    Ok((m.min(n) as i64, m.max(n) as i64))
}

/// Best known bounds for `R(Q_m, Q_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub m: u32,
    pub n: u32,
    pub lower: i64,
    pub upper: i64,
    /// Binding entries: `"exact: …"`, or `"lower: …"` / `"upper: …"`.
    pub provenance: Vec<String>,
}

pub fn bounds(m: u32, n: u32) -> Result<Bounds> {
    let (a, b) = check_args(m, n)?;
    let mut exact: Option<(i64, Vec<String>)> = None;
    let mut lowers: Vec<(i64, String)> = Vec::new();
    let mut uppers: Vec<(i64, String)> = Vec::new();
    for e in ENTRIES {
        let Some(v) = evaluate(e, a, b) else { continue };
        match e.direction {
            Direction::Exact => {
                // A value that is not an integer would be a transcription
                // error in the table.
                debug_assert!(v.is_integer());
                let v = v.to_integer();
                match &mut exact {
                    Some((w, names)) if *w == v => names.push(label(e)),
                    Some((w, _)) => {
                        return Err(Error::Defect(format!(
                            "conflicting known values {w} and {v} at ({a}, {b})"
                        )))
                    }
                    None => exact = Some((v, vec![label(e)])),
                }
            }
            Direction::Lower => lowers.push((v.ceil().to_integer(), label(e))),
            Direction::Upper => uppers.push((floor(v), label(e))),
        }
    }
    let (m, n) = (a as u32, b as u32);
    if let Some((v, names)) = exact {
        return Ok(Bounds {
            m,
            n,
            lower: v,
            upper: v,
            provenance: names.into_iter().map(|s| format!("exact: {s}")).collect(),
        });
    }
    let lower = lowers.iter().map(|x| x.0).max().unwrap_or(1);
    let upper = uppers.iter().map(|x| x.0).min().expect("Theorem 1 (iv) always applies");
    let mut provenance = Vec::new();
    let mut push = |kind: &str, list: &[(i64, String)], best: i64| {
        for (v, name) in list {
            let line = format!("{kind}: {name}");
            if *v == best && !provenance.contains(&line) {
                provenance.push(line);
            }
        }
    };
    push("lower", &lowers, lower);
    push("upper", &uppers, upper);
    Ok(Bounds {
        m,
        n,
        lower,
        upper,
        provenance,
    })
}

/// Best stated upper bound for the hat variant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HatBounds {
    pub m: u32,
    pub n: u32,
    pub upper: Option<i64>,
    pub provenance: Vec<String>,
}

pub fn hat_bounds(m: u32, n: u32) -> Result<HatBounds> {
    let (a, b) = check_args(m, n)?;
    let vals: Vec<(i64, String)> = HAT_ENTRIES
        .iter()
        .filter_map(|e| evaluate(e, a, b).map(|v| (floor(v), label(e))))
        .collect();
    let upper = vals.iter().map(|x| x.0).min();
    let provenance = vals
        .into_iter()
        .filter(|x| Some(x.0) == upper)
        .map(|x| format!("upper: {}", x.1))
        .collect();
    Ok(HatBounds {
        m: a as u32,
        n: b as u32,
        upper,
        provenance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    JsonLines,
}

/// Rows for `1 <= m <= n <= max_n`, ordered by `n` then `m`.
pub fn bounds_rows(max_n: u32) -> Result<Vec<Bounds>> {
    if max_n > MAX_TABLE_N {
        return Err(Error::arg(format!("table is capped at n = {MAX_TABLE_N}")));
    }
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for m in 1..=n {
            rows.push(bounds(m, n)?);
        }
    }
    Ok(rows)
}

pub fn render_table(rows: &[Bounds], format: TableFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        TableFormat::JsonLines => {
            for r in rows {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
        }
        TableFormat::Text => {
            let w = |f: fn(&Bounds) -> i64, head: &str| {
                rows.iter()
                    .map(|r| f(r).to_string().len())
                    .chain([head.len()])
                    .max()
                    .unwrap_or(1)
            };
            let (wm, wn) = (w(|r| r.m as i64, "m"), w(|r| r.n as i64, "n"));
            let (wl, wu) = (w(|r| r.lower, "lower"), w(|r| r.upper, "upper"));
            let _ = writeln!(out, "{:>wm$}  {:>wn$}  {:>wl$}  {:>wu$}  provenance", "m", "n", "lower", "upper");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:>wm$}  {:>wn$}  {:>wl$}  {:>wu$}  {}",
                    r.m,
                    r.n,
                    r.lower,
                    r.upper,
                    r.provenance.join("; ")
                );
            }
        }
    }
    Ok(out)
}

/// Writes the table for `max_n` to `sink`; returns the row count.
pub fn bounds_table(max_n: u32, format: TableFormat, sink: &mut dyn Write) -> Result<usize> {
    let rows = bounds_rows(max_n)?;
    sink.write_all(render_table(&rows, format)?.as_bytes())?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lu(m: u32, n: u32) -> (i64, i64) {
        let b = bounds(m, n).unwrap();
        (b.lower, b.upper)
    }

    #[test]
    fn stated_examples() {
        assert_eq!(lu(1, 5), (6, 6));
        assert_eq!(lu(2, 2), (4, 4));
        assert_eq!(lu(3, 3), (7, 8));
        assert_eq!(lu(2, 6), (8, 12));
        assert_eq!(lu(4, 10), (14, 37));
        assert_eq!(lu(6, 2), lu(2, 6));
        assert_eq!(bounds(2, 3).unwrap().provenance, vec!["exact: Theorem 8"]);
    }

    #[test]
    fn provenance_names_binding_entries() {
        let b = bounds(2, 6).unwrap();
        assert!(b.provenance.contains(&"lower: Theorem 1 (iv)".to_string()));
        assert!(b.provenance.iter().any(|p| p.starts_with("upper: Theorem 4")));
        let b = bounds(3, 3).unwrap();
        assert!(b.provenance.contains(&"upper: Theorem 5".to_string()));
        assert!(b.provenance.contains(&"lower: Theorem 1 (v)".to_string()));
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat_bounds(3, 3).unwrap().upper, Some(6));
        assert_eq!(hat_bounds(3, 8).unwrap().upper, Some(16));
        assert_eq!(hat_bounds(8, 3).unwrap().upper, Some(16));
        let h = hat_bounds(2, 2).unwrap();
        assert_eq!(h.upper, None);
        assert!(h.provenance.is_empty());
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(bounds(0, 3).is_err());
        assert!(hat_bounds(3, 0).is_err());
    }

    #[test]
    fn table_shapes() {
        let rows = bounds_rows(3).unwrap();
        assert_eq!(rows.len(), 6);
        let text = render_table(&rows, TableFormat::Text).unwrap();
        assert_eq!(text.lines().count(), 7);
        let json = render_table(&rows, TableFormat::JsonLines).unwrap();
        let back: Vec<Bounds> = json.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(back, rows);
        assert!(bounds_rows(101).is_err());
    }

    #[test]
    fn lower_never_exceeds_upper() {
        for r in bounds_rows(MAX_TABLE_N).unwrap() {
            assert!(r.lower <= r.upper, "{r:?}");
        }
    }

    #[test]
    fn theorem_five_dominates_theorem_two() {
        let t2 = ENTRIES.iter().find(|e| e.name == "Theorem 2").unwrap();
        let t5 = ENTRIES.iter().find(|e| e.name == "Theorem 5").unwrap();
        for n in 1..=100 {
            assert!((t5.value)(n, n) <= (t2.value)(n, n));
        }
    }
}
