//! Acceptance criteria 1–10, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines come out in order and
//! unbuffered. Exact criteria fail the run. Criterion 9 is a 95% interval
//! evaluated at one declared seed, so by construction it misses about one
//! seed in twenty; its line is printed either way but does not fail the run.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use common::{brute_copy, class, has_q2, has_violation, is_copy, longest_chain, pruned_copy, word_of};
use poset_ramsey::bounds::{bounds, Direction, ENTRIES, HAT_ENTRIES};
use poset_ramsey::coloring::{from_string, parity_coloring, Color};
use poset_ramsey::copies::find_mono_copy;
use poset_ramsey::harness::{
    mc_mono_frequency, read_cert_file, registry, reproduce, verify_cert, verify_cert_file, CertFile,
    ExperimentReport, ReproduceContext, DEFAULT_SEED,
};
use poset_ramsey::search::{
    search_good_coloring, solve_exhaustive, Cnf, SearchProblem, SearchTag, SymmetryOptions,
};

type Verdict = Result<String, String>;

/// `(id, title, exact, run)`.
type Criterion<'a> = (u32, &'static str, bool, Box<dyn Fn() -> Verdict + 'a>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn search_tag(ground: u32, m: u32, n: u32, hat: bool) -> SearchTag {
    let p = SearchProblem::new(ground, m, n)
        .with_hat(hat)
        .with_symmetry(SymmetryOptions::standard(m, n));
    search_good_coloring(&p).expect("valid problem").tag
}

struct Reports(BTreeMap<String, ExperimentReport>);

impl Reports {
    fn get(&self, name: &str) -> Result<&ExperimentReport, String> {
        self.0.get(name).ok_or_else(|| format!("check {name} did not run"))
    }

    fn passed(&self, name: &str) -> Result<(), String> {
        let r = self.get(name)?;
        ensure(r.outcome.pass, format!("reproduce {name} failed: {:?}", r.outcome.notes))
    }
}

fn c1(rep: &Reports) -> Verdict {
    rep.passed("thm8-lower")?;
    // Oracle: a copy of Q_k contains a chain of k + 1 sets. Red sets are
    // the odd ones (chains of 2), blue the even ones (chains of 3).
    let w = parity_coloring(4).unwrap().render();
    let red = longest_chain(&class(w.as_bytes(), b'R'));
    let blue = longest_chain(&class(w.as_bytes(), b'B'));
    ensure(red < 3 && blue < 4, format!("chains red {red}, blue {blue}"))?;
    Ok(format!("parity Q_4 good; longest red chain {red}, blue chain {blue}"))
}

fn c2() -> Verdict {
    ensure(search_tag(3, 2, 2, false) == SearchTag::Witness, "no witness at N=3")?;
    ensure(search_tag(4, 2, 2, false) == SearchTag::Exhausted, "not exhausted at N=4")?;
    let good = |ground: u32| {
        let len = 1usize << ground;
        (0..1u64 << len)
            .filter(|&bits| {
                let w = word_of(bits, len);
                !has_q2(&class(w.as_bytes(), b'R')) && !has_q2(&class(w.as_bytes(), b'B'))
            })
            .count()
    };
    let (g3, g4) = (good(3), good(4));
    ensure(g3 > 0 && g4 == 0, format!("raw enumeration: {g3} good at N=3, {g4} at N=4"))?;
    Ok(format!("witness N=3, exhausted N=4; raw: {g3} of 256 good at N=3, 0 of 65536 at N=4"))
}

fn c3() -> Verdict {
    let mut detail = Vec::new();
    for n in [2u32, 3] {
        ensure(search_tag(n, 1, n, false) == SearchTag::Witness, format!("no witness at N={n}"))?;
        ensure(
            search_tag(n + 1, 1, n, false) == SearchTag::Exhausted,
            format!("not exhausted at N={}", n + 1),
        )?;
        // Top-only-red: one red set, 2^n - 1 blue sets.
        let top = (1u64 << (1 << n)) >> 1;
        let w = word_of(top, 1 << n);
        ensure(!has_violation(&w, 1, n), format!("top-only-red coloring of Q_{n} is not good"))?;
        ensure(
            from_string(n, &w, false)
                .map(|c| poset_ramsey::search::verify_witness(&c, 1, n).unwrap())
                .unwrap(),
            "library rejects the top-only-red coloring",
        )?;
        // Raw: with no red Q_1 the red sets form an antichain; every such
        // coloring of Q_{n+1} must hold a blue Q_n.
        let len = 1usize << (n + 1);
        let mut antichains = 0;
        for bits in 0..1u64 << len {
            let w = word_of(bits, len);
            let red = class(w.as_bytes(), b'R');
            if longest_chain(&red) >= 2 {
                continue;
            }
            antichains += 1;
            ensure(
                pruned_copy(&class(w.as_bytes(), b'B'), n),
                format!("good coloring {w} of Q_{}", n + 1),
            )?;
        }
        detail.push(format!("n={n}: {antichains} red antichains of Q_{} all hold a blue Q_{n}", n + 1));
    }
    Ok(detail.join("; "))
}

fn c4(rep: &Reports) -> Verdict {
    rep.passed("thm8-upper")?;
    let r = rep.get("thm8-upper")?;
    let nodes = r.outcome.counts.get("N5-m2-n3.nodes").copied().unwrap_or(0);
    ensure(search_tag(4, 2, 3, false) == SearchTag::Witness, "no witness at N=4")?;
    Ok(format!("(N=5, m=2, n=3) exhausted after {nodes} nodes; witness at N=4"))
}

fn c5(rep: &Reports, out: &Path) -> Verdict {
    rep.passed("lemma1-totality")?;
    let r = rep.get("lemma1-totality")?;
    let CertFile::Bundle { items } = read_cert_file(&out.join("lemma1-totality/blob-certificates.json"))
        .map_err(|e| e.to_string())?
    else {
        return Err("certificate file is not a bundle".into());
    };
    ensure(items.len() == 10_000, format!("{} certificates", items.len()))?;
    for item in &items {
        let CertFile::Copy { cert, colors: Some(w), .. } = item else {
            return Err("bundle item without coloring".into());
        };
        ensure(cert.ground <= 10, "instance beyond N = 10")?;
        let images: Vec<u64> = cert.map.iter().map(|&(_, i)| i).collect();
        let srcs_ok = cert.map.iter().enumerate().all(|(k, &(s, _))| s == k as u64);
        let letter = match cert.color {
            Some(Color::Red) => b'R',
            Some(Color::Blue) => b'B',
            None => return Err("uncolored blob certificate".into()),
        };
        let colored = images.iter().all(|&i| {
            let c = w.as_bytes()[i as usize];
            c == letter || c == b'*'
        });
        ensure(
            srcs_ok && images.len() == 1 << cert.dim && is_copy(&images) && colored,
            format!("bad certificate {}", cert.describe()),
        )?;
    }
    let c = &r.outcome.counts;
    Ok(format!(
        "10000 instances ({} drawn): {} blue, {} red, {} failures; all certificates re-checked",
        c["drawn"], c["blue copies"], c["red copies"], c["failures"]
    ))
}

fn c6() -> Verdict {
    let mut cases = 0;
    for ground in 0..=3u32 {
        let len = 1usize << ground;
        for bits in 0..1u64 << len {
            let w = word_of(bits, len);
            let c = from_string(ground, &w, false).unwrap();
            for m in 0..=ground {
                for (color, letter) in [(Color::Red, b'R'), (Color::Blue, b'B')] {
                    cases += 1;
                    let fast = find_mono_copy(&c, m, color).unwrap();
                    let slow = brute_copy(&class(w.as_bytes(), letter), m);
                    ensure(fast.is_some() == slow, format!("{w}, m={m}, {color}: finder {}, brute {slow}", fast.is_some()))?;
                    if let Some(cert) = fast {
                        let images: Vec<u64> = cert.map.iter().map(|&(_, i)| i).collect();
                        ensure(
                            is_copy(&images) && images.iter().all(|&i| w.as_bytes()[i as usize] == letter),
                            format!("{w}: invalid certificate {}", cert.describe()),
                        )?;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} (coloring, m, color) cases agree"))
}

/// `(numerator, denominator)` of each formula, written out independently.
fn reference(name: &str, dir: Direction, hat: bool, m: i128, n: i128) -> (i128, i128) {
    match (hat, name, dir) {
        (false, "Theorem 1 (i)", Direction::Lower) => (2 * n, 1),
        (false, "Theorem 1 (i)", Direction::Upper) => (n * n + 2 * n, 1),
        (false, "Theorem 1 (ii)", _) => (n + 1, 1),
        (false, "Theorem 1 (iii)", _) => (2 * n + 2, 1),
        (false, "Theorem 1 (iv)", Direction::Lower) => (n + m, 1),
        (false, "Theorem 1 (iv)", Direction::Upper) => (m * n + n + m, 1),
        (false, "Theorem 1 (v)", Direction::Exact) => (4, 1),
        (false, "Theorem 1 (v)", Direction::Lower) => (7, 1),
        (false, "Theorem 1 (v)", Direction::Upper) => (8, 1),
        (false, "Theorem 2", _) => (n * n + 1, 1),
        (false, "Theorem 4", _) => (5 * n + 6, 3),
        (false, "Theorem 5", _) => (n * n - n + 2, 1),
        (false, "Theorem 6", _) => (37 * n + 39, 16),
        (false, "Theorem 7", _) => {
            let d = (2 * m - 3) * (m + 1);
            (((m - 2) * d + 9 * m - 9) * n + (m + 3) * d, d)
        }
        (false, "Theorem 8", _) => (5, 1),
        (true, "Claim c", _) => (n * n - n, 1),
        (true, "Claim d", _) => (7 * n + 9, 4),
        (true, "Claim f", _) => {
            let d = 2 * m - 3;
            (((m - 2) * d + 3) * n + m * d, d)
        }
        other => panic!("no reference formula for {other:?}"),
    }
}

fn c7() -> Verdict {
    for (m, n, want) in [(1, 5, (6, 6)), (2, 2, (4, 4)), (2, 3, (5, 5)), (3, 3, (7, 8))] {
        let b = bounds(m, n).map_err(|e| e.to_string())?;
        ensure((b.lower, b.upper) == want, format!("bounds({m},{n}) = ({}, {})", b.lower, b.upper))?;
    }
    ensure(
        bounds(2, 3).unwrap().provenance == vec!["exact: Theorem 8".to_string()],
        "(2,3) provenance",
    )?;
    let mut evaluations = 0;
    for (hat, table) in [(false, ENTRIES), (true, HAT_ENTRIES)] {
        for e in table {
            for m in 1..=100i64 {
                for n in 1..=100i64 {
                    if !(e.applies)(m, n) {
                        continue;
                    }
                    evaluations += 1;
                    let (num, den) = reference(e.name, e.direction, hat, m as i128, n as i128);
                    let v = (e.value)(m, n);
                    ensure(
                        (*v.numer() as i128) * den == num * (*v.denom() as i128),
                        format!("{} at ({m},{n}) is {v}, reference {num}/{den}", e.name),
                    )?;
                    let floor = num.div_euclid(den);
                    ensure(v.floor().to_integer() as i128 == floor, format!("{} floor at ({m},{n})", e.name))?;
                }
            }
        }
    }
    let mut rows = 0;
    for n in 1..=100 {
        for m in 1..=n {
            rows += 1;
            let b = bounds(m, n).unwrap();
            ensure(b.lower <= b.upper, format!("({m},{n}): {} > {}", b.lower, b.upper))?;
        }
    }
    Ok(format!("stated values exact; {rows} rows with lower <= upper; {evaluations} formula evaluations match integer references"))
}

fn c8() -> Verdict {
    let mut cases = 0;
    for hat in [false, true] {
        for ground in 1..=4u32 {
            for m in 1..=3u32 {
                for n in 1..=3u32 {
                    cases += 1;
                    let sat = solve_exhaustive(&Cnf::build(ground, m, n, hat).unwrap()).unwrap().is_some();
                    let tag = search_tag(ground, m, n, hat);
                    ensure(
                        sat == (tag == SearchTag::Witness),
                        format!("N={ground} m={m} n={n} hat={hat}: sat {sat}, search {tag:?}"),
                    )?;
                    if ground <= 3 {
                        // Raw enumeration with the test oracle.
                        let len = 1usize << ground;
                        let top = len - 1;
                        let any_good = (0..1u64 << len).any(|bits| {
                            let mut w = word_of(bits, len).into_bytes();
                            if hat {
                                w[0] = b'*';
                                w[top] = b'*';
                            }
                            !has_violation(std::str::from_utf8(&w).unwrap(), m, n)
                        });
                        ensure(any_good == sat, format!("N={ground} m={m} n={n} hat={hat}: raw {any_good}"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} instances agree (N <= 3 also against raw enumeration)"))
}

fn c9() -> Verdict {
    // Exact probability of a monochromatic Q_2 in Q_2.
    let mono = (0..16u64)
        .filter(|&bits| {
            let w = word_of(bits, 4);
            pruned_copy(&class(w.as_bytes(), b'R'), 2) || pruned_copy(&class(w.as_bytes(), b'B'), 2)
        })
        .count();
    let exact = mono as f64 / 16.0;
    ensure(mono == 2, format!("{mono} of 16 colorings monochromatic"))?;
    let small = mc_mono_frequency(2, 2, 10_000, DEFAULT_SEED).unwrap();
    let large = mc_mono_frequency(2, 6, 1_000, DEFAULT_SEED).unwrap();
    let detail = format!(
        "seed {DEFAULT_SEED}: N=2 frequency {:.4} interval [{:.4}, {:.4}] vs exact {exact}; N=6 frequency {:.3}",
        small.frequency, small.lo, small.hi, large.frequency
    );
    ensure(large.frequency >= 0.99, format!("{detail}; N=6 below 0.99"))?;
    ensure(small.covers(exact), format!("{detail}; interval misses the exact value"))?;
    Ok(detail)
}

fn c10(rep: &Reports, out: &Path) -> Verdict {
    let mut files = 0;
    for r in rep.0.values().filter(|r| r.outcome.pass) {
        let certs: Vec<&String> = r.artifacts.iter().filter(|a| !a.ends_with("report.json")).collect();
        ensure(!certs.is_empty(), format!("{} left no certificate", r.name))?;
        for a in certs {
            files += 1;
            let check = verify_cert_file(Path::new(a)).map_err(|e| format!("{a}: {e}"))?;
            ensure(check.ok, format!("{a}: {:?}", check.diagnostics))?;
        }
    }
    // Flip the byte of ∅ in the stored parity witness.
    let path = out.join("thm8-lower/witness.json");
    let CertFile::Witness { ground, red_m, blue_n, hat, colors } = read_cert_file(&path).unwrap() else {
        return Err("thm8-lower witness has the wrong kind".into());
    };
    let mut w = colors.into_bytes();
    w[0] = b'R';
    let mutated = String::from_utf8(w).unwrap();
    ensure(has_violation(&mutated, 2, 3), "oracle sees no copy in the mutated witness")?;
    let check = verify_cert(&CertFile::Witness { ground, red_m, blue_n, hat, colors: mutated }).unwrap();
    ensure(!check.ok, "mutated witness accepted")?;
    rep.passed("cert-integrity")?;
    Ok(format!(
        "{files} certificate files from green checks re-verify; mutated witness rejected: {}",
        check.diagnostics.join("; ")
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let ctx = ReproduceContext::new(dir.path());
    let start = Instant::now();
    let reports = Reports(
        registry()
            .iter()
            .map(|c| (c.name.to_string(), reproduce(c.name, &ctx).expect("check runs")))
            .collect(),
    );
    println!("reproduce registry ran in {:.1?}", start.elapsed());

    let criteria: Vec<Criterion> = vec![
        (1, "parity coloring check", true, Box::new(|| c1(&reports))),
        (2, "R(Q_2,Q_2) = 4", true, Box::new(c2)),
        (3, "R(Q_1,Q_n) = n+1 for n = 2, 3", true, Box::new(c3)),
        (4, "R(Q_2,Q_3) <= 5", true, Box::new(|| c4(&reports))),
        (5, "blob embedding totality", true, Box::new(|| c5(&reports, dir.path()))),
        (6, "copy finder vs brute force", true, Box::new(c6)),
        (7, "bounds table", true, Box::new(c7)),
        (8, "CNF/search agreement", true, Box::new(c8)),
        (9, "Monte Carlo", false, Box::new(c9)),
        (10, "certificate integrity", true, Box::new(|| c10(&reports, dir.path()))),
    ];
    let mut hard_failures = 0;
    let mut passed = 0;
    for (id, title, exact, run) in &criteria {
        let t = Instant::now();
        let verdict = run();
        let secs = t.elapsed().as_secs_f64();
        match &verdict {
            Ok(detail) => {
                passed += 1;
                println!("criterion {id:>2} PASS  {title} ({secs:.1}s): {detail}");
            }
            Err(detail) => {
                let kind = if *exact { "" } else { " [statistical, not fatal]" };
                println!("criterion {id:>2} FAIL{kind}  {title} ({secs:.1}s): {detail}");
                if *exact {
                    hard_failures += 1;
                }
            }
        }
    }
    println!("{passed} of {} criteria pass", criteria.len());
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
