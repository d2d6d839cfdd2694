//! Named end-to-end checks. Each check writes its certificates into its own
//! directory, re-reads every one of them through [`verify_cert_file`], and
//! only then reports a pass.

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::blob::{blob_embed, check_hypotheses, BlobSpec, BlobTag};
use crate::bounds::{bounds, bounds_rows, MAX_TABLE_N};
use crate::coloring::{from_string, parity_coloring, random_coloring, Color, Coloring};
use crate::copies::{find_mono_copy, verify_copy};
use crate::error::{Error, Result};
use crate::lattice::full_mask;
use crate::search::{
    import_model, search_good_coloring, solve_exhaustive, verify_witness, Cnf, ModelCheck,
    SearchOutcome, SearchProblem, SearchTag, SymmetryOptions,
};

use super::cert::{verify_cert_file, write_cert_file, CertFile};
use super::oracle::naive_mono_copy;
use super::{mc_mono_frequency, trial_seed, ExperimentReport};

/// Where and how checks run. Each check writes below `out_dir/<name>/`.
#[derive(Clone, Debug)]
pub struct ReproduceContext {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub node_cap: Option<u64>,
}

impl ReproduceContext {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        ReproduceContext {
            out_dir: out_dir.into(),
            seed: super::DEFAULT_SEED,
            workers: 1,
            node_cap: None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckInfo {
    pub name: &'static str,
    pub slow: bool,
    pub summary: &'static str,
}

type CheckFn = fn(&ReproduceContext, &mut Run) -> Result<bool>;

static CHECKS: &[(CheckInfo, CheckFn)] = &[
    (
        CheckInfo {
            name: "thm8-lower",
            slow: false,
            summary: "parity coloring of Q_4 has no red Q_2 and no blue Q_3",
        },
        thm8_lower,
    ),
    (
        CheckInfo {
            name: "thm1v-q2q2",
            slow: false,
            summary: "R(Q_2,Q_2) = 4: witness at N=3, exhaustion at N=4, raw enumeration of Q_4",
        },
        thm1v_q2q2,
    ),
    (
        CheckInfo {
            name: "thm1ii",
            slow: false,
            summary: "R(Q_1,Q_n) = n+1 for n = 2, 3",
        },
        thm1ii,
    ),
    (
        CheckInfo {
            name: "thm8-upper",
            slow: true,
            summary: "R(Q_2,Q_3) <= 5: exhaustive search at N=5",
        },
        thm8_upper,
    ),
    (
        CheckInfo {
            name: "lemma1-totality",
            slow: false,
            summary: "blob embedding succeeds on 10^4 random instances with N <= 10",
        },
        lemma1_totality,
    ),
    (
        CheckInfo {
            name: "copy-oracle",
            slow: false,
            summary: "copy finder agrees with brute force on every coloring with N <= 3",
        },
        copy_oracle,
    ),
    (
        CheckInfo {
            name: "bounds-table",
            slow: false,
            summary: "bound table values and lower <= upper up to n = 100",
        },
        bounds_table_check,
    ),
    (
        CheckInfo {
            name: "cnf-agreement",
            slow: false,
            summary: "CNF satisfiability equals the search tag for N <= 4, m, n <= 3",
        },
        cnf_agreement,
    ),
    (
        CheckInfo {
            name: "mc",
            slow: false,
            summary: "Monte Carlo monochromatic-copy frequencies at N = 2 and N = 6",
        },
        mc_check,
    ),
    (
        CheckInfo {
            name: "cert-integrity",
            slow: false,
            summary: "stored witnesses re-verify and a flipped byte is detected",
        },
        cert_integrity,
    ),
];

pub fn registry() -> Vec<CheckInfo> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Per-check state: the report under construction and its directory.
struct Run {
    dir: PathBuf,
    report: ExperimentReport,
    certs: Vec<PathBuf>,
}

impl Run {
    fn cert(&mut self, file: &str, cert: &CertFile) -> Result<()> {
        let path = self.dir.join(file);
        write_cert_file(&path, cert)?;
        self.certs.push(path);
        Ok(())
    }

    fn expect(&mut self, what: &str, ok: bool) -> bool {
        if !ok {
            self.report.note(format!("FAILED: {what}"));
        }
        ok
    }
}

/// Runs one named check.
pub fn reproduce(name: &str, ctx: &ReproduceContext) -> Result<ExperimentReport> {
    let (info, check) = CHECKS
        .iter()
        .find(|c| c.0.name == name)
        .ok_or_else(|| {
            let known: Vec<&str> = CHECKS.iter().map(|c| c.0.name).collect();
            Error::Usage(format!("unknown check {name:?}; known: {}", known.join(", ")))
        })?;
    let dir = ctx.out_dir.join(info.name);
    std::fs::create_dir_all(&dir)?;
    let mut run = Run {
        dir: dir.clone(),
        report: ExperimentReport::new(info.name, Some(ctx.seed)),
        certs: Vec::new(),
    };
    run.report.param("workers", ctx.workers);
    let passed = check(ctx, &mut run)?;

    // Certificates are on disk; re-read each before claiming a pass.
    let mut certs_ok = true;
    for path in &run.certs {
        let c = verify_cert_file(path)?;
        if !c.ok {
            certs_ok = false;
            run.report
                .note(format!("certificate {} failed: {}", path.display(), c.diagnostics.join("; ")));
        }
        run.report.artifacts.push(path.display().to_string());
    }
    if run.certs.is_empty() {
        run.report.note("no certificate was written");
        certs_ok = false;
    }
    run.report.outcome.pass = passed && certs_ok;
    run.report.outcome.tag = if run.report.outcome.pass { "pass" } else { "fail" }.into();
    let report_path = dir.join("report.json");
    run.report.artifacts.push(report_path.display().to_string());
    run.report.write(&report_path)?;
    Ok(run.report)
}

/// Runs several checks, optionally in parallel. Checks share nothing but
/// the read-only context; each writes only inside its own directory.
pub fn reproduce_many(
    names: &[&str],
    ctx: &ReproduceContext,
    parallel: bool,
) -> Vec<(String, Result<ExperimentReport>)> {
    let one = |n: &&str| (n.to_string(), reproduce(n, ctx));
    if parallel {
        names.par_iter().map(one).collect()
    } else {
        names.iter().map(one).collect()
    }
}

fn search(ctx: &ReproduceContext, ground: u32, m: u32, n: u32, hat: bool) -> Result<SearchOutcome> {
    let sym = SymmetryOptions::standard(m, n);
    let p = SearchProblem::new(ground, m, n)
        .with_hat(hat)
        .with_symmetry(sym)
        .with_workers(ctx.workers)
        .with_node_cap(ctx.node_cap);
    search_good_coloring(&p)
}

/// Runs a search and stores its certificate. Returns the tag.
fn certified_search(
    ctx: &ReproduceContext,
    run: &mut Run,
    ground: u32,
    m: u32,
    n: u32,
    hat: bool,
) -> Result<SearchTag> {
    let out = search(ctx, ground, m, n, hat)?;
    let stem = format!("N{ground}-m{m}-n{n}{}", if hat { "-hat" } else { "" });
    run.report.count(&format!("{stem}.nodes"), out.stats.nodes);
    match out.tag {
        SearchTag::Witness => {
            let w = out.witness.as_ref().expect("witness outcome carries a coloring");
            run.cert(&format!("witness-{stem}.json"), &CertFile::witness(w, m, n))?;
        }
        SearchTag::Exhausted => run.cert(
            &format!("exhausted-{stem}.json"),
            &CertFile::Exhausted {
                ground,
                red_m: m,
                blue_n: n,
                hat,
                nodes: out.stats.nodes,
            },
        )?,
        SearchTag::CapHit => {
            run.report.note(format!("{stem}: node cap hit"));
        }
    }
    Ok(out.tag)
}

fn thm8_lower(_: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let p = parity_coloring(4)?;
    run.report.param("N", 4).param("m", 2).param("n", 3);
    run.cert("witness.json", &CertFile::witness(&p, 2, 3))?;
    let ok = verify_witness(&p, 2, 3)?;
    Ok(run.expect("parity coloring of Q_4 is good for (2, 3)", ok))
}

/// Number of colorings of `Q_N` with neither a red `Q_m` nor a blue `Q_n`,
/// by plain enumeration.
fn count_good(ground: u32, m: u32, n: u32) -> Result<u64> {
    let len = 1u32 << ground;
    let mut good = 0;
    for word in 0..1u64 << len {
        let s: String = (0..len).map(|i| if word >> i & 1 == 1 { 'R' } else { 'B' }).collect();
        if verify_witness(&from_string(ground, &s, false)?, m, n)? {
            good += 1;
        }
    }
    Ok(good)
}

fn thm1v_q2q2(ctx: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let w = certified_search(ctx, run, 3, 2, 2, false)?;
    let e = certified_search(ctx, run, 4, 2, 2, false)?;
    let raw = count_good(4, 2, 2)?;
    run.report.count("good colorings of Q_4 (raw enumeration)", raw);
    let a = run.expect("witness at N=3", w == SearchTag::Witness);
    let b = run.expect("exhausted at N=4", e == SearchTag::Exhausted);
    let c = run.expect("no good coloring among all 2^16 colorings of Q_4", raw == 0);
    Ok(a && b && c)
}

fn thm1ii(ctx: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let mut ok = true;
    for n in [2u32, 3] {
        // Only the top element red.
        let top = full_mask(n);
        let word: String = (0..=top).map(|s| if s == top { 'R' } else { 'B' }).collect();
        let c = from_string(n, &word, false)?;
        run.cert(&format!("witness-top-red-N{n}.json"), &CertFile::witness(&c, 1, n))?;
        ok &= run.expect(&format!("top-only-red coloring of Q_{n} is good"), verify_witness(&c, 1, n)?);
        let w = certified_search(ctx, run, n, 1, n, false)?;
        ok &= run.expect(&format!("witness at N={n}"), w == SearchTag::Witness);
        let e = certified_search(ctx, run, n + 1, 1, n, false)?;
        ok &= run.expect(&format!("exhausted at N={}", n + 1), e == SearchTag::Exhausted);
    }
    Ok(ok)
}

fn thm8_upper(ctx: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let w = certified_search(ctx, run, 4, 2, 3, false)?;
    let e = certified_search(ctx, run, 5, 2, 3, false)?;
    let a = run.expect("witness at N=4", w == SearchTag::Witness);
    let b = run.expect("exhausted at N=5", e == SearchTag::Exhausted);
    Ok(a && b)
}

pub const LEMMA1_SAMPLES: u64 = 10_000;
pub const LEMMA1_MAX_WIDTH: u32 = 10;

/// Random blob parameters and a random coloring of `Q_N`, `N ≤ 10`,
/// derived from `seed` alone. The coloring is uniform; it is not adjusted
/// to the hypotheses.
pub fn lemma1_instance(seed: u64) -> Result<(BlobSpec, Coloring)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, n_prime, m, a, b, k) = loop {
        let n: u32 = rng.gen_range(1..=4);
        let a: u32 = rng.gen_range(0..=n.min(2));
        let b: u32 = rng.gen_range(0..=(n - a).min(2));
        let m: u32 = rng.gen_range(1..=3);
        let n_prime: u32 = rng.gen_range(n..=n + 2);
        let k = n + 1 - a - b;
        if n_prime + k * m <= LEMMA1_MAX_WIDTH {
            break (n, n_prime, m, a, b, k);
        }
    };
    let ground = rng.gen_range(n_prime + k * m..=LEMMA1_MAX_WIDTH);

    // Base copy: a relabelling of [n] onto n positions of [n'], shifted by a
    // fixed subset of the unused positions.
    let mut pos: Vec<u32> = (0..n_prime).collect();
    pos.shuffle(&mut rng);
    let (used, rest) = pos.split_at(n as usize);
    let shift = rest.iter().filter(|_| rng.gen_bool(0.5)).fold(0u64, |acc, &p| acc | 1 << p);
    let injection: Vec<u64> = (0..1u64 << n)
        .map(|s| {
            used.iter()
                .enumerate()
                .filter(|&(i, _)| s >> i & 1 == 1)
                .fold(shift, |acc, (_, &p)| acc | 1 << p)
        })
        .collect();

    // Blocks: m elements each, the rest scattered at random.
    let mut outside: Vec<u32> = (n_prime..ground).collect();
    outside.shuffle(&mut rng);
    let mut partition = vec![0u64; k as usize];
    for (i, &e) in outside.iter().enumerate() {
        let j = if (i as u32) < k * m {
            i / m as usize
        } else {
            rng.gen_range(0..k as usize)
        };
        partition[j] |= 1 << e;
    }
    let spec = BlobSpec::new(ground, n, n_prime, m, a, b, partition, injection)?;
    let c = random_coloring(ground, rng.next_u64())?;
    Ok((spec, c))
}

fn lemma1_totality(ctx: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let mut items = Vec::new();
    let (mut drawn, mut blue, mut red, mut failures) = (0u64, 0u64, 0u64, 0u64);
    while blue + red + failures < LEMMA1_SAMPLES {
        if drawn > 100 * LEMMA1_SAMPLES {
            run.report.note("too few instances passed the hypotheses filter");
            return Ok(false);
        }
        let (spec, c) = lemma1_instance(trial_seed(ctx.seed, drawn))?;
        drawn += 1;
        if !check_hypotheses(&spec, &c) {
            continue;
        }
        match blob_embed(&spec, &c) {
            Ok(out) => {
                match out.tag {
                    BlobTag::BlueCopy => blue += 1,
                    BlobTag::RedCopy => red += 1,
                }
                if !verify_copy(&out.cert, Some(&c))? {
                    failures += 1;
                }
                items.push(CertFile::copy(out.cert, Some(&c)));
            }
            Err(e) => {
                failures += 1;
                run.report.note(format!("instance {}: {e}", drawn - 1));
            }
        }
    }
    run.report
        .param("samples", LEMMA1_SAMPLES)
        .param("max_N", LEMMA1_MAX_WIDTH)
        .count("drawn", drawn)
        .count("blue copies", blue)
        .count("red copies", red)
        .count("failures", failures);
    run.cert("blob-certificates.json", &CertFile::Bundle { items })?;
    Ok(run.expect("every filtered instance yields a verified copy", failures == 0))
}

fn copy_oracle(_: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let mut items = Vec::new();
    let (mut cases, mut mismatches) = (0u64, 0u64);
    for ground in 0..=3u32 {
        let len = 1u32 << ground;
        for word in 0..1u64 << len {
            let s: String = (0..len).map(|i| if word >> i & 1 == 1 { 'R' } else { 'B' }).collect();
            let c = from_string(ground, &s, false)?;
            for m in 0..=ground {
                for color in [Color::Red, Color::Blue] {
                    cases += 1;
                    let fast = find_mono_copy(&c, m, color)?;
                    let slow = naive_mono_copy(&c, m, color)?;
                    if fast.is_some() != slow.is_some() {
                        mismatches += 1;
                        run.report.note(format!("disagreement on {s} (m={m}, {color})"));
                    }
                    if let Some(cert) = fast {
                        items.push(CertFile::copy(cert, Some(&c)));
                    }
                }
            }
        }
    }
    run.report.count("cases", cases).count("mismatches", mismatches);
    run.cert("copies.json", &CertFile::Bundle { items })?;
    Ok(run.expect("copy finder matches brute force", mismatches == 0))
}

fn bounds_table_check(_: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let rows = bounds_rows(MAX_TABLE_N)?;
    let mut ok = true;
    for (m, n, want) in [(1, 5, (6, 6)), (2, 2, (4, 4)), (2, 3, (5, 5)), (3, 3, (7, 8))] {
        let b = bounds(m, n)?;
        ok &= run.expect(&format!("bounds({m}, {n}) = {want:?}"), (b.lower, b.upper) == want);
    }
    let inverted = rows.iter().filter(|r| r.lower > r.upper).count();
    ok &= run.expect("lower <= upper on every row", inverted == 0);
    run.report.count("rows", rows.len() as u64);
    run.cert("bounds.json", &CertFile::Bounds { rows })?;
    Ok(ok)
}

fn cnf_agreement(ctx: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let mut items = Vec::new();
    let (mut cases, mut mismatches) = (0u64, 0u64);
    for hat in [false, true] {
        for ground in 1..=4u32 {
            for m in 1..=3u32 {
                for n in 1..=3u32 {
                    cases += 1;
                    let cnf = Cnf::build(ground, m, n, hat)?;
                    let model = solve_exhaustive(&cnf)?;
                    let out = search(ctx, ground, m, n, hat)?;
                    let agree = match (&model, out.tag) {
                        (Some(a), SearchTag::Witness) => {
                            let lits: Vec<i64> = a
                                .iter()
                                .enumerate()
                                .map(|(i, &v)| if v { i as i64 + 1 } else { -(i as i64 + 1) })
                                .collect();
                            matches!(import_model(ground, &lits, m, n, hat)?, ModelCheck::Good(_))
                        }
                        (None, SearchTag::Exhausted) => true,
                        _ => false,
                    };
                    if !agree {
                        mismatches += 1;
                        run.report.note(format!(
                            "N={ground} m={m} n={n} hat={hat}: sat={} search={:?}",
                            model.is_some(),
                            out.tag
                        ));
                    }
                    items.push(match &out.witness {
                        Some(w) => CertFile::witness(w, m, n),
                        None => CertFile::Exhausted {
                            ground,
                            red_m: m,
                            blue_n: n,
                            hat,
                            nodes: out.stats.nodes,
                        },
                    });
                }
            }
        }
    }
    run.report.count("cases", cases).count("mismatches", mismatches);
    run.cert("search-certificates.json", &CertFile::Bundle { items })?;
    Ok(run.expect("CNF satisfiability equals the search tag", mismatches == 0))
}

fn mc_check(ctx: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let small = mc_mono_frequency(2, 2, 10_000, ctx.seed)?;
    let large = mc_mono_frequency(2, 6, 1_000, ctx.seed)?;
    run.report.outcome.frequencies.insert("n=2 N=2".into(), small.frequency);
    run.report.outcome.frequencies.insert("n=2 N=2 lo".into(), small.lo);
    run.report.outcome.frequencies.insert("n=2 N=2 hi".into(), small.hi);
    run.report.outcome.frequencies.insert("n=2 N=6".into(), large.frequency);
    run.report.param("exact n=2 N=2", json!(0.125));
    run.cert(
        "mc-n2-N2.json",
        &CertFile::Mc {
            n: 2,
            ground: 2,
            trials: 10_000,
            seed: ctx.seed,
            hits: small.hits,
        },
    )?;
    run.cert(
        "mc-n2-N6.json",
        &CertFile::Mc {
            n: 2,
            ground: 6,
            trials: 1_000,
            seed: ctx.seed,
            hits: large.hits,
        },
    )?;
    let a = run.expect("interval at N=2 covers 2/16", small.covers(0.125));
    let b = run.expect("frequency at N=6 is at least 0.99", large.frequency >= 0.99);
    Ok(a && b)
}

fn cert_integrity(_: &ReproduceContext, run: &mut Run) -> Result<bool> {
    let p = parity_coloring(4)?;
    run.cert("witness.json", &CertFile::witness(&p, 2, 3))?;
    let path = run.dir.join("witness.json");
    let original = verify_cert_file(&path)?;
    let ok = run.expect("stored parity witness re-verifies", original.ok);

    // Census of single-character flips: each mutant is either rejected or
    // is itself a good coloring. Only the endpoints turn out to matter.
    let word = p.render();
    let mut rejected = Vec::new();
    for i in 0..word.len() {
        let mut w = word.clone().into_bytes();
        w[i] = if w[i] == b'R' { b'B' } else { b'R' };
        let c = from_string(4, std::str::from_utf8(&w).expect("ascii"), false)?;
        if !verify_witness(&c, 2, 3)? {
            rejected.push(i as u64);
        }
    }
    run.report.count("single flips", word.len() as u64);
    run.report.count("single flips rejected", rejected.len() as u64);
    run.report.param("rejected flip indices", &rejected);

    let text = std::fs::read_to_string(&path)?;
    let at = text.find("\"colors\":\"").expect("colors field") + "\"colors\":\"".len();
    let dir = run.dir.clone();
    let mutate = |offset: usize, byte: u8, file: &str| -> Result<(PathBuf, Vec<u8>)> {
        let mut bytes = text.clone().into_bytes();
        bytes[at + offset] = byte;
        let out = dir.join(file);
        std::fs::write(&out, &bytes)?;
        Ok((out, bytes))
    };

    // Color of ∅ flipped from B to R.
    let (flip_empty, bytes) = mutate(0, b'R', "mutated-empty-set.json")?;
    let check = verify_cert_file(&flip_empty)?;
    for d in &check.diagnostics {
        run.report.note(format!("mutated witness: {d}"));
    }
    let caught = run.expect("flipping the byte of the empty set is detected", !check.ok);

    // Color of {1} flipped from R to B: the result is another good coloring.
    let (flip_one, _) = mutate(1, b'B', "mutated-singleton.json")?;
    if verify_cert_file(&flip_one)?.ok {
        run.report.note("flipping {1} yields another good coloring of Q_4; nothing to detect");
    }

    let (garbage, _) = mutate(5, b'X', "mutated-garbage.json")?;
    let invalid = run.expect(
        "a non-color byte is detected",
        !verify_cert_file(&garbage)?.ok,
    );

    let torn = run.dir.join("torn-witness.json");
    std::fs::write(&torn, &bytes[..bytes.len() / 2])?;
    let parse = run.expect(
        "truncated file is a parse error",
        matches!(verify_cert_file(&torn), Err(Error::Parse(_))),
    );
    Ok(ok && caught && invalid && parse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn ctx() -> (tempfile::TempDir, ReproduceContext) {
        let dir = tempfile::tempdir().unwrap();
        let ctx = ReproduceContext::new(dir.path());
        (dir, ctx)
    }

    #[test]
    fn unknown_check_is_a_usage_error() {
        let (_d, c) = ctx();
        assert!(matches!(reproduce("bogus", &c), Err(Error::Usage(_))));
    }

    #[test]
    fn thm8_lower_passes_and_leaves_artifacts() {
        let (_d, c) = ctx();
        let r = reproduce("thm8-lower", &c).unwrap();
        assert!(r.outcome.pass, "{:?}", r.outcome.notes);
        assert!(r.artifacts.iter().all(|a| Path::new(a).exists()));
        assert!(r.artifacts[0].ends_with("witness.json"));
    }

    #[test]
    fn instances_are_seed_determined() {
        let (s1, c1) = lemma1_instance(5).unwrap();
        let (s2, c2) = lemma1_instance(5).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(c1, c2);
        for seed in 0..200 {
            let (s, c) = lemma1_instance(seed).unwrap();
            assert!(s.ground() <= LEMMA1_MAX_WIDTH);
            assert_eq!(c.width(), s.ground());
        }
    }

    #[test]
    fn registry_names_are_unique() {
        let names: Vec<&str> = registry().iter().map(|c| c.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert!(registry().iter().any(|c| c.name == "thm8-upper" && c.slow));
    }
}
