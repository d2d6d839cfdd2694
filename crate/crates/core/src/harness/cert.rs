//! On-disk certificates and their independent re-check.
//!
//! Every file is one JSON object with a `kind` field:
//!
//! * `witness` — a good coloring, re-verified by [`verify_witness`];
//! * `exhausted` — a search refutation; only its shape can be checked
//!   without re-running the search;
//! * `copy` — a copy certificate, optionally with the coloring it lives in;
//! * `mc` — a Monte Carlo count, re-checked by recomputation;
//! * `bounds` — bound table rows, re-checked by re-evaluation;
//! * `bundle` — a list of any of the above.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{bounds, Bounds};
use crate::coloring::{from_string, Coloring};
use crate::copies::{verify_copy, CopyCert};
use crate::error::{Error, Result};
use crate::search::{find_violation, MAX_SEARCH_WIDTH};

use super::{mc_mono_frequency, MAX_MC_WIDTH};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CertFile {
    Witness {
        ground: u32,
        red_m: u32,
        blue_n: u32,
        hat: bool,
        colors: String,
    },
    Exhausted {
        ground: u32,
        red_m: u32,
        blue_n: u32,
        hat: bool,
        nodes: u64,
    },
    Copy {
        #[serde(flatten)]
        cert: CopyCert,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        colors: Option<String>,
        #[serde(default)]
        hat: bool,
    },
    Mc {
        n: u32,
        ground: u32,
        trials: u64,
        seed: u64,
        hits: u64,
    },
    Bounds {
        rows: Vec<Bounds>,
    },
    Bundle {
        items: Vec<CertFile>,
    },
}

impl CertFile {
    pub fn witness(c: &Coloring, m: u32, n: u32) -> Self {
        CertFile::Witness {
            ground: c.width(),
            red_m: m,
            blue_n: n,
            hat: c.is_hat(),
            colors: c.render(),
        }
    }

    pub fn copy(cert: CopyCert, c: Option<&Coloring>) -> Self {
        CertFile::Copy {
            cert,
            colors: c.map(Coloring::render),
            hat: c.is_some_and(Coloring::is_hat),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CertFile::Witness { .. } => "witness",
            CertFile::Exhausted { .. } => "exhausted",
            CertFile::Copy { .. } => "copy",
            CertFile::Mc { .. } => "mc",
            CertFile::Bounds { .. } => "bounds",
            CertFile::Bundle { .. } => "bundle",
        }
    }
}

/// Result of re-checking a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertCheck {
    pub ok: bool,
    pub kind: String,
    pub diagnostics: Vec<String>,
}

impl CertCheck {
    fn new(kind: &str) -> Self {
        CertCheck {
            ok: true,
            kind: kind.to_string(),
            diagnostics: Vec::new(),
        }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.ok = false;
        self.diagnostics.push(msg.into());
    }
}

pub fn write_cert_file(path: &Path, cert: &CertFile) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string(cert)?)?;
    Ok(())
}

pub fn read_cert_file(path: &Path) -> Result<CertFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::parse(format!("{}: {e}", path.display())))
}

/// Parses and re-checks a certificate file. Malformed JSON is a parse error;
/// a well-formed file with false content yields `ok = false`.
pub fn verify_cert_file(path: &Path) -> Result<CertCheck> {
    verify_cert(&read_cert_file(path)?)
}

pub fn verify_cert(cert: &CertFile) -> Result<CertCheck> {
    let mut out = CertCheck::new(cert.kind());
    check_into(cert, &mut out, "")?;
    Ok(out)
}

fn decode_colors(ground: u32, colors: &str, hat: bool, out: &mut CertCheck, at: &str) -> Option<Coloring> {
    match from_string(ground, colors, hat) {
        Ok(c) => Some(c),
        Err(e) => {
            out.fail(format!("{at}colors do not form a valid coloring of Q_{ground}: {e}"));
            None
        }
    }
}

fn check_into(cert: &CertFile, out: &mut CertCheck, at: &str) -> Result<()> {
    match cert {
        CertFile::Witness {
            ground,
            red_m,
            blue_n,
            hat,
            colors,
        } => {
            if *ground > MAX_SEARCH_WIDTH + 2 || *red_m == 0 || *blue_n == 0 {
                out.fail(format!("{at}parameters out of range"));
                return Ok(());
            }
            let Some(c) = decode_colors(*ground, colors, *hat, out, at) else {
                return Ok(());
            };
            if let Some(copy) = find_violation(&c, *red_m, *blue_n)? {
                out.fail(format!("{at}not a good coloring: {}", copy.describe()));
            }
        }
        CertFile::Exhausted {
            ground,
            red_m,
            blue_n,
            ..
        } => {
            if *ground > MAX_SEARCH_WIDTH || *red_m == 0 || *blue_n == 0 {
                out.fail(format!("{at}parameters out of range"));
            } else {
                out.diagnostics.push(format!(
                    "{at}structure ok; exhaustion itself is only confirmed by re-running the search"
                ));
            }
        }
        CertFile::Copy { cert, colors, hat } => {
            let c = match colors {
                Some(w) => match decode_colors(cert.ground, w, *hat, out, at) {
                    Some(c) => Some(c),
                    None => return Ok(()),
                },
                None => None,
            };
            if cert.ground > 64 {
                out.fail(format!("{at}ground set too large"));
            } else if !verify_copy(cert, c.as_ref())? {
                out.fail(format!("{at}invalid copy: {}", cert.describe()));
            }
        }
        CertFile::Mc {
            n,
            ground,
            trials,
            seed,
            hits,
        } => {
            if *ground > MAX_MC_WIDTH || *trials == 0 || *trials > 1_000_000 {
                out.fail(format!("{at}parameters out of range"));
                return Ok(());
            }
            let again = mc_mono_frequency(*n, *ground, *trials, *seed)?;
            if again.hits != *hits {
                out.fail(format!("{at}recomputed {} hits, file claims {hits}", again.hits));
            }
        }
        CertFile::Bounds { rows } => {
            for r in rows {
                let b = bounds(r.m, r.n)?;
                if &b != r {
                    out.fail(format!("{at}row ({}, {}) does not match re-evaluation", r.m, r.n));
                }
                if r.lower > r.upper {
                    out.fail(format!("{at}row ({}, {}) has lower > upper", r.m, r.n));
                }
            }
        }
        CertFile::Bundle { items } => {
            for (i, item) in items.iter().enumerate() {
                check_into(item, out, &format!("{at}[{i}] "))?;
            }
        }
    }
    Ok(())
}
