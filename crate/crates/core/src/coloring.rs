//! Red/blue colorings of `Q_N`.
//!
//! A [`Coloring`] is total. In hat mode the empty set and the full set
//! carry both colors, so either color class may use them; every other set
//! has exactly one color. [`PartialColoring`] is the mutable frontier state
//! used by the exhaustive search.
//!
//! Random colorings use ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. The generator emits one `u64` per block of
//! 64 consecutive sets; bit `j` of block `w` colors set `64 * w + j` red when
//! it is 1 and blue when it is 0.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::BitArray;
use crate::error::{Error, Result};
use crate::lattice::{full_mask, ElementSet, Interval};

/// Largest width accepted by [`random_coloring`].
pub const MAX_RANDOM_WIDTH: u32 = 24;
/// Largest width any stored coloring may have.
pub const MAX_COLORING_WIDTH: u32 = 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn swap(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Blue => "blue",
        })
    }
}

impl std::str::FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Color> {
        match s.to_ascii_lowercase().as_str() {
            "red" | "r" => Ok(Color::Red),
            "blue" | "b" => Ok(Color::Blue),
            _ => Err(Error::parse(format!("unknown color {s:?}"))),
        }
    }
}

/// Read access to which sets currently carry a color. Implemented by
/// total and partial colorings so the copy finders can run on both.
pub trait ColorView {
    fn width(&self) -> u32;
    /// True iff the set encoded by `bits` carries `color` (both-colored
    /// hat endpoints carry every color; unassigned sets carry none).
    fn has_color(&self, bits: u64, color: Color) -> bool;
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    width: u32,
    red: BitArray,
    blue: BitArray,
    hat: bool,
}

fn check_width(width: u32) -> Result<()> {
    if width > MAX_COLORING_WIDTH {
        Err(Error::resource(
            format!("coloring of Q_{width} exceeds the width cap {MAX_COLORING_WIDTH}"),
            0,
        ))
    } else {
        Ok(())
    }
}

impl Coloring {
    /// Builds a coloring from the red class; everything else is blue.
    /// With `hat`, the two endpoints become both-colored.
    pub fn from_red(width: u32, red: BitArray, hat: bool) -> Result<Self> {
        check_width(width)?;
        let len = 1usize << width;
        if red.len() != len {
            return Err(Error::arg(format!(
                "red array has length {}, expected {len}",
                red.len()
            )));
        }
        if hat && width == 0 {
            return Err(Error::domain("hat mode needs a nonempty ground set"));
        }
        let mut blue = BitArray::filled(len);
        for (b, r) in blue.words_mut().iter_mut().zip(red.words()) {
            *b &= !r;
        }
        let mut c = Coloring {
            width,
            red,
            blue,
            hat,
        };
        if hat {
            let top = full_mask(width) as usize;
            for i in [0, top] {
                c.red.set(i, true);
                c.blue.set(i, true);
            }
        }
        Ok(c)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_hat(&self) -> bool {
        self.hat
    }

    /// Number of sets, `2^N`.
    pub fn len(&self) -> usize {
        1 << self.width
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn is_red(&self, bits: u64) -> bool {
        self.red.get(bits as usize)
    }

    #[inline]
    pub fn is_blue(&self, bits: u64) -> bool {
        self.blue.get(bits as usize)
    }

    /// True for the both-colored endpoints of a hat coloring.
    pub fn is_both(&self, bits: u64) -> bool {
        self.is_red(bits) && self.is_blue(bits)
    }

    /// The single color of a set; `None` for both-colored endpoints.
    pub fn color_of(&self, s: ElementSet) -> Option<Color> {
        match (self.is_red(s.bits()), self.is_blue(s.bits())) {
            (true, false) => Some(Color::Red),
            (false, true) => Some(Color::Blue),
            _ => None,
        }
    }

    pub fn red_class(&self) -> &BitArray {
        &self.red
    }

    /// Sets that carry `color`, as a bit array over integer encodings.
    pub fn class(&self, color: Color) -> &BitArray {
        match color {
            Color::Red => &self.red,
            Color::Blue => &self.blue,
        }
    }

    /// Swaps red and blue.
    pub fn swapped(&self) -> Coloring {
        Coloring {
            width: self.width,
            red: self.blue.clone(),
            blue: self.red.clone(),
            hat: self.hat,
        }
    }

    /// Returns a copy with a single set recolored. Hat endpoints cannot be
    /// recolored.
    pub fn with_color(&self, s: ElementSet, color: Color) -> Result<Coloring> {
        if s.width() != self.width {
            return Err(Error::arg("set width differs from coloring width"));
        }
        let top = full_mask(self.width);
        if self.hat && (s.bits() == 0 || s.bits() == top) {
            return Err(Error::arg("hat endpoints are permanently both-colored"));
        }
        let mut c = self.clone();
        let i = s.bits() as usize;
        c.red.set(i, color == Color::Red);
        c.blue.set(i, color == Color::Blue);
        Ok(c)
    }

    /// Serializes as a word over `{R, B, *}`; character `i` is the color of
    /// the set with integer encoding `i`, `*` marks both-colored endpoints.
    pub fn render(&self) -> String {
        (0..self.len() as u64)
            .map(|i| match (self.is_red(i), self.is_blue(i)) {
                (true, true) => '*',
                (true, false) => 'R',
                _ => 'B',
            })
            .collect()
    }

    /// Checks the exactly-one-color invariant (both colors only at hat endpoints).
    pub fn check_invariant(&self) -> bool {
        let top = full_mask(self.width);
        (0..self.len() as u64).all(|i| {
            let both = self.is_red(i) && self.is_blue(i);
            let none = !self.is_red(i) && !self.is_blue(i);
            let endpoint = i == 0 || i == top;
            !none && (both == (self.hat && endpoint))
        })
    }
}

impl ColorView for Coloring {
    fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    fn has_color(&self, bits: u64, color: Color) -> bool {
        self.class(color).get(bits as usize)
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coloring(N={}, {})", self.width, self.render())
    }
}

/// Blue on even levels, red on odd levels.
pub fn parity_coloring(width: u32) -> Result<Coloring> {
    check_width(width)?;
    let len = 1usize << width;
    let mut red = BitArray::new(len);
    for i in 0..len {
        red.set(i, i.count_ones() % 2 == 1);
    }
    Coloring::from_red(width, red, false)
}

pub fn constant_coloring(width: u32, color: Color) -> Result<Coloring> {
    check_width(width)?;
    let len = 1usize << width;
    let red = match color {
        Color::Red => BitArray::filled(len),
        Color::Blue => BitArray::new(len),
    };
    Coloring::from_red(width, red, false)
}

/// Uniform random coloring; see the module docs for the exact bit layout.
pub fn random_coloring(width: u32, seed: u64) -> Result<Coloring> {
    random_coloring_with_mode(width, seed, false)
}

/// As [`random_coloring`], optionally in hat mode. The generator output is
/// consumed identically; only the two endpoints are overridden.
pub fn random_coloring_with_mode(width: u32, seed: u64, hat: bool) -> Result<Coloring> {
    if width > MAX_RANDOM_WIDTH {
        return Err(Error::resource(
            format!("random colorings are capped at N = {MAX_RANDOM_WIDTH}, got {width}"),
            0,
        ));
    }
    let len = 1usize << width;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
    Coloring::from_red(width, BitArray::from_words(words, len), hat)
}

/// Parses a color word produced by [`Coloring::render`].
pub fn from_string(width: u32, word: &str, hat: bool) -> Result<Coloring> {
    if width > MAX_COLORING_WIDTH {
        return Err(Error::parse(format!("width {width} too large")));
    }
    let len = 1usize << width;
    let chars: Vec<char> = word.chars().collect();
    if chars.len() != len {
        return Err(Error::parse(format!(
            "color word has length {}, expected {len}",
            chars.len()
        )));
    }
    if hat && width == 0 {
        return Err(Error::parse("hat mode needs a nonempty ground set"));
    }
    let top = len - 1;
    let mut red = BitArray::new(len);
    for (i, ch) in chars.into_iter().enumerate() {
        let endpoint = hat && (i == 0 || i == top);
        match (ch, endpoint) {
            ('*', true) => {}
            ('R', false) => red.set(i, true),
            ('B', false) => {}
            (c, true) => {
                return Err(Error::parse(format!(
                    "position {i} must be the placeholder '*' in hat mode, found {c:?}"
                )))
            }
            (c, false) => {
                return Err(Error::parse(format!(
                    "invalid color character {c:?} at position {i}"
                )))
            }
        }
    }
    Coloring::from_red(width, red, hat)
}

/// Restricts `c` to an interval, re-indexing the free coordinates in
/// increasing ground-element order.
///
/// A hat coloring restricts to a hat coloring only on the full interval;
/// any other interval that reaches a both-colored endpoint is rejected,
/// since the result could not represent a single both-colored element.
pub fn restrict_to_interval(c: &Coloring, interval: &Interval) -> Result<Coloring> {
    if interval.width() != c.width() {
        return Err(Error::arg(format!(
            "interval over [{}] does not fit a coloring of Q_{}",
            interval.width(),
            c.width()
        )));
    }
    let top = full_mask(c.width());
    let full = interval.lo().bits() == 0 && interval.hi().bits() == top;
    if c.is_hat() && full {
        return Ok(c.clone());
    }
    if c.is_hat() && (interval.lo().bits() == 0 || interval.hi().bits() == top) {
        return Err(Error::arg(
            "restricting a hat coloring to a partial interval touching an endpoint",
        ));
    }
    let d = interval.dimension();
    let len = 1usize << d;
    let mut red = BitArray::new(len);
    for local in 0..len as u64 {
        red.set(local as usize, c.is_red(interval.embed(local).bits()));
    }
    Coloring::from_red(d, red, false)
}

/// Color assignment under construction. In hat mode the endpoints are
/// assigned both colors from the start.
#[derive(Clone, Debug)]
pub struct PartialColoring {
    width: u32,
    assigned: BitArray,
    red: BitArray,
    hat: bool,
}

impl PartialColoring {
    pub fn new(width: u32, hat: bool) -> Result<Self> {
        check_width(width)?;
        if hat && width == 0 {
            return Err(Error::domain("hat mode needs a nonempty ground set"));
        }
        let len = 1usize << width;
        let mut p = PartialColoring {
            width,
            assigned: BitArray::new(len),
            red: BitArray::new(len),
            hat,
        };
        if hat {
            for i in [0, len - 1] {
                p.assigned.set(i, true);
                p.red.set(i, true);
            }
        }
        Ok(p)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_hat(&self) -> bool {
        self.hat
    }

    fn is_endpoint(&self, bits: u64) -> bool {
        self.hat && (bits == 0 || bits == full_mask(self.width))
    }

    pub fn is_assigned(&self, bits: u64) -> bool {
        self.assigned.get(bits as usize)
    }

    pub fn get(&self, bits: u64) -> Option<Color> {
        if !self.is_assigned(bits) || self.is_endpoint(bits) {
            return None;
        }
        Some(if self.red.get(bits as usize) {
            Color::Red
        } else {
            Color::Blue
        })
    }

    pub fn assign(&mut self, bits: u64, color: Color) {
        debug_assert!(!self.is_endpoint(bits));
        self.assigned.set(bits as usize, true);
        self.red.set(bits as usize, color == Color::Red);
    }

    pub fn unassign(&mut self, bits: u64) {
        debug_assert!(!self.is_endpoint(bits));
        self.assigned.set(bits as usize, false);
        self.red.set(bits as usize, false);
    }

    /// Converts to a total coloring; fails if any set is unassigned.
    pub fn to_coloring(&self) -> Result<Coloring> {
        if self.assigned.count_ones() != self.assigned.len() {
            return Err(Error::arg("partial coloring is incomplete"));
        }
        let mut red = self.red.clone();
        if self.hat {
            red.set(0, false);
            red.set(red.len() - 1, false);
        }
        Coloring::from_red(self.width, red, self.hat)
    }
}

impl ColorView for PartialColoring {
    fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    fn has_color(&self, bits: u64, color: Color) -> bool {
        let i = bits as usize;
        if !self.assigned.get(i) {
            return false;
        }
        if self.is_endpoint(bits) {
            return true;
        }
        self.red.get(i) == (color == Color::Red)
    }
}
