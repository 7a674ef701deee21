//! Toroidal trail world: grid, ant pose, sensing, movement, and consumption.
//!
//! Coordinates grow East (`x`) and South (`y`) from the top-left corner. Every
//! move wraps around both axes.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Trail document shipped with the crate: 89 cells on a 32x32 torus.
pub const BUNDLED_TRAIL: &str = include_str!("../data/muir89.trail");

/// Last cell of the easy part of the bundled trail; the first hard gap follows it.
pub const BUNDLED_HARD_GAP_CELL: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    pub fn turn_right(self) -> Heading {
        match self {
            Heading::North => Heading::East,
            Heading::East => Heading::South,
            Heading::South => Heading::West,
            Heading::West => Heading::North,
        }
    }

    pub fn turn_left(self) -> Heading {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    /// Unit step as `(dx, dy)` with y growing southward.
    pub fn delta(self) -> (i64, i64) {
        match self {
            Heading::North => (0, -1),
            Heading::East => (1, 0),
            Heading::South => (0, 1),
            Heading::West => (-1, 0),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Heading::North => 'N',
            Heading::East => 'E',
            Heading::South => 'S',
            Heading::West => 'W',
        }
    }
}

impl FromStr for Heading {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "N" => Ok(Heading::North),
            "E" => Ok(Heading::East),
            "S" => Ok(Heading::South),
            "W" => Ok(Heading::West),
            other => Err(format!("unknown heading `{other}` (expected N, E, S or W)")),
        }
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pose {
    pub x: usize,
    pub y: usize,
    pub heading: Heading,
}

impl Pose {
    pub fn new(x: usize, y: usize, heading: Heading) -> Self {
        Pose { x, y, heading }
    }
}

/// Black/white cell states packed one bit per cell, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct CellBits {
    width: usize,
    words: Vec<u64>,
}

impl CellBits {
    fn new(width: usize, height: usize) -> Self {
        CellBits {
            width,
            words: vec![0; (width * height).div_ceil(64)],
        }
    }

    #[inline]
    fn get(&self, x: usize, y: usize) -> bool {
        let i = y * self.width + x;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, x: usize, y: usize, black: bool) {
        let i = y * self.width + x;
        if black {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// A rectangular toroidal world with an ordered trail of black cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrailGrid {
    width: usize,
    height: usize,
    cells: CellBits,
    trail_order: Vec<(usize, usize)>,
    start: Pose,
}

impl TrailGrid {
    /// Parses a trail document.
    ///
    /// The first non-comment line is `width height start_x start_y heading`;
    /// each following non-comment line is one `x y` trail cell, in trail order.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn load_trail(document: &str) -> Result<TrailGrid> {
        let mut lines = document
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(Error::TrailParse {
            line: 1,
            message: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::TrailParse {
                line: header_line,
                message: format!("header needs 5 fields, found {}", fields.len()),
            });
        }
        let num = |s: &str, what: &str| -> Result<i64> {
            s.parse::<i64>().map_err(|_| Error::TrailParse {
                line: header_line,
                message: format!("{what} `{s}` is not an integer"),
            })
        };
        let width = num(fields[0], "width")?;
        let height = num(fields[1], "height")?;
        if width <= 0 || height <= 0 {
            return Err(Error::TrailParse {
                line: header_line,
                message: "grid dimensions must be positive".into(),
            });
        }
        let (width, height) = (width as usize, height as usize);
        let check = |line: usize, x: i64, y: i64| -> Result<(usize, usize)> {
            if x < 0 || y < 0 || x as usize >= width || y as usize >= height {
                Err(Error::TrailBounds {
                    line,
                    x,
                    y,
                    width,
                    height,
                })
            } else {
                Ok((x as usize, y as usize))
            }
        };
        let (sx, sy) = check(
            header_line,
            num(fields[2], "start_x")?,
            num(fields[3], "start_y")?,
        )?;
        let heading: Heading = fields[4].parse().map_err(|message| Error::TrailParse {
            line: header_line,
            message,
        })?;

        let mut cells = CellBits::new(width, height);
        let mut trail_order = Vec::new();
        let mut seen = HashSet::new();
        for (line, text) in lines {
            let parts: Vec<&str> = text.split_whitespace().collect();
            let coords: Option<(i64, i64)> = match parts.as_slice() {
                [x, y] => x.parse().ok().zip(y.parse().ok()),
                _ => None,
            };
            let (x, y) = coords.ok_or_else(|| Error::TrailParse {
                line,
                message: format!("expected `x y`, found `{text}`"),
            })?;
            let (x, y) = check(line, x, y)?;
            if !seen.insert((x, y)) {
                return Err(Error::TrailDuplicate { line, x, y });
            }
            cells.set(x, y, true);
            trail_order.push((x, y));
        }

        Ok(TrailGrid {
            width,
            height,
            cells,
            trail_order,
            start: Pose::new(sx, sy, heading),
        })
    }

    /// The 89-cell trail shipped with the crate.
    pub fn bundled() -> TrailGrid {
        TrailGrid::load_trail(BUNDLED_TRAIL).expect("bundled trail is well-formed")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Pose {
        self.start
    }

    /// Trail cells in trail order (cell #1 first).
    pub fn trail_order(&self) -> &[(usize, usize)] {
        &self.trail_order
    }

    pub fn total_cells(&self) -> usize {
        self.trail_order.len()
    }

    pub fn is_black(&self, x: usize, y: usize) -> bool {
        self.cells.get(x, y)
    }

    pub fn black_count(&self) -> usize {
        self.cells.count()
    }

    /// Advances one cell along the heading, wrapping at the edges.
    #[inline]
    pub fn step_forward(&self, pose: Pose) -> Pose {
        let (x, y) = self.ahead(pose);
        Pose { x, y, ..pose }
    }

    /// Coordinates of the cell directly in front of the ant.
    #[inline]
    pub fn ahead(&self, pose: Pose) -> (usize, usize) {
        match pose.heading {
            Heading::North => (pose.x, (pose.y + self.height - 1) % self.height),
            Heading::South => (pose.x, (pose.y + 1) % self.height),
            Heading::East => ((pose.x + 1) % self.width, pose.y),
            Heading::West => ((pose.x + self.width - 1) % self.width, pose.y),
        }
    }

    /// 1 when the cell in front of the ant is black, else 0.
    #[inline]
    pub fn sense_ahead(&self, pose: Pose) -> u8 {
        let (x, y) = self.ahead(pose);
        self.cells.get(x, y) as u8
    }

    /// Turns a black cell white. Returns whether anything was consumed.
    #[inline]
    pub fn consume(&mut self, x: usize, y: usize) -> bool {
        if self.cells.get(x, y) {
            self.cells.set(x, y, false);
            true
        } else {
            false
        }
    }

    /// Serializes back to the trail-document format.
    pub fn to_document(&self) -> String {
        let mut out = format!(
            "{} {} {} {} {}\n",
            self.width, self.height, self.start.x, self.start.y, self.start.heading
        );
        for (x, y) in &self.trail_order {
            out.push_str(&format!("{x} {y}\n"));
        }
        out
    }
}
