use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    R,
    G,
    B,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::R, Color::G, Color::B];

    pub fn index(self) -> usize {
        match self {
            Color::R => 0,
            Color::G => 1,
            Color::B => 2,
        }
    }

    /// The two other colours, in r, g, b order.
    pub fn others(self) -> (Color, Color) {
        match self {
            Color::R => (Color::G, Color::B),
            Color::G => (Color::R, Color::B),
            Color::B => (Color::R, Color::G),
        }
    }

    /// The colour distinct from both arguments.
    pub fn third(a: Color, b: Color) -> Color {
        assert_ne!(a, b, "third colour needs two distinct colours");
        Color::ALL.into_iter().find(|&c| c != a && c != b).unwrap()
    }

    /// Axis whose extreme planes are boundaries of this colour.
    pub fn axis(self) -> Axis {
        match self {
            Color::R => Axis::X,
            Color::G => Axis::Z,
            Color::B => Axis::Y,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::R => 'r',
            Color::G => 'g',
            Color::B => 'b',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Color {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "r" | "red" => Ok(Color::R),
            "g" | "green" => Ok(Color::G),
            "b" | "blue" => Ok(Color::B),
            other => Err(Error::Parse(format!("unknown colour {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        [Axis::X, Axis::Y, Axis::Z][i]
    }

    /// Colour of the boundaries perpendicular to this axis.
    pub fn color(self) -> Color {
        match self {
            Axis::X => Color::R,
            Axis::Y => Color::B,
            Axis::Z => Color::G,
        }
    }
}

/// Unordered pair of distinct colours, labelling a face type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorPair {
    Rg,
    Gb,
    Rb,
}

impl ColorPair {
    pub fn new(a: Color, b: Color) -> ColorPair {
        match (a.min(b), a.max(b)) {
            (Color::R, Color::G) => ColorPair::Rg,
            (Color::G, Color::B) => ColorPair::Gb,
            (Color::R, Color::B) => ColorPair::Rb,
            _ => panic!("colour pair needs two distinct colours"),
        }
    }

    /// The colour whose code carries Z checks on faces of this pair.
    pub fn complement(self) -> Color {
        match self {
            ColorPair::Rg => Color::B,
            ColorPair::Gb => Color::R,
            ColorPair::Rb => Color::G,
        }
    }

    pub fn of_code(c: Color) -> ColorPair {
        let (a, b) = c.others();
        ColorPair::new(a, b)
    }

    pub fn contains(self, c: Color) -> bool {
        self.complement() != c
    }
}

impl fmt::Display for ColorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColorPair::Rg => "rg",
            ColorPair::Gb => "gb",
            ColorPair::Rb => "rb",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_and_complements() {
        for c in Color::ALL {
            let p = ColorPair::of_code(c);
            assert_eq!(p.complement(), c);
            assert!(!p.contains(c));
            assert_eq!(c.axis().color(), c);
        }
        assert_eq!(Color::third(Color::R, Color::B), Color::G);
        assert_eq!("B".parse::<Color>().unwrap(), Color::B);
    }
}
