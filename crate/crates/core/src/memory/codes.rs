//! Fixed binary codes for symbolic attribute values.
//!
//! Directions are chosen so that Right and Left differ by swapping the two
//! low bits of the action nibble while Straight is symmetric under that swap.

use std::fmt;
use std::str::FromStr;

use super::schema::Nibble;
use crate::error::Error;

pub const ACTION_FIELD: &str = "action";

const ACTIONS: [(&str, u8); 5] = [
    ("Right", 0b0001),
    ("Left", 0b0010),
    ("Straight", 0b0011),
    ("Fight", 0b0100),
    ("Flee", 0b0101),
];

/// Action tag carried by an engram, e.g. the direction taken at a trail
/// intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action(u8);

impl Action {
    pub const RIGHT: Action = Action(0b0001);
    pub const LEFT: Action = Action(0b0010);
    pub const STRAIGHT: Action = Action(0b0011);

    pub fn code(self) -> Nibble {
        Nibble::new(self.0).expect("action codes are 4-bit")
    }

    pub fn from_code(code: Nibble) -> Option<Action> {
        ACTIONS
            .iter()
            .find(|(_, c)| *c == code.value())
            .map(|&(_, c)| Action(c))
    }

    pub fn name(self) -> &'static str {
        ACTIONS
            .iter()
            .find(|(_, c)| *c == self.0)
            .map(|(n, _)| *n)
            .expect("Action is only built from the table")
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ACTIONS
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(s))
            .map(|&(_, c)| Action(c))
            .ok_or_else(|| Error::UnknownAction(s.to_string()))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Arithmetic operator as stored in the operator attribute of a fact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Plus,
    Minus,
    Times,
    Divide,
}

impl Operator {
    pub fn code(self) -> Nibble {
        let v = match self {
            Operator::Plus => 1,
            Operator::Minus => 2,
            Operator::Times => 3,
            Operator::Divide => 4,
        };
        Nibble::new(v).unwrap()
    }

    pub fn from_code(code: Nibble) -> Option<Operator> {
        match code.value() {
            1 => Some(Operator::Plus),
            2 => Some(Operator::Minus),
            3 => Some(Operator::Times),
            4 => Some(Operator::Divide),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Plus => "+",
            Operator::Minus => "-",
            Operator::Times => "*",
            Operator::Divide => "/",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Plus => "plus",
            Operator::Minus => "minus",
            Operator::Times => "times",
            Operator::Divide => "divide",
        }
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" => Ok(Operator::Plus),
            "-" | "minus" => Ok(Operator::Minus),
            "*" | "x" | "times" => Ok(Operator::Times),
            "/" | "divide" => Ok(Operator::Divide),
            other => Err(Error::UnknownOperator(other.to_string())),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
