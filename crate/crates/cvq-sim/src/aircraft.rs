//! Shared domain identifiers.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Index of an aircraft within one day's schedule (assignment order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AircraftId(pub u32);

impl fmt::Display for AircraftId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Index into a schedule's airline name table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AirlineId(pub u16);

/// Aircraft weight category. Passenger counts come from the fleet table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum WeightClass {
    Heavy,
    Large,
    Small,
}

impl WeightClass {
    pub const ALL: [WeightClass; 3] = [WeightClass::Heavy, WeightClass::Large, WeightClass::Small];

    pub fn code(self) -> char {
        match self {
            WeightClass::Heavy => 'H',
            WeightClass::Large => 'L',
            WeightClass::Small => 'S',
        }
    }

    pub fn from_code(c: char) -> Option<WeightClass> {
        match c.to_ascii_uppercase() {
            'H' => Some(WeightClass::Heavy),
            'L' => Some(WeightClass::Large),
            'S' => Some(WeightClass::Small),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightClass::Heavy => "heavy",
            WeightClass::Large => "large",
            WeightClass::Small => "small",
        }
    }
}

impl fmt::Display for WeightClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}
