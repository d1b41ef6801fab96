//! Institution sector taxonomy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the four institution classes used to label network nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    BusinessEnterprise,
    PrivateNotForProfit,
    Government,
    HigherEducation,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::BusinessEnterprise,
        Category::PrivateNotForProfit,
        Category::Government,
        Category::HigherEducation,
    ];

    /// Canonical token used in mapping files and CSV output.
    pub fn token(self) -> &'static str {
        match self {
            Category::BusinessEnterprise => "BusinessEnterprise",
            Category::PrivateNotForProfit => "PrivateNotForProfit",
            Category::Government => "Government",
            Category::HigherEducation => "HigherEducation",
        }
    }

    /// Display colour as `(r, g, b)`.
    ///
    /// Business is red, government green, higher education blue and
    /// private not-for-profit purple.
    pub fn color(self) -> (u8, u8, u8) {
        match self {
            Category::BusinessEnterprise => (255, 0, 0),
            Category::Government => (0, 128, 0),
            Category::HigherEducation => (0, 0, 255),
            Category::PrivateNotForProfit => (128, 0, 128),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Category::BusinessEnterprise => 0,
            Category::PrivateNotForProfit => 1,
            Category::Government => 2,
            Category::HigherEducation => 3,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown category `{0}`")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    /// Only the exact canonical tokens are accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.token() == s)
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}
